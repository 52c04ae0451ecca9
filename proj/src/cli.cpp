#include "atb/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "atb/config.hpp"
#include "atb/dse.hpp"
#include "atb/movement_sim.hpp"
#include "atb/perf_model.hpp"
#include "atb/report.hpp"
#include "atb/sched_sim.hpp"

namespace atb {

namespace {

struct CommonFlags {
    std::string config;
    std::string precision;
    std::string problem;
    std::string tile;
    std::string format = "text";
    std::string eff_source;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config, "JSON run configuration");
    app->add_option("--precision", f.precision, "precision preset (config1, config2, ...)");
    app->add_option("--problem", f.problem, "problem size MxKxN");
    app->add_option("--tile", f.tile, "L1 tile T_MA,T_MC,T_K,T_N");
    app->add_option("--eff-source", f.eff_source,
                    "eff_micro source: calibration_table, closed_form or simulator");
}

RunConfig resolve(const CommonFlags& f) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_config_file(f.config);
    try {
        if (!f.precision.empty()) {
            cfg.precision = precision_preset(f.precision);
            cfg.precision_name = f.precision;
        }
        if (!f.problem.empty()) cfg.problem = parse_problem(f.problem);
        if (!f.tile.empty()) cfg.tile = parse_tile(f.tile);
        if (!f.eff_source.empty()) cfg.search.eff.source = parse_eff_micro_source(f.eff_source);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.search.eff.base = cfg.microkernel;
    return cfg;
}

const ProblemSpec& need_problem(const RunConfig& cfg, const char* cmd) {
    if (!cfg.problem) {
        throw ConfigError(std::string(cmd) + " needs a problem (--problem or config key 'problem')");
    }
    return *cfg.problem;
}

const TileConfig& need_tile(const RunConfig& cfg, const char* cmd) {
    if (!cfg.tile) throw ConfigError(std::string(cmd) + " needs a tile (--tile or config key 'tile')");
    try {
        cfg.tile->validate(kMicrotile);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return *cfg.tile;
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (format == a) return;
    }
    throw ConfigError("unsupported --format '" + format + "' for this command");
}

nlohmann::ordered_json perf_json(const PerfEstimate& e) {
    nlohmann::ordered_json j;
    j["problem"] = {{"m", e.problem.m}, {"k", e.problem.k}, {"n", e.problem.n}};
    j["tile"] = {{"t_ma", e.tile.t_ma}, {"t_mc", e.tile.t_mc}, {"t_k", e.tile.t_k},
                 {"t_n", e.tile.t_n}, {"rho", e.tile.rho()}};
    j["buffer_bytes"] = e.buffer_bytes;
    j["buffer_bytes_rho1"] = e.buffer_bytes_symmetric;
    j["feasible"] = e.feasible;
    j["ai_array"] = to_string(e.ai_array);
    j["memory_bound_tflops"] = to_tflops(e.memory_bound);
    j["eff_micro"] = to_string(e.eff_micro);
    j["eff_core"] = to_string(e.eff_core);
    j["compute_bound_tflops"] = to_tflops(e.compute_bound);
    j["perf_array_tflops"] = to_tflops(e.perf_array);
    j["bound_kind"] = std::string(to_string(e.bound_kind));
    return j;
}

int cmd_eval(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    check_format(f.format, {"text", "csv", "json", "markdown"});
    const RunConfig cfg = resolve(f);
    const auto& problem = need_problem(cfg, "eval");
    const auto& tile = need_tile(cfg, "eval");
    const auto e = perf_array(tile, problem, cfg.precision, cfg.arch,
                              eff_micro_for(tile, cfg.search.eff));
    if (f.format == "csv") {
        write_perf_csv_header(out);
        write_perf_csv_row(out, e);
    } else if (f.format == "json") {
        out << perf_json(e).dump(2) << '\n';
    } else if (f.format == "markdown") {
        write_comparison_markdown(out, {e});
    } else {
        write_perf_text(out, e);
    }
    if (!e.feasible) {
        err << "infeasible: tile " << to_string(tile) << " needs " << e.buffer_bytes
            << " B of L1 but capacity is " << cfg.arch.l1_capacity << " B\n";
        return exit_code::infeasible;
    }
    return exit_code::ok;
}

struct SearchFlags {
    std::string rho;
    std::string emit;
    std::size_t top = 10;
    bool serial = false;
};

int cmd_search(const CommonFlags& f, const SearchFlags& s, std::ostream& out, std::ostream& err) {
    check_format(f.format, {"text", "csv", "json"});
    RunConfig cfg = resolve(f);
    const auto& problem = need_problem(cfg, "search");
    SearchSpace space = cfg.search;
    space.divisibility_problem = problem;
    if (!s.rho.empty()) {
        try {
            space.rho_candidates = parse_int_list(s.rho);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (!s.emit.empty() && s.emit != "table2") {
        throw ConfigError("unknown --emit '" + s.emit + "' (expected table2)");
    }
    try {
        space.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto configs = s.serial ? enumerate_feasible_serial(space, cfg.precision, cfg.arch)
                                  : enumerate_feasible(space, cfg.precision, cfg.arch);
    if (configs.empty()) {
        err << "no feasible tile: nothing on the search grid fits " << cfg.arch.l1_capacity
            << " B of L1 while dividing problem " << to_string(problem) << '\n';
        return exit_code::infeasible;
    }
    const auto ranked = s.serial ? rank_serial(configs, problem, cfg.precision, cfg.arch, space.eff)
                                 : rank(configs, problem, cfg.precision, cfg.arch, space.eff);
    if (s.emit == "table2") {
        std::vector<PerfEstimate> rows;
        for (std::size_t i = 0; i < std::min(s.top, ranked.ranked.size()); ++i) {
            rows.push_back(ranked.ranked[i].perf);
        }
        write_comparison_markdown(out, rows);
    } else if (f.format == "csv") {
        write_ranked_csv(out, ranked);
    } else if (f.format == "json") {
        nlohmann::ordered_json j;
        j["evaluated"] = ranked.ranked.size();
        auto& top = j["ranked"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < std::min(s.top, ranked.ranked.size()); ++i) {
            top.push_back(perf_json(ranked.ranked[i].perf));
        }
        if (ranked.best_overall) j["best_overall"] = perf_json(ranked.ranked[*ranked.best_overall].perf);
        if (ranked.best_symmetric) {
            j["best_symmetric"] = perf_json(ranked.ranked[*ranked.best_symmetric].perf);
        }
        if (const auto g = ranked.atb_gain()) j["atb_gain"] = *g;
        out << j.dump(2) << '\n';
    } else {
        write_ranked_text(out, ranked, s.top);
    }
    return exit_code::ok;
}

struct SimFlags {
    bool verify = false;
    std::size_t count = 0;
    std::uint64_t seed = 1;
    std::string dump;
    std::optional<bool> share_inputs;
    std::optional<bool> double_buffer;
    std::optional<bool> overlap_clusters;
};

std::ofstream open_dump(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write dump file '" + path + "'");
    return os;
}

int cmd_movement(const CommonFlags& f, const SimFlags& s, std::ostream& out, std::ostream& err) {
    check_format(f.format, {"text", "csv"});
    const RunConfig cfg = resolve(f);
    if (s.count > 0) {
        std::mt19937_64 rng(s.seed);
        std::size_t failures = 0;
        std::optional<std::string> first;
        for (std::size_t i = 0; i < s.count; ++i) {
            const auto c = random_movement_case(rng);
            MovementOptions mo;
            mo.check_capacity = true;
            const auto trace = simulate_movement(c.problem, c.tile, c.prec, c.arch, mo);
            if (auto d = verify_movement(c, trace)) {
                ++failures;
                if (!first) {
                    first = "problem " + to_string(c.problem) + " tile " + to_string(c.tile) + ": " + *d;
                }
            }
        }
        out << "movement verify: " << s.count << " random configurations, " << failures
            << " discrepancies\n";
        if (first) out << "first discrepancy: " << *first << '\n';
        out << (failures == 0 ? "PASS" : "FAIL") << '\n';
        return failures == 0 ? exit_code::ok : exit_code::verification_failed;
    }

    const MovementCase c{need_problem(cfg, "simulate movement"), need_tile(cfg, "simulate movement"),
                         cfg.precision, cfg.arch};
    MovementOptions mo;
    mo.check_capacity = true;
    MovementTrace trace;
    try {
        trace = simulate_movement(c.problem, c.tile, c.prec, c.arch, mo);
    } catch (const BufferOverflow& e) {
        err << e.what() << '\n';
        return exit_code::infeasible;
    }
    if (!s.dump.empty()) {
        auto os = open_dump(s.dump);
        write_trace_csv(os, trace);
    }
    if (f.format == "csv") {
        write_trace_csv(out, trace);
    } else {
        for (auto b : {Boundary::offchip_l2, Boundary::l2_l1}) {
            const auto& bytes = trace.at(b);
            out << to_string(b) << " bytes A " << to_string(bytes.a) << ", B " << to_string(bytes.b)
                << ", C " << to_string(bytes.c) << "; intensity "
                << format_sig3(to_double(measured_ai(trace, b))) << " op/B ("
                << to_string(measured_ai(trace, b)) << ")\n";
        }
        out << "flops " << trace.flops << '\n'
            << "peak L1 occupancy " << to_string(trace.peak_l1_occupancy) << " B (A "
            << to_string(trace.peak_occupancy_per_operand[0]) << ", B "
            << to_string(trace.peak_occupancy_per_operand[1]) << ", C "
            << to_string(trace.peak_occupancy_per_operand[2]) << "), footprint "
            << buffer_footprint(c.tile, c.prec, c.arch) << " B\n"
            << "A evictions " << trace.evictions_a << '\n';
    }
    if (s.verify) {
        const auto d = verify_movement(c, trace);
        out << (d ? "FAIL: " + *d : std::string("PASS")) << '\n';
        if (d) return exit_code::verification_failed;
    }
    return exit_code::ok;
}

DagOptions dag_options(const RunConfig& cfg, const SimFlags& s) {
    DagOptions o = cfg.schedule;
    if (s.share_inputs) o.share_inputs = *s.share_inputs;
    if (s.double_buffer) o.double_buffer = *s.double_buffer;
    if (s.overlap_clusters) o.overlap_clusters = *s.overlap_clusters;
    return o;
}

int cmd_schedule(const CommonFlags& f, const SimFlags& s, std::ostream& out, std::ostream&) {
    check_format(f.format, {"text", "csv"});
    const RunConfig cfg = resolve(f);
    if (s.count > 0) {
        std::mt19937_64 rng(s.seed);
        std::size_t failures = 0;
        std::optional<std::string> first;
        for (std::size_t i = 0; i < s.count; ++i) {
            const auto spec = random_microkernel(rng);
            for (int mode = 0; mode < 8; ++mode) {
                const DagOptions o{(mode & 1) != 0, (mode & 2) != 0, (mode & 4) != 0};
                const auto dag = build_microkernel_dag(spec, o);
                const auto result = schedule(dag, slots_of(spec));
                auto d = check_schedule(dag, slots_of(spec), result);
                if (!d) d = check_bounds(spec, o, result);
                if (d) {
                    ++failures;
                    if (!first) first = "spec " + std::to_string(i) + " mode " + std::to_string(mode) + ": " + *d;
                }
            }
        }
        out << "schedule verify: " << s.count << " random specs x 8 DAG variants, " << failures
            << " violations\n";
        if (first) out << "first violation: " << *first << '\n';
        out << (failures == 0 ? "PASS" : "FAIL") << '\n';
        return failures == 0 ? exit_code::ok : exit_code::verification_failed;
    }

    MicrokernelSpec spec = cfg.microkernel;
    if (cfg.tile) spec = microkernel_for_tile(need_tile(cfg, "simulate schedule"), cfg.microkernel);
    const DagOptions opts = dag_options(cfg, s);
    const auto dag = build_microkernel_dag(spec, opts);
    const auto slots = slots_of(spec);
    const auto result = schedule(dag, slots);
    if (!s.dump.empty()) {
        auto os = open_dump(s.dump);
        write_schedule_csv(os, dag, result);
    }
    if (f.format == "csv") {
        write_schedule_csv(out, dag, result);
    } else {
        const auto m = measure(result);
        out << "instructions          " << dag.size() << '\n'
            << "vmacs                 " << result.n_vmacs << '\n'
            << "first vmac cycle      " << result.phase_times.prolog << '\n'
            << "steady span           " << result.phase_times.steady << '\n'
            << "epilog span           " << result.phase_times.epilog << '\n'
            << "total cycles          " << result.total_cycles << '\n'
            << "eff_micro (simulated) " << format_sig3(to_double(m.eff_micro_sim)) << " ("
            << to_string(m.eff_micro_sim) << ")\n"
            << "ii observed           " << (m.ii_observed ? to_string(*m.ii_observed) : "n/a")
            << '\n'
            << "-- closed-form bounds (matched r_load "
            << to_string(matched_spec(spec, opts).r_load) << ") --\n";
        write_bounds_text(out, latency_bounds(matched_spec(spec, opts)));
    }
    if (s.verify) {
        auto d = check_schedule(dag, slots, result);
        if (!d) d = check_bounds(spec, opts, result);
        out << (d ? "FAIL: " + *d : std::string("PASS")) << '\n';
        if (d) return exit_code::verification_failed;
    }
    return exit_code::ok;
}

struct SweepFlags {
    std::string tk = "8,16,32,64";
    std::string rho = "1,2,4,8";
    std::string anchor = "t_mc";
    std::int64_t t_m = 128;
    std::int64_t t_n = 128;
};

int cmd_sweep(const CommonFlags& f, const SweepFlags& s, std::ostream& out) {
    check_format(f.format, {"text", "csv", "markdown"});
    const RunConfig cfg = resolve(f);
    SweepFixed fixed;
    if (s.anchor == "t_mc") {
        fixed.anchor = SweepAnchor::t_mc;
    } else if (s.anchor == "t_ma") {
        fixed.anchor = SweepAnchor::t_ma;
    } else {
        throw ConfigError("--anchor must be t_mc or t_ma");
    }
    fixed.t_m = s.t_m;
    fixed.t_n = s.t_n;
    std::vector<std::int64_t> tks, rhos;
    try {
        tks = parse_int_list(s.tk);
        rhos = parse_int_list(s.rho);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto rows = sweep_grid(tks, rhos, fixed, cfg.precision, cfg.arch, cfg.search.eff);
    if (f.format == "csv") {
        write_sweep_csv(out, rows);
    } else {
        write_sweep_markdown(out, rows);
    }
    return exit_code::ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Asymmetric tile buffering models, simulators and tile search", "atb"};
    app.require_subcommand(1);

    CommonFlags eval_f, search_f, move_f, sched_f, sweep_f;
    SearchFlags search_s;
    SimFlags move_s, sched_s;
    SweepFlags sweep_s;

    auto* eval = app.add_subcommand("eval", "evaluate one tile with the performance model");
    add_common(eval, eval_f);
    eval->add_option("--format", eval_f.format, "text, csv, json or markdown");

    auto* search = app.add_subcommand("search", "enumerate, evaluate and rank feasible tiles");
    add_common(search, search_f);
    search->add_option("--format", search_f.format, "text, csv or json");
    search->add_option("--rho", search_s.rho, "comma-separated rho candidates");
    search->add_option("--emit", search_s.emit, "table2: markdown in the comparison-table layout");
    search->add_option("--top", search_s.top, "rows to print");
    search->add_flag("--serial", search_s.serial, "use the serial reference implementation");

    auto* simulate = app.add_subcommand("simulate", "run a simulator oracle");
    simulate->require_subcommand(1);
    auto add_sim = [](CLI::App* sub, CommonFlags& f, SimFlags& s) {
        add_common(sub, f);
        sub->add_option("--format", f.format, "text or csv");
        sub->add_flag("--verify", s.verify, "compare against the closed forms");
        sub->add_option("--count", s.count, "verify this many random configurations");
        sub->add_option("--seed", s.seed, "seed for --count");
        sub->add_option("--dump", s.dump, "write a CSV dump to this file");
    };
    auto* movement = simulate->add_subcommand("movement", "tiled loop nest byte accounting");
    add_sim(movement, move_f, move_s);
    auto* sched = simulate->add_subcommand("schedule", "microkernel list schedule");
    add_sim(sched, sched_f, sched_s);
    sched->add_option("--share-inputs", sched_s.share_inputs, "share operands across a cluster");
    sched->add_option("--double-buffer", sched_s.double_buffer, "two operand register sets");
    sched->add_option("--overlap-clusters", sched_s.overlap_clusters, "overlap cluster boundaries");

    auto* sweep = app.add_subcommand("sweep", "eff_micro / eff_core grid over T_K and rho");
    add_common(sweep, sweep_f);
    sweep->add_option("--format", sweep_f.format, "text, markdown or csv");
    sweep->add_option("--tk", sweep_s.tk, "comma-separated T_K values");
    sweep->add_option("--rho", sweep_s.rho, "comma-separated rho values");
    sweep->add_option("--anchor", sweep_s.anchor, "hold t_mc or t_ma fixed while rho varies");
    sweep->add_option("--t-m", sweep_s.t_m, "value of the fixed M extent");
    sweep->add_option("--t-n", sweep_s.t_n, "T_N");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::config_error;
    }

    try {
        if (eval->parsed()) return cmd_eval(eval_f, out, err);
        if (search->parsed()) return cmd_search(search_f, search_s, out, err);
        if (movement->parsed()) return cmd_movement(move_f, move_s, out, err);
        if (sched->parsed()) return cmd_schedule(sched_f, sched_s, out, err);
        if (sweep->parsed()) return cmd_sweep(sweep_f, sweep_s, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::config_error;
    } catch (const BufferOverflow& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::infeasible;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::config_error;
    }
    return exit_code::config_error;
}

}  // namespace atb
