#include "atb/config.hpp"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace atb {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config key '" + path + "': " + what);
}

void only_keys(const json& obj, const std::string& path,
               std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::int64_t get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

double get_double(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

Rational get_rational(const json& v, const std::string& path) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
        if (v.is_number()) return rational_from_double(v.get<double>());
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path, "expected a number or a fraction string such as \"5/4\"");
}

template <typename T, typename F>
void set_if(const json& obj, std::string_view key, const std::string& path, T& field, F getter) {
    if (const auto it = obj.find(std::string(key)); it != obj.end()) {
        field = getter(*it, join(path, key));
    }
}

ArchSpec parse_arch(const json& j, const std::string& path) {
    only_keys(j, path,
              {"l1_capacity", "n_rows", "n_cols", "n_cores", "peak_macs_per_cycle", "clock_hz",
               "offchip_bw", "switch_overhead_delta", "buffer_multiplier_a",
               "buffer_multiplier_b", "buffer_multiplier_c"});
    ArchSpec a;
    set_if(j, "l1_capacity", path, a.l1_capacity, get_int);
    set_if(j, "n_rows", path, a.n_rows, get_int);
    set_if(j, "n_cols", path, a.n_cols, get_int);
    a.n_cores = a.n_rows * a.n_cols;
    set_if(j, "n_cores", path, a.n_cores, get_int);
    set_if(j, "peak_macs_per_cycle", path, a.peak_macs_per_cycle, get_int);
    set_if(j, "clock_hz", path, a.clock_hz, get_double);
    set_if(j, "offchip_bw", path, a.offchip_bw, get_double);
    set_if(j, "switch_overhead_delta", path, a.switch_overhead_delta, get_int);
    set_if(j, "buffer_multiplier_a", path, a.buffer_multiplier_a, get_int);
    set_if(j, "buffer_multiplier_b", path, a.buffer_multiplier_b, get_int);
    set_if(j, "buffer_multiplier_c", path, a.buffer_multiplier_c, get_int);
    try {
        a.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return a;
}

void parse_precision(const json& j, const std::string& path, RunConfig& cfg) {
    if (j.is_string()) {
        try {
            cfg.precision = precision_preset(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
        cfg.precision_name = j.get<std::string>();
        return;
    }
    only_keys(j, path, {"byte_cost_a", "byte_cost_b", "byte_cost_c", "accum_label"});
    PrecisionSpec p;
    set_if(j, "byte_cost_a", path, p.byte_cost_a, get_rational);
    set_if(j, "byte_cost_b", path, p.byte_cost_b, get_rational);
    set_if(j, "byte_cost_c", path, p.byte_cost_c, get_rational);
    if (const auto it = j.find("accum_label"); it != j.end()) {
        if (!it->is_string()) fail(join(path, "accum_label"), "expected a string");
        p.accum_label = it->get<std::string>();
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    cfg.precision = p;
    cfg.precision_name = "custom";
}

ProblemSpec parse_problem_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return parse_problem(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    only_keys(j, path, {"m", "k", "n"});
    ProblemSpec p;
    set_if(j, "m", path, p.m, get_int);
    set_if(j, "k", path, p.k, get_int);
    set_if(j, "n", path, p.n, get_int);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return p;
}

TileConfig parse_tile_json(const json& j, const std::string& path) {
    TileConfig t;
    if (j.is_array()) {
        if (j.size() != 4) fail(path, "expected [t_ma, t_mc, t_k, t_n]");
        t = {get_int(j[0], path + "[0]"), get_int(j[1], path + "[1]"), get_int(j[2], path + "[2]"),
             get_int(j[3], path + "[3]")};
    } else {
        only_keys(j, path, {"t_ma", "t_mc", "t_k", "t_n", "rho"});
        set_if(j, "t_mc", path, t.t_mc, get_int);
        set_if(j, "t_k", path, t.t_k, get_int);
        set_if(j, "t_n", path, t.t_n, get_int);
        t.t_ma = t.t_mc;
        set_if(j, "t_ma", path, t.t_ma, get_int);
        if (const auto it = j.find("rho"); it != j.end()) {
            if (j.contains("t_ma")) fail(join(path, "rho"), "give either t_ma or rho");
            const auto rho = get_int(*it, join(path, "rho"));
            if (rho < 1 || t.t_mc % rho != 0) fail(join(path, "rho"), "rho must divide t_mc");
            t.t_ma = t.t_mc / rho;
        }
    }
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return t;
}

MicrokernelSpec parse_microkernel(const json& j, const std::string& path) {
    only_keys(j, path,
              {"pipeline_depth", "u_ld", "u_st", "u_vmac", "load_classes", "r_load", "chains",
               "n_accum", "n_clusters", "l_vmac_to_store", "l_store", "n_store", "accum_regs",
               "clamp_ii", "steady_load_latency", "steady_unaligned"});
    MicrokernelSpec m = bfp16_microkernel();
    set_if(j, "pipeline_depth", path, m.pipeline_depth, get_int);
    set_if(j, "u_ld", path, m.u_ld, get_int);
    set_if(j, "u_st", path, m.u_st, get_int);
    set_if(j, "u_vmac", path, m.u_vmac, get_int);
    set_if(j, "r_load", path, m.r_load, get_rational);
    set_if(j, "chains", path, m.chains, get_int);
    set_if(j, "n_accum", path, m.n_accum, get_int);
    set_if(j, "n_clusters", path, m.n_clusters, get_int);
    set_if(j, "l_vmac_to_store", path, m.l_vmac_to_store, get_int);
    set_if(j, "l_store", path, m.l_store, get_int);
    set_if(j, "n_store", path, m.n_store, get_int);
    set_if(j, "accum_regs", path, m.accum_regs, get_int);
    set_if(j, "clamp_ii", path, m.clamp_ii, get_bool);
    set_if(j, "steady_load_latency", path, m.steady_load_latency, get_int);
    set_if(j, "steady_unaligned", path, m.steady_unaligned, get_bool);
    if (const auto it = j.find("load_classes"); it != j.end()) {
        const auto lp = join(path, "load_classes");
        if (!it->is_array()) fail(lp, "expected an array");
        m.load_classes.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto ep = lp + "[" + std::to_string(i) + "]";
            const auto& e = (*it)[i];
            only_keys(e, ep, {"latency", "count", "unaligned"});
            LoadClass c;
            set_if(e, "latency", ep, c.latency, get_int);
            set_if(e, "count", ep, c.count, get_int);
            set_if(e, "unaligned", ep, c.unaligned, get_bool);
            m.load_classes.push_back(c);
        }
    }
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    return m;
}

DagOptions parse_schedule(const json& j, const std::string& path) {
    only_keys(j, path, {"share_inputs", "double_buffer", "overlap_clusters"});
    DagOptions o{true, true, false};
    set_if(j, "share_inputs", path, o.share_inputs, get_bool);
    set_if(j, "double_buffer", path, o.double_buffer, get_bool);
    set_if(j, "overlap_clusters", path, o.overlap_clusters, get_bool);
    return o;
}

void parse_search(const json& j, const std::string& path, SearchSpace& s) {
    only_keys(j, path,
              {"step", "max_t_mc", "max_t_k", "max_t_n", "rho_candidates", "eff_micro_source",
               "calibration"});
    set_if(j, "step", path, s.step, get_int);
    set_if(j, "max_t_mc", path, s.max_t_mc, get_int);
    set_if(j, "max_t_k", path, s.max_t_k, get_int);
    set_if(j, "max_t_n", path, s.max_t_n, get_int);
    if (const auto it = j.find("rho_candidates"); it != j.end()) {
        const auto rp = join(path, "rho_candidates");
        if (!it->is_array()) fail(rp, "expected an array of integers");
        s.rho_candidates.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            s.rho_candidates.push_back(get_int((*it)[i], rp + "[" + std::to_string(i) + "]"));
        }
    }
    if (const auto it = j.find("eff_micro_source"); it != j.end()) {
        const auto ep = join(path, "eff_micro_source");
        if (!it->is_string()) fail(ep, "expected a string");
        try {
            s.eff.source = parse_eff_micro_source(it->get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(ep, e.what());
        }
    }
    if (const auto it = j.find("calibration"); it != j.end()) {
        const auto cp = join(path, "calibration");
        if (!it->is_array() || it->empty()) fail(cp, "expected [[t_k, eff], ...]");
        s.eff.table.points.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto ep = cp + "[" + std::to_string(i) + "]";
            const auto& e = (*it)[i];
            if (!e.is_array() || e.size() != 2) fail(ep, "expected [t_k, eff]");
            s.eff.table.points.emplace_back(get_int(e[0], ep), get_rational(e[1], ep));
        }
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

std::int64_t to_int(std::string_view text, std::string_view what) {
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(j, "", {"arch", "precision", "problem", "tile", "microkernel", "schedule", "search"});
    RunConfig cfg;
    if (j.contains("arch")) cfg.arch = parse_arch(j["arch"], "arch");
    if (j.contains("precision")) parse_precision(j["precision"], "precision", cfg);
    if (j.contains("problem")) cfg.problem = parse_problem_json(j["problem"], "problem");
    if (j.contains("tile")) cfg.tile = parse_tile_json(j["tile"], "tile");
    if (j.contains("microkernel")) {
        cfg.microkernel = parse_microkernel(j["microkernel"], "microkernel");
        cfg.microkernel_given = true;
    }
    if (j.contains("schedule")) cfg.schedule = parse_schedule(j["schedule"], "schedule");
    if (j.contains("search")) parse_search(j["search"], "search", cfg.search);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ProblemSpec parse_problem(std::string_view text) {
    const auto parts = split(text, 'x');
    if (parts.size() != 3) throw std::invalid_argument("problem must look like MxKxN");
    ProblemSpec p{to_int(parts[0], "M"), to_int(parts[1], "K"), to_int(parts[2], "N")};
    p.validate();
    return p;
}

TileConfig parse_tile(std::string_view text) {
    const auto parts = split(text, ',');
    if (parts.size() != 4) throw std::invalid_argument("tile must look like T_MA,T_MC,T_K,T_N");
    TileConfig t{to_int(parts[0], "T_MA"), to_int(parts[1], "T_MC"), to_int(parts[2], "T_K"),
                 to_int(parts[3], "T_N")};
    t.validate();
    return t;
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
    std::vector<std::int64_t> out;
    for (auto part : split(text, ',')) {
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        out.push_back(to_int(part, "integer"));
    }
    return out;
}

}  // namespace atb
