#include "atb/perf_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace atb {

std::string_view to_string(BoundKind kind) {
    return kind == BoundKind::memory ? "memory" : "compute";
}

std::string_view to_string(EffMicroSource source) {
    switch (source) {
        case EffMicroSource::calibration_table: return "calibration_table";
        case EffMicroSource::closed_form: return "closed_form";
        case EffMicroSource::simulator: return "simulator";
    }
    return "?";
}

EffMicroSource parse_eff_micro_source(std::string_view text) {
    for (auto s : {EffMicroSource::calibration_table, EffMicroSource::closed_form,
                   EffMicroSource::simulator}) {
        if (text == to_string(s)) return s;
    }
    throw std::invalid_argument("unknown eff_micro source '" + std::string(text) + "'");
}

Rational CalibrationTable::at(std::int64_t t_k) const {
    if (points.empty()) throw std::invalid_argument("calibration table is empty");
    if (!std::is_sorted(points.begin(), points.end(),
                        [](const auto& x, const auto& y) { return x.first < y.first; })) {
        throw std::invalid_argument("calibration table must be sorted by t_k");
    }
    if (t_k <= points.front().first) return points.front().second;
    if (t_k >= points.back().first) return points.back().second;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& [x1, y1] = points[i];
        if (t_k > x1) continue;
        const auto& [x0, y0] = points[i - 1];
        return y0 + (y1 - y0) * Rational(t_k - x0, x1 - x0);
    }
    return points.back().second;
}

Rational eff_micro_for(const TileConfig& tile, const EffMicroOptions& options) {
    switch (options.source) {
        case EffMicroSource::calibration_table:
            return options.table.at(tile.t_k);
        case EffMicroSource::closed_form: {
            const auto spec = microkernel_for_tile(tile, options.base);
            return eff_micro(spec, initiation_intervals(spec).ii_parallel);
        }
        case EffMicroSource::simulator: {
            const auto spec = microkernel_for_tile(tile, options.base);
            const auto dag = build_microkernel_dag(spec, options.dag);
            return measure(schedule(dag, slots_of(spec))).eff_micro_sim;
        }
    }
    throw std::invalid_argument("unknown eff_micro source");
}

namespace {

void check_eff(const Rational& eff) {
    if (eff <= 0 || eff > 1) throw std::invalid_argument("eff_micro must be in (0, 1]");
}

}  // namespace

Rational t_asym(const TileConfig& tile, std::int64_t k, const Rational& eff_micro,
                const ArchSpec& arch) {
    tile.validate();
    check_eff(eff_micro);
    if (k <= 0 || k % tile.t_k != 0) {
        throw std::invalid_argument("t_asym: t_k must divide k");
    }
    const Rational compute =
        Rational(2 * tile.t_mc * k * tile.t_n) / (Rational(arch.peak_flops_per_cycle()) * eff_micro);
    const Rational switches(arch.switch_overhead_delta * tile.rho() * (k / tile.t_k));
    return compute + switches;
}

Rational eff_core(const TileConfig& tile, const Rational& eff_micro, const ArchSpec& arch) {
    tile.validate();
    check_eff(eff_micro);
    const Rational overhead(arch.switch_overhead_delta * tile.rho() * arch.peak_flops_per_cycle(),
                            2 * tile.t_mc * tile.t_n * tile.t_k);
    return Rational(1) / (Rational(1) / eff_micro + overhead);
}

PerfEstimate perf_array(const TileConfig& tile, const ProblemSpec& problem,
                        const PrecisionSpec& prec, const ArchSpec& arch,
                        const Rational& eff_micro) {
    arch.validate();
    problem.validate();
    tile.validate();
    if (!divides_problem(tile, problem, arch)) {
        const auto l2 = derive_l2_tiles(tile, arch);
        throw std::invalid_argument("problem " + to_string(problem) +
                                    " is not divisible by the L2 tile " + std::to_string(l2.t_m) +
                                    "x" + std::to_string(l2.t_k) + "x" + std::to_string(l2.t_n));
    }
    PerfEstimate e;
    e.tile = tile;
    e.problem = problem;
    e.buffer_bytes = buffer_footprint(tile, prec, arch);
    e.buffer_bytes_symmetric = symmetric_footprint(tile, prec, arch);
    e.feasible = e.buffer_bytes <= arch.l1_capacity;
    e.ai_array = ai_array(tile, problem.k, prec, arch).ai;
    e.eff_micro = eff_micro;
    e.eff_core = eff_core(tile, eff_micro, arch);

    // Both sides in flops/cycle; the clock is applied once at the end.
    const double mem = to_double(e.ai_array) * (arch.offchip_bw / arch.clock_hz);
    const double comp = to_double(e.eff_core) * static_cast<double>(arch.peak_flops_per_cycle()) *
                        static_cast<double>(arch.n_cores);
    e.memory_bound = mem * arch.clock_hz;
    e.compute_bound = comp * arch.clock_hz;
    e.bound_kind = mem <= comp ? BoundKind::memory : BoundKind::compute;
    if (e.feasible) e.perf_array = std::min(mem, comp) * arch.clock_hz;
    return e;
}

}  // namespace atb
