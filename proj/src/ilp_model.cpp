#include "atb/ilp_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace atb {

void MicrokernelSpec::validate() const {
    if (pipeline_depth < 1) throw std::invalid_argument("pipeline_depth must be >= 1");
    if (u_ld < 1 || u_st < 1 || u_vmac < 1) throw std::invalid_argument("slot counts must be >= 1");
    if (load_classes.empty()) throw std::invalid_argument("load_classes must not be empty");
    for (const auto& c : load_classes) {
        if (c.latency < 1 || c.count < 1) {
            throw std::invalid_argument("load class latency and count must be >= 1");
        }
    }
    if (r_load <= 0) throw std::invalid_argument("r_load must be positive");
    if (chains < 1) throw std::invalid_argument("chains must be >= 1");
    if (n_accum < 1) throw std::invalid_argument("n_accum must be >= 1");
    if (n_clusters < 0) throw std::invalid_argument("n_clusters must be >= 0");
    if (l_vmac_to_store < 0) throw std::invalid_argument("l_vmac_to_store must be >= 0");
    if (l_store < 1 || n_store < 1) throw std::invalid_argument("l_store and n_store must be >= 1");
    if (accum_regs < 1) throw std::invalid_argument("accum_regs must be >= 1");
    if (chains > accum_regs) {
        throw std::invalid_argument("chains (" + std::to_string(chains) +
                                    ") exceed accumulator registers (" +
                                    std::to_string(accum_regs) + ")");
    }
    if (steady_load_latency < 1) throw std::invalid_argument("steady_load_latency must be >= 1");
}

MicrokernelSpec bfp16_microkernel() {
    // A and B operands for a 2x2 chain cluster plus two loads per accumulator.
    MicrokernelSpec spec;
    spec.pipeline_depth = 3;
    spec.u_ld = 2;
    spec.u_st = 1;
    spec.u_vmac = 1;
    spec.chains = 4;
    spec.load_classes = {{8, 2}, {8, 2}, {8, 2 * spec.chains}};
    spec.r_load = 2;
    spec.n_accum = 8;
    spec.n_clusters = 1;
    spec.l_vmac_to_store = 6;
    spec.l_store = 2;
    spec.n_store = 2;
    spec.accum_regs = 5;
    spec.steady_load_latency = 8;
    return spec;
}

MicrokernelSpec microkernel_for_tile(const TileConfig& tile, const MicrokernelSpec& base) {
    tile.validate();
    MicrokernelSpec spec = base;
    spec.n_accum = std::max<std::int64_t>(1, tile.t_k / kMicrotile);
    const std::int64_t accumulators =
        std::max<std::int64_t>(1, (tile.t_ma * tile.t_n) / (kMicrotile * kMicrotile));
    spec.n_clusters = (accumulators + spec.chains - 1) / spec.chains;
    return spec;
}

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

Rational max_r(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace

std::int64_t prolog_bound(std::span<const LoadClass> classes, std::int64_t u_ld) {
    if (classes.empty()) throw std::invalid_argument("prolog_bound: no load classes");
    if (u_ld < 1) throw std::invalid_argument("prolog_bound: u_ld must be >= 1");
    std::vector<LoadClass> sorted(classes.begin(), classes.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const LoadClass& x, const LoadClass& y) { return x.latency > y.latency; });
    std::int64_t cumulative = 0;
    std::int64_t best = 0;
    for (const auto& c : sorted) {
        cumulative += c.count;
        best = std::max(best, c.latency + ceil_div(cumulative, u_ld) - 1);
    }
    return best;
}

InitiationIntervals initiation_intervals(const MicrokernelSpec& spec) {
    spec.validate();
    const std::int64_t load_term = ceil_to_int(spec.r_load / Rational(spec.u_ld));
    InitiationIntervals ii;
    ii.ii_single = std::max(spec.pipeline_depth, load_term);
    // P + 1 - C may go negative for wide clusters; the load term absorbs it.
    const std::int64_t raw = std::max(spec.pipeline_depth + 1 - spec.chains, load_term);
    ii.ii_parallel_unclamped = Rational(raw, spec.chains);
    ii.ii_parallel = ii.ii_parallel_unclamped;
    if (spec.clamp_ii) ii.ii_parallel = max_r(ii.ii_parallel, Rational(1, spec.u_vmac));
    return ii;
}

std::int64_t steady_bound(const MicrokernelSpec& spec, const Rational& ii_parallel) {
    const std::int64_t updates = std::max<std::int64_t>(0, spec.n_accum - spec.chains);
    return ceil_to_int(ii_parallel * Rational(updates));
}

std::int64_t epilog_bound(const MicrokernelSpec& spec) {
    return (spec.l_vmac_to_store + spec.l_store + ceil_div(spec.n_store, spec.u_st) - 1) +
           (ceil_div(spec.chains, spec.u_vmac) - 1);
}

LatencyBounds latency_bounds(const MicrokernelSpec& spec) {
    spec.validate();
    const auto ii = initiation_intervals(spec);
    LatencyBounds b;
    b.t_prolog = prolog_bound(spec.load_classes, spec.u_ld);
    b.ii_single = ii.ii_single;
    b.ii_parallel = ii.ii_parallel;
    b.t_steady = steady_bound(spec, ii.ii_parallel);
    b.t_epilog = epilog_bound(spec);
    b.eff_micro = eff_micro(spec, ii.ii_parallel);
    if (spec.n_clusters == 0) return b;

    const Rational steady_exact =
        ii.ii_parallel * Rational(std::max<std::int64_t>(0, spec.n_accum - spec.chains));
    const Rational boundary = ii.ii_parallel * Rational(spec.chains);
    const Rational clusters(spec.n_clusters);

    b.l_total_sequential = ceil_to_int(
        (Rational(b.t_prolog) + steady_exact + Rational(b.t_epilog)) * clusters);
    b.l_total_overlapped_literal = ceil_to_int(Rational(b.t_prolog) +
                                               (steady_exact + boundary) * clusters +
                                               Rational(b.t_epilog));
    // Between clusters only the next cluster's first issue slot per chain is
    // exposed; the last cluster's drain is the epilog.
    const Rational handoff(ceil_div(spec.chains, spec.u_vmac));
    b.l_total_overlapped = ceil_to_int(Rational(b.t_prolog) + steady_exact * clusters +
                                       handoff * Rational(spec.n_clusters - 1) +
                                       Rational(b.t_epilog));
    return b;
}

std::int64_t total_latency(const MicrokernelSpec& spec, ClusterMode mode) {
    const auto b = latency_bounds(spec);
    return mode == ClusterMode::sequential ? b.l_total_sequential : b.l_total_overlapped;
}

Rational eff_micro(std::int64_t n_accum, std::int64_t chains, const Rational& ii,
                   const Rational& prolog_plus_epilog) {
    if (ii <= 0) throw std::invalid_argument("eff_micro: initiation interval must be positive");
    const Rational denom =
        prolog_plus_epilog + ii * Rational(std::max<std::int64_t>(0, n_accum - chains));
    if (denom <= 0) throw std::invalid_argument("eff_micro: non-positive denominator");
    const Rational eff = Rational(n_accum) / denom;
    const Rational cap = Rational(1) / ii;
    return eff < cap ? eff : cap;
}

Rational eff_micro(const MicrokernelSpec& spec, const Rational& ii_parallel) {
    const Rational pe(prolog_bound(spec.load_classes, spec.u_ld) + epilog_bound(spec));
    return eff_micro(spec.n_accum, spec.chains, ii_parallel, pe);
}

Rational EffMicroFit::at(std::int64_t t_k) const {
    const Rational x = eta * Rational(t_k);
    return x / (epsilon + ii * x);
}

EffMicroFit eff_micro_fit(const MicrokernelSpec& spec, const Rational& ii_parallel) {
    EffMicroFit fit;
    fit.ii = ii_parallel;
    fit.epsilon = Rational(prolog_bound(spec.load_classes, spec.u_ld) + epilog_bound(spec)) -
                  ii_parallel * Rational(spec.chains);
    return fit;
}

}  // namespace atb
