#pragma once

// Closed-form lower bounds on the latency of a VLIW GEMM microkernel built
// from accumulation chains: prolog (operand readiness), steady state
// (initiation interval), epilog (drain and store), and cluster totals.

#include <cstdint>
#include <span>
#include <vector>

#include "atb/arch_model.hpp"
#include "atb/rational.hpp"

namespace atb {

/// A group of loads sharing one latency.
struct LoadClass {
    std::int64_t latency = 1;
    std::int64_t count = 1;
    /// Unaligned accesses need a pointer pop ahead of the load.
    bool unaligned = false;

    friend bool operator==(const LoadClass&, const LoadClass&) = default;
};

struct MicrokernelSpec {
    std::int64_t pipeline_depth = 3;  // P: accumulator RAW distance
    std::int64_t u_ld = 2;
    std::int64_t u_st = 1;
    std::int64_t u_vmac = 1;
    /// Loads that must land before the first VMAC of a cluster.
    std::vector<LoadClass> load_classes{{8, 2}, {8, 2}, {8, 8}};
    /// Operand loads per VMAC in steady state (may be fractional once
    /// operands are shared across a chain cluster).
    Rational r_load{2};
    std::int64_t chains = 4;
    std::int64_t n_accum = 8;  // accumulator updates per chain
    std::int64_t n_clusters = 1;
    std::int64_t l_vmac_to_store = 6;
    std::int64_t l_store = 2;
    std::int64_t n_store = 2;
    std::int64_t accum_regs = 5;
    bool clamp_ii = true;
    /// Latency of steady-state operand loads.
    std::int64_t steady_load_latency = 8;
    bool steady_unaligned = false;

    void validate() const;
};

/// bfp16ebs8 microkernel constants measured on the target core.
MicrokernelSpec bfp16_microkernel();

/// The microkernel that computes one T_MA x T_K x T_N slice: one accumulator
/// update per 8 reduction elements and T_MA*T_N/64 accumulators grouped into
/// clusters of `base.chains`.
MicrokernelSpec microkernel_for_tile(const TileConfig& tile,
                                     const MicrokernelSpec& base = bfp16_microkernel());

struct InitiationIntervals {
    std::int64_t ii_single = 0;
    Rational ii_parallel;
    Rational ii_parallel_unclamped;
};

struct LatencyBounds {
    std::int64_t t_prolog = 0;
    std::int64_t ii_single = 0;
    Rational ii_parallel;
    std::int64_t t_steady = 0;
    std::int64_t t_epilog = 0;
    std::int64_t l_total_sequential = 0;
    /// Prolog once, every steady phase, one handoff of ceil(C / u_vmac)
    /// cycles per cluster boundary, epilog once.
    std::int64_t l_total_overlapped = 0;
    /// Overlapped total with an ii_parallel * C boundary term charged to every
    /// cluster. Can exceed the sequential total and the simulated schedule.
    std::int64_t l_total_overlapped_literal = 0;
    Rational eff_micro;
};

enum class ClusterMode { sequential, overlapped };

/// max_i (l_(i) + ceil(S_(i) / u_ld) - 1) over classes sorted by descending
/// latency, S_(i) the cumulative load count. Throws on an empty class list.
std::int64_t prolog_bound(std::span<const LoadClass> classes, std::int64_t u_ld);

InitiationIntervals initiation_intervals(const MicrokernelSpec& spec);

/// ceil(ii_parallel * max(0, n_accum - chains)).
std::int64_t steady_bound(const MicrokernelSpec& spec, const Rational& ii_parallel);

/// (l_vmac_to_store + l_store + n_store - 1) + (chains - 1) with one store
/// and one VMAC slot; n_store and chains are divided (rounding up) by the
/// slot counts otherwise.
std::int64_t epilog_bound(const MicrokernelSpec& spec);

LatencyBounds latency_bounds(const MicrokernelSpec& spec);

std::int64_t total_latency(const MicrokernelSpec& spec, ClusterMode mode);

/// n_accum / (t_prolog + ii * max(0, n_accum - chains) + t_epilog), capped at
/// 1 / ii. Throws when the denominator is not positive.
Rational eff_micro(std::int64_t n_accum, std::int64_t chains, const Rational& ii,
                   const Rational& prolog_plus_epilog);
Rational eff_micro(const MicrokernelSpec& spec, const Rational& ii_parallel);

/// eta * t_k / (epsilon + eta * ii * t_k) with eta = 1 / 8 and
/// epsilon = t_prolog + t_epilog - ii * chains.
struct EffMicroFit {
    Rational eta{1, kMicrotile};
    Rational epsilon;
    Rational ii;

    Rational at(std::int64_t t_k) const;
};

EffMicroFit eff_micro_fit(const MicrokernelSpec& spec, const Rational& ii_parallel);

}  // namespace atb
