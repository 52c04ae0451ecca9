#pragma once

// Instruction-DAG construction for GEMM microkernels and a deterministic
// cycle-by-cycle list scheduler over VLIW slot classes.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "atb/ilp_model.hpp"
#include "atb/rational.hpp"

namespace atb {

enum class InstrKind { vmac, vload, vload_pop, vstore };
enum class SlotClass : std::size_t { load = 0, store = 1, vmac = 2 };
inline constexpr std::size_t kSlotClasses = 3;

std::string_view to_string(InstrKind kind);
std::string_view to_string(SlotClass slot);

struct Dependence {
    std::size_t id = 0;
    std::int64_t delay = 0;  // successor issues no earlier than pred issue + delay

    friend bool operator==(const Dependence&, const Dependence&) = default;
};

enum class EdgeRole { data, accumulator, war, serialize, order };

struct Instruction {
    std::size_t id = 0;
    InstrKind kind = InstrKind::vload;
    std::int64_t latency = 1;
    std::vector<Dependence> predecessors;
    SlotClass slot = SlotClass::load;
    // Position in the microkernel, for reporting.
    std::int64_t cluster = 0;
    std::int64_t chain = -1;
    std::int64_t step = -1;
    /// Role of each predecessor edge, parallel to `predecessors`.
    std::vector<EdgeRole> roles;
};

struct DagOptions {
    bool share_inputs = false;
    bool double_buffer = true;
    bool overlap_clusters = false;
};

using SlotCounts = std::array<std::int64_t, kSlotClasses>;

SlotCounts slots_of(const MicrokernelSpec& spec);

/// Builds the instruction DAG of `spec.n_clusters` chain clusters.
/// Throws std::invalid_argument when the clusters need more live
/// accumulators than `spec.accum_regs`.
std::vector<Instruction> build_microkernel_dag(const MicrokernelSpec& spec,
                                               const DagOptions& options);

/// Steady-state operand loads per VMAC the DAG actually issues.
Rational effective_r_load(const MicrokernelSpec& spec, bool share_inputs);

struct PhaseTimes {
    std::int64_t prolog = 0;
    std::int64_t steady = 0;
    std::int64_t epilog = 0;
};

struct ScheduleResult {
    std::vector<std::int64_t> cycle_of;  // indexed by instruction id
    std::int64_t total_cycles = 0;
    std::int64_t n_vmacs = 0;
    Rational vmac_issue_rate;
    PhaseTimes phase_times;
    /// VMAC issue cycles of the clusters strictly between the first and the
    /// last (all VMACs when there are fewer than three clusters), sorted.
    std::vector<std::int64_t> steady_vmac_cycles;
};

/// Greedy list schedule: each cycle issues ready instructions by descending
/// critical-path length (ties by ascending id) up to the slot capacity.
/// Throws std::invalid_argument on a cyclic DAG or a used class with no slots.
ScheduleResult schedule(const std::vector<Instruction>& dag, const SlotCounts& slots);

struct Measurement {
    Rational eff_micro_sim;
    /// Mean gap between consecutive steady_vmac_cycles; needs two VMACs.
    std::optional<Rational> ii_observed;
};

Measurement measure(const ScheduleResult& result);

/// CSV rows: cycle,slot,id,kind sorted by (cycle, slot, id).
void write_schedule_csv(std::ostream& os, const std::vector<Instruction>& dag,
                        const ScheduleResult& result);

/// Verifies dependence delays and per-cycle slot usage; returns the first
/// violation as text, or nothing.
std::optional<std::string> check_schedule(const std::vector<Instruction>& dag,
                                          const SlotCounts& slots, const ScheduleResult& result);

/// The spec whose closed-form bounds describe the DAG built with `options`:
/// r_load becomes the load-slot instructions the DAG issues per VMAC.
MicrokernelSpec matched_spec(const MicrokernelSpec& spec, const DagOptions& options);

/// Checks the closed-form bounds of `matched_spec(spec, options)` against a
/// schedule of that DAG; returns the first bound the schedule beats.
std::optional<std::string> check_bounds(const MicrokernelSpec& spec, const DagOptions& options,
                                        const ScheduleResult& result);

/// A random valid spec with small parameters for property harnesses.
MicrokernelSpec random_microkernel(std::mt19937_64& rng);

}  // namespace atb
