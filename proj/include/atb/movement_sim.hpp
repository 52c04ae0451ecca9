#pragma once

// Symbolic execution of the output-stationary tiled GEMM nest: bytes across
// the off-chip/L2 and L2/L1 boundaries, L1 occupancy and A-slice lifetimes.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "atb/arch_model.hpp"
#include "atb/rational.hpp"

namespace atb {

enum class Operand : std::size_t { a = 0, b = 1, c = 2 };
std::string_view to_string(Operand op);

enum class Boundary { offchip_l2, l2_l1 };
std::string_view to_string(Boundary boundary);

struct BoundaryBytes {
    Rational a;
    Rational b;
    Rational c;

    Rational total() const { return a + b + c; }
    friend bool operator==(const BoundaryBytes&, const BoundaryBytes&) = default;
};

struct MovementTrace {
    BoundaryBytes offchip_l2;
    BoundaryBytes l2_l1;
    std::int64_t flops = 0;
    Rational peak_l1_occupancy;
    std::array<Rational, 3> peak_occupancy_per_operand{};
    std::int64_t evictions_a = 0;
    std::int64_t steps = 0;

    const BoundaryBytes& at(Boundary boundary) const {
        return boundary == Boundary::offchip_l2 ? offchip_l2 : l2_l1;
    }
    friend bool operator==(const MovementTrace&, const MovementTrace&) = default;
};

/// Raised when a buffer allocation would exceed the L1 capacity.
class BufferOverflow : public std::runtime_error {
public:
    BufferOverflow(Operand operand, std::int64_t step, const Rational& needed,
                   std::int64_t capacity);
    Operand operand() const { return operand_; }
    std::int64_t step() const { return step_; }

private:
    Operand operand_;
    std::int64_t step_;
};

struct MovementOptions {
    bool check_capacity = false;
    /// Overrides arch.l1_capacity for the check.
    std::optional<std::int64_t> capacity;
};

/// Position of an A slice (T_MA x T_K) or B tile (T_K x T_N) in the problem.
struct ASlice {
    std::int64_t row0 = 0;
    std::int64_t col0 = 0;  // reduction offset
    std::int64_t c_row0 = 0;  // first row inside the C tile
    std::int64_t id = 0;
};

struct BTile {
    std::int64_t row0 = 0;  // reduction offset
    std::int64_t col0 = 0;
    std::int64_t id = 0;
};

struct CTile {
    std::int64_t row0 = 0;
    std::int64_t col0 = 0;
};

/// Hooks for a payload-carrying execution of the same schedule.
class L1Listener {
public:
    virtual ~L1Listener() = default;
    virtual void load_a(const ASlice&) {}
    virtual void load_b(const BTile&) {}
    virtual void alloc_c(const CTile&) {}
    virtual void compute(const ASlice&, const BTile&, const CTile&) {}
    virtual void evict_a(const ASlice&) {}
    virtual void release_b(const BTile&) {}
    virtual void write_c(const CTile&) {}
};

/// Requires T_MC | M, T_N | N, T_K | K at the L1 level and the L2 tiles of
/// `arch` to divide the problem. Throws std::invalid_argument otherwise and
/// BufferOverflow in check mode.
MovementTrace simulate_movement(const ProblemSpec& problem, const TileConfig& tile,
                                const PrecisionSpec& prec, const ArchSpec& arch,
                                const MovementOptions& options = {},
                                L1Listener* listener = nullptr);

/// flops / bytes at the boundary. Throws when no bytes moved.
Rational measured_ai(const MovementTrace& trace, Boundary boundary = Boundary::l2_l1);

/// boundary,operand,bytes rows.
void write_trace_csv(std::ostream& os, const MovementTrace& trace);

struct MovementCase {
    ProblemSpec problem;
    TileConfig tile;
    PrecisionSpec prec;
    ArchSpec arch;
};

/// A random divisible configuration of modest size.
MovementCase random_movement_case(std::mt19937_64& rng);

/// Compares a trace against the closed-form byte counts, both intensities and
/// the footprint; returns the first discrepancy.
std::optional<std::string> verify_movement(const MovementCase& c, const MovementTrace& trace);

}  // namespace atb
