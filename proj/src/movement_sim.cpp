#include "atb/movement_sim.hpp"

#include <deque>
#include <ostream>
#include <utility>

#include "atb/ai_model.hpp"

namespace atb {

std::string_view to_string(Operand op) {
    switch (op) {
        case Operand::a: return "A";
        case Operand::b: return "B";
        case Operand::c: return "C";
    }
    return "?";
}

std::string_view to_string(Boundary boundary) {
    return boundary == Boundary::offchip_l2 ? "offchip_l2" : "l2_l1";
}

BufferOverflow::BufferOverflow(Operand operand, std::int64_t step, const Rational& needed,
                               std::int64_t capacity)
    : std::runtime_error("L1 overflow on operand " + std::string(to_string(operand)) +
                         " at step " + std::to_string(step) + ": " + to_string(needed) +
                         " bytes needed, capacity " + std::to_string(capacity)),
      operand_(operand),
      step_(step) {}

namespace {

void require_divides(std::int64_t dim, std::int64_t tile, const char* what) {
    if (dim % tile != 0) {
        throw std::invalid_argument(std::string(what) + " " + std::to_string(dim) +
                                    " is not divisible by tile " + std::to_string(tile));
    }
}

// Element counts per operand; converted to bytes once at the end.
struct Counts {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;

    BoundaryBytes bytes(const PrecisionSpec& p) const {
        return {p.byte_cost_a * Rational(a), p.byte_cost_b * Rational(b),
                p.byte_cost_c * Rational(c)};
    }
};

class L1Walker {
public:
    L1Walker(const ProblemSpec& problem, const TileConfig& tile, const PrecisionSpec& prec,
             const ArchSpec& arch, const MovementOptions& options, L1Listener* listener,
             MovementTrace& trace)
        : p_(problem), t_(tile), prec_(prec), arch_(arch), listener_(listener), trace_(trace) {
        check_ = options.check_capacity;
        capacity_ = options.capacity.value_or(arch.l1_capacity);
        a_elems_ = tile.t_ma * tile.t_k;
        b_elems_ = tile.t_k * tile.t_n;
        c_elems_ = tile.t_mc * tile.t_n;
        tiles_m_ = problem.m / tile.t_mc;
        tiles_n_ = problem.n / tile.t_n;
        k_steps_ = problem.k / tile.t_k;
        rho_ = tile.rho();
    }

    Counts run() {
        for (std::int64_t mi = 0; mi < tiles_m_; ++mi) {
            for (std::int64_t ni = 0; ni < tiles_n_; ++ni) {
                const CTile ct{mi * t_.t_mc, ni * t_.t_n};
                prefetch();
                occupy(Operand::c, c_elems_);
                if (listener_) listener_->alloc_c(ct);
                for (std::int64_t kk = 0; kk < k_steps_; ++kk) {
                    for (std::int64_t r = 0; r < rho_; ++r) {
                        const ASlice as = resident_a_.front();
                        const BTile bt = resident_b_.front();
                        if (as.row0 != ct.row0 + r * t_.t_ma || as.col0 != kk * t_.t_k ||
                            bt.row0 != kk * t_.t_k || bt.col0 != ct.col0) {
                            throw std::logic_error("movement_sim: operand not resident at use");
                        }
                        ++trace_.steps;
                        trace_.flops += 2 * t_.t_ma * t_.t_k * t_.t_n;
                        if (listener_) listener_->compute(as, bt, ct);
                        // The slice's C rows have finished this T_K pass.
                        resident_a_.pop_front();
                        release(Operand::a, a_elems_);
                        ++trace_.evictions_a;
                        if (listener_) listener_->evict_a(as);
                        if (r + 1 == rho_) {
                            resident_b_.pop_front();
                            release(Operand::b, b_elems_);
                            if (listener_) listener_->release_b(bt);
                        }
                        prefetch();
                    }
                }
                l1_.c += c_elems_;
                ++trace_.steps;
                if (listener_) listener_->write_c(ct);
                release(Operand::c, c_elems_);
            }
        }
        return l1_;
    }

private:
    // Streams of A slices and B tiles in consumption order, and the next
    // element of each not yet loaded.
    ASlice a_at(std::int64_t seq) const {
        const std::int64_t per_tile = k_steps_ * rho_;
        const std::int64_t tile_idx = seq / per_tile;
        const std::int64_t within = seq % per_tile;
        const std::int64_t mi = tile_idx / tiles_n_;
        const std::int64_t kk = within / rho_;
        const std::int64_t r = within % rho_;
        return ASlice{mi * t_.t_mc + r * t_.t_ma, kk * t_.t_k, r * t_.t_ma, seq};
    }

    BTile b_at(std::int64_t seq) const {
        const std::int64_t tile_idx = seq / k_steps_;
        const std::int64_t kk = seq % k_steps_;
        const std::int64_t ni = tile_idx % tiles_n_;
        return BTile{kk * t_.t_k, ni * t_.t_n, seq};
    }

    void prefetch() {
        const std::int64_t a_total = tiles_m_ * tiles_n_ * k_steps_ * rho_;
        const std::int64_t b_total = tiles_m_ * tiles_n_ * k_steps_;
        while (static_cast<std::int64_t>(resident_a_.size()) < arch_.buffer_multiplier_a &&
               next_a_ < a_total) {
            const ASlice s = a_at(next_a_++);
            occupy(Operand::a, a_elems_);
            resident_a_.push_back(s);
            l1_.a += a_elems_;
            ++trace_.steps;
            if (listener_) listener_->load_a(s);
        }
        while (static_cast<std::int64_t>(resident_b_.size()) < arch_.buffer_multiplier_b &&
               next_b_ < b_total) {
            const BTile t = b_at(next_b_++);
            occupy(Operand::b, b_elems_);
            resident_b_.push_back(t);
            l1_.b += b_elems_;
            ++trace_.steps;
            if (listener_) listener_->load_b(t);
        }
    }

    const Rational& cost(Operand op) const {
        switch (op) {
            case Operand::a: return prec_.byte_cost_a;
            case Operand::b: return prec_.byte_cost_b;
            case Operand::c: return prec_.byte_cost_c;
        }
        return prec_.byte_cost_c;
    }

    void occupy(Operand op, std::int64_t elems) {
        const auto i = static_cast<std::size_t>(op);
        occ_[i] += cost(op) * Rational(elems);
        const Rational total = occ_[0] + occ_[1] + occ_[2];
        if (check_ && total > Rational(capacity_)) {
            throw BufferOverflow(op, trace_.steps, total, capacity_);
        }
        if (occ_[i] > trace_.peak_occupancy_per_operand[i]) {
            trace_.peak_occupancy_per_operand[i] = occ_[i];
        }
        if (total > trace_.peak_l1_occupancy) trace_.peak_l1_occupancy = total;
    }

    void release(Operand op, std::int64_t elems) {
        occ_[static_cast<std::size_t>(op)] -= cost(op) * Rational(elems);
    }

    const ProblemSpec& p_;
    const TileConfig& t_;
    const PrecisionSpec& prec_;
    const ArchSpec& arch_;
    L1Listener* listener_;
    MovementTrace& trace_;
    bool check_ = false;
    std::int64_t capacity_ = 0;
    std::int64_t a_elems_ = 0, b_elems_ = 0, c_elems_ = 0;
    std::int64_t tiles_m_ = 0, tiles_n_ = 0, k_steps_ = 0, rho_ = 1;
    std::int64_t next_a_ = 0, next_b_ = 0;
    std::deque<ASlice> resident_a_;
    std::deque<BTile> resident_b_;
    std::array<Rational, 3> occ_{};
    Counts l1_;
};

}  // namespace

MovementTrace simulate_movement(const ProblemSpec& problem, const TileConfig& tile,
                                const PrecisionSpec& prec, const ArchSpec& arch,
                                const MovementOptions& options, L1Listener* listener) {
    problem.validate();
    tile.validate();
    prec.validate();
    arch.validate();
    require_divides(problem.m, tile.t_mc, "M");
    require_divides(problem.n, tile.t_n, "N");
    require_divides(problem.k, tile.t_k, "K");
    const auto l2 = derive_l2_tiles(tile, arch);
    require_divides(problem.m, l2.t_m, "M");
    require_divides(problem.n, l2.t_n, "N");

    MovementTrace trace;

    // Off-chip to L2: one L2 tile of A and B per k-step of every L2 output
    // tile, C written once when the tile completes.
    Counts off;
    const std::int64_t l2_m = problem.m / l2.t_m;
    const std::int64_t l2_n = problem.n / l2.t_n;
    const std::int64_t l2_k = problem.k / l2.t_k;
    for (std::int64_t mi = 0; mi < l2_m; ++mi) {
        for (std::int64_t ni = 0; ni < l2_n; ++ni) {
            for (std::int64_t kk = 0; kk < l2_k; ++kk) {
                off.a += l2.t_m * l2.t_k;
                off.b += l2.t_k * l2.t_n;
            }
            off.c += l2.t_m * l2.t_n;
        }
    }
    trace.offchip_l2 = off.bytes(prec);

    L1Walker walker(problem, tile, prec, arch, options, listener, trace);
    trace.l2_l1 = walker.run().bytes(prec);
    return trace;
}

Rational measured_ai(const MovementTrace& trace, Boundary boundary) {
    const Rational bytes = trace.at(boundary).total();
    if (bytes == Rational(0)) throw std::invalid_argument("measured_ai: no bytes moved");
    return Rational(trace.flops) / bytes;
}

void write_trace_csv(std::ostream& os, const MovementTrace& trace) {
    os << "boundary,operand,bytes\n";
    for (auto b : {Boundary::offchip_l2, Boundary::l2_l1}) {
        const auto& bytes = trace.at(b);
        os << to_string(b) << ",A," << to_string(bytes.a) << '\n';
        os << to_string(b) << ",B," << to_string(bytes.b) << '\n';
        os << to_string(b) << ",C," << to_string(bytes.c) << '\n';
    }
}

MovementCase random_movement_case(std::mt19937_64& rng) {
    auto uniform = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    MovementCase c;
    const std::int64_t rows[] = {1, 2, 4};
    const std::int64_t cols[] = {1, 2, 4, 8};
    c.arch.n_rows = rows[uniform(0, 2)];
    c.arch.n_cols = cols[uniform(0, 3)];
    c.arch.n_cores = c.arch.n_rows * c.arch.n_cols;
    c.arch.buffer_multiplier_a = uniform(1, 3);
    c.arch.buffer_multiplier_b = uniform(1, 3);
    c.arch.buffer_multiplier_c = uniform(1, 2);

    const std::int64_t rhos[] = {1, 2, 4, 8};
    const std::int64_t rho = rhos[uniform(0, 3)];
    c.tile.t_ma = kMicrotile * uniform(1, 4);
    c.tile.t_mc = c.tile.t_ma * rho;
    c.tile.t_k = kMicrotile * uniform(1, 8);
    c.tile.t_n = kMicrotile * uniform(1, 8);
    c.problem.m = c.arch.n_rows * c.tile.t_mc * uniform(1, 3);
    c.problem.n = c.arch.n_cols * c.tile.t_n * uniform(1, 3);
    c.problem.k = c.tile.t_k * uniform(1, 6);

    auto cost = [&] { return Rational(uniform(1, 16), uniform(1, 8)); };
    c.prec = PrecisionSpec{cost(), cost(), cost(), "random"};
    c.arch.l1_capacity = buffer_footprint(c.tile, c.prec, c.arch);
    return c;
}

std::optional<std::string> verify_movement(const MovementCase& c, const MovementTrace& trace) {
    const auto& p = c.problem;
    const auto& t = c.tile;
    const auto l2 = derive_l2_tiles(t, c.arch);
    auto expect = [](const char* what, const Rational& got,
                     const Rational& want) -> std::optional<std::string> {
        if (got == want) return std::nullopt;
        return std::string(what) + ": simulated " + to_string(got) + ", closed form " +
               to_string(want);
    };
    const Rational a = c.prec.byte_cost_a;
    const Rational b = c.prec.byte_cost_b;
    const Rational cc = c.prec.byte_cost_c;
    const std::pair<const char*, std::pair<Rational, Rational>> checks[] = {
        {"flops", {Rational(trace.flops), Rational(p.flops())}},
        {"l2_l1 bytes A", {trace.l2_l1.a, a * Rational(p.m * p.k * (p.n / t.t_n))}},
        {"l2_l1 bytes B", {trace.l2_l1.b, b * Rational(p.k * p.n * (p.m / t.t_mc))}},
        {"l2_l1 bytes C", {trace.l2_l1.c, cc * Rational(p.m * p.n)}},
        {"offchip_l2 bytes A", {trace.offchip_l2.a, a * Rational(p.m * p.k * (p.n / l2.t_n))}},
        {"offchip_l2 bytes B", {trace.offchip_l2.b, b * Rational(p.k * p.n * (p.m / l2.t_m))}},
        {"offchip_l2 bytes C", {trace.offchip_l2.c, cc * Rational(p.m * p.n)}},
        {"l2_l1 intensity",
         {measured_ai(trace, Boundary::l2_l1), ai_tile(t.t_mc, t.t_n, p.k, c.prec).ai}},
        {"offchip_l2 intensity",
         {measured_ai(trace, Boundary::offchip_l2), ai_array(t, p.k, c.prec, c.arch).ai}},
        {"A evictions",
         {Rational(trace.evictions_a), Rational((p.m / t.t_ma) * (p.k / t.t_k) * (p.n / t.t_n))}},
    };
    for (const auto& [what, pair] : checks) {
        if (auto d = expect(what, pair.first, pair.second)) return d;
    }
    const Rational footprint = buffer_footprint_exact(t, c.prec, c.arch);
    if (trace.peak_l1_occupancy > footprint) {
        return "peak L1 occupancy " + to_string(trace.peak_l1_occupancy) + " exceeds footprint " +
               to_string(footprint);
    }
    return std::nullopt;
}

}  // namespace atb
