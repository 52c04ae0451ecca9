#include <algorithm>
#include <random>

#include "doctest.h"

#include "atb/ilp_model.hpp"
#include "atb/sched_sim.hpp"

using namespace atb;

namespace {

// Brute force over every prefix of the latency-sorted order.
std::int64_t prolog_oracle(std::vector<LoadClass> classes, std::int64_t u_ld) {
    std::sort(classes.begin(), classes.end(),
              [](const LoadClass& a, const LoadClass& b) { return a.latency > b.latency; });
    std::int64_t best = 0, seen = 0;
    for (const auto& c : classes) {
        seen += c.count;
        best = std::max(best, c.latency + (seen + u_ld - 1) / u_ld - 1);
    }
    return best;
}

MicrokernelSpec eight_cluster_spec() {
    MicrokernelSpec s;
    s.pipeline_depth = 3;
    s.u_ld = 2;
    s.load_classes = {{9, 4}};  // T_load = 9 + 2 - 1 = 10
    s.r_load = 2;
    s.chains = 4;
    s.n_accum = 8;
    s.n_clusters = 8;
    s.l_vmac_to_store = 6;
    s.l_store = 2;
    s.n_store = 2;
    s.accum_regs = 5;
    return s;
}

}  // namespace

TEST_CASE("prolog examples") {
    const std::vector<LoadClass> fig{{3, 2}, {3, 1}, {3, 1}};
    CHECK(prolog_bound(fig, 2) == 4);
    CHECK(prolog_bound(std::vector<LoadClass>{{5, 1}}, 2) == 5);
    CHECK(prolog_bound(std::vector<LoadClass>{{8, 4}, {2, 4}}, 2) == 9);
    CHECK(prolog_bound(std::vector<LoadClass>{{2, 4}, {8, 4}}, 2) == 9);
    CHECK_THROWS_AS(prolog_bound(std::vector<LoadClass>{}, 2), std::invalid_argument);
}

TEST_CASE("prolog is permutation invariant and monotone") {
    std::mt19937_64 rng(3);
    auto u = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int i = 0; i < 300; ++i) {
        std::vector<LoadClass> cls;
        for (int j = 0, n = u(1, 5); j < n; ++j) cls.push_back({u(1, 12), u(1, 8)});
        const std::int64_t uld = u(1, 4);
        const auto base = prolog_bound(cls, uld);
        REQUIRE(base == prolog_oracle(cls, uld));
        std::shuffle(cls.begin(), cls.end(), rng);
        REQUIRE(prolog_bound(cls, uld) == base);
        auto bumped = cls;
        bumped[static_cast<std::size_t>(u(0, static_cast<int>(cls.size()) - 1))].count += 1;
        REQUIRE(prolog_bound(bumped, uld) >= base);
        bumped = cls;
        bumped[static_cast<std::size_t>(u(0, static_cast<int>(cls.size()) - 1))].latency += 1;
        REQUIRE(prolog_bound(bumped, uld) >= base);
    }
}

TEST_CASE("initiation intervals") {
    MicrokernelSpec s;
    s.pipeline_depth = 3;
    s.u_ld = 2;
    s.r_load = 4;
    s.chains = 1;
    auto ii = initiation_intervals(s);
    CHECK(ii.ii_single == 3);
    CHECK(ii.ii_parallel == Rational(3));

    s.r_load = 2;
    s.chains = 3;
    ii = initiation_intervals(s);
    CHECK(ii.ii_parallel_unclamped == Rational(1, 3));
    CHECK(ii.ii_parallel == Rational(1));

    s.r_load = 4;
    s.chains = 4;
    ii = initiation_intervals(s);
    CHECK(ii.ii_parallel_unclamped == Rational(1, 2));
    CHECK(ii.ii_parallel == Rational(1));

    s.clamp_ii = false;
    CHECK(initiation_intervals(s).ii_parallel == Rational(1, 2));
}

TEST_CASE("unclamped ii is monotone in C, P and r_load") {
    MicrokernelSpec s;
    s.accum_regs = 16;
    for (std::int64_t c = 1; c < 16; ++c) {
        s.chains = c;
        const auto a = initiation_intervals(s).ii_parallel_unclamped;
        s.chains = c + 1;
        CHECK(initiation_intervals(s).ii_parallel_unclamped <= a);
    }
    s.chains = 2;
    for (std::int64_t p = 1; p < 10; ++p) {
        s.pipeline_depth = p;
        const auto a = initiation_intervals(s).ii_parallel_unclamped;
        s.pipeline_depth = p + 1;
        CHECK(initiation_intervals(s).ii_parallel_unclamped >= a);
    }
    for (std::int64_t r = 1; r < 10; ++r) {
        s.r_load = r;
        const auto a = initiation_intervals(s).ii_parallel_unclamped;
        s.r_load = r + 1;
        CHECK(initiation_intervals(s).ii_parallel_unclamped >= a);
    }
}

TEST_CASE("steady bound") {
    MicrokernelSpec s;
    s.n_accum = 8;
    s.chains = 4;
    CHECK(steady_bound(s, Rational(1)) == 4);
    s.n_accum = 4;
    CHECK(steady_bound(s, Rational(1)) == 0);
    s.n_accum = 2;
    CHECK(steady_bound(s, Rational(1)) == 0);
    s.n_accum = 16;
    CHECK(steady_bound(s, Rational(3, 2)) == 18);
    s.n_accum = 7;
    CHECK(steady_bound(s, Rational(1, 2)) == 2);  // 3/2 rounds up once
}

TEST_CASE("epilog bound") {
    MicrokernelSpec s;
    s.l_vmac_to_store = 6;
    s.l_store = 2;
    s.n_store = 2;
    s.chains = 1;
    CHECK(epilog_bound(s) == 9);
    s.chains = 4;
    CHECK(epilog_bound(s) == 12);
    s.l_vmac_to_store = 0;
    s.l_store = 1;
    s.n_store = 1;
    s.chains = 1;
    CHECK(epilog_bound(s) == 1);
    // Extra slots divide the serial store and VMAC drains.
    s = MicrokernelSpec{};
    s.chains = 4;
    s.n_store = 4;
    s.u_st = 2;
    s.u_vmac = 2;
    CHECK(epilog_bound(s) == 6 + 2 + 2 - 1 + 2 - 1);
}

TEST_CASE("cluster totals") {
    const auto s = eight_cluster_spec();
    const auto b = latency_bounds(s);
    CHECK(b.t_prolog == 10);
    CHECK(b.ii_parallel == Rational(1));
    CHECK(b.t_steady == 4);
    CHECK(b.t_epilog == 12);
    CHECK(b.l_total_sequential == 208);
    CHECK(b.l_total_overlapped_literal == 86);
    // One exposed VMAC issue per chain at each of the seven boundaries.
    CHECK(b.l_total_overlapped == 10 + 4 * 8 + 4 * 7 + 12);
    CHECK(total_latency(s, ClusterMode::sequential) == 208);
    CHECK(total_latency(s, ClusterMode::overlapped) == 82);

    auto none = s;
    none.n_clusters = 0;
    const auto z = latency_bounds(none);
    CHECK(z.l_total_sequential == 0);
    CHECK(z.l_total_overlapped == 0);
}

TEST_CASE("single cluster: overlapped equals sequential") {
    auto s = eight_cluster_spec();
    s.n_clusters = 1;
    const auto b = latency_bounds(s);
    CHECK(b.l_total_overlapped == b.l_total_sequential);
    CHECK(b.l_total_overlapped_literal > b.l_total_sequential);
}

TEST_CASE("microkernel efficiency") {
    const auto e = eff_micro(8, 4, Rational(1), Rational(87, 10));
    CHECK(to_double(e) == doctest::Approx(0.63).epsilon(0.005));
    CHECK(to_double(eff_micro(1'000'000, 4, Rational(1), Rational(20))) ==
          doctest::Approx(1.0).epsilon(1e-4));
    // Capped at one VMAC per II.
    CHECK(eff_micro(4, 4, Rational(1), Rational(1)) == Rational(1));
    CHECK_THROWS_AS(eff_micro(4, 4, Rational(0), Rational(1)), std::invalid_argument);

    auto s = eight_cluster_spec();
    const auto one = latency_bounds(s).eff_micro;
    s.n_clusters = 16;
    CHECK(latency_bounds(s).eff_micro == one);
}

TEST_CASE("fitted efficiency") {
    MicrokernelSpec s = eight_cluster_spec();
    const auto ii = initiation_intervals(s).ii_parallel;
    const auto fit = eff_micro_fit(s, ii);
    CHECK(fit.epsilon == Rational(10 + 12 - 4));
    // With t_k = 8 * n_accum the fit and the closed form agree exactly.
    for (std::int64_t n : {4, 8, 16, 64}) {
        s.n_accum = n;
        CHECK(fit.at(8 * n) == Rational(n) / (Rational(22) + Rational(n - 4)));
    }
}

TEST_CASE("random specs: orderings between the bounds") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_microkernel(rng);
        const auto b = latency_bounds(s);
        REQUIRE(b.l_total_overlapped <= b.l_total_sequential);
        REQUIRE(b.eff_micro * b.ii_parallel <= Rational(1));
        auto longer = s;
        longer.n_accum += 1;
        REQUIRE(latency_bounds(longer).eff_micro >= b.eff_micro);
    }
}

TEST_CASE("tile-derived microkernel") {
    const auto s = microkernel_for_tile(TileConfig{32, 128, 64, 128});
    CHECK(s.n_accum == 8);
    CHECK(s.n_clusters == 32 * 128 / 64 / 4);
}

TEST_CASE("spec validation") {
    MicrokernelSpec s;
    s.chains = 6;
    s.accum_regs = 5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = MicrokernelSpec{};
    s.load_classes.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
