#include <random>

#include "doctest.h"

#include "atb/perf_model.hpp"

using namespace atb;

namespace {
const PrecisionSpec kConfig1 = precision_preset("config1");
const Rational kEff64{63, 100};
}  // namespace

TEST_CASE("kernel time with switch overhead") {
    const TileConfig t{32, 128, 64, 128};
    const auto cycles = t_asym(t, 4096, kEff64, ArchSpec{});
    // 2*128*4096*128 / (1024 * 0.63) + 50 * 4 * 4096 / 64
    CHECK(to_double(cycles) == doctest::Approx(208050.79 + 12800.0).epsilon(1e-7));
    ArchSpec no_switch;
    no_switch.switch_overhead_delta = 0;
    CHECK(t_asym(t, 4096, kEff64, no_switch) ==
          Rational(2 * 128 * 4096 * 128) / (Rational(1024) * kEff64));

    const auto compute = t_asym(t, 4096, kEff64, no_switch);
    const auto sw4 = cycles - compute;
    const auto sw1 = t_asym(TileConfig{128, 128, 64, 128}, 4096, kEff64, ArchSpec{}) - compute;
    CHECK(sw4 == Rational(4) * sw1);

    CHECK_THROWS_AS(t_asym(t, 4000, kEff64, ArchSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(t_asym(t, 4096, Rational(0), ArchSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(t_asym(t, 4096, Rational(3, 2), ArchSpec{}), std::invalid_argument);
}

TEST_CASE("core efficiency") {
    const auto e = eff_core(TileConfig{128, 512, 64, 128}, kEff64, ArchSpec{});
    // 1 / (100/63 + 50*4*1024 / (2*512*128*64))
    CHECK(to_double(e) == doctest::Approx(1.0 / (100.0 / 63.0 + 204800.0 / 8388608.0)));
    CHECK(to_double(e) == doctest::Approx(0.6204).epsilon(1e-3));
    CHECK(to_double(e) >= 0.511);  // measured value sits below the bound

    ArchSpec no_switch;
    no_switch.switch_overhead_delta = 0;
    CHECK(eff_core(TileConfig{32, 128, 64, 128}, kEff64, no_switch) == kEff64);

    Rational prev = kEff64;
    for (std::int64_t rho = 1; rho <= 64; rho *= 2) {
        const auto x = eff_core(TileConfig::from_rho(512, 64, 128, rho), kEff64, ArchSpec{});
        CHECK(x < prev);
        prev = x;
    }
}

TEST_CASE("eff_core trends") {
    const EffMicroOptions opts;
    for (std::int64_t rho : {1, 2, 4, 8}) {
        Rational prev(0);
        for (std::int64_t tk : {8, 16, 32, 64}) {
            const auto t = TileConfig::from_rho(128, tk, 128, rho);
            const auto x = eff_core(t, eff_micro_for(t, opts), ArchSpec{});
            CHECK(x > prev);
            prev = x;
        }
    }
}

TEST_CASE("calibration table") {
    const CalibrationTable t;
    CHECK(t.at(8) == Rational(1, 5));
    CHECK(t.at(64) == Rational(63, 100));
    CHECK(t.at(48) == Rational(52, 100));
    CHECK(t.at(24) == Rational(385, 1000));
    CHECK(t.at(4) == Rational(1, 5));
    CHECK(t.at(512) == Rational(63, 100));
}

TEST_CASE("efficiency sources") {
    const TileConfig t{32, 128, 64, 128};
    EffMicroOptions o;
    CHECK(eff_micro_for(t, o) == kEff64);
    o.source = EffMicroSource::closed_form;
    const auto closed = eff_micro_for(t, o);
    CHECK(closed > Rational(0));
    CHECK(closed <= Rational(1));
    o.source = EffMicroSource::simulator;
    const auto sim = eff_micro_for(TileConfig{8, 8, 64, 32}, o);
    CHECK(sim > Rational(0));
    CHECK(sim <= Rational(1));
    CHECK(parse_eff_micro_source("simulator") == EffMicroSource::simulator);
    CHECK_THROWS_AS(parse_eff_micro_source("guess"), std::invalid_argument);
}

TEST_CASE("whole-array bound for the rho=4 tile") {
    const auto e = perf_array(TileConfig{32, 128, 64, 128}, ProblemSpec{4096, 4096, 2048}, kConfig1,
                              ArchSpec{}, kEff64);
    CHECK(e.feasible);
    CHECK(e.ai_array == Rational(2048, 5));
    CHECK(to_tflops(e.memory_bound) == doctest::Approx(26.624));
    CHECK(e.compute_bound > e.memory_bound);
    CHECK(e.perf_array == e.memory_bound);
    CHECK(e.bound_kind == BoundKind::memory);
    CHECK(e.buffer_bytes == 61440);
    CHECK(e.buffer_bytes_symmetric == 86016);
    CHECK(e.eff_core <= e.eff_micro);
    CHECK(to_tflops(e.perf_array) >= 24.3);
}

TEST_CASE("rho=6 tile under BFP16") {
    const auto e = perf_array(TileConfig{32, 192, 128, 96}, ProblemSpec{3072, 4096, 1536},
                              precision_preset("config2"), ArchSpec{}, kEff64);
    CHECK(to_double(e.ai_array) == doctest::Approx(561.7).epsilon(1e-3));
    CHECK(to_tflops(e.memory_bound) == doctest::Approx(36.5).epsilon(2e-3));
}

TEST_CASE("unbounded bandwidth leaves the compute side") {
    ArchSpec arch;
    arch.offchip_bw = 1e30;
    const auto e = perf_array(TileConfig{32, 128, 64, 128}, ProblemSpec{4096, 4096, 2048}, kConfig1,
                              arch, kEff64);
    CHECK(e.perf_array == e.compute_bound);
    CHECK(e.bound_kind == BoundKind::compute);
    // compute side = eff_core * 1024 flops/cycle * 32 cores * clock
    CHECK(e.compute_bound == doctest::Approx(to_double(e.eff_core) * 1024 * 32 * 1.8e9));
}

TEST_CASE("ties are memory bound") {
    // 1 flop/s of compute per core: pick bandwidth to match exactly.
    ArchSpec arch;
    arch.switch_overhead_delta = 0;
    const auto probe = perf_array(TileConfig{32, 128, 64, 128}, ProblemSpec{4096, 4096, 2048},
                                  kConfig1, arch, Rational(1, 2));
    arch.offchip_bw = probe.compute_bound / to_double(probe.ai_array);
    const auto e = perf_array(TileConfig{32, 128, 64, 128}, ProblemSpec{4096, 4096, 2048}, kConfig1,
                              arch, Rational(1, 2));
    if (e.memory_bound == e.compute_bound) CHECK(e.bound_kind == BoundKind::memory);
}

TEST_CASE("infeasible and ragged inputs") {
    const auto e = perf_array(TileConfig{128, 128, 64, 128}, ProblemSpec{4096, 4096, 2048}, kConfig1,
                              ArchSpec{}, kEff64);
    CHECK_FALSE(e.feasible);
    CHECK(e.perf_array == 0.0);
    CHECK_THROWS_AS(perf_array(TileConfig{32, 128, 64, 128}, ProblemSpec{4000, 4096, 2048}, kConfig1,
                               ArchSpec{}, kEff64),
                    std::invalid_argument);
}

TEST_CASE("performance never exceeds either roof") {
    std::mt19937_64 rng(31);
    auto u = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    for (int i = 0; i < 300; ++i) {
        const std::int64_t rho = std::int64_t{1} << u(0, 3);
        const auto t = TileConfig::from_rho(8 * rho * u(1, 4), 8 * u(1, 16), 8 * u(1, 16), rho);
        const ProblemSpec p{4 * t.t_mc * u(1, 3), t.t_k * u(1, 8), 8 * t.t_n * u(1, 3)};
        const auto e = perf_array(t, p, kConfig1, ArchSpec{}, Rational(u(1, 100), 100));
        REQUIRE(e.perf_array <= e.memory_bound);
        REQUIRE(e.perf_array <= e.compute_bound);
        REQUIRE(e.eff_core <= e.eff_micro);
    }
}
