#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "atb/cli.hpp"
#include "atb/config.hpp"

using namespace atb;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "atb");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string config_path(const char* name) { return std::string(ATB_CONFIG_DIR) + "/" + name; }

std::string error_of(const char* json) {
    try {
        parse_config(json);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool has(const std::string& s, const char* what) { return s.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"({
        "arch": {"l1_capacity": 32768, "offchip_bw": 1e11},
        "precision": {"byte_cost_a": 2, "byte_cost_b": "9/8", "byte_cost_c": 4},
        "problem": "1024x512x256",
        "tile": {"t_ma": 16, "t_mc": 64, "t_k": 32, "t_n": 64},
        "schedule": {"share_inputs": true},
        "search": {"rho_candidates": [1, 4], "calibration": [[8, 0.5], [64, "3/4"]]}
    })");
    CHECK(cfg.arch.l1_capacity == 32768);
    CHECK(cfg.arch.offchip_bw == 1e11);
    CHECK(cfg.precision.byte_cost_b == Rational(9, 8));
    CHECK(cfg.precision_name == "custom");
    CHECK(cfg.problem->m == 1024);
    CHECK(cfg.problem->k == 512);
    CHECK(cfg.problem->n == 256);
    CHECK(*cfg.tile == TileConfig{16, 64, 32, 64});
    CHECK(cfg.schedule.share_inputs);
    CHECK(cfg.search.rho_candidates == std::vector<std::int64_t>{1, 4});
    CHECK(cfg.search.eff.table.at(64) == Rational(3, 4));

    const auto preset = parse_config(R"({"precision": "config2", "tile": {"t_mc": 128, "t_k": 64, "t_n": 128, "rho": 4}})");
    CHECK(preset.precision.byte_cost_a == Rational(5, 4));
    CHECK(preset.tile->t_ma == 32);

    CHECK(parse_tile("32,128,64,128") == TileConfig{32, 128, 64, 128});
    CHECK(parse_int_list("1, 2,8") == std::vector<std::int64_t>{1, 2, 8});
    CHECK_THROWS_AS(parse_problem("4096x4096"), std::invalid_argument);
}

TEST_CASE("config errors name the key") {
    CHECK(has(error_of(R"({"arch": {"l1_capacityy": 1}})"), "arch.l1_capacityy"));
    CHECK(has(error_of(R"({"arch": {"n_rows": "four"}})"), "arch.n_rows"));
    CHECK(has(error_of(R"({"tile": {"t_mc": 128, "t_k": 64, "t_n": 128, "rho": 3}})"), "tile.rho"));
    CHECK(has(error_of(R"({"microkernel": {"load_classes": [{"latency": 8, "size": 2}]}})"),
              "microkernel.load_classes[0].size"));
    CHECK(has(error_of(R"({"search": {"eff_micro_source": "guess"}})"), "search.eff_micro_source"));
    CHECK(has(error_of(R"({"precision": "fp8"})"), "precision"));
    CHECK(has(error_of("{"), "JSON"));
}

TEST_CASE("shipped configs load") {
    CHECK_NOTHROW(load_config_file(config_path("config1_atb.json")));
    CHECK_NOTHROW(load_config_file(config_path("config2_search.json")));
    CHECK_NOTHROW(load_config_file(config_path("single_chain.json")));
    CHECK_THROWS_AS(load_config_file(config_path("missing.json")), ConfigError);
}

TEST_CASE("cli eval") {
    const auto r = cli({"eval", "--config", config_path("config1_atb.json")});
    CHECK(r.code == exit_code::ok);
    CHECK(has(r.out, "410"));
    CHECK(has(r.out, "26.6"));
    CHECK(has(r.out, "memory"));

    const auto csv = cli({"eval", "--config", config_path("config1_atb.json"), "--format", "csv"});
    CHECK(csv.code == exit_code::ok);
    CHECK(has(csv.out, "\n"));
    CHECK((has(csv.out, "32,128,64,128") || has(csv.out, "128x64x128")));

    const auto bad = cli({"eval", "--problem", "4096x4096x2048", "--tile", "128,128,64,128"});
    CHECK(bad.code == exit_code::infeasible);
    CHECK(has(bad.err, "86016"));
}

TEST_CASE("cli search") {
    const auto sym = cli({"search", "--problem", "4096x4096x2048", "--rho", "1", "--top", "3"});
    CHECK(sym.code == exit_code::ok);
    CHECK(has(sym.out, "1.000"));

    const auto md = cli({"search", "--config", config_path("config2_search.json"), "--emit", "table2"});
    CHECK(md.code == exit_code::ok);
    CHECK(md.out.rfind("|", 0) == 0);

    // 4095 rows: no L2 tile divides it.
    const auto none = cli({"search", "--problem", "4095x4096x2048"});
    CHECK(none.code == exit_code::infeasible);
}

TEST_CASE("cli schedule") {
    const auto r = cli({"simulate", "schedule", "--config", config_path("single_chain.json"), "--verify"});
    CHECK(r.code == exit_code::ok);
    CHECK(has(r.out, "first vmac cycle      4\n"));
    CHECK(has(r.out, "PASS"));

    const auto many = cli({"simulate", "schedule", "--count", "50", "--seed", "3"});
    CHECK(many.code == exit_code::ok);
}

TEST_CASE("cli dumps are deterministic") {
    const std::string p1 = "atb_test_dump1.csv", p2 = "atb_test_dump2.csv";
    const auto a = cli({"simulate", "schedule", "--config", config_path("single_chain.json"), "--dump", p1});
    const auto b = cli({"simulate", "schedule", "--config", config_path("single_chain.json"), "--dump", p2});
    REQUIRE(a.code == exit_code::ok);
    REQUIRE(b.code == exit_code::ok);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const auto x = slurp(p1);
    CHECK(x.rfind("cycle,slot,id,kind\n", 0) == 0);
    CHECK(x == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("cli movement") {
    const auto r = cli({"simulate", "movement", "--count", "100", "--seed", "9"});
    CHECK(r.code == exit_code::ok);
    CHECK(has(r.out, "100 random configurations, 0 discrepancies"));

    const auto one = cli({"simulate", "movement", "--config", config_path("config1_atb.json"), "--verify"});
    CHECK(one.code == exit_code::ok);
    CHECK(has(one.out, "PASS"));
}

TEST_CASE("cli sweep and errors") {
    const auto r = cli({"sweep", "--format", "csv"});
    CHECK(r.code == exit_code::ok);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 17);

    CHECK(cli({"eval", "--config", "no/such/file.json"}).code == exit_code::config_error);
    CHECK(cli({"eval", "--problem", "4096x4096x2048"}).code == exit_code::config_error);
    CHECK(cli({"eval", "--bogus"}).code == exit_code::config_error);
    CHECK(cli({}).code == exit_code::config_error);
    CHECK(cli({"--help"}).code == exit_code::ok);
}
