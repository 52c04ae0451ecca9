#pragma once

// JSON run configuration. Every object rejects keys it does not know, and
// errors name the offending key path.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "atb/arch_model.hpp"
#include "atb/dse.hpp"
#include "atb/ilp_model.hpp"
#include "atb/sched_sim.hpp"

namespace atb {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ArchSpec arch;
    std::string precision_name{"config1"};
    PrecisionSpec precision = precision_preset("config1");
    std::optional<ProblemSpec> problem;
    std::optional<TileConfig> tile;
    MicrokernelSpec microkernel = bfp16_microkernel();
    bool microkernel_given = false;
    DagOptions schedule{true, true, false};
    SearchSpace search;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config_file(const std::string& path);

/// "4096x4096x2048" (M x K x N).
ProblemSpec parse_problem(std::string_view text);
/// "32,128,64,128" (T_MA, T_MC, T_K, T_N).
TileConfig parse_tile(std::string_view text);
std::vector<std::int64_t> parse_int_list(std::string_view text);

}  // namespace atb
