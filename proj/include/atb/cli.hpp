#pragma once

#include <iosfwd>

namespace atb {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int infeasible = 2;
inline constexpr int config_error = 3;
inline constexpr int verification_failed = 4;
}  // namespace exit_code

/// Entry point of the `atb` tool: eval, search, simulate {movement,schedule}
/// and sweep. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atb
