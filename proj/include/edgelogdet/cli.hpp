#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edgelogdet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitVerifyFailed = 2;
inline constexpr int kExitRuntime = 3;

/// Runs one invocation. `args` excludes the program name, e.g.
/// {"logdet", "--n", "64", "--sigma", "1"}. Results go to `out`; the effective
/// configuration, warnings and diagnostics go to `err`.
int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace edgelogdet::cli
