#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ginger {

inline constexpr int kExitOk = 0;
inline constexpr int kExitQueryFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `ginger` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ginger
