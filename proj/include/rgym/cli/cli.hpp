#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rgym::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the `rgym` tool. `args` excludes the program name.
/// Returns the process exit code (0 ok, 2 configuration error, 3 runtime
/// error).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace rgym::cli
