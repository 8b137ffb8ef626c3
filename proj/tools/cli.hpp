#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ceal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Dispatches `ceal <generate|run|score|report> ...`. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ceal::cli
