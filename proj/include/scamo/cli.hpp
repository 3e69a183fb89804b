#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scamo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the scamo-lab tool. `args` excludes the program name.
/// Results go to `out` (or --out), diagnostics to `err`; `in` backs any
/// input path given as "-" or left unset.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace scamo::cli
