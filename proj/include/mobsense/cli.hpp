#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mobsense::cli {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

/// Entry point behind the `mobsense` executable. `args` excludes argv[0].
/// Results go to `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mobsense::cli
