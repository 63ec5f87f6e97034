#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trf::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;

// Runs one command line (without the program name). Normal output goes to
// `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trf::cli
