#pragma once

// Command-line front end. run() is the whole program minus process setup, so
// tests can drive it in-process.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace xpowx::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // I/O problems, replay mismatch
  kUsage = 2,
  kDomain = 3,
  kBudget = 4,
};

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// XPOWX_CACHE_DIR, else $XDG_CACHE_HOME/xpowx, else ~/.cache/xpowx.
std::filesystem::path cache_root();

}  // namespace xpowx::cli
