#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fverify::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitDegenerate = 2;
inline constexpr int kExitUsage = 64;

inline constexpr int kSchemaVersion = 1;

// Runs one subcommand. args excludes the program name. JSON and CSV payloads
// go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fverify::cli
