#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ilab {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation or assertion failure
inline constexpr int kExitIo = 2;       // I/O or parse failure

// Environment variable holding the default seed.
inline constexpr const char* kSeedEnvVar = "INTERLEAVE_LAB_SEED";

// Entry point of the `interleave-lab` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Quick in-process property checks; prints one PASS/FAIL line per check.
int run_selftest(std::ostream& out);

std::string tool_version();

}  // namespace ilab
