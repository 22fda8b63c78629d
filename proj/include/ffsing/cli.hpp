#pragma once

// Command-line front end. Exit codes: 0 success, 1 selftest failure,
// 2 contract violation ("ERR <code>: <message>" on stderr), 3 I/O failure,
// 4 parse failure or bad command line.

#include <ostream>
#include <string>
#include <vector>

namespace ffsing::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftestFailed = 1;
inline constexpr int kExitContract = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitParse = 4;

// Environment variable overriding the default tolerance of every command.
inline constexpr const char* kTolEnv = "FFSING_TOL";

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ffsing::cli
