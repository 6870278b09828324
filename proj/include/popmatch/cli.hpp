#pragma once

// Command line front end.  Kept in a header so the test suite can drive it
// in-process and assert on exact output bytes.

#include <iostream>
#include <string>
#include <vector>

#include "popmatch/instance.hpp"

namespace popmatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;  // check/find/validate: no popular matching
inline constexpr int kExitUsage = 2;     // usage, parse and domain errors
inline constexpr int kExitLimit = 3;     // oracle or permanent size limit exceeded

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace popmatch::cli

#include "popmatch/cli_impl.hpp"
