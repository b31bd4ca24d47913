#pragma once

#include <iosfwd>

namespace brirsim {

/// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 runtime or I/O
/// failure. Every failure prints one "error: ..." line to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brirsim
