#pragma once

#include <iosfwd>

namespace entineq::cli {

enum ExitCode : int { ok = 0, input_error = 2, precondition_unmet = 3 };

/// Runs the command line in-process; the report goes to `out` unless --report is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace entineq::cli
