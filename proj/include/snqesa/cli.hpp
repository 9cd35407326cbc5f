#pragma once
#include <iosfwd>

namespace snq {

/// Exit codes: 0 success, 2 usage or input error, 3 unrecoverable numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snq
