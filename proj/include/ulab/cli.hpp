#pragma once

#include <iosfwd>

namespace ulab {

/// Exit codes: 0 success, 1 scenario verdict mismatch, 2 configuration or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ulab
