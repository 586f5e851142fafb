#pragma once

#include <ostream>

namespace bayesdoe::cli {

/// Runs one command line. Exit codes: 0 success, 2 usage or validation
/// error, 1 anything else.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bayesdoe::cli
