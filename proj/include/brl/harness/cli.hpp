#pragma once

#include <iosfwd>

namespace brl {

// Runs one CLI invocation. Exit codes: 0 success, 2 usage or configuration
// problems, 1 anything else. Diagnostics go to `err` as one line.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brl
