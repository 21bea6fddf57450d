#pragma once

#include <iosfwd>

namespace polarsim::cli {

/// Runs one command line. Returns 0 on success, 2 on a usage error and 1 on
/// any other failure; diagnostics go to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polarsim::cli
