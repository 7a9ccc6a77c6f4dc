#pragma once

#include <iosfwd>

namespace tunnelnav {

/// Entry point of the command-line tool. Returns 0 on success, 1 when a
/// requested check fails and 2 when the scenario cannot be loaded.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tunnelnav
