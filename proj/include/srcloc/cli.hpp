#pragma once

#include <ostream>

namespace srcloc {

// Entry point of the `srcloc` tool. Subcommands: stats, simulate, run, eval,
// methods. Returns 0 on success, 1 on usage errors, 2 on runtime errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace srcloc
