#pragma once

#include <iosfwd>

namespace stairgen {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

// Entry point of the `stairgen` tool: generate | sweep | compare | bleu.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stairgen
