#pragma once

namespace meraclust::io {

// Command-line entry point: subcommands cluster, anchor, compress, eval,
// synth. Returns 0 on success, 2 on usage errors, 1 on runtime failures.
int run_cli(int argc, const char* const* argv);

}  // namespace meraclust::io
