#pragma once

#include <string>
#include <vector>

namespace hrl::cli {

/// Entry point for the `hrl` tool. Subcommands: train, discover, compare, eval.
/// Returns the process exit code; 0 on success, 2 on usage errors, 1 on runtime failures.
int main(int argc, char** argv);

/// Same as main() with argv[0] supplied internally.
int run(const std::vector<std::string>& args);

/// Root directory for run output when --out is not given: $HRL_OUT_ROOT or "runs".
std::string default_output_root();

}  // namespace hrl::cli
