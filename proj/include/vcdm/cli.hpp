#pragma once

namespace vcdm {

// Entry point for the `vcdm` tool. Returns the process exit code:
// 0 success, 1 usage/config/contract error, 2 I/O error.
int run_cli(int argc, char** argv);

}  // namespace vcdm
