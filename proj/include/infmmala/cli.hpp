#pragma once

namespace infmmala {

// Full command-line entry point (argument parsing, config resolution,
// dispatch to the experiment commands). Returns the process exit code:
// 0 success, 2 usage/config error, 3 numerical/runtime error, 4 I/O error.
int cli_main(int argc, const char* const* argv);

}  // namespace infmmala
