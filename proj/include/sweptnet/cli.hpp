#pragma once

namespace sweptnet {

// Entry point of the `sweptnet` binary. Exit codes: 0 success, 1 usage
// error, 2 runtime/data error.
int cli_main(int argc, const char* const* argv);

}  // namespace sweptnet
