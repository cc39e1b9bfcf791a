#pragma once

namespace ssrv {

// Entry point for the ssrv tool. Returns 0 on success, 1 on validation or
// usage errors, 2 on I/O failures.
int run_cli(int argc, const char* const* argv);

}  // namespace ssrv
