#pragma once

#include <cstdlib>
#include <thread>

namespace ssrv {

// Worker-count resolution: an explicit positive request wins, then the
// SPARSE_SSRV_THREADS environment variable, then all cores. The value 0
// means "all cores" both as a request and in the variable. Thread count
// never changes results, only wall time.
inline int resolve_threads(int requested = 0) {
    long v = requested;
    if (v <= 0) {
        if (const char* env = std::getenv("SPARSE_SSRV_THREADS")) {
            char* end = nullptr;
            const long parsed = std::strtol(env, &end, 10);
            v = (end != env && parsed > 0) ? parsed : 0;
        }
    }
    if (v <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        v = hc ? static_cast<long>(hc) : 1;
    }
    return static_cast<int>(v);
}

}  // namespace ssrv
