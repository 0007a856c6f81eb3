#include "pfecc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "pfecc/errors.hpp"

namespace pfecc {

namespace {

int g_override = -1;  // -1: use environment; >= 0: explicit

int resolve_auto() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int thread_count() {
    int requested = 0;
    if (g_override >= 0) {
        requested = g_override;
    } else if (const char* env = std::getenv("PFECC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 0 || v > 1024) {
            fail(ErrorKind::UsageError,
                 "PFECC_THREADS must be an integer in [0, 1024], got '" + std::string(env) + "'");
        }
        requested = static_cast<int>(v);
    }
    return requested == 0 ? resolve_auto() : requested;
}

void set_thread_count(int n) { g_override = n; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int threads = thread_count();
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace pfecc
