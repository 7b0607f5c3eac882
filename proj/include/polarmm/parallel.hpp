#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace polarmm {

// Global worker cap, set once by the CLI (--threads / POLARMM_THREADS).
inline std::atomic<std::size_t>& thread_cap() {
    static std::atomic<std::size_t> cap{0};  // 0 = hardware concurrency
    return cap;
}

inline void set_thread_cap(std::size_t t) { thread_cap().store(t); }

inline std::size_t thread_count() {
    std::size_t cap = thread_cap().load();
    if (cap == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        cap = hw == 0 ? 1 : hw;
    }
    return cap;
}

// Runs fn(block) for block = 0..blocks-1 on a worker pool. Work is addressed
// by block index, so results must be written to per-block slots (or be
// order-independent integer counts); merged in block order afterwards, the
// outcome is identical for every thread count.
inline void parallel_blocks(std::size_t blocks, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = std::min(thread_count(), blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex err_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= blocks || failed.load()) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Fixed block sizes: chunking must not depend on the thread count, or
// per-block floating point partials would change with it.
inline constexpr std::size_t kTrialBlock = 256;
inline constexpr std::size_t kFrameBlock = 64;

}  // namespace polarmm
