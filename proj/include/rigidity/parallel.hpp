#ifndef RIGIDITY_PARALLEL_HPP
#define RIGIDITY_PARALLEL_HPP

#include <atomic>
#include <thread>
#include <vector>

namespace rigidity {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(chunk_index) for chunk_index in [0, num_chunks). Chunks are claimed
// dynamically but identified by index, so callers that write into
// per-chunk slots get schedule-independent results.
template <typename Fn>
void parallel_chunks(long long num_chunks, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || num_chunks <= 1) {
        for (long long c = 0; c < num_chunks; ++c) fn(c);
        return;
    }
    std::atomic<long long> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            long long c = next.fetch_add(1);
            if (c >= num_chunks || failed.load()) return;
            try {
                fn(c);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int n = static_cast<int>(std::min<long long>(threads, num_chunks));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace rigidity

#endif
