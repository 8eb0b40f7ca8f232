#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qmix {

/// Runs fn(rep) for rep = 0..reps-1, optionally fanned across workers.
/// fn must write only to state owned by its replication index, so results are
/// byte-identical for any worker count.
template <class Fn>
void run_replications(std::size_t reps, int workers, Fn&& fn) {
    if (workers <= 1 || reps < 2) {
        for (std::size_t r = 0; r < reps; ++r) fn(r);
        return;
    }
    const std::size_t chunk = 64;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= reps) return;
            const std::size_t end = std::min(begin + chunk, reps);
            for (std::size_t r = begin; r < end; ++r) fn(r);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(std::thread::hardware_concurrency() > 0
                                                              ? std::thread::hardware_concurrency()
                                                              : 2));
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace qmix
