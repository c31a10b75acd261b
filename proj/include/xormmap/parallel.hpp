#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace xormmap {

// Runs task(0..count-1) on up to `threads` workers. Tasks must be independent;
// each typically writes its own pre-sized result slot, so scheduling order
// cannot influence the outcome.
inline void run_indexed_tasks(int threads, int count, const std::function<void(int)>& task) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (int i = 0; i < count; i++) task(i);
        return;
    }
    std::atomic<int> next{0};
    int workers = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; w++)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                task(i);
            }
        });
    for (std::thread& t : pool) t.join();
}

}  // namespace xormmap
