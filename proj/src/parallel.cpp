#include "ibflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ibflow {

int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("IBFLOW_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<long>(n, cap);
    }
    return n;
}

void parallel_for(int begin, int end, const std::function<void(int)>& body) {
    const int n = end - begin;
    if (n <= 0) return;
    const int workers = std::min(worker_count(), n);
    if (workers == 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + w * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace ibflow
