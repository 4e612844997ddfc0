#pragma once
// Index-space parallel map over hardware threads. Work items must be
// independent; results land in caller-owned slots, so the outcome does not
// depend on scheduling.

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rlp {

template <class F>
void parallel_for(std::size_t n, F&& body, unsigned max_threads = 0) {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned nt = max_threads ? std::min(max_threads, hw ? hw : 1u) : (hw ? hw : 1u);
    if (nt <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

// Pairwise (cascade) summation over a slot vector: reduction order is fixed
// by index, independent of how the slots were filled.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace rlp
