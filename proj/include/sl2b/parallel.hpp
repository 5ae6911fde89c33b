#pragma once

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace sl2b {

namespace detail {
inline std::atomic<int>& thread_override()
{
    static std::atomic<int> v{0};
    return v;
}
}  // namespace detail

// Flag (set_thread_count) wins over SL2B_THREADS, which wins over hardware concurrency.
inline void set_thread_count(int n) { detail::thread_override() = std::max(0, n); }

inline int thread_count()
{
    int o = detail::thread_override();
    if (o > 0) return o;
    if (const char* env = std::getenv("SL2B_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

constexpr uint64_t kChunk = uint64_t(1) << 14;

// Sum f(i) for i < n. Chunks are summed sequentially and combined in chunk order,
// so the result does not depend on the number of threads.
template <class T, class F>
T parallel_sum(uint64_t n, F&& f)
{
    uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<T> partial(chunks, T{});
    auto run_chunk = [&](uint64_t c) {
        T s{};
        uint64_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (uint64_t i = lo; i < hi; ++i) s += f(i);
        partial[c] = s;
    };
    int threads = int(std::min<uint64_t>(uint64_t(thread_count()), chunks));
    if (threads <= 1) {
        for (uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<uint64_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }
    T total{};
    for (auto& p : partial) total += p;
    return total;
}

// Run f(i) for i < n in parallel; f must write only to slot i of its own output.
template <class F>
void parallel_for(uint64_t n, F&& f)
{
    uint64_t chunks = (n + kChunk - 1) / kChunk;
    int threads = int(std::min<uint64_t>(uint64_t(thread_count()), chunks));
    auto run_chunk = [&](uint64_t c) {
        uint64_t lo = c * kChunk, hi = std::min(n, lo + kChunk);
        for (uint64_t i = lo; i < hi; ++i) f(i);
    };
    if (threads <= 1) {
        for (uint64_t c = 0; c < chunks; ++c) run_chunk(c);
        return;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
        });
    for (auto& th : pool) th.join();
}

}  // namespace sl2b
