// Deterministic, splittable randomness and a schedule-independent parallel map.
//
// Every stochastic routine in the library takes an explicit 64-bit seed and
// derives per-task child seeds by indexed splitting, so results do not depend
// on thread count or execution order.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace anacomp {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless mix of (seed, index) into a child seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x2545f4914f6cdd1dULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b >> 1);
}

// Small deterministic generator. Distributions are hand-rolled so output is
// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // advance past low-entropy seeds
        splitmix64(state_);
        splitmix64(state_);
    }

    static Rng child(std::uint64_t seed, std::uint64_t index) {
        return Rng(split_seed(seed, index));
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0,1) with 53 random bits
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n), rejection sampled (n > 0)
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    // standard normal via Box-Muller (second value discarded)
    double next_normal() {
        double u1, u2;
        do { u1 = next_unit(); } while (u1 <= 0.0);
        u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

// Runs fn(task) for task = 0..count-1 on up to `jobs` threads. Tasks must be
// independent; each writes its own output slot, so the combined result is the
// same for every jobs value.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t t = 0; t < count; ++t) fn(t);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t t = w; t < count; t += nthreads) fn(t);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace anacomp
