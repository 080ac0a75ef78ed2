#pragma once

#include <cmath>
#include <cstdint>

namespace latlab {

// splitmix64 finalizer; full-period, statistically solid for Monte Carlo use
inline uint64_t splitmix64_mix(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stream tags keep draws for different purposes out of each other's way even
// within one trial. Values are part of the reproducibility contract: changing
// them changes every experiment's output.
enum class Stream : uint64_t {
    HeckePoint = 1,
    SphereDir = 2,
    LimitGap = 3,
    LimitAngle = 4,
};

// Counter-based generator: the state is a pure function of
// (seed, trialIndex, stream), so trials are reproducible under any thread
// schedule and there is no shared mutable state anywhere.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t trialIndex, Stream stream) {
        uint64_t k = splitmix64_mix(seed ^ 0x8BADF00DDEADBEEFull);
        k = splitmix64_mix(k ^ trialIndex);
        state_ = splitmix64_mix(k ^ (static_cast<uint64_t>(stream) << 32));
    }

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    // strictly inside (0,1); safe to take logs
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    // Box-Muller with the usual spare caching. Hand-rolled instead of
    // std::normal_distribution because libstdc++ does not pin its algorithm.
    double gaussian() {
        if (haveSpare_) {
            haveSpare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double t = 6.283185307179586476925286766559 * uniform01();
        spare_ = r * std::sin(t);
        haveSpare_ = true;
        return r * std::cos(t);
    }

    double exponential(double mean) { return -mean * std::log(uniform01()); }

    // unbiased uniform integer in [0, n), rejection on the short low range
    uint64_t below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            const uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool haveSpare_ = false;
};

// Deterministic Miller-Rabin, exact for all 64-bit inputs with this base set.
inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    auto mulmod = [n](uint64_t a, uint64_t b) -> uint64_t {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
    };
    auto powmod = [&](uint64_t a, uint64_t e) -> uint64_t {
        uint64_t r = 1;
        a %= n;
        while (e) {
            if (e & 1) r = mulmod(r, a);
            a = mulmod(a, a);
            e >>= 1;
        }
        return r;
    };
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod(a, d);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline uint64_t next_prime_at_least(uint64_t n) {
    if (n <= 2) return 2;
    if ((n & 1) == 0) ++n;
    while (!is_prime_u64(n)) n += 2;
    return n;
}

}  // namespace latlab
