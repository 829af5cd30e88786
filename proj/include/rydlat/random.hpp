#pragma once

// Counter-based random streams. Every draw is a pure function of
// (key, counter), so a site's displacement never depends on which thread
// produced it or on how many other draws happened before.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rydlat {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t realization,
                                   std::uint64_t site) noexcept {
    return mix64(mix64(mix64(master_seed) ^ realization) ^ (site + 0x632be59bd9b4e019ULL));
}

class CounterStream {
public:
    explicit constexpr CounterStream(std::uint64_t key) noexcept : key_(key) {}

    constexpr std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(counter_++)); }

    // Uniform on the open interval (0, 1).
    double next_uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second value of each pair is kept.
    double next_normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rydlat
