#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace emspec {

// All randomness in the pipeline flows from one root seed through named
// sub-streams, so independent stages (and independent epochs within a stage)
// draw from decorrelated generators regardless of scheduling order.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Seed for the sub-stream identified by (root_seed, label, index). The label
// separates stages ("outliers", "simulate", ...); the index separates units
// of work inside a stage (epoch end-date ordinal, replicate number, ...).
inline std::uint64_t substream_seed(std::uint64_t root_seed, std::string_view label,
                                    std::int64_t index = 0) {
    std::uint64_t h = detail::splitmix64(root_seed ^ detail::fnv1a(label));
    return detail::splitmix64(h ^ static_cast<std::uint64_t>(index));
}

inline std::mt19937_64 substream_engine(std::uint64_t root_seed, std::string_view label,
                                        std::int64_t index = 0) {
    return std::mt19937_64(substream_seed(root_seed, label, index));
}

// Uniform in [0,1) from the top 53 bits. Explicit conversion keeps streams
// bit-identical across standard libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller with a cached spare. std::normal_distribution
// is implementation-defined, so the transform is spelled out.
class NormalSampler {
public:
    explicit NormalSampler(std::mt19937_64 engine) : eng_(engine) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(eng_);
        while (u1 <= 0.0) u1 = uniform01(eng_);
        const double u2 = uniform01(eng_);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace emspec
