#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace funroot {

/// SplitMix64 (Steele, Lea & Flood): a Weyl counter passed through a 64-bit
/// finalizer. Standard normals come from the inverse normal CDF of a 53-bit
/// uniform on (0,1). Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    static constexpr const char* algorithm = "splitmix64/inverse-cdf-normal";

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    /// Independent stream for replication `index` of a Monte-Carlo run.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept { return SplitMix64(seed ^ index); }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0,1).
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * uniform()); }

private:
    std::uint64_t state_;
};

}  // namespace funroot
