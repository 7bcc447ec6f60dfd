#ifndef PORTLOSS_RNG_HPP
#define PORTLOSS_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "portloss/numerics.hpp"

namespace portloss {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
/// A (key, counter) pair maps to four 32-bit words; there is no hidden state,
/// so any (seed, stream, block) index can be generated independently and in
/// any order -- the property the reproducible parallel sampling relies on.
namespace philox {

inline constexpr std::uint32_t kW32A = 0x9E3779B9u;
inline constexpr std::uint32_t kW32B = 0xBB67AE85u;
inline constexpr std::uint32_t kM4x32A = 0xD2511F53u;
inline constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

inline void round_once(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t prod0 = static_cast<std::uint64_t>(kM4x32A) * ctr[0];
    const std::uint64_t prod1 = static_cast<std::uint64_t>(kM4x32B) * ctr[2];
    const std::uint32_t lo0 = static_cast<std::uint32_t>(prod0);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(prod0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(prod1);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(prod1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    for (int i = 0; i < 10; ++i) {
        round_once(ctr, key);
        if (i < 9) {
            key[0] += kW32A;
            key[1] += kW32B;
        }
    }
    return ctr;
}

} // namespace philox

/// Independent substream of uniforms identified by (seed, stream index).
/// Each 128-bit block yields two doubles in (0,1); draws advance the block
/// counter only, so streams never collide.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    /// Uniform draw strictly inside (0,1).
    double uniform() {
        if (have_ == 0) refill();
        const std::uint64_t bits = pending_[--have_];
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return std_normal_quantile(uniform()); }

    /// Poisson draw by CDF inversion; exact and deterministic per uniform.
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double u = uniform();
        double term = std::exp(-mean);
        double cum = term;
        int k = 0;
        const int cap = static_cast<int>(mean + 60.0 * std::sqrt(mean + 1.0) + 20.0);
        while (u > cum && k < cap) {
            ++k;
            term *= mean / k;
            cum += term;
        }
        return k;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    void refill() {
        const std::array<std::uint32_t, 4> out =
            philox::block({base_[0], base_[1], block_, 0u}, key_);
        ++block_;
        pending_[1] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        pending_[0] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        have_ = 2;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 2> base_;
    std::uint32_t block_ = 0;
    std::array<std::uint64_t, 2> pending_{};
    int have_ = 0;
};

} // namespace portloss

#endif
