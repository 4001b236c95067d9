#ifndef RANGELAB_RNG_HPP
#define RANGELAB_RNG_HPP

#include <cstdint>

namespace rangelab {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Splittable stream keyed by (root seed, stream index).  Distinct keys give
/// independent xoshiro256** states; identical keys give bit-identical output,
/// so replicas can run in any order.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

class Rng {
public:
    Rng() : Rng(RngStream{}) {}

    explicit Rng(RngStream stream) {
        std::uint64_t x = stream.seed;
        (void)splitmix64(x);
        x ^= 0x6a09e667f3bcc909ULL ^ stream.index * 0x9e3779b97f4a7c15ULL;
        for (auto& w : s_) w = splitmix64(x);
    }

    Rng(std::uint64_t seed, std::uint64_t index) : Rng(RngStream{seed, index}) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, n) by Lemire's multiply-shift with rejection.
    std::uint32_t below(std::uint32_t n) {
        std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next_u64())) * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            const std::uint32_t thresh = (0u - n) % n;
            while (lo < thresh) {
                m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next_u64())) * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace rangelab

#endif
