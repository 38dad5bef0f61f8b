#pragma once

#include <cmath>
#include <cstdint>

namespace negmem {

// Stateless splitmix64 finalizer.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based stream derivation: the seed of stream `index` is a pure
// function of (master, index), so workers can pick up paths in any order.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64_mix(master ^ splitmix64_mix(index + 0x632be59bd9b4e019ULL));
}

// xoshiro256++ (Blackman & Vigna). Fixed algorithm, fixed bit stream:
// reproducibility is part of the sampler contract.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1]; never returns 0, so log() below is safe.
    double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Exact standard-normal stream via the Box-Muller transform on top of
// xoshiro256++. The algorithm name is recorded in batch metadata because
// reproducibility is promised per (sampler, rng) pair, not across them.
class GaussianStream {
public:
    static constexpr const char* kAlgorithm = "xoshiro256++/box-muller";

    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = rng_.uniform01();
        const double v = rng_.uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u));
        const double angle = 6.283185307179586476925287 * v;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Xoshiro256pp rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace negmem
