#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace negmem {

// Radix-2 complex FFT with a precomputed twiddle/bit-reversal plan.
// Plans are immutable after construction and shared read-only across
// worker threads; one plan per embedding size is all the samplers need.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);  // n must be a power of two, n >= 2

    std::size_t size() const { return n_; }

    // In-place unnormalized transform, sign convention exp(-2*pi*i*jk/n).
    void forward(std::span<std::complex<double>> data) const;

private:
    std::size_t n_;
    std::vector<std::complex<double>> twiddle_;   // exp(-2*pi*i*j/n), j < n/2
    std::vector<std::uint32_t> bitrev_;
};

inline std::size_t next_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

}  // namespace negmem
