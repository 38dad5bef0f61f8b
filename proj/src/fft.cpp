#include "negmem/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace negmem {

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n < 2 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("FftPlan: size must be a power of two >= 2");
    }
    twiddle_.resize(n / 2);
    const double step = -6.283185307179586476925287 / static_cast<double>(n);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double a = step * static_cast<double>(j);
        twiddle_[j] = {std::cos(a), std::sin(a)};
    }
    bitrev_.resize(n);
    std::uint32_t bits = 0;
    while ((1u << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t r = 0;
        for (std::uint32_t b = 0; b < bits; ++b) {
            r |= ((i >> b) & 1u) << (bits - 1 - b);
        }
        bitrev_[i] = r;
    }
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
    if (data.size() != n_) {
        throw std::invalid_argument("FftPlan::forward: size mismatch");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j = bitrev_[i];
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n_ / len;
        for (std::size_t base = 0; base < n_; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const std::complex<double> w = twiddle_[k * stride];
                const std::complex<double> u = data[base + k];
                const std::complex<double> v = data[base + k + half] * w;
                data[base + k] = u + v;
                data[base + k + half] = u - v;
            }
        }
    }
}

}  // namespace negmem
