#pragma once

#include "errors.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace corrbandit {

using Complex = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) noexcept
{
    return std::has_single_bit(n);
}

/// In-place iterative radix-2 FFT for one fixed power-of-two length.
///
/// Forward:  X[k] = sum_t x[t] exp(-2 pi i k t / n)
/// Inverse:  x[t] = (1/n) sum_k X[k] exp(+2 pi i k t / n)
///
/// Twiddles are tabulated once per length; `transform` is const and can be
/// shared between threads.
class Fft {
public:
    explicit Fft(std::size_t n)
        : n_(n)
    {
        if (n == 0 || !is_power_of_two(n)) {
            throw ParameterError("FFT length must be a power of two, got " + std::to_string(n));
        }
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = Complex(std::cos(angle), std::sin(angle));
        }
    }

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<Complex> data) const { transform(data, false); }

    void inverse(std::span<Complex> data) const
    {
        transform(data, true);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& c : data) {
            c *= scale;
        }
    }

private:
    void transform(std::span<Complex> data, bool inverse) const
    {
        if (data.size() != n_) {
            throw ParameterError("FFT buffer length " + std::to_string(data.size()) + " does not match plan length "
                                 + std::to_string(n_));
        }
        // bit reversal
        for (std::size_t i = 1, j = 0; i < n_; ++i) {
            std::size_t bit = n_ >> 1;
            for (; j & bit; bit >>= 1) {
                j ^= bit;
            }
            j ^= bit;
            if (i < j) {
                std::swap(data[i], data[j]);
            }
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const std::size_t stride = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    Complex w = twiddle_[k * stride];
                    if (inverse) {
                        w = std::conj(w);
                    }
                    const Complex u = data[start + k];
                    const Complex v = data[start + k + half] * w;
                    data[start + k] = u + v;
                    data[start + k + half] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<Complex> twiddle_;
};

} // namespace corrbandit
