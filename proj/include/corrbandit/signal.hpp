#pragma once

#include "errors.hpp"
#include "fft.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace corrbandit {

/// Lag-1 autocorrelation coefficient and the matching polarity flip probability
/// of a two-level signal, mu = (1 - lambda) / 2.
class CorrelationParams {
public:
    static CorrelationParams from_lambda(double lambda)
    {
        if (!(lambda >= -1.0 && lambda <= 1.0)) {
            throw DomainError("autocorrelation coefficient must lie in [-1, 1], got " + std::to_string(lambda));
        }
        return CorrelationParams(lambda);
    }

    double lambda() const noexcept { return lambda_; }
    double mu() const noexcept { return (1.0 - lambda_) / 2.0; }
    double stay_probability() const noexcept { return (1.0 + lambda_) / 2.0; }

private:
    explicit CorrelationParams(double lambda)
        : lambda_(lambda)
    {
    }

    double lambda_;
};

/// Probability that a two-level signal changes polarity between consecutive samples.
inline double flip_probability(double lambda)
{
    return CorrelationParams::from_lambda(lambda).mu();
}

/// Finite real-valued time series.
class RealSeries {
public:
    explicit RealSeries(std::vector<double> values)
        : values_(std::move(values))
    {
        if (values_.empty()) {
            throw InvariantError("a series needs at least one sample");
        }
        if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
            throw InvariantError("series contains a non-finite sample");
        }
    }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t length() const noexcept { return values_.size(); }
    double operator[](std::size_t t) const noexcept { return values_[t]; }

private:
    std::vector<double> values_;
};

/// Frequency-domain coefficients of a series.
struct SpectrumSeries {
    std::vector<Complex> coefficients;

    /// Max |X[k] - conj(X[n-k])| over all bins, zero for the spectrum of a real series.
    double hermitian_defect() const
    {
        const std::size_t n = coefficients.size();
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(coefficients[k] - std::conj(coefficients[(n - k) % n])));
        }
        return worst;
    }

    std::vector<double> power() const
    {
        std::vector<double> p(coefficients.size());
        std::transform(coefficients.begin(), coefficients.end(), p.begin(), [](Complex c) { return std::norm(c); });
        return p;
    }
};

/// Discrete Fourier transform of a real series (length must be a power of two).
inline SpectrumSeries spectrum_of(std::span<const double> values)
{
    const Fft fft(values.size());
    SpectrumSeries out;
    out.coefficients.assign(values.begin(), values.end());
    fft.forward(out.coefficients);
    return out;
}

/// Two-level signal train; the sample at time t is polarities[t] * level_x.
struct BinarySignal {
    std::vector<std::int8_t> polarities;
    double level_x = 0.5;

    std::size_t length() const noexcept { return polarities.size(); }
    double value(std::size_t t) const noexcept { return polarities[t] * level_x; }

    std::vector<double> values() const
    {
        std::vector<double> v(polarities.size());
        for (std::size_t t = 0; t < v.size(); ++t) {
            v[t] = value(t);
        }
        return v;
    }

    /// The amplitude must sit strictly between the two outermost threshold levels
    /// on each side: N - 1 < x < N.
    void check_level_for(int n_levels) const
    {
        if (!(level_x > n_levels - 1 && level_x < n_levels)) {
            throw InvariantError("two-level amplitude " + std::to_string(level_x) + " must lie in ("
                                 + std::to_string(n_levels - 1) + ", " + std::to_string(n_levels) + ")");
        }
    }
};

/// r(t) = lambda^t for t = 0 .. length-1.
inline RealSeries geometric_seed_series(double lambda, std::size_t length)
{
    if (!(std::abs(lambda) < 1.0)) {
        throw DomainError("seed series needs |lambda| < 1 to decay, got " + std::to_string(lambda));
    }
    if (length < 2) {
        throw ParameterError("seed series needs at least 2 samples");
    }
    std::vector<double> values(length);
    double v = 1.0;
    for (auto& x : values) {
        x = v;
        v *= lambda;
    }
    return RealSeries(std::move(values));
}

/// Fourier-transform surrogate generator for one (lambda, length).
///
/// Holds the amplitude spectrum of the geometric seed series. Each call to
/// `raw` keeps the DC and Nyquist coefficients as they are, assigns every other
/// bin k in [1, n/2) an independent uniform phase on [0, 2 pi) at the seed's
/// magnitude, mirrors it onto bin n-k as the conjugate, and inverts.
class SurrogateGenerator {
public:
    static constexpr std::size_t min_length = 64;

    SurrogateGenerator(double lambda, std::size_t length)
        : lambda_(lambda)
        , fft_(checked_length(length))
    {
        if (!(std::abs(lambda) < 1.0)) {
            throw DomainError("surrogate needs |lambda| < 1, got " + std::to_string(lambda));
        }
        seed_spectrum_ = spectrum_of(geometric_seed_series(lambda, length).values());
        magnitude_.resize(length);
        std::transform(seed_spectrum_.coefficients.begin(), seed_spectrum_.coefficients.end(), magnitude_.begin(),
                       [](Complex c) { return std::abs(c); });
    }

    double lambda() const noexcept { return lambda_; }
    std::size_t length() const noexcept { return fft_.size(); }
    const SpectrumSeries& seed_spectrum() const noexcept { return seed_spectrum_; }

    /// Phase-randomized spectrum for `seed`.
    SpectrumSeries randomized_spectrum(std::uint64_t seed) const
    {
        const std::size_t n = length();
        Rng rng(seed);
        SpectrumSeries out;
        out.coefficients.resize(n);
        out.coefficients[0] = seed_spectrum_.coefficients[0];
        out.coefficients[n / 2] = seed_spectrum_.coefficients[n / 2];
        for (std::size_t k = 1; k < n / 2; ++k) {
            const double phase = 2.0 * std::numbers::pi * uniform01(rng);
            out.coefficients[k] = std::polar(magnitude_[k], phase);
            out.coefficients[n - k] = std::conj(out.coefficients[k]);
        }
        return out;
    }

    /// Inverse transform of the randomized spectrum, imaginary parts retained.
    std::vector<Complex> raw(std::uint64_t seed) const
    {
        auto buffer = randomized_spectrum(seed).coefficients;
        fft_.inverse(buffer);
        return buffer;
    }

    /// Surrogate standardized to zero mean and unit (population) variance.
    RealSeries generate(std::uint64_t seed) const
    {
        const auto buffer = raw(seed);
        std::vector<double> values(buffer.size());
        std::transform(buffer.begin(), buffer.end(), values.begin(), [](Complex c) { return c.real(); });
        standardize(values);
        return RealSeries(std::move(values));
    }

    static void standardize(std::vector<double>& values)
    {
        double mean = 0.0;
        for (double v : values) {
            mean += v;
        }
        mean /= static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(values.size()));
        if (!(sd > 0.0)) {
            throw StatisticError("cannot standardize a constant series");
        }
        for (double& v : values) {
            v = (v - mean) / sd;
        }
    }

private:
    static std::size_t checked_length(std::size_t length)
    {
        if (length < min_length || !is_power_of_two(length)) {
            throw ParameterError("surrogate length must be a power of two >= 64, got " + std::to_string(length));
        }
        return length;
    }

    double lambda_;
    Fft fft_;
    SpectrumSeries seed_spectrum_;
    std::vector<double> magnitude_;
};

/// Gaussian-amplitude series with lag-1 autocorrelation close to lambda.
inline RealSeries phase_randomized_surrogate(double lambda, std::size_t length, std::uint64_t seed)
{
    return SurrogateGenerator(lambda, length).generate(seed);
}

/// Linear (non-circular) lag-1 sample autocorrelation:
/// sum_t (v_t - m)(v_{t+1} - m) / sum_t (v_t - m)^2.
inline double lag1_autocorrelation(std::span<const double> values)
{
    if (values.size() < 3) {
        throw StatisticError("lag-1 autocorrelation needs at least 3 samples");
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < values.size(); ++t) {
        const double d = values[t] - mean;
        den += d * d;
        if (t + 1 < values.size()) {
            num += d * (values[t + 1] - mean);
        }
    }
    if (!(den > 0.0)) {
        throw StatisticError("lag-1 autocorrelation is undefined for a constant series");
    }
    return std::clamp(num / den, -1.0, 1.0);
}

inline double lag1_autocorrelation(const RealSeries& series)
{
    return lag1_autocorrelation(series.values());
}

/// Two-level Markov signal: the first polarity is +1 or -1 with probability 1/2,
/// each later one flips with probability mu and repeats otherwise.
inline BinarySignal binary_signal_path(const CorrelationParams& params, std::size_t length, double level_x,
                                       std::uint64_t seed)
{
    if (length < 1) {
        throw ParameterError("binary signal needs at least one sample");
    }
    if (!(level_x > 0.0) || !std::isfinite(level_x)) {
        throw DomainError("signal amplitude must be positive, got " + std::to_string(level_x));
    }
    BinarySignal signal;
    signal.level_x = level_x;
    signal.polarities.resize(length);
    Rng rng(seed);
    const double mu = params.mu();
    std::int8_t s = uniform01(rng) < 0.5 ? 1 : -1;
    signal.polarities[0] = s;
    for (std::size_t t = 1; t < length; ++t) {
        if (uniform01(rng) < mu) {
            s = static_cast<std::int8_t>(-s);
        }
        signal.polarities[t] = s;
    }
    return signal;
}

} // namespace corrbandit
