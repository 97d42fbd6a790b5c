#include "corrbandit/signal.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace corrbandit;

namespace {

// O(n^2) DFT, independent of the radix-2 implementation.
std::vector<Complex> naive_dft(const std::vector<Complex>& x, bool inverse = false)
{
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
            acc += x[t] * Complex(std::cos(angle), std::sin(angle));
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

double mean_of(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

double central_moment(std::span<const double> v, int order)
{
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) {
        s += std::pow(x - m, order);
    }
    return s / static_cast<double>(v.size());
}

} // namespace

TEST(FlipProbability, MatchesFormula)
{
    EXPECT_DOUBLE_EQ(flip_probability(0.0), 0.5);
    EXPECT_DOUBLE_EQ(flip_probability(-1.0), 1.0);
    EXPECT_DOUBLE_EQ(flip_probability(-0.8), 0.9);
    EXPECT_DOUBLE_EQ(flip_probability(1.0), 0.0);
    const auto p = CorrelationParams::from_lambda(0.3);
    EXPECT_DOUBLE_EQ(p.mu() + p.stay_probability(), 1.0);
}

TEST(FlipProbability, RejectsOutOfRange)
{
    EXPECT_THROW(flip_probability(1.5), DomainError);
    EXPECT_THROW(flip_probability(-1.0001), DomainError);
    EXPECT_THROW(flip_probability(std::nan("")), DomainError);
}

TEST(GeometricSeed, DirectPowers)
{
    auto a = geometric_seed_series(0.5, 3);
    EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()), (std::vector<double>{1, 0.5, 0.25}));
    auto b = geometric_seed_series(-0.8, 3);
    EXPECT_DOUBLE_EQ(b[0], 1.0);
    EXPECT_DOUBLE_EQ(b[1], -0.8);
    EXPECT_DOUBLE_EQ(b[2], 0.64);
    auto c = geometric_seed_series(0.0, 4);
    EXPECT_EQ(std::vector<double>(c.values().begin(), c.values().end()), (std::vector<double>{1, 0, 0, 0}));
}

TEST(GeometricSeed, RejectsNonDecaying)
{
    EXPECT_THROW(geometric_seed_series(1.0, 8), DomainError);
    EXPECT_THROW(geometric_seed_series(-1.0, 8), DomainError);
    EXPECT_THROW(geometric_seed_series(0.5, 1), ParameterError);
}

TEST(Fft, AgreesWithNaiveDft)
{
    Rng rng(42);
    for (std::size_t n : {1u, 2u, 8u, 64u, 128u}) {
        std::vector<Complex> x(n);
        for (auto& c : x) {
            c = Complex(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
        }
        const auto expected = naive_dft(x);
        auto got = x;
        Fft(n).forward(got);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(std::abs(got[k] - expected[k]), 0.0, 1e-12) << "n=" << n << " k=" << k;
        }
        Fft(n).inverse(got);
        for (std::size_t k = 0; k < n; ++k) {
            EXPECT_NEAR(std::abs(got[k] - x[k]), 0.0, 1e-13);
        }
    }
}

TEST(Fft, RejectsNonPowerOfTwo)
{
    EXPECT_THROW(Fft(0), ParameterError);
    EXPECT_THROW(Fft(1000), ParameterError);
    std::vector<Complex> wrong(4);
    EXPECT_THROW(Fft(8).forward(wrong), ParameterError);
}

TEST(Lag1Autocorrelation, HandComputedValues)
{
    // three products of -1 over four squares
    EXPECT_DOUBLE_EQ(lag1_autocorrelation(std::vector<double>{1, -1, 1, -1}), -0.75);
    // deviations (-1.5, -0.5, 0.5, 1.5): numerator 1.25, denominator 5
    EXPECT_DOUBLE_EQ(lag1_autocorrelation(std::vector<double>{1, 2, 3, 4}), 0.25);
}

TEST(Lag1Autocorrelation, UndefinedCases)
{
    EXPECT_THROW(lag1_autocorrelation(std::vector<double>{2, 2, 2}), StatisticError);
    EXPECT_THROW(lag1_autocorrelation(std::vector<double>{1, 2}), StatisticError);
}

TEST(RealSeries, Invariants)
{
    EXPECT_THROW(RealSeries({}), InvariantError);
    EXPECT_THROW(RealSeries({1.0, INFINITY}), InvariantError);
}

TEST(Surrogate, RejectsBadParameters)
{
    EXPECT_THROW(phase_randomized_surrogate(0.5, 1000, 1), ParameterError);
    EXPECT_THROW(phase_randomized_surrogate(0.5, 32, 1), ParameterError);
    EXPECT_THROW(phase_randomized_surrogate(1.0, 1024, 1), DomainError);
    EXPECT_THROW(phase_randomized_surrogate(1.5, 1024, 1), DomainError);
}

TEST(Surrogate, DeterministicGivenSeed)
{
    const auto a = phase_randomized_surrogate(0.3, 256, 99);
    const auto b = phase_randomized_surrogate(0.3, 256, 99);
    const auto c = phase_randomized_surrogate(0.3, 256, 100);
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
    EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST(Surrogate, SpectrumMatchesSeedAgainstNaiveDft)
{
    // Power spectra from the naive DFT of both the seed and the surrogate.
    for (double lambda : {-0.8, 0.0, 0.6}) {
        const SurrogateGenerator gen(lambda, 64);
        const auto raw = gen.raw(5);
        std::vector<Complex> real_part(raw.size());
        for (std::size_t t = 0; t < raw.size(); ++t) {
            EXPECT_LT(std::abs(raw[t].imag()), 1e-12);
            real_part[t] = raw[t].real();
        }
        const auto seed = geometric_seed_series(lambda, 64);
        const auto seed_spec = naive_dft(std::vector<Complex>(seed.values().begin(), seed.values().end()));
        const auto surr_spec = naive_dft(real_part);
        for (std::size_t k = 0; k < 64; ++k) {
            const double expected = std::norm(seed_spec[k]);
            EXPECT_NEAR(std::norm(surr_spec[k]), expected, 1e-9 * expected) << "lambda=" << lambda << " k=" << k;
        }
    }
}

TEST(Surrogate, RealOutputAndPowerSpectrumAtFullLength)
{
    for (double lambda : {-0.95, -0.5, 0.0, 0.5, 0.95}) {
        const SurrogateGenerator gen(lambda, 1 << 14);
        const auto spec = gen.randomized_spectrum(11);
        EXPECT_LT(spec.hermitian_defect(), 1e-12);
        const auto raw = gen.raw(11);
        double worst_imag = 0.0;
        std::vector<double> re(raw.size());
        for (std::size_t t = 0; t < raw.size(); ++t) {
            worst_imag = std::max(worst_imag, std::abs(raw[t].imag()));
            re[t] = raw[t].real();
        }
        EXPECT_LT(worst_imag, 1e-9);
        const auto got = spectrum_of(re).power();
        const auto want = gen.seed_spectrum().power();
        for (std::size_t k = 0; k < got.size(); ++k) {
            ASSERT_NEAR(got[k], want[k], 1e-9 * want[k]) << "lambda=" << lambda << " k=" << k;
        }
    }
}

TEST(Surrogate, StandardizedAndCorrelated)
{
    // mean / variance / lag-1 properties at length 2^14, averaged over 10 seeds
    for (double lambda : {-0.95, -0.8, -0.5, 0.0, 0.5, 0.8, 0.95}) {
        const SurrogateGenerator gen(lambda, 1 << 14);
        double acc = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto s = gen.generate(seed);
            EXPECT_NEAR(mean_of(s.values()), 0.0, 0.02);
            EXPECT_NEAR(central_moment(s.values(), 2), 1.0, 0.05);
            acc += lag1_autocorrelation(s);
        }
        EXPECT_NEAR(acc / 10.0, lambda, 0.02) << "lambda=" << lambda;
    }
}

TEST(Surrogate, SpecExamplesAt4096)
{
    for (double lambda : {0.8, 0.0, -0.8}) {
        double acc = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            acc += lag1_autocorrelation(phase_randomized_surrogate(lambda, 4096, seed));
        }
        EXPECT_NEAR(acc / 10.0, lambda, 0.05);
    }
}

TEST(Surrogate, AmplitudesLookGaussian)
{
    for (double lambda : {-0.9, 0.0, 0.9}) {
        const auto s = phase_randomized_surrogate(lambda, 1 << 16, 3);
        const double m2 = central_moment(s.values(), 2);
        const double skew = central_moment(s.values(), 3) / std::pow(m2, 1.5);
        const double kurt = central_moment(s.values(), 4) / (m2 * m2) - 3.0;
        EXPECT_LT(std::abs(skew), 0.1) << "lambda=" << lambda;
        EXPECT_LT(std::abs(kurt), 0.2) << "lambda=" << lambda;
    }
}

TEST(BinarySignalPath, DeterministicLimits)
{
    const auto alt = binary_signal_path(CorrelationParams::from_lambda(-1.0), 50, 1.5, 3);
    for (std::size_t t = 1; t < alt.length(); ++t) {
        EXPECT_EQ(alt.polarities[t], -alt.polarities[t - 1]);
    }
    const auto constant = binary_signal_path(CorrelationParams::from_lambda(1.0), 50, 1.5, 3);
    for (std::size_t t = 1; t < constant.length(); ++t) {
        EXPECT_EQ(constant.polarities[t], constant.polarities[0]);
    }
    EXPECT_DOUBLE_EQ(alt.value(0), alt.polarities[0] * 1.5);
}

TEST(BinarySignalPath, FlipRateMatchesMu)
{
    for (double mu : {0.05, 0.5, 0.9, 0.95}) {
        const auto params = CorrelationParams::from_lambda(1.0 - 2.0 * mu);
        const auto path = binary_signal_path(params, 1'000'000, 0.5, 17);
        std::size_t flips = 0;
        for (std::size_t t = 1; t < path.length(); ++t) {
            flips += path.polarities[t] != path.polarities[t - 1];
        }
        EXPECT_NEAR(static_cast<double>(flips) / static_cast<double>(path.length() - 1), mu, 0.005) << "mu=" << mu;
    }
}

TEST(BinarySignalPath, InitialPolarityIsFair)
{
    int plus = 0;
    const auto params = CorrelationParams::from_lambda(0.0);
    for (std::uint64_t seed = 0; seed < 20000; ++seed) {
        plus += binary_signal_path(params, 1, 0.5, seed).polarities[0] == 1;
    }
    EXPECT_NEAR(plus / 20000.0, 0.5, 0.015);
}

TEST(BinarySignalPath, Preconditions)
{
    const auto params = CorrelationParams::from_lambda(0.0);
    EXPECT_THROW(binary_signal_path(params, 0, 1.0, 1), ParameterError);
    EXPECT_THROW(binary_signal_path(params, 10, 0.0, 1), DomainError);
    BinarySignal s{{1, -1}, 1.5};
    EXPECT_NO_THROW(s.check_level_for(2));
    EXPECT_THROW(s.check_level_for(1), InvariantError);
    EXPECT_THROW(s.check_level_for(3), InvariantError);
}
