#pragma once

#include "bandit.hpp"
#include "errors.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace corrbandit {

/// Component 0 is polarity +x, component 1 is polarity -x.
using Vec2 = std::array<double, 2>;
/// Row-major 2x2 matrix acting on Vec2 by m * v. Column j is the source polarity.
using Mat2 = std::array<Vec2, 2>;

inline Vec2 operator*(const Mat2& m, const Vec2& v) noexcept
{
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline Vec2 operator+(const Vec2& a, const Vec2& b) noexcept { return {a[0] + b[0], a[1] + b[1]}; }

enum class Polarity : std::uint8_t { Plus = 0, Minus = 1 };

/// One-step transition blocks of the (threshold level, polarity) chain.
///
/// p_* move the level down by one, q_* move it up by one. Interior blocks are
/// level-independent. p_lower_edge and q_upper_edge hold the level at -N and N;
/// q_lower_edge and p_upper_edge leave the edges.
struct TransitionSet {
    Mat2 p_interior{};
    Mat2 q_interior{};
    Mat2 p_lower_edge{};
    Mat2 q_upper_edge{};
    Mat2 p_upper_edge{};
    Mat2 q_lower_edge{};
    int n_levels = 1;
    double p_a = 0.0;
    double p_b = 0.0;
    double mu = 0.5;

    /// Block carrying mass from `level` to `level - 1`.
    const Mat2& down_from(int level) const noexcept { return level == n_levels ? p_upper_edge : p_interior; }
    /// Block carrying mass from `level` to `level + 1`.
    const Mat2& up_from(int level) const noexcept { return level == -n_levels ? q_lower_edge : q_interior; }
};

/// Builds the transition blocks for reward probabilities (p_a, p_b), flip
/// probability mu and 2N+1 threshold levels.
inline TransitionSet build_transitions(double p_a, double p_b, double mu, int n_levels)
{
    for (double p : {p_a, p_b, mu}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("transition probabilities must lie in [0, 1], got " + std::to_string(p));
        }
    }
    if (n_levels < 1) {
        throw DomainError("number of threshold levels N must be >= 1");
    }
    const double stay = 1.0 - mu;
    const double fail_a = 1.0 - p_a;
    const double fail_b = 1.0 - p_b;

    TransitionSet t;
    t.n_levels = n_levels;
    t.p_a = p_a;
    t.p_b = p_b;
    t.mu = mu;
    // interior: +x picks A, -x picks B
    t.p_interior = {{{p_a * stay, fail_b * mu}, {p_a * mu, fail_b * stay}}};
    t.q_interior = {{{fail_a * stay, p_b * mu}, {fail_a * mu, p_b * stay}}};
    // -N always picks A, N always picks B
    t.p_lower_edge = {{{p_a * stay, p_a * mu}, {p_a * mu, p_a * stay}}};
    t.q_lower_edge = {{{fail_a * stay, fail_a * mu}, {fail_a * mu, fail_a * stay}}};
    t.q_upper_edge = {{{p_b * stay, p_b * mu}, {p_b * mu, p_b * stay}}};
    t.p_upper_edge = {{{fail_b * stay, fail_b * mu}, {fail_b * mu, fail_b * stay}}};
    return t;
}

/// Probability mass over (threshold level, polarity) at time `time_index`.
class StateDistribution {
public:
    StateDistribution(int n_levels, std::vector<Vec2> mass, std::size_t time_index = 0)
        : n_levels_(n_levels)
        , mass_(std::move(mass))
        , time_index_(time_index)
    {
        if (n_levels_ < 1) {
            throw DomainError("number of threshold levels N must be >= 1");
        }
        if (mass_.size() != static_cast<std::size_t>(2 * n_levels_ + 1)) {
            throw InvariantError("distribution needs 2N+1 level vectors");
        }
    }

    /// All mass at level 0, split evenly over the two polarities.
    static StateDistribution centered(int n_levels)
    {
        StateDistribution d = zero(n_levels);
        d.at(0) = {0.5, 0.5};
        return d;
    }

    static StateDistribution point_mass(int n_levels, int level, Polarity polarity)
    {
        StateDistribution d = zero(n_levels);
        d.at(level)[static_cast<std::size_t>(polarity)] = 1.0;
        return d;
    }

    static StateDistribution uniform(int n_levels)
    {
        const double share = 1.0 / (2.0 * (2 * n_levels + 1));
        return StateDistribution(n_levels, std::vector<Vec2>(2 * n_levels + 1, Vec2{share, share}));
    }

    static StateDistribution zero(int n_levels)
    {
        return StateDistribution(n_levels, std::vector<Vec2>(2 * n_levels + 1, Vec2{0.0, 0.0}));
    }

    int n_levels() const noexcept { return n_levels_; }
    std::size_t time_index() const noexcept { return time_index_; }
    void set_time_index(std::size_t t) noexcept { time_index_ = t; }

    bool contains_level(int level) const noexcept { return level >= -n_levels_ && level <= n_levels_; }

    const Vec2& at(int level) const
    {
        check_level(level);
        return mass_[static_cast<std::size_t>(level + n_levels_)];
    }

    Vec2& at(int level)
    {
        check_level(level);
        return mass_[static_cast<std::size_t>(level + n_levels_)];
    }

    const std::vector<Vec2>& vectors() const noexcept { return mass_; }

    double total_mass() const noexcept
    {
        double total = 0.0;
        for (const auto& v : mass_) {
            total += v[0] + v[1];
        }
        return total;
    }

    /// Throws unless every entry is >= 0 and the mass sums to 1 within `tolerance`.
    void validate(double tolerance = 1e-12) const
    {
        for (const auto& v : mass_) {
            if (!(v[0] >= 0.0) || !(v[1] >= 0.0)) {
                throw InvariantError("distribution has a negative or NaN entry");
            }
        }
        const double total = total_mass();
        if (!(std::abs(total - 1.0) <= tolerance)) {
            throw InvariantError("distribution mass is " + std::to_string(total) + ", expected 1");
        }
    }

private:
    void check_level(int level) const
    {
        if (!contains_level(level)) {
            throw DomainError("threshold level " + std::to_string(level) + " outside [-" + std::to_string(n_levels_)
                              + ", " + std::to_string(n_levels_) + "]");
        }
    }

    int n_levels_;
    std::vector<Vec2> mass_;
    std::size_t time_index_;
};

namespace detail {

inline void check_compatible(const StateDistribution& dist, const TransitionSet& trans)
{
    if (dist.n_levels() != trans.n_levels) {
        throw InvariantError("distribution has N=" + std::to_string(dist.n_levels()) + " but transitions have N="
                             + std::to_string(trans.n_levels));
    }
}

/// One step without input validation; evolve() validates once up front.
inline StateDistribution step_unchecked(const StateDistribution& dist, const TransitionSet& trans)
{
    const int n = trans.n_levels;
    StateDistribution next = StateDistribution::zero(n);
    next.at(-n) = trans.p_lower_edge * dist.at(-n) + trans.down_from(-n + 1) * dist.at(-n + 1);
    for (int i = -n + 1; i <= n - 1; ++i) {
        next.at(i) = trans.up_from(i - 1) * dist.at(i - 1) + trans.down_from(i + 1) * dist.at(i + 1);
    }
    next.at(n) = trans.up_from(n - 1) * dist.at(n - 1) + trans.q_upper_edge * dist.at(n);
    next.set_time_index(dist.time_index() + 1);
    return next;
}

} // namespace detail

/// pi'(i) = Q pi(i-1) + P pi(i+1) in the interior,
/// pi'(-N) = P(-N) pi(-N) + P pi(-N+1), pi'(N) = Q pi(N-1) + Q(N) pi(N),
/// with the edge-leaving blocks P(N), Q(-N) used for mass coming out of the edges.
inline StateDistribution step_distribution(const StateDistribution& dist, const TransitionSet& trans)
{
    detail::check_compatible(dist, trans);
    dist.validate();
    return detail::step_unchecked(dist, trans);
}

inline StateDistribution evolve(const StateDistribution& initial, const TransitionSet& trans, std::size_t steps)
{
    detail::check_compatible(initial, trans);
    initial.validate();
    StateDistribution dist = initial;
    for (std::size_t s = 0; s < steps; ++s) {
        dist = detail::step_unchecked(dist, trans);
    }
    return dist;
}

/// All snapshots t = 0 .. steps (inclusive) of the evolution.
inline std::vector<StateDistribution> evolve_trace(const StateDistribution& initial, const TransitionSet& trans,
                                                   std::size_t steps)
{
    detail::check_compatible(initial, trans);
    initial.validate();
    std::vector<StateDistribution> trace;
    trace.reserve(steps + 1);
    trace.push_back(initial);
    for (std::size_t s = 0; s < steps; ++s) {
        trace.push_back(detail::step_unchecked(trace.back(), trans));
    }
    return trace;
}

/// Probability of the threshold sitting at `level`, either polarity.
inline double threshold_marginal(const StateDistribution& dist, int level)
{
    const Vec2& v = dist.at(level);
    return v[0] + v[1];
}

/// Probability of selecting A: the whole lower edge plus the +x mass of the interior.
inline double select_a_probability(const StateDistribution& dist)
{
    const int n = dist.n_levels();
    double p = dist.at(-n)[1] + dist.at(-n)[0];
    for (int i = -n + 1; i <= n - 1; ++i) {
        p += dist.at(i)[0];
    }
    return p;
}

/// Probability of selecting B: the whole upper edge plus the -x mass of the interior.
inline double select_b_probability(const StateDistribution& dist)
{
    const int n = dist.n_levels();
    double p = dist.at(n)[0] + dist.at(n)[1];
    for (int i = -n + 1; i <= n - 1; ++i) {
        p += dist.at(i)[1];
    }
    return p;
}

/// Analytic correct decision rate with A as the better arm.
inline double cdr_theory(const StateDistribution& dist) { return select_a_probability(dist); }

/// Correct decision rate when `best` is the better arm. The B case is the
/// mirror-image extension of the A formula.
inline double cdr_theory(const StateDistribution& dist, Arm best)
{
    return best == Arm::A ? select_a_probability(dist) : select_b_probability(dist);
}

/// Dense one-step matrix over the joint states, indexed
/// state(level, polarity) = 2 (level + N) + polarity, column = source.
///
/// Built directly from the decision rule and stopping-rule moves using only
/// (p_a, p_b, mu, N), not from the transition blocks.
class DenseChain {
public:
    explicit DenseChain(const TransitionSet& trans)
        : n_levels_(trans.n_levels)
        , size_(static_cast<std::size_t>(2 * (2 * trans.n_levels + 1)))
        , matrix_(size_ * size_, 0.0)
    {
        const int n = n_levels_;
        for (int level = -n; level <= n; ++level) {
            for (int pol = 0; pol < 2; ++pol) {
                const double signal = pol == 0 ? n - 0.5 : -(n - 0.5);
                const Arm arm = decide(signal, level);
                const double win = arm == Arm::A ? trans.p_a : trans.p_b;
                for (bool won : {true, false}) {
                    const double reward_prob = won ? win : 1.0 - win;
                    const int next_level = update_stopping_rule(level, PlayOutcome{arm, won}, n);
                    for (int next_pol = 0; next_pol < 2; ++next_pol) {
                        const double signal_prob = next_pol == pol ? 1.0 - trans.mu : trans.mu;
                        at(index(next_level, next_pol), index(level, pol)) += reward_prob * signal_prob;
                    }
                }
            }
        }
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t index(int level, int polarity) const noexcept
    {
        return static_cast<std::size_t>(2 * (level + n_levels_) + polarity);
    }
    double operator()(std::size_t row, std::size_t col) const noexcept { return matrix_[row * size_ + col]; }

    std::vector<double> apply(const std::vector<double>& v) const
    {
        std::vector<double> out(size_, 0.0);
        for (std::size_t r = 0; r < size_; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < size_; ++c) {
                acc += matrix_[r * size_ + c] * v[c];
            }
            out[r] = acc;
        }
        return out;
    }

private:
    double& at(std::size_t row, std::size_t col) noexcept { return matrix_[row * size_ + col]; }

    int n_levels_;
    std::size_t size_;
    std::vector<double> matrix_;
};

/// Same evolution as `evolve`, by repeated dense matrix-vector products.
inline StateDistribution dense_chain_oracle(const TransitionSet& trans, const StateDistribution& initial,
                                            std::size_t steps)
{
    detail::check_compatible(initial, trans);
    initial.validate();
    const DenseChain chain(trans);
    const int n = trans.n_levels;
    std::vector<double> v(chain.size());
    for (int level = -n; level <= n; ++level) {
        v[chain.index(level, 0)] = initial.at(level)[0];
        v[chain.index(level, 1)] = initial.at(level)[1];
    }
    for (std::size_t s = 0; s < steps; ++s) {
        v = chain.apply(v);
    }
    StateDistribution out = StateDistribution::zero(n);
    for (int level = -n; level <= n; ++level) {
        out.at(level) = {v[chain.index(level, 0)], v[chain.index(level, 1)]};
    }
    out.set_time_index(initial.time_index() + steps);
    return out;
}

} // namespace corrbandit
