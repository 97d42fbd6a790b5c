#pragma once

#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "signal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace corrbandit {

enum class Arm : std::uint8_t { A, B };

inline const char* to_string(Arm arm) noexcept { return arm == Arm::A ? "A" : "B"; }

/// Two Bernoulli slot machines.
struct BanditEnvironment {
    double p_a = 0.5;
    double p_b = 0.5;

    static BanditEnvironment make(double p_a, double p_b)
    {
        if (!(p_a >= 0.0 && p_a <= 1.0) || !(p_b >= 0.0 && p_b <= 1.0)) {
            throw DomainError("reward probabilities must lie in [0, 1], got p_a=" + std::to_string(p_a)
                              + " p_b=" + std::to_string(p_b));
        }
        return {p_a, p_b};
    }

    double reward_probability(Arm arm) const noexcept { return arm == Arm::A ? p_a : p_b; }

    Arm best_arm() const
    {
        if (p_a == p_b) {
            throw DomainError("p_a == p_b: no unique best arm");
        }
        return p_a > p_b ? Arm::A : Arm::B;
    }
};

enum class UpdateMode : std::uint8_t { General, StoppingRule };

/// Threshold-adjuster configuration. Thresholds take the values k * level with
/// integer level in [-N, N].
struct DecisionMakerParams {
    int n_levels = 2;
    double k = 1.0;
    double delta = 1.0;
    double omega = 1.0;
    double alpha = 1.0;
    UpdateMode mode = UpdateMode::StoppingRule;

    static DecisionMakerParams stopping_rule(int n_levels)
    {
        DecisionMakerParams p;
        p.n_levels = n_levels;
        p.validate();
        return p;
    }

    static DecisionMakerParams general(int n_levels, double delta = 1.0, double omega = 1.0, double alpha = 1.0,
                                       double k = 1.0)
    {
        DecisionMakerParams p{n_levels, k, delta, omega, alpha, UpdateMode::General};
        p.validate();
        return p;
    }

    void validate() const
    {
        if (n_levels < 1) {
            throw DomainError("number of threshold levels N must be >= 1");
        }
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw DomainError("forgetting parameter alpha must lie in [0, 1]");
        }
        if (!(delta > 0.0)) {
            throw DomainError("increment delta must be positive");
        }
        if (!(omega >= 0.0)) {
            throw DomainError("penalty omega must be non-negative");
        }
        if (!std::isfinite(k)) {
            throw DomainError("threshold coefficient k must be finite");
        }
        if (mode == UpdateMode::StoppingRule && (k != 1.0 || delta != 1.0 || omega != 1.0 || alpha != 1.0)) {
            throw InvariantError("stopping-rule mode requires k = delta = omega = alpha = 1");
        }
    }
};

/// Nearest integer, halves away from zero.
inline int round_level(double ta) noexcept { return static_cast<int>(std::round(ta)); }

struct DecisionMakerState {
    double ta = 0.0;
    double threshold = 0.0;

    int level() const noexcept { return round_level(ta); }
};

struct PlayOutcome {
    Arm arm = Arm::A;
    bool won = false;
};

/// A iff the sample lies strictly above the threshold.
constexpr Arm decide(double signal_value, double threshold) noexcept
{
    return signal_value > threshold ? Arm::A : Arm::B;
}

inline PlayOutcome pull(const BanditEnvironment& env, Arm arm, Rng& rng)
{
    return {arm, uniform01(rng) < env.reward_probability(arm)};
}

/// Threshold-adjuster update:
///   A wins: ta' = -delta + alpha ta     B wins: ta' = +delta + alpha ta
///   A fails: ta' = +omega + alpha ta    B fails: ta' = -omega + alpha ta
/// ta' is then clamped to [-N, N], so round(ta') stays a valid level.
inline DecisionMakerState update_general(const DecisionMakerState& state, const PlayOutcome& outcome,
                                         const DecisionMakerParams& params)
{
    double step = 0.0;
    if (outcome.arm == Arm::A) {
        step = outcome.won ? -params.delta : params.omega;
    } else {
        step = outcome.won ? params.delta : -params.omega;
    }
    const double bound = params.n_levels;
    DecisionMakerState next;
    next.ta = std::clamp(step + params.alpha * state.ta, -bound, bound);
    next.threshold = params.k * next.level();
    return next;
}

/// One threshold move under the stopping rule. Interior levels always move by
/// one; the edges hold after a win (A at -N, B at N).
inline int update_stopping_rule(int threshold_level, const PlayOutcome& outcome, int n_levels)
{
    if (threshold_level < -n_levels || threshold_level > n_levels) {
        throw InvariantError("threshold level " + std::to_string(threshold_level) + " outside [-"
                             + std::to_string(n_levels) + ", " + std::to_string(n_levels) + "]");
    }
    const bool decrement = (outcome.arm == Arm::A) == outcome.won;
    const int next = threshold_level + (decrement ? -1 : 1);
    return std::clamp(next, -n_levels, n_levels);
}

/// Per-step view of a running cycle, passed to simulation observers.
struct StepRecord {
    std::size_t t = 0;
    int level = 0;
    double signal = 0.0;
    Arm arm = Arm::A;
    bool correct = false;
};

namespace detail {

/// Core decide/pull/update loop. `on_step` sees the state used for the
/// decision at time t, before the update.
template <class OnStep>
void simulate_cycle(const BanditEnvironment& env, const DecisionMakerParams& params, std::span<const double> signal,
                    std::size_t horizon, Rng& rng, OnStep&& on_step)
{
    if (signal.size() < horizon) {
        throw ParameterError("signal has " + std::to_string(signal.size()) + " samples, horizon needs "
                             + std::to_string(horizon));
    }
    const Arm best = env.best_arm();
    DecisionMakerState state;
    int level = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const Arm arm = decide(signal[t], state.threshold);
        on_step(StepRecord{t, level, signal[t], arm, arm == best});
        const PlayOutcome outcome = pull(env, arm, rng);
        if (params.mode == UpdateMode::StoppingRule) {
            level = update_stopping_rule(level, outcome, params.n_levels);
            state.ta = level;
            state.threshold = level;
        } else {
            state = update_general(state, outcome, params);
            level = state.level();
        }
    }
}

} // namespace detail

/// Correctness flags C(t), t = 0 .. horizon-1, for one cycle starting from
/// ta = 0. C(t) is the decision taken at time t, after t threshold updates.
/// `seed` drives the reward draws.
inline std::vector<std::uint8_t> run_cycle(const BanditEnvironment& env, const DecisionMakerParams& params,
                                           std::span<const double> signal, std::size_t horizon, std::uint64_t seed)
{
    params.validate();
    Rng rng(seed);
    std::vector<std::uint8_t> flags;
    flags.reserve(horizon);
    detail::simulate_cycle(env, params, signal, horizon, rng,
                           [&](const StepRecord& r) { flags.push_back(r.correct ? 1 : 0); });
    return flags;
}

enum class SignalMode : std::uint8_t { Binary, Gaussian };

/// How each cycle's input signal is synthesized.
struct SignalSpec {
    SignalMode mode = SignalMode::Binary;
    double lambda = 0.0;
    /// Binary amplitude x; 0 selects N - 0.5.
    double level_x = 0.0;
    /// Gaussian-mode scale applied to the standardized surrogate; 0 selects N / 2.
    double gain = 0.0;
    /// Gaussian-mode surrogate length; 0 selects the smallest power of two >= max(64, horizon).
    std::size_t surrogate_length = 0;
};

/// Builds per-cycle signals for one (spec, N, horizon). Immutable after
/// construction, so one instance is shared by all workers.
class SignalFactory {
public:
    SignalFactory(const SignalSpec& spec, int n_levels, std::size_t horizon)
        : spec_(spec)
        , horizon_(std::max<std::size_t>(horizon, 1))
    {
        if (spec_.mode == SignalMode::Binary) {
            params_ = CorrelationParams::from_lambda(spec_.lambda);
            if (spec_.level_x == 0.0) {
                spec_.level_x = n_levels - 0.5;
            }
            BinarySignal probe;
            probe.level_x = spec_.level_x;
            probe.check_level_for(n_levels);
        } else {
            if (spec_.gain == 0.0) {
                spec_.gain = n_levels / 2.0;
            }
            if (!(spec_.gain > 0.0) || !std::isfinite(spec_.gain)) {
                throw DomainError("signal gain must be positive");
            }
            if (spec_.surrogate_length == 0) {
                spec_.surrogate_length = std::bit_ceil(std::max<std::size_t>(SurrogateGenerator::min_length, horizon_));
            }
            if (spec_.surrogate_length < horizon_) {
                throw ParameterError("surrogate length " + std::to_string(spec_.surrogate_length)
                                     + " is shorter than the horizon " + std::to_string(horizon_));
            }
            surrogate_.emplace(spec_.lambda, spec_.surrogate_length);
        }
    }

    const SignalSpec& spec() const noexcept { return spec_; }

    std::vector<double> make(std::uint64_t seed) const
    {
        if (spec_.mode == SignalMode::Binary) {
            return binary_signal_path(params_, horizon_, spec_.level_x, seed).values();
        }
        auto series = surrogate_->generate(seed);
        std::vector<double> values(series.values().begin(), series.values().begin() + static_cast<std::ptrdiff_t>(horizon_));
        for (double& v : values) {
            v *= spec_.gain;
        }
        return values;
    }

private:
    SignalSpec spec_;
    std::size_t horizon_;
    CorrelationParams params_ = CorrelationParams::from_lambda(0.0);
    std::optional<SurrogateGenerator> surrogate_;
};

/// Seeds of cycle `index` under `master_seed`: {signal seed, reward seed}.
struct CycleSeeds {
    std::uint64_t signal;
    std::uint64_t reward;

    static CycleSeeds of(std::uint64_t master_seed, std::uint64_t index) noexcept
    {
        const std::uint64_t cycle = derive_seed(master_seed, index);
        return {derive_seed(cycle, std::uint64_t{0}), derive_seed(cycle, std::uint64_t{1})};
    }
};

/// Runs `cycles` independent cycles and calls observer(cycle, StepRecord) for
/// every step. Cycles are split into contiguous blocks, one per worker; the
/// observer must only touch per-cycle or per-block state.
template <class Observer>
void for_each_cycle(const BanditEnvironment& env, const DecisionMakerParams& params, const SignalSpec& signal_spec,
                    std::size_t horizon, std::size_t cycles, std::uint64_t master_seed, unsigned workers,
                    Observer&& observer)
{
    params.validate();
    env.best_arm();
    const SignalFactory factory(signal_spec, params.n_levels, horizon);
    parallel_for_index(cycles, workers, [&](std::size_t i) {
        const CycleSeeds seeds = CycleSeeds::of(master_seed, i);
        const auto signal = factory.make(seeds.signal);
        Rng rng(seeds.reward);
        detail::simulate_cycle(env, params, signal, horizon, rng, [&](const StepRecord& r) { observer(i, r); });
    });
}

/// Correct decision rate CDR(t) = (1/m) sum_i C_i(t), t = 0 .. horizon-1.
///
/// Cycle i uses CycleSeeds::of(master_seed, i). Counts are accumulated as
/// integers, so the result is bit-identical for any worker count.
inline std::vector<double> monte_carlo_cdr(const BanditEnvironment& env, const DecisionMakerParams& params,
                                           const SignalSpec& signal_spec, std::size_t horizon, std::size_t cycles,
                                           std::uint64_t master_seed, unsigned workers = 1)
{
    if (cycles < 1) {
        throw ParameterError("at least one cycle is required");
    }
    const unsigned blocks = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cycles)));
    params.validate();
    env.best_arm();
    const SignalFactory factory(signal_spec, params.n_levels, horizon);
    std::vector<std::vector<std::uint32_t>> counts(blocks, std::vector<std::uint32_t>(horizon, 0));
    parallel_for_index(blocks, blocks, [&](std::size_t b) {
        const std::size_t begin = cycles * b / blocks;
        const std::size_t end = cycles * (b + 1) / blocks;
        auto& local = counts[b];
        for (std::size_t i = begin; i < end; ++i) {
            const CycleSeeds seeds = CycleSeeds::of(master_seed, i);
            const auto signal = factory.make(seeds.signal);
            Rng rng(seeds.reward);
            detail::simulate_cycle(env, params, signal, horizon, rng,
                                   [&](const StepRecord& r) { local[r.t] += r.correct ? 1u : 0u; });
        }
    });
    std::vector<double> cdr(horizon, 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
        std::uint64_t total = 0;
        for (const auto& local : counts) {
            total += local[t];
        }
        cdr[t] = static_cast<double>(total) / static_cast<double>(cycles);
    }
    return cdr;
}

/// Empirical frequency of each threshold level at the requested times.
/// Row r holds the 2N+1 frequencies (level -N first) at times[r].
inline std::vector<std::vector<double>> monte_carlo_level_occupancy(const BanditEnvironment& env,
                                                                    const DecisionMakerParams& params,
                                                                    const SignalSpec& signal_spec,
                                                                    std::span<const std::size_t> times,
                                                                    std::size_t cycles, std::uint64_t master_seed)
{
    if (cycles < 1) {
        throw ParameterError("at least one cycle is required");
    }
    const std::size_t horizon = times.empty() ? 0 : *std::max_element(times.begin(), times.end()) + 1;
    const int n = params.n_levels;
    std::vector<std::vector<std::uint64_t>> counts(times.size(), std::vector<std::uint64_t>(2 * n + 1, 0));
    for_each_cycle(env, params, signal_spec, horizon, cycles, master_seed, 1, [&](std::size_t, const StepRecord& r) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (times[k] == r.t) {
                ++counts[k][static_cast<std::size_t>(r.level + n)];
            }
        }
    });
    std::vector<std::vector<double>> freq(times.size(), std::vector<double>(2 * n + 1));
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t j = 0; j < freq[k].size(); ++j) {
            freq[k][j] = static_cast<double>(counts[k][j]) / static_cast<double>(cycles);
        }
    }
    return freq;
}

} // namespace corrbandit
