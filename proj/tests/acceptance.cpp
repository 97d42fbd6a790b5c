// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "corrbandit/corrbandit.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace corrbandit;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double max_seconds, const std::function<Verdict()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (max_seconds > 0 && secs > max_seconds) {
        v.pass = false;
        v.detail += " [runtime " + std::to_string(secs) + " s exceeds " + std::to_string(max_seconds) + " s]";
    }
    if (!v.pass) {
        ++failures;
    }
    std::printf("%s criterion %-3s %-48s %7.2fs  %s\n", v.pass ? "PASS" : "FAIL", id, title, secs, v.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::vector<double> criterion2_lambdas{-0.99, -0.5, 0.0, 0.5, 0.9};

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

double central_moment(std::span<const double> v, double mean, int order)
{
    double s = 0.0;
    for (double x : v) {
        s += std::pow(x - mean, order);
    }
    return s / static_cast<double>(v.size());
}

Verdict stochasticity()
{
    Rng rng(20240601);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double pa = uniform01(rng), pb = uniform01(rng), mu = uniform01(rng);
        const auto t = build_transitions(pa, pb, mu, 1 + i % 6);
        const std::pair<const Mat2*, const Mat2*> pairs[] = {
            {&t.p_interior, &t.q_interior}, {&t.p_lower_edge, &t.q_lower_edge}, {&t.q_upper_edge, &t.p_upper_edge}};
        for (const auto& [a, b] : pairs) {
            for (int c = 0; c < 2; ++c) {
                const double sum = (*a)[0][c] + (*a)[1][c] + (*b)[0][c] + (*b)[1][c];
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
    }
    return {worst <= 1e-15, "max |column sum - 1| = " + fmt(worst) + " (<= 1e-15)"};
}

Verdict oracle_equivalence()
{
    double worst = 0.0;
    for (const auto& s : preset_scenarios()) {
        for (double lambda : criterion2_lambdas) {
            const auto t = build_transitions(s.p_a, s.p_b, flip_probability(lambda), s.n_levels);
            const auto init = StateDistribution::centered(s.n_levels);
            const auto a = evolve(init, t, 1000);
            const auto b = dense_chain_oracle(t, init, 1000);
            for (int level = -s.n_levels; level <= s.n_levels; ++level) {
                for (int p = 0; p < 2; ++p) {
                    worst = std::max(worst, std::abs(a.at(level)[p] - b.at(level)[p]));
                }
            }
        }
    }
    return {worst <= 1e-12, "max-abs(evolve - dense) = " + fmt(worst) + " (<= 1e-12)"};
}

Verdict mass_conservation()
{
    double worst = 0.0;
    bool nonneg = true;
    for (const auto& s : preset_scenarios()) {
        for (double lambda : criterion2_lambdas) {
            const auto t = build_transitions(s.p_a, s.p_b, flip_probability(lambda), s.n_levels);
            const auto d = evolve(StateDistribution::centered(s.n_levels), t, 10000);
            worst = std::max(worst, std::abs(d.total_mass() - 1.0));
            for (const auto& v : d.vectors()) {
                nonneg = nonneg && v[0] >= 0.0 && v[1] >= 0.0;
            }
        }
    }
    return {worst <= 1e-9 && nonneg, "max |sum - 1| after 1e4 steps = " + fmt(worst) + " (<= 1e-9)"};
}

Verdict theory_peaks_negative()
{
    bool ok = true;
    std::string detail = "argmax lambda:";
    for (const auto& s : preset_scenarios()) {
        const auto [lambda, value] = argmax_lambda(sweep_theory(s, default_lambda_grid(), 1000), SweepColumn::Theory);
        ok = ok && lambda < 0.0;
        detail += " " + s.id + "=" + fmt(lambda);
    }
    return {ok, detail};
}

Verdict theory_simulation_agreement(std::size_t cycles, double tolerance)
{
    SimulationConfig cfg;
    cfg.cycles = cycles;
    cfg.master_seed = 1;
    cfg.workers = worker_count();
    const auto r = sweep_compare(find_scenario("2c"), default_lambda_grid(), 1000, cfg);
    const double dev = max_deviation(r);
    return {dev <= tolerance, "m=" + std::to_string(cycles) + " max |sim - theory| = " + fmt(dev) + " (<= "
                                  + fmt(tolerance) + ")"};
}

Verdict distribution_facts(char part)
{
    const auto s = find_scenario("2c");
    auto marginals = [&](double lambda, std::size_t steps) {
        const auto t = build_transitions(s.p_a, s.p_b, flip_probability(lambda), 2);
        const auto d = evolve(StateDistribution::centered(2), t, steps);
        std::vector<double> m;
        for (int level = -2; level <= 2; ++level) {
            m.push_back(threshold_marginal(d, level));
        }
        return m;
    };
    // one-step offset between pi_0 and pi_1 indexing is permitted
    const std::size_t offsets[] = {0, 1, 2};
    if (part == 'a') {
        bool ok = true;
        std::string detail = "pi_1000(-2):";
        for (double lambda : {-0.8, 0.0, 0.8}) {
            bool any = false;
            for (std::size_t o : offsets) {
                any = any || marginals(lambda, 999 + o)[0] > 0.6;
            }
            ok = ok && any;
            detail += " " + fmt(lambda) + "->" + fmt(marginals(lambda, 1000)[0]);
        }
        return {ok, detail + " (> 0.6)"};
    }
    if (part == 'b') {
        bool any = false;
        for (std::size_t o : offsets) {
            any = any || std::abs(marginals(0.8, 24 + o)[4] - 0.2) <= 0.07;
        }
        return {any, "pi_25(2) at lambda=0.8 = " + fmt(marginals(0.8, 25)[4]) + " (0.2 +- 0.07)"};
    }
    bool any = false;
    std::string detail;
    for (std::size_t o : offsets) {
        const auto m = marginals(-0.8, 999 + o);
        bool decreasing = true;
        for (std::size_t i = 1; i < m.size(); ++i) {
            decreasing = decreasing && m[i] < m[i - 1];
        }
        any = any || decreasing;
        if (o == 1) {
            detail = "pi_1000 levels -2..2 at lambda=-0.8:";
            for (double v : m) {
                detail += " " + fmt(v);
            }
        }
    }
    return {any, detail + " (strictly decreasing)"};
}

Verdict surrogate_fidelity()
{
    bool ok = true;
    double worst_bias = 0.0;
    double worst_skew = 0.0;
    double worst_kurt = 0.0;
    for (double lambda : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        const SurrogateGenerator gen(lambda, 1 << 14);
        double acc = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            acc += lag1_autocorrelation(gen.generate(seed));
        }
        worst_bias = std::max(worst_bias, std::abs(acc / 10.0 - lambda));

        const auto big = phase_randomized_surrogate(lambda, 1 << 16, 1);
        const auto v = big.values();
        double mean = 0.0;
        for (double x : v) {
            mean += x;
        }
        mean /= static_cast<double>(v.size());
        const double m2 = central_moment(v, mean, 2);
        worst_skew = std::max(worst_skew, std::abs(central_moment(v, mean, 3) / std::pow(m2, 1.5)));
        worst_kurt = std::max(worst_kurt, std::abs(central_moment(v, mean, 4) / (m2 * m2) - 3.0));
    }
    ok = worst_bias <= 0.02 && worst_skew < 0.1 && worst_kurt < 0.2;
    return {ok, "max |mean lag1 - lambda| = " + fmt(worst_bias) + " (<= 0.02), |skew| = " + fmt(worst_skew)
                    + " (< 0.1), |ex. kurtosis| = " + fmt(worst_kurt) + " (< 0.2)"};
}

Verdict gaussian_reproduction()
{
    bool ok = true;
    std::string detail;
    for (const char* id : {"2a", "2c"}) {
        SimulationConfig cfg;
        cfg.signal_mode = SignalMode::Gaussian;
        cfg.cycles = 10000;
        cfg.master_seed = 1;
        cfg.workers = worker_count();
        const auto r = sweep_simulation(find_scenario(id), default_lambda_grid(), 1000, cfg);
        const auto [peak_lambda, peak] = argmax_lambda(r, SweepColumn::Simulation);
        double at_08 = std::nan("");
        for (const auto& row : r.rows) {
            if (row.lambda == 0.8) {
                at_08 = *row.cdr_sim;
            }
        }
        const double se = std::hypot(rate_stderr(peak, cfg.cycles), rate_stderr(at_08, cfg.cycles));
        const double margin = (peak - at_08) / se;
        ok = ok && peak_lambda < 0.0 && margin >= 3.0;
        detail += std::string(id) + ": peak lambda " + fmt(peak_lambda) + " cdr " + fmt(peak) + ", cdr(0.8) "
                  + fmt(at_08) + ", gap " + fmt(margin) + " SE; ";
    }
    return {ok, detail + "(peak < 0, gap >= 3 SE)"};
}

Verdict determinism()
{
    auto csv_of = [](SignalMode mode, unsigned workers) {
        SimulationConfig cfg;
        cfg.signal_mode = mode;
        cfg.cycles = 2000;
        cfg.master_seed = 987654321;
        cfg.workers = workers;
        std::ostringstream out;
        write_sweep_csv(sweep_compare(find_scenario("2e"), default_lambda_grid(), 300, cfg), out);
        return out.str();
    };
    bool ok = true;
    for (auto mode : {SignalMode::Binary, SignalMode::Gaussian}) {
        const auto one = csv_of(mode, 1);
        ok = ok && one == csv_of(mode, 1) && one == csv_of(mode, 8);
    }
    return {ok, "sweep CSV byte-identical for 1 worker, rerun, and 8 workers (binary and gaussian)"};
}

} // namespace

int main()
{
    std::printf("corrbandit %s acceptance suite (%u hardware threads)\n", version, worker_count());
    criterion("1", "transition stochasticity identities", 1.0, stochasticity);
    criterion("2", "evolve vs dense chain oracle", 10.0, oracle_equivalence);
    criterion("3", "mass conservation over 1e4 steps", 0.0, mass_conservation);
    criterion("4", "theory peaks at negative lambda", 30.0, theory_peaks_negative);
    criterion("5", "theory/simulation agreement, m=60000", 0.0, [] { return theory_simulation_agreement(60000, 0.01); });
    criterion("5r", "theory/simulation agreement, m=10000", 0.0,
              [] { return theory_simulation_agreement(10000, 0.015); });
    criterion("6a", "edge occupancy > 0.6 at t=1000", 0.0, [] { return distribution_facts('a'); });
    criterion("6b", "upper edge ~0.2 at t=25, lambda=0.8", 0.0, [] { return distribution_facts('b'); });
    criterion("6c", "marginals decrease in level, lambda=-0.8", 0.0, [] { return distribution_facts('c'); });
    criterion("7", "surrogate autocorrelation and normality", 5.0, surrogate_fidelity);
    criterion("8", "gaussian-mode peak negative and significant", 0.0, gaussian_reproduction);
    criterion("9", "sweep determinism across workers", 0.0, determinism);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
