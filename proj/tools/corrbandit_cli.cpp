// corrbandit: command-line front end.
//
//   corrbandit surrogate --lambda -0.8 --length 4096 --seed 7 --out series.csv
//   corrbandit simulate  --scenario 2c --lambda -0.8 --mode binary --cycles 60000
//   corrbandit theory    --scenario 2c --lambda -0.8 --horizon 1000 --trace --out trace.csv
//   corrbandit sweep     --scenario 2a --mode gaussian --out-csv a.csv --out-plot a.svg
//   corrbandit compare   --scenario 2c --mode binary --cycles 60000
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include "corrbandit/corrbandit.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace corrbandit;

constexpr int exit_domain = 1;
constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flags shared by the experiment subcommands; each mirrors a config key.
struct CommonFlags {
    std::string config_path;
    std::optional<std::string> scenario;
    std::optional<double> p_a;
    std::optional<double> p_b;
    std::optional<int> n_levels;
    std::optional<std::string> lambda_grid;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> cycles;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> signal_mode;
    std::optional<double> gain;
    std::optional<double> x_level;
    unsigned workers = 1;

    void attach(CLI::App& cmd, bool with_grid, bool with_sim)
    {
        cmd.add_option("--config", config_path, "key = value config file; explicit flags override it");
        cmd.add_option("--scenario", scenario, "preset scenario 2a..2f");
        cmd.add_option("--p-a,--p_a", p_a, "reward probability of machine A");
        cmd.add_option("--p-b,--p_b", p_b, "reward probability of machine B");
        cmd.add_option("--n-levels,--n_levels", n_levels, "threshold levels N (2N+1 levels)");
        cmd.add_option("--horizon", horizon, "time step t at which CDR is reported (default 1000)");
        if (with_grid) {
            cmd.add_option("--lambda-grid,--lambda_grid", lambda_grid, "comma list of lambdas or 'default'");
        }
        if (with_sim) {
            cmd.add_option("--cycles", cycles, "Monte Carlo cycles m");
            cmd.add_option("--seed", seed, "master seed (default 1)");
            cmd.add_option("--mode,--signal-mode,--signal_mode", signal_mode, "binary | gaussian")
                ->check(CLI::IsMember({"binary", "gaussian"}));
            cmd.add_option("--gain", gain, "gaussian-mode signal gain (default N/2)");
            cmd.add_option("--x-level,--x_level", x_level, "binary-mode amplitude x (default N - 0.5)");
            cmd.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
        }
    }

    RunConfig resolve() const
    {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        auto take = [](auto& dst, const auto& src) {
            if (src) {
                dst = *src;
            }
        };
        take(cfg.scenario, scenario);
        take(cfg.p_a, p_a);
        take(cfg.p_b, p_b);
        take(cfg.n_levels, n_levels);
        take(cfg.horizon, horizon);
        take(cfg.cycles, cycles);
        take(cfg.seed, seed);
        take(cfg.gain, gain);
        take(cfg.x_level, x_level);
        if (lambda_grid) {
            cfg.lambda_grid = parse_lambda_grid(*lambda_grid);
        }
        if (signal_mode) {
            cfg.signal_mode = parse_signal_mode(*signal_mode);
        }
        return cfg;
    }
};

Scenario require_scenario(const RunConfig& cfg)
{
    auto s = cfg.resolve_scenario();
    if (!s) {
        throw UsageError("a scenario is required: pass --scenario 2a..2f or all of --p-a, --p-b, --n-levels");
    }
    return *s;
}

SimulationConfig simulation_config(const RunConfig& cfg, unsigned workers)
{
    SimulationConfig sim;
    sim.signal_mode = cfg.signal_mode.value_or(SignalMode::Binary);
    sim.cycles = cfg.cycles.value_or(sim.signal_mode == SignalMode::Binary ? 60000 : 10000);
    sim.master_seed = cfg.seed.value_or(1);
    sim.gain = cfg.gain.value_or(0.0);
    sim.x_level = cfg.x_level.value_or(0.0);
    sim.workers = workers;
    return sim;
}

const char* mode_name(SignalMode mode) { return mode == SignalMode::Binary ? "binary" : "gaussian"; }

int cmd_surrogate(double lambda, std::size_t length, std::uint64_t seed, const std::string& out_path)
{
    const RealSeries series = phase_randomized_surrogate(lambda, length, seed);
    if (!out_path.empty()) {
        auto out = open_output(out_path);
        out << "# corrbandit " << version << " surrogate lambda=" << format_double(lambda) << " length=" << length
            << " seed=" << seed << '\n';
        out << "value\n";
        for (double v : series.values()) {
            out << format_double(v) << '\n';
        }
        finish_output(out, out_path);
    }
    std::cout << "length " << length << '\n';
    std::cout << "lag1_autocorrelation " << lag1_autocorrelation(series) << '\n';
    return 0;
}

int cmd_simulate(const CommonFlags& flags, double lambda, const std::string& out_path)
{
    const RunConfig cfg = flags.resolve();
    const Scenario scenario = require_scenario(cfg);
    const std::size_t horizon = cfg.horizon.value_or(1000);
    const SimulationConfig sim = simulation_config(cfg, flags.workers);

    SignalSpec spec;
    spec.mode = sim.signal_mode;
    spec.lambda = lambda;
    spec.gain = sim.gain;
    spec.level_x = sim.x_level;
    const auto curve = monte_carlo_cdr(scenario.environment(), params_for(sim.signal_mode, scenario.n_levels), spec,
                                       horizon + 1, sim.cycles, derive_seed(sim.master_seed, lambda), sim.workers);
    if (!out_path.empty()) {
        auto out = open_output(out_path);
        out << "# scenario=" << scenario.id << " lambda=" << format_double(lambda) << " mode=" << mode_name(sim.signal_mode)
            << " cycles=" << sim.cycles << " seed=" << sim.master_seed << " version=" << version << '\n';
        out << "t,cdr\n";
        for (std::size_t t = 0; t < curve.size(); ++t) {
            out << t << ',' << format_double(curve[t]) << '\n';
        }
        finish_output(out, out_path);
    }
    const double cdr = curve[horizon];
    std::cout << "scenario " << scenario.id << " lambda " << lambda << " mode " << mode_name(sim.signal_mode) << '\n';
    std::cout << "cdr_sim(" << horizon << ") " << cdr << " +- " << rate_stderr(cdr, sim.cycles) << '\n';
    if (sim.signal_mode == SignalMode::Binary) {
        std::cout << "cdr_theory(" << horizon << ") " << theory_cdr_at(scenario, lambda, horizon) << '\n';
    }
    return 0;
}

int cmd_theory(const CommonFlags& flags, double lambda, bool trace, const std::string& out_path,
               const std::string& plot_path)
{
    const RunConfig cfg = flags.resolve();
    const Scenario scenario = require_scenario(cfg);
    const std::size_t horizon = cfg.horizon.value_or(1000);
    DistributionTrace full = theory_trace(scenario, lambda, horizon);
    const StateDistribution final_dist = full.snapshots.back();

    if (!out_path.empty()) {
        DistributionTrace written{full.scenario_id, full.lambda, {}};
        if (trace) {
            written.snapshots = full.snapshots;
        } else {
            written.snapshots = {final_dist};
        }
        emit_trace_csv(written, out_path);
    }
    if (!plot_path.empty()) {
        emit_plot(full, plot_path);
    }
    std::cout << "scenario " << scenario.id << " lambda " << lambda << " horizon " << horizon << '\n';
    std::cout << "cdr_theory " << cdr_theory(final_dist, scenario.environment().best_arm()) << '\n';
    for (int level = -scenario.n_levels; level <= scenario.n_levels; ++level) {
        std::cout << "marginal[" << level << "] " << threshold_marginal(final_dist, level) << '\n';
    }
    return 0;
}

int cmd_sweep(const CommonFlags& flags, bool compare, const std::string& csv_path, const std::string& plot_path)
{
    const RunConfig cfg = flags.resolve();
    const Scenario scenario = require_scenario(cfg);
    const std::size_t horizon = cfg.horizon.value_or(1000);
    const auto grid = cfg.lambda_grid.value_or(default_lambda_grid());
    const SimulationConfig sim = simulation_config(cfg, flags.workers);

    const SweepResult result =
        compare ? sweep_compare(scenario, grid, horizon, sim) : sweep_simulation(scenario, grid, horizon, sim);
    if (!csv_path.empty()) {
        emit_csv(result, csv_path);
    }
    if (!plot_path.empty()) {
        emit_plot(result, plot_path);
    }
    std::cout << "scenario " << scenario.id << " mode " << mode_name(sim.signal_mode) << " cycles " << sim.cycles
              << " horizon " << horizon << '\n';
    const auto [sim_lambda, sim_value] = argmax_lambda(result, SweepColumn::Simulation);
    std::cout << "peak_sim lambda " << sim_lambda << " cdr " << sim_value << '\n';
    if (compare) {
        const auto [th_lambda, th_value] = argmax_lambda(result, SweepColumn::Theory);
        std::cout << "peak_theory lambda " << th_lambda << " cdr " << th_value << '\n';
        std::cout << "max_abs_deviation " << max_deviation(result) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Correlated time series and threshold-based two-armed bandit decision making"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    auto* surrogate = app.add_subcommand("surrogate", "generate a Fourier-surrogate series with lag-1 autocorrelation lambda");
    double s_lambda = 0.0;
    std::size_t s_length = 16384;
    std::uint64_t s_seed = 1;
    std::string s_out;
    surrogate->add_option("--lambda", s_lambda, "target lag-1 autocorrelation")->required();
    surrogate->add_option("--length", s_length, "series length (power of two >= 64)");
    surrogate->add_option("--seed", s_seed, "phase seed");
    surrogate->add_option("--out", s_out, "CSV output path");

    CommonFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo CDR curve for one lambda");
    double sim_lambda = 0.0;
    std::string sim_out;
    sim_flags.attach(*simulate, false, true);
    simulate->add_option("--lambda", sim_lambda, "autocorrelation coefficient")->required();
    simulate->add_option("--out", sim_out, "CSV of CDR(t)");

    CommonFlags th_flags;
    auto* theory = app.add_subcommand("theory", "exact evolution of the threshold/polarity distribution");
    double th_lambda = 0.0;
    bool th_trace = false;
    std::string th_out;
    std::string th_plot;
    th_flags.attach(*theory, false, false);
    theory->add_option("--lambda", th_lambda, "autocorrelation coefficient")->required();
    theory->add_flag("--trace", th_trace, "write every step, not just the final distribution");
    theory->add_option("--out", th_out, "CSV t,level,mass_plus,mass_minus");
    theory->add_option("--out-plot", th_plot, "SVG of level occupancy against t");

    CommonFlags sw_flags;
    std::string sw_csv;
    std::string sw_plot;
    auto* sweep = app.add_subcommand("sweep", "simulated CDR over a lambda grid");
    sw_flags.attach(*sweep, true, true);
    sweep->add_option("--out-csv", sw_csv, "sweep CSV path");
    sweep->add_option("--out-plot", sw_plot, "sweep SVG path");

    CommonFlags cmp_flags;
    std::string cmp_csv;
    std::string cmp_plot;
    auto* compare = app.add_subcommand("compare", "theory and simulation over a lambda grid");
    cmp_flags.attach(*compare, true, true);
    compare->add_option("--out-csv", cmp_csv, "sweep CSV path");
    compare->add_option("--out-plot", cmp_plot, "sweep SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*surrogate) {
            return cmd_surrogate(s_lambda, s_length, s_seed, s_out);
        }
        if (*simulate) {
            return cmd_simulate(sim_flags, sim_lambda, sim_out);
        }
        if (*theory) {
            return cmd_theory(th_flags, th_lambda, th_trace, th_out, th_plot);
        }
        if (*sweep) {
            return cmd_sweep(sw_flags, false, sw_csv, sw_plot);
        }
        if (*compare) {
            return cmd_sweep(cmp_flags, true, cmp_csv, cmp_plot);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return exit_usage;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_domain;
    }
    return exit_usage;
}
