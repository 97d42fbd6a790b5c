#pragma once

#include "bandit.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "signal.hpp"
#include "theory.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corrbandit {

inline constexpr const char* version = "0.1.0";

struct Scenario {
    std::string id;
    double p_a = 0.9;
    double p_b = 0.7;
    int n_levels = 2;

    void validate() const
    {
        BanditEnvironment::make(p_a, p_b).best_arm();
        if (n_levels < 1) {
            throw DomainError("number of threshold levels N must be >= 1");
        }
    }

    BanditEnvironment environment() const { return BanditEnvironment::make(p_a, p_b); }
};

/// Reward settings named after the figure panels they reproduce.
inline const std::array<Scenario, 6>& preset_scenarios()
{
    static const std::array<Scenario, 6> presets{{
        {"2a", 0.9, 0.3, 2},
        {"2b", 0.6, 0.5, 2},
        {"2c", 0.9, 0.7, 2},
        {"2d", 0.9, 0.3, 4},
        {"2e", 0.6, 0.5, 4},
        {"2f", 0.9, 0.7, 4},
    }};
    return presets;
}

inline Scenario find_scenario(std::string_view id)
{
    for (const auto& s : preset_scenarios()) {
        if (s.id == id) {
            return s;
        }
    }
    throw DomainError("unknown scenario '" + std::string(id) + "' (expected 2a..2f)");
}

/// {-0.99} followed by -0.95, -0.90, ..., 0.90: 39 points, ascending.
inline std::vector<double> default_lambda_grid()
{
    std::vector<double> grid{-0.99};
    for (int k = -19; k <= 18; ++k) {
        grid.push_back(k / 20.0);
    }
    return grid;
}

struct SweepRow {
    double lambda = 0.0;
    std::optional<double> cdr_theory;
    std::optional<double> cdr_sim;
    std::optional<double> sim_stderr;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
    std::string scenario_id;
    std::vector<SweepRow> rows;
    std::size_t horizon = 0;
    std::size_t cycles = 0;
    std::uint64_t master_seed = 0;

    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// Binomial standard error of a rate estimated from `cycles` trials.
inline double rate_stderr(double rate, std::size_t cycles)
{
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(cycles));
}

/// Analytic CDR at `horizon` for one lambda, starting from the centered distribution.
inline double theory_cdr_at(const Scenario& scenario, double lambda, std::size_t horizon)
{
    const auto trans = build_transitions(scenario.p_a, scenario.p_b, flip_probability(lambda), scenario.n_levels);
    const auto dist = evolve(StateDistribution::centered(scenario.n_levels), trans, horizon);
    return cdr_theory(dist, scenario.environment().best_arm());
}

inline SweepResult sweep_theory(const Scenario& scenario, const std::vector<double>& grid, std::size_t horizon)
{
    scenario.validate();
    SweepResult result;
    result.scenario_id = scenario.id;
    result.horizon = horizon;
    result.rows.reserve(grid.size());
    for (double lambda : grid) {
        SweepRow row;
        row.lambda = lambda;
        row.cdr_theory = theory_cdr_at(scenario, lambda, horizon);
        result.rows.push_back(row);
    }
    return result;
}

struct SimulationConfig {
    SignalMode signal_mode = SignalMode::Binary;
    std::size_t cycles = 60000;
    std::uint64_t master_seed = 1;
    /// Gaussian-mode signal gain; 0 selects N / 2.
    double gain = 0.0;
    /// Binary-mode amplitude; 0 selects N - 0.5.
    double x_level = 0.0;
    /// Gaussian-mode surrogate length; 0 picks one from the horizon.
    std::size_t surrogate_length = 0;
    unsigned workers = 1;
};

/// Decision-maker settings used for a signal mode: stopping rule for two-level
/// signals, general dynamics with k = delta = omega = alpha = 1 for surrogates.
inline DecisionMakerParams params_for(SignalMode mode, int n_levels)
{
    return mode == SignalMode::Binary ? DecisionMakerParams::stopping_rule(n_levels)
                                      : DecisionMakerParams::general(n_levels);
}

/// Monte Carlo CDR(horizon) for one lambda. The point's master seed is derived
/// from (master_seed, lambda), so a point's value does not depend on the grid.
inline double simulate_cdr_at(const Scenario& scenario, double lambda, std::size_t horizon,
                              const SimulationConfig& config, unsigned workers)
{
    SignalSpec spec;
    spec.mode = config.signal_mode;
    spec.lambda = lambda;
    spec.level_x = config.x_level;
    spec.gain = config.gain;
    spec.surrogate_length = config.surrogate_length;
    const auto curve = monte_carlo_cdr(scenario.environment(), params_for(config.signal_mode, scenario.n_levels), spec,
                                       horizon + 1, config.cycles, derive_seed(config.master_seed, lambda), workers);
    return curve[horizon];
}

/// Simulated CDR(horizon) per grid point. Grid points are spread over
/// `config.workers` threads; results are written by grid index.
inline SweepResult sweep_simulation(const Scenario& scenario, const std::vector<double>& grid, std::size_t horizon,
                                    const SimulationConfig& config)
{
    scenario.validate();
    if (config.cycles < 1) {
        throw ParameterError("at least one cycle is required");
    }
    SweepResult result;
    result.scenario_id = scenario.id;
    result.horizon = horizon;
    result.cycles = config.cycles;
    result.master_seed = config.master_seed;
    result.rows.resize(grid.size());
    parallel_for_index(grid.size(), config.workers, [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.lambda = grid[i];
        const double cdr = simulate_cdr_at(scenario, grid[i], horizon, config, 1);
        row.cdr_sim = cdr;
        row.sim_stderr = rate_stderr(cdr, config.cycles);
    });
    return result;
}

/// Theory and binary-mode simulation side by side.
inline SweepResult sweep_compare(const Scenario& scenario, const std::vector<double>& grid, std::size_t horizon,
                                 const SimulationConfig& config)
{
    SweepResult result = sweep_simulation(scenario, grid, horizon, config);
    const SweepResult theory = sweep_theory(scenario, grid, horizon);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        result.rows[i].cdr_theory = theory.rows[i].cdr_theory;
    }
    return result;
}

/// Largest |cdr_sim - cdr_theory| over rows carrying both values.
inline double max_deviation(const SweepResult& result)
{
    double worst = 0.0;
    for (const auto& row : result.rows) {
        if (row.cdr_theory && row.cdr_sim) {
            worst = std::max(worst, std::abs(*row.cdr_sim - *row.cdr_theory));
        }
    }
    return worst;
}

enum class SweepColumn : std::uint8_t { Theory, Simulation };

/// Grid point with the largest CDR in `column`. Ties go to the more negative lambda.
inline std::pair<double, double> argmax_lambda(const SweepResult& result, SweepColumn column)
{
    std::optional<std::pair<double, double>> best;
    for (const auto& row : result.rows) {
        const auto& value = column == SweepColumn::Theory ? row.cdr_theory : row.cdr_sim;
        if (!value) {
            continue;
        }
        if (!best || *value > best->second || (*value == best->second && row.lambda < best->first)) {
            best = std::pair{row.lambda, *value};
        }
    }
    if (!best) {
        throw ParameterError("argmax of an empty sweep column");
    }
    return *best;
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

inline double parse_double(std::string_view text)
{
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw ParameterError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

inline constexpr std::string_view sweep_csv_header = "lambda,cdr_theory,cdr_sim,sim_stderr";

inline void write_sweep_csv(const SweepResult& result, std::ostream& out)
{
    out << "# scenario=" << result.scenario_id << " horizon=" << result.horizon << " cycles=" << result.cycles
        << " seed=" << result.master_seed << " version=" << version << '\n';
    out << sweep_csv_header << '\n';
    auto field = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& row : result.rows) {
        out << format_double(row.lambda) << ',' << field(row.cdr_theory) << ',' << field(row.cdr_sim) << ','
            << field(row.sim_stderr) << '\n';
    }
}

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    return out;
}

inline void finish_output(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

inline void emit_csv(const SweepResult& result, const std::string& path)
{
    auto out = open_output(path);
    write_sweep_csv(result, out);
    finish_output(out, path);
}

inline SweepResult read_sweep_csv(std::istream& in)
{
    SweepResult result;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            std::istringstream meta(line.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) {
                    continue;
                }
                const auto key = token.substr(0, eq);
                const auto value = token.substr(eq + 1);
                if (key == "scenario") {
                    result.scenario_id = value;
                } else if (key == "horizon") {
                    result.horizon = std::stoull(value);
                } else if (key == "cycles") {
                    result.cycles = std::stoull(value);
                } else if (key == "seed") {
                    result.master_seed = std::stoull(value);
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != sweep_csv_header) {
                throw ParameterError("unexpected sweep CSV header: '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4) {
            throw ParameterError("sweep CSV row needs 4 fields: '" + line + "'");
        }
        auto opt = [](const std::string& f) -> std::optional<double> {
            if (f.empty()) {
                return std::nullopt;
            }
            return parse_double(f);
        };
        result.rows.push_back(SweepRow{parse_double(fields[0]), opt(fields[1]), opt(fields[2]), opt(fields[3])});
    }
    if (!header_seen) {
        throw ParameterError("sweep CSV has no header line");
    }
    return result;
}

inline SweepResult parse_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return read_sweep_csv(in);
}

/// Snapshots of the evolving distribution for one (scenario, lambda).
struct DistributionTrace {
    std::string scenario_id;
    double lambda = 0.0;
    std::vector<StateDistribution> snapshots;
};

inline DistributionTrace theory_trace(const Scenario& scenario, double lambda, std::size_t horizon)
{
    scenario.validate();
    const auto trans = build_transitions(scenario.p_a, scenario.p_b, flip_probability(lambda), scenario.n_levels);
    return {scenario.id, lambda, evolve_trace(StateDistribution::centered(scenario.n_levels), trans, horizon)};
}

inline void write_trace_csv(const DistributionTrace& trace, std::ostream& out)
{
    out << "# scenario=" << trace.scenario_id << " lambda=" << format_double(trace.lambda) << " version=" << version
        << '\n';
    out << "t,level,mass_plus,mass_minus\n";
    for (const auto& dist : trace.snapshots) {
        for (int level = -dist.n_levels(); level <= dist.n_levels(); ++level) {
            const Vec2& v = dist.at(level);
            out << dist.time_index() << ',' << level << ',' << format_double(v[0]) << ',' << format_double(v[1])
                << '\n';
        }
    }
}

inline void emit_trace_csv(const DistributionTrace& trace, const std::string& path)
{
    auto out = open_output(path);
    write_trace_csv(trace, out);
    finish_output(out, path);
}

// ---------------------------------------------------------------------------
// Config files: one `key = value` per line, '#' starts a comment.

struct RunConfig {
    std::optional<std::string> scenario;
    std::optional<double> p_a;
    std::optional<double> p_b;
    std::optional<int> n_levels;
    std::optional<std::vector<double>> lambda_grid;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> cycles;
    std::optional<std::uint64_t> seed;
    std::optional<SignalMode> signal_mode;
    std::optional<double> gain;
    std::optional<double> x_level;

    /// Preset (if named) with explicit p_a, p_b, n_levels applied on top.
    std::optional<Scenario> resolve_scenario() const
    {
        std::optional<Scenario> s;
        if (scenario) {
            s = find_scenario(*scenario);
        } else if (p_a && p_b && n_levels) {
            s = Scenario{"custom", *p_a, *p_b, *n_levels};
        } else {
            return std::nullopt;
        }
        if (p_a) {
            s->p_a = *p_a;
        }
        if (p_b) {
            s->p_b = *p_b;
        }
        if (n_levels) {
            s->n_levels = *n_levels;
        }
        if (s->id != "custom" && (p_a || p_b || n_levels)) {
            s->id += "-custom";
        }
        s->validate();
        return s;
    }
};

inline SignalMode parse_signal_mode(std::string_view text)
{
    if (text == "binary") {
        return SignalMode::Binary;
    }
    if (text == "gaussian") {
        return SignalMode::Gaussian;
    }
    throw ParameterError("signal mode must be 'binary' or 'gaussian', got '" + std::string(text) + "'");
}

inline std::vector<double> parse_lambda_grid(std::string_view text)
{
    const std::string t = trim(text);
    if (t == "default") {
        return default_lambda_grid();
    }
    std::vector<double> grid;
    for (const auto& part : split(t, ',')) {
        grid.push_back(parse_double(trim(part)));
    }
    if (grid.empty()) {
        throw ParameterError("lambda grid is empty");
    }
    return grid;
}

/// Applies one key/value pair; unknown keys are rejected.
inline void apply_config_entry(RunConfig& config, std::string_view key, std::string_view value)
{
    const std::string v = trim(value);
    auto as_uint = [&]() -> std::uint64_t {
        std::uint64_t out = 0;
        const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || end != v.data() + v.size()) {
            throw ParameterError("config key '" + std::string(key) + "' needs a non-negative integer, got '" + v + "'");
        }
        return out;
    };
    if (key == "scenario") {
        config.scenario = v;
    } else if (key == "p_a") {
        config.p_a = parse_double(v);
    } else if (key == "p_b") {
        config.p_b = parse_double(v);
    } else if (key == "n_levels") {
        config.n_levels = static_cast<int>(as_uint());
    } else if (key == "lambda_grid") {
        config.lambda_grid = parse_lambda_grid(v);
    } else if (key == "horizon") {
        config.horizon = as_uint();
    } else if (key == "cycles") {
        config.cycles = as_uint();
    } else if (key == "seed") {
        config.seed = as_uint();
    } else if (key == "signal_mode") {
        config.signal_mode = parse_signal_mode(v);
    } else if (key == "gain") {
        config.gain = parse_double(v);
    } else if (key == "x_level") {
        config.x_level = parse_double(v);
    } else {
        throw ParameterError("unknown config key '" + std::string(key) + "'");
    }
}

inline RunConfig read_config(std::istream& in)
{
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        apply_config_entry(config, trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
    }
    return config;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    return read_config(in);
}

} // namespace corrbandit
