#pragma once

#include "errors.hpp"
#include "experiment.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace corrbandit {

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;
    std::string provenance;
    std::vector<PlotSeries> series;
};

namespace detail {

inline std::string svg_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fixed(double v, int digits = 2)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace detail

inline const std::array<const char*, 8>& plot_palette()
{
    static const std::array<const char*, 8> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                   "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    return colors;
}

/// Renders line charts as standalone SVG: one <polyline> per series, a legend,
/// axes with ticks.
inline std::string render_svg(const PlotSpec& spec)
{
    constexpr double width = 640, height = 420;
    constexpr double left = 70, right = 150, top = 40, bottom = 55;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const double x_span = spec.x_max > spec.x_min ? spec.x_max - spec.x_min : 1.0;
    const double y_span = spec.y_max > spec.y_min ? spec.y_max - spec.y_min : 1.0;
    auto sx = [&](double x) { return left + (x - spec.x_min) / x_span * plot_w; };
    auto sy = [&](double y) { return top + plot_h - (std::clamp(y, spec.y_min, spec.y_max) - spec.y_min) / y_span * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    if (!spec.provenance.empty()) {
        svg << "<!-- " << detail::svg_escape(spec.provenance) << " -->\n";
    }
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\">" << detail::svg_escape(spec.title) << "</text>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double xv = spec.x_min + x_span * i / ticks;
        const double yv = spec.y_min + y_span * i / ticks;
        svg << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + plot_h << "\" x2=\"" << sx(xv) << "\" y2=\""
            << top + plot_h + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << sx(xv) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fixed(xv)
            << "</text>\n";
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left << "\" y2=\"" << sy(yv)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::fixed(yv)
            << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << detail::svg_escape(spec.x_label)
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 18 " << top + plot_h / 2 << ")\">"
        << detail::svg_escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            svg << (i ? " " : "") << detail::fixed(sx(s.points[i].first)) << ','
                << detail::fixed(sy(s.points[i].second));
        }
        svg << "\"/>\n";
        const double ly = top + 12 + 18.0 * static_cast<double>(k);
        svg << "<g class=\"legend\"><line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w + 36 << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>"
            << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::svg_escape(s.label) << "</text></g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void write_svg(const PlotSpec& spec, const std::string& path)
{
    const std::string body = render_svg(spec);
    auto out = open_output(path);
    out << body;
    finish_output(out, path);
}

/// CDR against lambda, one polyline per populated column.
inline void emit_plot(const SweepResult& result, const std::string& path)
{
    PlotSpec spec;
    spec.title = "CDR(" + std::to_string(result.horizon) + ") vs lambda, scenario " + result.scenario_id;
    spec.x_label = "autocorrelation coefficient lambda";
    spec.y_label = "correct decision rate";
    spec.x_min = -1.0;
    spec.x_max = 1.0;
    spec.provenance = std::string("corrbandit ") + version + " scenario=" + result.scenario_id
                      + " horizon=" + std::to_string(result.horizon) + " cycles=" + std::to_string(result.cycles)
                      + " seed=" + std::to_string(result.master_seed);
    PlotSeries theory{"theory", plot_palette()[1], {}};
    PlotSeries sim{"simulation", plot_palette()[0], {}};
    for (const auto& row : result.rows) {
        if (row.cdr_theory) {
            theory.points.emplace_back(row.lambda, *row.cdr_theory);
        }
        if (row.cdr_sim) {
            sim.points.emplace_back(row.lambda, *row.cdr_sim);
        }
    }
    if (!theory.points.empty()) {
        spec.series.push_back(std::move(theory));
    }
    if (!sim.points.empty()) {
        spec.series.push_back(std::move(sim));
    }
    if (spec.series.empty()) {
        throw ParameterError("nothing to plot: sweep has no rows");
    }
    write_svg(spec, path);
}

/// Occupancy probability of each threshold level against t.
inline void emit_plot(const DistributionTrace& trace, const std::string& path)
{
    if (trace.snapshots.empty()) {
        throw ParameterError("nothing to plot: empty distribution trace");
    }
    const int n = trace.snapshots.front().n_levels();
    PlotSpec spec;
    spec.title = "threshold occupancy, scenario " + trace.scenario_id + ", lambda " + detail::fixed(trace.lambda);
    spec.x_label = "time step t";
    spec.y_label = "probability";
    spec.x_min = static_cast<double>(trace.snapshots.front().time_index());
    spec.x_max = static_cast<double>(trace.snapshots.back().time_index());
    spec.provenance = std::string("corrbandit ") + version + " scenario=" + trace.scenario_id
                      + " lambda=" + format_double(trace.lambda);
    for (int level = -n; level <= n; ++level) {
        PlotSeries s{"level " + std::to_string(level),
                     plot_palette()[static_cast<std::size_t>(level + n) % plot_palette().size()],
                     {}};
        s.points.reserve(trace.snapshots.size());
        for (const auto& dist : trace.snapshots) {
            s.points.emplace_back(static_cast<double>(dist.time_index()), threshold_marginal(dist, level));
        }
        spec.series.push_back(std::move(s));
    }
    write_svg(spec, path);
}

} // namespace corrbandit
