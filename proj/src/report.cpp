// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ofdmest {

std::string format_sig17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string format_coord(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::vector<const SweepCell*> sorted_rows(const SweepResult& result)
{
    std::vector<const SweepCell*> rows;
    rows.reserve(result.rows.size());
    for (const SweepCell& c : result.rows)
        rows.push_back(&c);
    std::stable_sort(rows.begin(), rows.end(), [](const SweepCell* a, const SweepCell* b) {
        if (a->estimator != b->estimator)
            return a->estimator < b->estimator;
        return a->snr_db < b->snr_db;
    });
    return rows;
}

} // namespace

std::string sweep_csv(const SweepResult& result)
{
    std::ostringstream out;
    out << kSweepCsvHeader << "\n";
    for (const SweepCell* c : sorted_rows(result)) {
        out << c->estimator << "," << format_sig17(c->snr_db) << "," << c->trials << ","
            << c->data_bits << "," << c->bit_errors << "," << format_sig17(ber_of(*c)) << ","
            << format_sig17(mse_of(*c)) << "\n";
    }
    return out.str();
}

std::string singvals_csv(const std::vector<double>& values)
{
    double total = 0.0;
    for (double v : values)
        total += v;
    std::ostringstream out;
    out << "k,lambda,cumulative_energy_fraction\n";
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        acc += values[k];
        out << k << "," << format_sig17(values[k]) << ","
            << format_sig17(total > 0.0 ? acc / total : 0.0) << "\n";
    }
    return out.str();
}

std::string render_svg(const SweepResult& result, ChartMetric metric)
{
    if (result.rows.empty())
        throw std::invalid_argument("render_svg: no rows");

    struct Point {
        double snr;
        double value;
        bool floored;
    };
    // keyed by estimator name; sorted_rows gives deterministic series order
    std::vector<std::pair<std::string, std::vector<Point>>> series;
    for (const SweepCell* c : sorted_rows(result)) {
        const double raw = metric == ChartMetric::ber ? ber_of(*c) : mse_of(*c);
        Point p{c->snr_db, std::max(raw, kSvgLogFloor), raw < kSvgLogFloor};
        if (series.empty() || series.back().first != c->estimator)
            series.push_back({c->estimator, {}});
        series.back().second.push_back(p);
    }

    double x_min = series[0].second[0].snr, x_max = x_min;
    double y_min = series[0].second[0].value, y_max = y_min;
    for (const auto& [name, pts] : series) {
        for (const Point& p : pts) {
            x_min = std::min(x_min, p.snr);
            x_max = std::max(x_max, p.snr);
            y_min = std::min(y_min, p.value);
            y_max = std::max(y_max, p.value);
        }
    }
    if (x_max == x_min)
        x_max = x_min + 1.0;
    double ly_min = std::floor(std::log10(y_min));
    double ly_max = std::ceil(std::log10(y_max));
    if (ly_max == ly_min)
        ly_max = ly_min + 1.0;

    const double width = 640.0, height = 440.0;
    const double ml = 70.0, mr = 160.0, mt = 30.0, mb = 50.0;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto sx = [&](double snr) { return ml + pw * (snr - x_min) / (x_max - x_min); };
    auto sy = [&](double v) {
        return mt + ph * (ly_max - std::log10(v)) / (ly_max - ly_min);
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const char* metric_name = metric == ChartMetric::ber ? "BER" : "MSE";

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << format_coord(ml) << "\" y=\"20\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << metric_name << " vs SNR</text>\n";

    // frame
    svg << "<rect x=\"" << format_coord(ml) << "\" y=\"" << format_coord(mt) << "\" width=\""
        << format_coord(pw) << "\" height=\"" << format_coord(ph)
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    // x ticks at every distinct snr value
    std::vector<double> xticks;
    for (const auto& [name, pts] : series)
        for (const Point& p : pts)
            xticks.push_back(p.snr);
    std::sort(xticks.begin(), xticks.end());
    xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
    for (double t : xticks) {
        svg << "<line x1=\"" << format_coord(sx(t)) << "\" y1=\"" << format_coord(mt + ph)
            << "\" x2=\"" << format_coord(sx(t)) << "\" y2=\"" << format_coord(mt + ph + 5)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << format_coord(sx(t)) << "\" y=\"" << format_coord(mt + ph + 20)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << format_sig17(t) << "</text>\n";
    }
    svg << "<text x=\"" << format_coord(ml + pw / 2) << "\" y=\""
        << format_coord(height - 12) << "\" font-family=\"sans-serif\" font-size=\"12\" "
        << "text-anchor=\"middle\">SNR (dB)</text>\n";

    // y ticks per decade
    for (double d = ly_min; d <= ly_max + 0.5; d += 1.0) {
        const double y = mt + ph * (ly_max - d) / (ly_max - ly_min);
        svg << "<line x1=\"" << format_coord(ml - 5) << "\" y1=\"" << format_coord(y)
            << "\" x2=\"" << format_coord(ml) << "\" y2=\"" << format_coord(y)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << format_coord(ml - 8) << "\" y=\"" << format_coord(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e"
            << static_cast<long>(d) << "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].second.size(); ++i) {
            const Point& p = series[s].second[i];
            svg << (i ? " " : "") << format_coord(sx(p.snr)) << "," << format_coord(sy(p.value));
        }
        svg << "\"/>\n";
        for (const Point& p : series[s].second) {
            if (p.floored) {
                // floored cells get an open marker so they read as "at or below"
                svg << "<circle class=\"floor\" cx=\"" << format_coord(sx(p.snr)) << "\" cy=\""
                    << format_coord(sy(p.value)) << "\" r=\"3.5\" fill=\"white\" stroke=\""
                    << color << "\"/>\n";
            }
        }
        const double lx = ml + pw + 12.0, ly = mt + 14.0 + 18.0 * static_cast<double>(s);
        svg << "<line x1=\"" << format_coord(lx) << "\" y1=\"" << format_coord(ly - 4)
            << "\" x2=\"" << format_coord(lx + 18) << "\" y2=\"" << format_coord(ly - 4)
            << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        svg << "<text class=\"legend\" x=\"" << format_coord(lx + 24) << "\" y=\""
            << format_coord(ly) << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << series[s].first << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_file(const std::string& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace ofdmest
