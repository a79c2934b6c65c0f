// SPDX-License-Identifier: Apache-2.0
//
// Machine-readable outputs: the sweep CSV (17 significant digits, LF line
// endings, byte-deterministic) and a minimal SVG line chart, one polyline per
// estimator over a log metric axis.
#pragma once

#include "ofdmest/numerics.hpp"
#include "ofdmest/simkit.hpp"

#include <string>
#include <string_view>

namespace ofdmest {

inline constexpr std::string_view kSweepCsvHeader = "estimator,snr_db,trials,bits,bit_errors,ber,mse";

std::string format_sig17(double v);

// Rows sorted by (estimator, snr_db); ber of a data-free cell renders as 0.
std::string sweep_csv(const SweepResult& result);

// columns k,lambda,cumulative_energy_fraction
std::string singvals_csv(const std::vector<double>& values);

enum class ChartMetric { ber, mse };

// Standalone SVG: linear snr axis, log10 metric axis, legend entries named
// exactly as the estimator strings. Values below 1e-7 (including exact
// zeros) are drawn at the floor with a distinct marker. Throws on empty input.
std::string render_svg(const SweepResult& result, ChartMetric metric);

constexpr double kSvgLogFloor = 1e-7;

// Binary write, LF endings preserved; throws std::runtime_error on failure.
void write_file(const std::string& path, std::string_view content);

} // namespace ofdmest
