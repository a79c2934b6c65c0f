// SPDX-License-Identifier: Apache-2.0
//
// Block-pilot frame simulation: the first OFDM symbol of each B-symbol block
// carries pilots on every active carrier, the channel estimate from that
// symbol equalizes the remaining B-1 data symbols, and seeded Monte Carlo
// sweeps accumulate BER and channel MSE per (estimator, SNR) cell.
#pragma once

#include "ofdmest/channel.hpp"
#include "ofdmest/estimators.hpp"
#include "ofdmest/modem.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace ofdmest {

enum class PilotMode { constellation, unimod };
enum class RhhMode { analytic, empirical };

// Pilot policy: pilots are pseudo-random (seeded, identical at both ends),
// drawn from the constellation by default or from {+1,-1} in unimod mode.
struct FrameScheme {
    std::size_t block_len = 8;
    cvec pilots; // length N, zero on inactive carriers
    std::uint64_t pilot_seed = 0;
    PilotMode mode = PilotMode::constellation;

    static FrameScheme make(const OfdmConfig& cfg, std::uint64_t pilot_seed,
                            PilotMode mode = PilotMode::constellation);
};

struct SimOptions {
    std::size_t rank = 0;                  // low-rank order; 0 -> guard + 1
    std::optional<double> filter_snr_db;   // mismatched-SNR mode for the filters
    RhhMode rhh_mode = RhhMode::analytic;  // estimator-side R_HH provenance
    std::size_t rhh_samples = 1000;        // draws for the empirical mode
    std::size_t threads = 0;               // 0 -> OFDMEST_THREADS env policy
};

struct BlockResult {
    std::uint64_t bit_errors = 0;
    std::uint64_t data_bits = 0;
    double channel_sq_error = 0.0; // sum over active carriers of |H_est - H|^2
    double channel_energy = 0.0;   // sum over active carriers of |H|^2
};

struct SweepCell {
    std::string estimator;
    double snr_db = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t data_bits = 0;
    std::uint64_t bit_errors = 0;
    double mse_sum = 0.0;
    std::uint64_t mse_count = 0; // trials * carriers measured
};

struct SweepResult {
    std::vector<SweepCell> rows;
};

const std::vector<std::string>& known_estimators(); // ls lmmse lmmse-full lr-lmmse mmse
bool is_known_estimator(std::string_view name);

// Stream id for one Monte Carlo trial; depends only on the indices, so a
// longer run reproduces a shorter run's prefix exactly.
SeededStream trial_stream(std::uint64_t seed, std::size_t estimator_index,
                          std::size_t snr_index, std::size_t trial_index);

// One block through draw_realization -> modulate -> apply_channel ->
// add_awgn -> demodulate; estimate from the pilot symbol only, held for the
// B-1 data symbols.
BlockResult run_block(const OfdmConfig& cfg, const FrameScheme& scheme, const ChannelModel& model,
                      std::string_view estimator, NoiseSpec noise, SeededStream stream,
                      const SimOptions& opts = {});

// Per-trial results for trials [t0, t1) of one (estimator, SNR) cell, the
// estimator context built once and shared. Parallel inside; slot t is always
// trial t's result regardless of thread count.
std::vector<BlockResult> run_cell_trials(const OfdmConfig& cfg, const FrameScheme& scheme,
                                         const ChannelModel& model, std::string_view estimator,
                                         std::size_t estimator_index, double snr_db,
                                         std::size_t snr_index, std::uint64_t t0, std::uint64_t t1,
                                         std::uint64_t seed, const SimOptions& opts = {});

// Full grid; cells are independent, rows in (estimator list) x (snr list)
// order. The result is a pure function of the arguments.
SweepResult sweep(const OfdmConfig& cfg, const FrameScheme& scheme, const ChannelModel& model,
                  const std::vector<std::string>& estimators, const std::vector<double>& snr_db,
                  std::uint64_t trials, std::uint64_t seed, const SimOptions& opts = {});

double mse_of(const SweepCell& cell); // mse_sum / mse_count; throws on empty cell
double ber_of(const SweepCell& cell); // 0 when the cell carried no data bits

std::size_t resolve_thread_count(std::size_t requested); // env OFDMEST_THREADS policy

} // namespace ofdmest
