// SPDX-License-Identifier: Apache-2.0
//
// Plain `key = value` run configuration with `#` comments and repeated
// `tap = delay,power,doppler` lines. Precedence: flags > file > defaults.
// Unknown keys, malformed values and invariant violations raise ConfigError
// with the offending line number.
#pragma once

#include "ofdmest/channel.hpp"
#include "ofdmest/modem.hpp"
#include "ofdmest/simkit.hpp"

#include <optional>
#include <string>

namespace ofdmest {

// Flag-level overrides; every config key has a matching flag.
struct ConfigOverrides {
    std::optional<std::size_t> fft_size;
    std::optional<std::size_t> guard;
    std::optional<std::size_t> block;
    std::optional<std::string> constellation;
    std::optional<std::string> active_carriers;
    std::optional<std::string> estimators;
    std::optional<std::string> snr;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> pilot_seed;
    std::optional<std::size_t> rank;
    std::optional<double> doppler;
    std::optional<std::string> pilots;
    std::optional<std::string> rhh_mode;
    std::optional<std::size_t> rhh_samples;
    std::optional<double> filter_snr_db;
    std::optional<std::string> out;
    std::optional<std::string> svg;
    std::optional<bool> allow_large;
};

// Fully resolved and validated run description.
struct RunConfig {
    std::size_t fft_size = 128;
    std::size_t guard = 16; // default N/8
    std::vector<std::uint32_t> active; // empty = all carriers
    std::size_t block = 8;             // Table-I pilot ratio 1/8
    ConstellationKind constellation = ConstellationKind::qam16;
    std::vector<std::string> estimators = {"ls", "lmmse", "lr-lmmse", "mmse"};
    std::vector<double> snr_db; // default 0:40:5
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    std::uint64_t pilot_seed = 0; // derived from seed unless set
    std::size_t rank = 0;         // 0 -> guard+1
    std::vector<ChannelTap> taps; // reference profile unless tap lines given
    PilotMode pilot_mode = PilotMode::constellation;
    RhhMode rhh_mode = RhhMode::analytic;
    std::size_t rhh_samples = 1000;
    std::optional<double> filter_snr_db;
    std::string out;  // empty = stdout
    std::string svg;  // empty = no chart
    bool allow_large = false;

    OfdmConfig ofdm() const;
    ChannelModel channel_model() const;
    FrameScheme frame_scheme() const;
    SimOptions sim_options() const;
};

// Parses `text` (may be empty) and applies overrides. Throws ConfigError.
RunConfig load_run_config(const std::string& text, const ConfigOverrides& overrides);

// Canonical text form; parse(serialize(cfg)) == cfg.
std::string serialize_config(const RunConfig& cfg);

// `a:b:c` inclusive grid (or a single value); throws ConfigError on bad syntax.
std::vector<double> parse_snr_grid(const std::string& text, int line = 0);

} // namespace ofdmest
