// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/config.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace ofdmest {

namespace {

constexpr std::uint64_t kPilotSeedSalt = 0x70696c6f745f73ULL; // "pilot_s"

std::uint64_t mix64(std::uint64_t z)
{
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& v, int line)
{
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(line, "malformed number '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, int line)
{
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(line, "malformed integer '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, int line)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    throw ConfigError(line, "malformed boolean '" + v + "' (use true/false)");
}

ConstellationKind parse_constellation(const std::string& v, int line)
{
    if (v == "bpsk")
        return ConstellationKind::bpsk;
    if (v == "qam16")
        return ConstellationKind::qam16;
    throw ConfigError(line, "constellation must be bpsk or qam16 (got '" + v + "')");
}

PilotMode parse_pilots(const std::string& v, int line)
{
    if (v == "constellation")
        return PilotMode::constellation;
    if (v == "unimod")
        return PilotMode::unimod;
    throw ConfigError(line, "pilots must be constellation or unimod (got '" + v + "')");
}

RhhMode parse_rhh_mode(const std::string& v, int line)
{
    if (v == "analytic")
        return RhhMode::analytic;
    if (v == "empirical")
        return RhhMode::empirical;
    throw ConfigError(line, "rhh_mode must be analytic or empirical (got '" + v + "')");
}

// "all" or comma list of indices / inclusive a-b ranges
std::vector<std::uint32_t> parse_active(const std::string& v, int line)
{
    if (v == "all")
        return {};
    std::vector<std::uint32_t> out;
    for (const std::string& piece : split(v, ',')) {
        if (piece.empty())
            throw ConfigError(line, "empty entry in active carrier list");
        const auto dash = piece.find('-');
        if (dash == std::string::npos) {
            out.push_back(static_cast<std::uint32_t>(parse_u64(piece, line)));
        } else {
            const std::uint64_t a = parse_u64(trim(piece.substr(0, dash)), line);
            const std::uint64_t b = parse_u64(trim(piece.substr(dash + 1)), line);
            if (b < a)
                throw ConfigError(line, "descending carrier range '" + piece + "'");
            for (std::uint64_t k = a; k <= b; ++k)
                out.push_back(static_cast<std::uint32_t>(k));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ChannelTap parse_tap(const std::string& v, int line)
{
    const std::vector<std::string> f = split(v, ',');
    if (f.size() != 3)
        throw ConfigError(line, "tap needs delay,power,doppler (got '" + v + "')");
    ChannelTap t;
    t.delay = static_cast<std::size_t>(parse_u64(f[0], line));
    t.power = parse_double(f[1], line);
    t.doppler = parse_double(f[2], line);
    if (t.power < 0.0)
        throw ConfigError(line, "tap power must be nonnegative");
    return t;
}

std::vector<std::string> parse_estimators(const std::string& v, int line)
{
    std::vector<std::string> names = split(v, ',');
    if (names.empty() || (names.size() == 1 && names[0].empty()))
        throw ConfigError(line, "estimator list is empty");
    for (const std::string& n : names) {
        if (!is_known_estimator(n))
            throw ConfigError(line, "unknown estimator '" + n + "'");
    }
    return names;
}

} // namespace

std::vector<double> parse_snr_grid(const std::string& text, int line)
{
    const std::vector<std::string> f = split(text, ':');
    if (f.size() == 1)
        return {parse_double(f[0], line)};
    if (f.size() != 3)
        throw ConfigError(line, "snr grid must be start:stop:step or a single value");
    const double start = parse_double(f[0], line);
    const double stop = parse_double(f[1], line);
    const double step = parse_double(f[2], line);
    if (!(step > 0.0))
        throw ConfigError(line, "snr step must be positive");
    if (stop < start)
        throw ConfigError(line, "snr stop below start");
    std::vector<double> grid;
    // inclusive of stop when it lands on the grid
    for (int i = 0;; ++i) {
        const double v = start + step * i;
        if (v > stop + step * 1e-9)
            break;
        grid.push_back(v);
    }
    return grid;
}

OfdmConfig RunConfig::ofdm() const
{
    OfdmConfig c;
    c.fft_size = fft_size;
    c.guard = guard;
    c.active = active;
    c.block_len = block;
    c.constellation = constellation;
    return c;
}

ChannelModel RunConfig::channel_model() const
{
    return ChannelModel(taps);
}

FrameScheme RunConfig::frame_scheme() const
{
    return FrameScheme::make(ofdm(), pilot_seed, pilot_mode);
}

SimOptions RunConfig::sim_options() const
{
    SimOptions o;
    o.rank = rank;
    o.filter_snr_db = filter_snr_db;
    o.rhh_mode = rhh_mode;
    o.rhh_samples = rhh_samples;
    return o;
}

RunConfig load_run_config(const std::string& text, const ConfigOverrides& ov)
{
    RunConfig cfg;
    bool guard_set = false, rank_set = false, pilot_seed_set = false, snr_set = false;
    bool taps_set = false;
    std::optional<double> uniform_doppler;
    std::vector<ChannelTap> taps;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw.erase(hash);
        const std::string entry = trim(raw);
        if (entry.empty())
            continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected 'key = value'");
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (key.empty())
            throw ConfigError(line, "missing key");
        if (value.empty())
            throw ConfigError(line, "missing value for '" + key + "'");

        if (key == "fft_size")
            cfg.fft_size = static_cast<std::size_t>(parse_u64(value, line));
        else if (key == "guard") {
            cfg.guard = static_cast<std::size_t>(parse_u64(value, line));
            guard_set = true;
        } else if (key == "block")
            cfg.block = static_cast<std::size_t>(parse_u64(value, line));
        else if (key == "constellation")
            cfg.constellation = parse_constellation(value, line);
        else if (key == "active_carriers")
            cfg.active = parse_active(value, line);
        else if (key == "estimators")
            cfg.estimators = parse_estimators(value, line);
        else if (key == "snr") {
            cfg.snr_db = parse_snr_grid(value, line);
            snr_set = true;
        } else if (key == "trials")
            cfg.trials = parse_u64(value, line);
        else if (key == "seed")
            cfg.seed = parse_u64(value, line);
        else if (key == "pilot_seed") {
            cfg.pilot_seed = parse_u64(value, line);
            pilot_seed_set = true;
        } else if (key == "rank") {
            cfg.rank = static_cast<std::size_t>(parse_u64(value, line));
            rank_set = true;
        } else if (key == "doppler")
            uniform_doppler = parse_double(value, line);
        else if (key == "tap") {
            taps.push_back(parse_tap(value, line));
            taps_set = true;
        } else if (key == "pilots")
            cfg.pilot_mode = parse_pilots(value, line);
        else if (key == "rhh_mode")
            cfg.rhh_mode = parse_rhh_mode(value, line);
        else if (key == "rhh_samples")
            cfg.rhh_samples = static_cast<std::size_t>(parse_u64(value, line));
        else if (key == "filter_snr_db")
            cfg.filter_snr_db = parse_double(value, line);
        else if (key == "out")
            cfg.out = value;
        else if (key == "svg")
            cfg.svg = value;
        else if (key == "allow_large")
            cfg.allow_large = parse_bool(value, line);
        else
            throw ConfigError(line, "unknown key '" + key + "'");
    }

    // flags win over the file
    if (ov.fft_size)
        cfg.fft_size = *ov.fft_size;
    if (ov.guard) {
        cfg.guard = *ov.guard;
        guard_set = true;
    }
    if (ov.block)
        cfg.block = *ov.block;
    if (ov.constellation)
        cfg.constellation = parse_constellation(*ov.constellation, 0);
    if (ov.active_carriers)
        cfg.active = parse_active(*ov.active_carriers, 0);
    if (ov.estimators)
        cfg.estimators = parse_estimators(*ov.estimators, 0);
    if (ov.snr) {
        cfg.snr_db = parse_snr_grid(*ov.snr, 0);
        snr_set = true;
    }
    if (ov.trials)
        cfg.trials = *ov.trials;
    if (ov.seed)
        cfg.seed = *ov.seed;
    if (ov.pilot_seed) {
        cfg.pilot_seed = *ov.pilot_seed;
        pilot_seed_set = true;
    }
    if (ov.rank) {
        cfg.rank = *ov.rank;
        rank_set = true;
    }
    if (ov.doppler)
        uniform_doppler = *ov.doppler;
    if (ov.pilots)
        cfg.pilot_mode = parse_pilots(*ov.pilots, 0);
    if (ov.rhh_mode)
        cfg.rhh_mode = parse_rhh_mode(*ov.rhh_mode, 0);
    if (ov.rhh_samples)
        cfg.rhh_samples = *ov.rhh_samples;
    if (ov.filter_snr_db)
        cfg.filter_snr_db = *ov.filter_snr_db;
    if (ov.out)
        cfg.out = *ov.out;
    if (ov.svg)
        cfg.svg = *ov.svg;
    if (ov.allow_large)
        cfg.allow_large = *ov.allow_large;

    // derived defaults
    if (!guard_set)
        cfg.guard = cfg.fft_size / 8;
    if (!rank_set)
        cfg.rank = 0;
    if (!snr_set)
        cfg.snr_db = parse_snr_grid("0:40:5", 0);
    if (!pilot_seed_set)
        cfg.pilot_seed = mix64(cfg.seed ^ kPilotSeedSalt);

    if (!taps_set) {
        taps = ChannelModel::reference_profile(uniform_doppler.value_or(0.0)).taps();
    } else if (uniform_doppler) {
        for (ChannelTap& t : taps)
            t.doppler = *uniform_doppler;
    }
    // normalize small rounding residue from decimal powers; reject real drift
    double total = 0.0;
    for (const ChannelTap& t : taps)
        total += t.power;
    if (std::abs(total - 1.0) > 1e-6)
        throw ConfigError(0, "tap powers sum to " + std::to_string(total) + ", expected 1");
    for (ChannelTap& t : taps)
        t.power /= total;
    cfg.taps = std::move(taps);

    // invariants (fail before any simulation starts). The no-ISI bound
    // tau_max <= guard is checked by the sweep path and named by `validate`,
    // not here, so `validate` can diagnose a broken config.
    try {
        cfg.ofdm().validate();
        ChannelModel model(cfg.taps);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    if (cfg.trials < 1)
        throw ConfigError(0, "trials must be >= 1");
    if (cfg.fft_size > 512 && !cfg.allow_large)
        throw ConfigError(0, "fft_size > 512 needs allow_large = true (desk-scale guardrail)");
    if (cfg.rank > cfg.ofdm().active_count())
        throw ConfigError(0, "rank exceeds the number of active carriers");
    if (cfg.rhh_samples < 1)
        throw ConfigError(0, "rhh_samples must be >= 1");
    if (cfg.snr_db.empty())
        throw ConfigError(0, "snr grid is empty");
    return cfg;
}

std::string serialize_config(const RunConfig& cfg)
{
    std::ostringstream out;
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "fft_size = " << cfg.fft_size << "\n";
    out << "guard = " << cfg.guard << "\n";
    out << "block = " << cfg.block << "\n";
    out << "constellation = "
        << (cfg.constellation == ConstellationKind::bpsk ? "bpsk" : "qam16") << "\n";
    if (cfg.active.empty()) {
        out << "active_carriers = all\n";
    } else {
        out << "active_carriers = ";
        for (std::size_t i = 0; i < cfg.active.size(); ++i)
            out << (i ? "," : "") << cfg.active[i];
        out << "\n";
    }
    out << "estimators = ";
    for (std::size_t i = 0; i < cfg.estimators.size(); ++i)
        out << (i ? "," : "") << cfg.estimators[i];
    out << "\n";
    out << "snr = ";
    if (cfg.snr_db.size() == 1) {
        out << num(cfg.snr_db.front());
    } else {
        // emit as start:stop:step when the grid is regular, else error out
        const double step = cfg.snr_db[1] - cfg.snr_db[0];
        out << num(cfg.snr_db.front()) << ":" << num(cfg.snr_db.back()) << ":" << num(step);
    }
    out << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "pilot_seed = " << cfg.pilot_seed << "\n";
    if (cfg.rank != 0)
        out << "rank = " << cfg.rank << "\n";
    for (const ChannelTap& t : cfg.taps)
        out << "tap = " << t.delay << "," << num(t.power) << "," << num(t.doppler) << "\n";
    out << "pilots = " << (cfg.pilot_mode == PilotMode::unimod ? "unimod" : "constellation")
        << "\n";
    out << "rhh_mode = " << (cfg.rhh_mode == RhhMode::empirical ? "empirical" : "analytic")
        << "\n";
    out << "rhh_samples = " << cfg.rhh_samples << "\n";
    if (cfg.filter_snr_db)
        out << "filter_snr_db = " << num(*cfg.filter_snr_db) << "\n";
    if (!cfg.out.empty())
        out << "out = " << cfg.out << "\n";
    if (!cfg.svg.empty())
        out << "svg = " << cfg.svg << "\n";
    out << "allow_large = " << (cfg.allow_large ? "true" : "false") << "\n";
    return out.str();
}

} // namespace ofdmest
