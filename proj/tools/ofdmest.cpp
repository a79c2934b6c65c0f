// SPDX-License-Identifier: Apache-2.0
//
// ofdmest CLI: `sweep` runs a seeded Monte Carlo BER/MSE grid and writes CSV
// (plus an optional SVG chart), `singvals` dumps the eigenvalue profile of
// R_HH, `validate` runs the reduced-size oracle suite.
//
// Exit codes: 0 success, 2 config error, 3 runtime error, 4 validation failure.
#include "ofdmest/config.hpp"
#include "ofdmest/report.hpp"
#include "ofdmest/selftest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitValidation = 4;

struct CommonArgs {
    std::string config_path;
    ofdmest::ConfigOverrides ov;
    bool allow_large_flag = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--fft-size", args.ov.fft_size, "FFT size N");
    cmd->add_option("--guard", args.ov.guard, "cyclic prefix length Ng (default N/8)");
    cmd->add_option("--block", args.ov.block, "OFDM symbols per pilot block B");
    cmd->add_option("--constellation", args.ov.constellation, "bpsk or qam16");
    cmd->add_option("--estimators", args.ov.estimators,
                    "comma list of ls,lmmse,lmmse-full,lr-lmmse,mmse");
    cmd->add_option("--snr", args.ov.snr, "SNR grid start:stop:step in dB");
    cmd->add_option("--trials", args.ov.trials, "Monte Carlo blocks per cell");
    cmd->add_option("--seed", args.ov.seed, "master seed");
    cmd->add_option("--pilot-seed", args.ov.pilot_seed, "pilot pattern seed");
    cmd->add_option("--rank", args.ov.rank, "low-rank order p (default Ng+1)");
    cmd->add_option("--doppler", args.ov.doppler, "uniform normalized Doppler f_D*T");
    cmd->add_option("--active", args.ov.active_carriers,
                    "active carriers: all or ranges like 0-95,160-255");
    cmd->add_option("--pilots", args.ov.pilots, "pilot values: constellation or unimod");
    cmd->add_option("--rhh-mode", args.ov.rhh_mode, "estimator R_HH: analytic or empirical");
    cmd->add_option("--rhh-samples", args.ov.rhh_samples, "draws for empirical R_HH");
    cmd->add_option("--filter-snr", args.ov.filter_snr_db,
                    "mismatched filter SNR in dB (default: true SNR)");
    cmd->add_flag("--allow-large", args.allow_large_flag, "permit N > 512");
}

ofdmest::RunConfig load(const CommonArgs& args)
{
    std::string text;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path, std::ios::binary);
        if (!in)
            throw ofdmest::ConfigError(0, "cannot read config file '" + args.config_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    ofdmest::ConfigOverrides ov = args.ov;
    if (args.allow_large_flag)
        ov.allow_large = true;
    return ofdmest::load_run_config(text, ov);
}

void emit(const std::string& path, const std::string& content)
{
    if (path.empty() || path == "-")
        std::cout << content;
    else
        ofdmest::write_file(path, content);
}

int cmd_sweep(const CommonArgs& args)
{
    ofdmest::RunConfig cfg = load(args);
    try {
        cfg.channel_model().check_guard(cfg.guard);
    } catch (const std::invalid_argument& e) {
        throw ofdmest::ConfigError(0, e.what());
    }

    const ofdmest::OfdmConfig oc = cfg.ofdm();
    const ofdmest::FrameScheme scheme = cfg.frame_scheme();
    const ofdmest::ChannelModel model = cfg.channel_model();
    const ofdmest::SweepResult result = ofdmest::sweep(
        oc, scheme, model, cfg.estimators, cfg.snr_db, cfg.trials, cfg.seed, cfg.sim_options());

    emit(cfg.out, ofdmest::sweep_csv(result));
    if (!cfg.svg.empty())
        ofdmest::write_file(cfg.svg, ofdmest::render_svg(result, ofdmest::ChartMetric::ber));
    std::cerr << "sweep: " << result.rows.size() << " cells, " << cfg.trials
              << " trials each\n";
    return 0;
}

int cmd_singvals(const CommonArgs& args)
{
    const ofdmest::RunConfig cfg = load(args);
    const ofdmest::HermitianMatrix r =
        ofdmest::freq_correlation(cfg.channel_model(), cfg.fft_size);
    const ofdmest::EigenDecomposition e = ofdmest::eig_hermitian(r);
    emit(cfg.out, ofdmest::singvals_csv(e.values));
    return 0;
}

int cmd_validate(const CommonArgs& args, const std::optional<double>& beta_override)
{
    const ofdmest::RunConfig cfg = load(args);
    ofdmest::SelftestHooks hooks;
    hooks.beta_override = beta_override;
    const std::vector<ofdmest::CheckResult> results = ofdmest::run_selftest(cfg, hooks);
    std::size_t failed = 0;
    for (const ofdmest::CheckResult& r : results) {
        if (r.passed) {
            std::cout << "PASS " << r.name << "\n";
        } else {
            std::cout << "FAIL " << r.name << ": " << r.detail << "\n";
            ++failed;
        }
    }
    std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
    return failed == 0 ? 0 : kExitValidation;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"OFDM block-pilot channel estimation laboratory"};
    app.require_subcommand(1);

    CommonArgs sweep_args, singvals_args, validate_args;
    double beta_override = 0.0;

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a BER/MSE-vs-SNR Monte Carlo sweep");
    add_common_options(sweep_cmd, sweep_args);
    sweep_cmd->add_option("--out", sweep_args.ov.out, "CSV output path (default stdout)");
    sweep_cmd->add_option("--svg", sweep_args.ov.svg, "optional SVG chart path");

    CLI::App* singvals_cmd =
        app.add_subcommand("singvals", "eigenvalue profile of the channel correlation R_HH");
    add_common_options(singvals_cmd, singvals_args);
    singvals_cmd->add_option("--out", singvals_args.ov.out, "CSV output path (default stdout)");

    CLI::App* validate_cmd = app.add_subcommand("validate", "run the oracle self-test suite");
    add_common_options(validate_cmd, validate_args);
    CLI::Option* beta_opt = validate_cmd->add_option("--test-beta-override", beta_override,
                                                     "test hook: fake 16-QAM beta value");
    beta_opt->group(""); // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_args);
        if (singvals_cmd->parsed())
            return cmd_singvals(singvals_args);
        if (validate_cmd->parsed()) {
            std::optional<double> hook;
            if (beta_opt->count() > 0)
                hook = beta_override;
            return cmd_validate(validate_args, hook);
        }
    } catch (const ofdmest::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
