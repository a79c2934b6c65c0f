// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/simkit.hpp"

#include "ofdmest/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace ofdmest {

namespace {

constexpr std::uint64_t kTagPilot = 0x70696c6f74ULL;  // "pilot"
constexpr std::uint64_t kTagGains = 0x6761696e73ULL;  // "gains"
constexpr std::uint64_t kTagNoise = 0x6e6f697365ULL;  // "noise"
constexpr std::uint64_t kTagData = 0x64617461ULL;     // "data"
constexpr std::uint64_t kTagRhh = 0x726868ULL;        // "rhh"

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z)
{
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// batches u64 draws into single bits
class BitDrawer {
public:
    explicit BitDrawer(RandomStream& rs) : rs_(rs) {}
    std::uint8_t next()
    {
        if (left_ == 0) {
            word_ = rs_.next_u64();
            left_ = 64;
        }
        const std::uint8_t b = static_cast<std::uint8_t>(word_ & 1u);
        word_ >>= 1;
        --left_;
        return b;
    }

private:
    RandomStream& rs_;
    std::uint64_t word_ = 0;
    unsigned left_ = 0;
};

enum class EstKind { ls, lmmse, lmmse_full, lr_lmmse, mmse };

EstKind parse_estimator(std::string_view name)
{
    if (name == "ls")
        return EstKind::ls;
    if (name == "lmmse")
        return EstKind::lmmse;
    if (name == "lmmse-full")
        return EstKind::lmmse_full;
    if (name == "lr-lmmse")
        return EstKind::lr_lmmse;
    if (name == "mmse")
        return EstKind::mmse;
    throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

// shared per-sweep pieces: active set, pilot subvector, correlation matrices
struct SweepShared {
    std::vector<std::uint32_t> act;
    cvec pilot_act;
    double awgn_ref_power = 0.0; // N * E|x_k|^2, the SNR reference power
    std::optional<HermitianMatrix> r_hh_act;
    std::optional<HermitianMatrix> r_gg;
    std::optional<EigenDecomposition> eig;

    const HermitianMatrix& rhh(const OfdmConfig& cfg, const ChannelModel& model,
                               const SimOptions& opts, std::uint64_t seed)
    {
        if (!r_hh_act) {
            HermitianMatrix full = opts.rhh_mode == RhhMode::analytic
                                       ? freq_correlation(model, cfg.fft_size)
                                       : empirical_freq_correlation(
                                             model, cfg.fft_size, opts.rhh_samples,
                                             SeededStream{seed, kTagRhh});
            r_hh_act = full.submatrix(act);
        }
        return *r_hh_act;
    }

    const HermitianMatrix& rgg(const OfdmConfig& cfg, const ChannelModel& model)
    {
        if (!r_gg)
            r_gg = time_correlation(model, cfg.fft_size);
        return *r_gg;
    }

    const EigenDecomposition& eigen(const OfdmConfig& cfg, const ChannelModel& model,
                                    const SimOptions& opts, std::uint64_t seed)
    {
        if (!eig)
            eig = eig_hermitian(rhh(cfg, model, opts, seed));
        return *eig;
    }
};

SweepShared make_shared_state(const OfdmConfig& cfg, const FrameScheme& scheme)
{
    SweepShared sh;
    sh.act = cfg.active_indices();
    sh.pilot_act.resize(sh.act.size());
    for (std::size_t i = 0; i < sh.act.size(); ++i)
        sh.pilot_act[i] = scheme.pilots[sh.act[i]];
    sh.awgn_ref_power = static_cast<double>(cfg.fft_size) *
                        Constellation::get(cfg.constellation).mean_energy();
    return sh;
}

// estimator context precomputed once per (estimator, SNR) cell
struct EstimatorContext {
    EstKind kind = EstKind::ls;
    std::size_t dim = 0;
    std::vector<cplx> w;                       // mmse: dense M with H = M Y
    std::optional<PrecomputedFilter> filter;   // lmmse / lr-lmmse
    std::optional<HermitianCholesky> full;     // lmmse-full: factor of R + s D
    std::vector<double> full_d;                // lmmse-full: sigma^2 / |X_p(k)|^2

    cvec estimate(const cvec& y_act, const cvec& x_act) const
    {
        switch (kind) {
        case EstKind::ls:
            return ls_estimate(y_act, x_act);
        case EstKind::mmse: {
            cvec out(dim);
            kernels::matvec(w.data(), dim, dim, y_act.data(), out.data());
            return out;
        }
        case EstKind::lmmse_full: {
            const cvec h_ls = ls_estimate(y_act, x_act);
            const cvec z = full->solve(h_ls);
            cvec out(dim);
            for (std::size_t k = 0; k < dim; ++k)
                out[k] = h_ls[k] - full_d[k] * z[k];
            return out;
        }
        default: // lmmse, lr-lmmse
            return filter->apply(ls_estimate(y_act, x_act));
        }
    }
};

std::size_t resolve_rank(const OfdmConfig& cfg, const SimOptions& opts, std::size_t dim)
{
    std::size_t p = opts.rank != 0 ? opts.rank : cfg.guard + 1;
    if (p < 1)
        p = 1;
    if (p > dim)
        p = dim;
    return p;
}

EstimatorContext build_context(EstKind kind, const OfdmConfig& cfg, const ChannelModel& model,
                               NoiseSpec noise, const SimOptions& opts, SweepShared& sh,
                               std::uint64_t seed)
{
    EstimatorContext ctx;
    ctx.kind = kind;
    ctx.dim = sh.act.size();
    const double beta = Constellation::get(cfg.constellation).beta();
    const NoiseSpec fn = opts.filter_snr_db ? NoiseSpec::from_snr_db(*opts.filter_snr_db) : noise;

    switch (kind) {
    case EstKind::ls:
        break;
    case EstKind::lmmse:
        ctx.filter = lmmse_precompute(sh.rhh(cfg, model, opts, seed), fn.snr, beta);
        break;
    case EstKind::lmmse_full: {
        // R + sigma^2 diag(1/|X_p|^2): pilots are fixed per scheme, so the
        // factorization is reusable across the cell's trials
        const HermitianMatrix& r = sh.rhh(cfg, model, opts, seed);
        HermitianMatrix a = r;
        ctx.full_d.resize(ctx.dim);
        for (std::size_t k = 0; k < ctx.dim; ++k) {
            ctx.full_d[k] = fn.sigma2 / std::norm(sh.pilot_act[k]);
            a.set(k, k, a(k, k).real() + ctx.full_d[k]);
        }
        ctx.full.emplace(a);
        break;
    }
    case EstKind::lr_lmmse:
        ctx.filter = lowrank_precompute(sh.eigen(cfg, model, opts, seed), fn.snr, beta,
                                        resolve_rank(cfg, opts, ctx.dim));
        break;
    case EstKind::mmse:
        ctx.w = mmse_matrix(sh.pilot_act, sh.rgg(cfg, model), fn.sigma2, sh.act);
        break;
    }
    return ctx;
}

BlockResult run_block_with_context(const OfdmConfig& cfg, const FrameScheme& scheme,
                                   const ChannelModel& model, const EstimatorContext& ctx,
                                   const SweepShared& sh, NoiseSpec noise, SeededStream stream)
{
    const std::size_t n = cfg.fft_size;
    const std::size_t ng = cfg.guard;
    const auto& act = sh.act;
    const Constellation& cst = Constellation::get(cfg.constellation);
    const unsigned bps = cst.bits_per_symbol();
    const double noise_db = noise.sigma2 == 0.0 ? std::numeric_limits<double>::infinity()
                                                : noise.snr_db;

    const SeededStream s_gain = stream.derive(kTagGains);
    const SeededStream s_noise = stream.derive(kTagNoise);
    RandomStream data_rs(stream.derive(kTagData));
    BitDrawer bits(data_rs);

    const ChannelRealization real = draw_realization(model, s_gain);
    const std::int64_t symbol_len = static_cast<std::int64_t>(n + ng);

    // pilot symbol (block position 0)
    const cvec tx_p = ofdm_modulate(scheme.pilots, ng);
    const cvec ch_p =
        apply_channel(tx_p, real.with_start(static_cast<std::int64_t>(ng)), ng);
    const cvec rx_p = add_awgn(ch_p, noise_db, sh.awgn_ref_power, s_noise.derive(0)).first;
    const cvec y_p = ofdm_demodulate(rx_p, n, ng);

    cvec y_act(act.size());
    for (std::size_t i = 0; i < act.size(); ++i)
        y_act[i] = y_p[act[i]];
    const cvec h_est = ctx.estimate(y_act, sh.pilot_act);

    // MSE reference: the analytic response over the pilot symbol's window
    const cvec h_true = freq_response(real.with_start(static_cast<std::int64_t>(ng)), n);
    BlockResult out;
    for (std::size_t i = 0; i < act.size(); ++i) {
        out.channel_sq_error += std::norm(h_est[i] - h_true[act[i]]);
        out.channel_energy += std::norm(h_true[act[i]]);
    }

    // B-1 data symbols equalized with the held estimate
    std::vector<std::uint8_t> tx_bits(act.size() * bps);
    cvec x_data(n, cplx(0.0, 0.0));
    for (std::size_t s = 1; s < cfg.block_len; ++s) {
        for (auto& b : tx_bits)
            b = bits.next();
        const cvec pts = map_bits(tx_bits, cst);
        for (std::size_t i = 0; i < act.size(); ++i)
            x_data[act[i]] = pts[i];

        const cvec tx = ofdm_modulate(x_data, ng);
        const std::int64_t n0 = static_cast<std::int64_t>(s) * symbol_len +
                                static_cast<std::int64_t>(ng);
        const cvec ch = apply_channel(tx, real.with_start(n0), ng);
        const cvec rx = add_awgn(ch, noise_db, sh.awgn_ref_power, s_noise.derive(s)).first;
        const cvec y = ofdm_demodulate(rx, n, ng);

        for (std::size_t i = 0; i < act.size(); ++i)
            y_act[i] = y[act[i]];
        const cvec x_eq = equalize(y_act, h_est);
        const std::vector<std::uint8_t> rx_bits = demap_symbols(x_eq, cst);
        for (std::size_t i = 0; i < tx_bits.size(); ++i)
            out.bit_errors += tx_bits[i] != rx_bits[i];
        out.data_bits += tx_bits.size();
    }
    return out;
}

void parallel_trials(std::uint64_t count, std::size_t threads,
                     const std::function<void(std::uint64_t)>& body)
{
    if (threads <= 1 || count <= 1) {
        for (std::uint64_t t = 0; t < count; ++t)
            body(t);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t t = next.fetch_add(1, std::memory_order_relaxed);
            if (t >= count)
                return;
            try {
                body(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!error)
                    error = std::current_exception();
                next.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t spawn = static_cast<std::size_t>(
        std::min<std::uint64_t>(threads, count));
    pool.reserve(spawn);
    for (std::size_t i = 0; i < spawn; ++i)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace

FrameScheme FrameScheme::make(const OfdmConfig& cfg, std::uint64_t pilot_seed, PilotMode mode)
{
    cfg.validate();
    const Constellation& cst = Constellation::get(cfg.constellation);
    RandomStream rs(SeededStream{pilot_seed, kTagPilot});
    FrameScheme scheme;
    scheme.block_len = cfg.block_len;
    scheme.pilot_seed = pilot_seed;
    scheme.mode = mode;
    scheme.pilots.assign(cfg.fft_size, cplx(0.0, 0.0));
    for (std::uint32_t k : cfg.active_indices()) {
        if (mode == PilotMode::unimod)
            scheme.pilots[k] = rs.next_bit() ? cplx(-1.0, 0.0) : cplx(1.0, 0.0);
        else
            scheme.pilots[k] = cst.points()[rs.next_index_pow2(
                static_cast<std::uint32_t>(cst.points().size()))];
    }
    return scheme;
}

const std::vector<std::string>& known_estimators()
{
    static const std::vector<std::string> names = {"ls", "lmmse", "lmmse-full", "lr-lmmse",
                                                   "mmse"};
    return names;
}

bool is_known_estimator(std::string_view name)
{
    for (const std::string& n : known_estimators())
        if (n == name)
            return true;
    return false;
}

SeededStream trial_stream(std::uint64_t seed, std::size_t estimator_index, std::size_t snr_index,
                          std::size_t trial_index)
{
    std::uint64_t h = mix64(static_cast<std::uint64_t>(estimator_index) + kGolden);
    h = mix64(h ^ (static_cast<std::uint64_t>(snr_index) + kGolden));
    h = mix64(h ^ (static_cast<std::uint64_t>(trial_index) + kGolden));
    return {seed, h};
}

BlockResult run_block(const OfdmConfig& cfg, const FrameScheme& scheme, const ChannelModel& model,
                      std::string_view estimator, NoiseSpec noise, SeededStream stream,
                      const SimOptions& opts)
{
    cfg.validate();
    model.check_guard(cfg.guard);
    const EstKind kind = parse_estimator(estimator);
    SweepShared sh = make_shared_state(cfg, scheme);
    const EstimatorContext ctx = build_context(kind, cfg, model, noise, opts, sh, stream.seed);
    return run_block_with_context(cfg, scheme, model, ctx, sh, noise, stream);
}

std::vector<BlockResult> run_cell_trials(const OfdmConfig& cfg, const FrameScheme& scheme,
                                         const ChannelModel& model, std::string_view estimator,
                                         std::size_t estimator_index, double snr_db,
                                         std::size_t snr_index, std::uint64_t t0, std::uint64_t t1,
                                         std::uint64_t seed, const SimOptions& opts)
{
    cfg.validate();
    model.check_guard(cfg.guard);
    if (t1 < t0)
        throw std::invalid_argument("run_cell_trials: bad trial range");
    const EstKind kind = parse_estimator(estimator);
    const NoiseSpec noise = NoiseSpec::from_snr_db(snr_db);
    SweepShared sh = make_shared_state(cfg, scheme);
    const EstimatorContext ctx = build_context(kind, cfg, model, noise, opts, sh, seed);

    std::vector<BlockResult> slots(t1 - t0);
    parallel_trials(t1 - t0, resolve_thread_count(opts.threads), [&](std::uint64_t i) {
        slots[i] = run_block_with_context(cfg, scheme, model, ctx, sh, noise,
                                          trial_stream(seed, estimator_index, snr_index, t0 + i));
    });
    return slots;
}

SweepResult sweep(const OfdmConfig& cfg, const FrameScheme& scheme, const ChannelModel& model,
                  const std::vector<std::string>& estimators, const std::vector<double>& snr_db,
                  std::uint64_t trials, std::uint64_t seed, const SimOptions& opts)
{
    if (trials < 1)
        throw std::invalid_argument("sweep: need at least one trial");
    if (estimators.empty() || snr_db.empty())
        throw std::invalid_argument("sweep: empty estimator or SNR list");
    for (const std::string& e : estimators)
        parse_estimator(e); // reject unknown names before any work

    SweepResult result;
    for (std::size_t e = 0; e < estimators.size(); ++e) {
        for (std::size_t s = 0; s < snr_db.size(); ++s) {
            std::vector<BlockResult> slots;
            try {
                slots = run_cell_trials(cfg, scheme, model, estimators[e], e, snr_db[s], s, 0,
                                        trials, seed, opts);
            } catch (const std::exception& ex) {
                throw std::runtime_error("cell (" + estimators[e] + ", " +
                                         std::to_string(snr_db[s]) + " dB): " + ex.what());
            }
            SweepCell cell;
            cell.estimator = estimators[e];
            cell.snr_db = snr_db[s];
            cell.trials = trials;
            // reduce in trial order: thread-count independent
            for (const BlockResult& b : slots) {
                cell.data_bits += b.data_bits;
                cell.bit_errors += b.bit_errors;
                cell.mse_sum += b.channel_sq_error;
            }
            cell.mse_count = trials * cfg.active_count();
            result.rows.push_back(std::move(cell));
        }
    }
    return result;
}

double mse_of(const SweepCell& cell)
{
    if (cell.mse_count == 0)
        throw std::invalid_argument("mse_of: empty cell");
    return cell.mse_sum / static_cast<double>(cell.mse_count);
}

double ber_of(const SweepCell& cell)
{
    if (cell.data_bits == 0)
        return 0.0;
    return static_cast<double>(cell.bit_errors) / static_cast<double>(cell.data_bits);
}

std::size_t resolve_thread_count(std::size_t requested)
{
    if (requested > 0)
        return requested;
    std::size_t hw = std::thread::hardware_concurrency();
    if (hw == 0)
        hw = 1;
    if (const char* env = std::getenv("OFDMEST_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v > 0)
            return std::min<std::size_t>(static_cast<std::size_t>(v), hw);
    }
    return hw;
}

} // namespace ofdmest
