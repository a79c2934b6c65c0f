// SPDX-License-Identifier: Apache-2.0
//
// Reduced-size oracle checks. Each oracle here is coded directly against the
// defining formula (per-term std::polar sums, explicit residuals), not
// against the library path it is checking.
#include "ofdmest/selftest.hpp"

#include "ofdmest/kernels.hpp"
#include "ofdmest/report.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace ofdmest {

namespace {

cvec random_cvec(RandomStream& rs, std::size_t n)
{
    cvec v(n);
    for (auto& z : v)
        z = rs.next_cgauss(1.0);
    return v;
}

// direct per-term transform, independent of the kernels path
cvec direct_fourier(const cvec& in, int sign, double scale)
{
    const std::size_t n = in.size();
    cvec out(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = static_cast<double>(sign) * 2.0 * std::numbers::pi *
                               static_cast<double>(k) * static_cast<double>(m) /
                               static_cast<double>(n);
            out[k] += in[m] * std::polar(1.0, ang);
        }
        out[k] *= scale;
    }
    return out;
}

double max_abs_diff(const cvec& a, const cvec& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string fmt(double v)
{
    std::ostringstream s;
    s << v;
    return s.str();
}

using CheckFn = std::function<std::optional<std::string>()>;

} // namespace

std::vector<CheckResult> run_selftest(const RunConfig& cfg, const SelftestHooks& hooks)
{
    std::vector<std::pair<std::string, CheckFn>> checks;
    const SeededStream base{cfg.seed, 0x73656c66ULL}; // "self"

    checks.emplace_back("dft-idft round trip", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(1));
        const cvec x = random_cvec(rs, 8);
        const cvec back = idft(dft(x));
        const double d = max_abs_diff(x, back);
        if (d > 1e-10)
            return "round-trip error " + fmt(d);
        return std::nullopt;
    });

    checks.emplace_back("dft matches direct summation", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(2));
        for (std::size_t n : {std::size_t{12}, std::size_t{16}}) {
            const cvec x = random_cvec(rs, n);
            const double d = max_abs_diff(dft(x), direct_fourier(x, -1, 1.0 / double(n)));
            if (d > 1e-12)
                return "N=" + std::to_string(n) + " error " + fmt(d);
        }
        return std::nullopt;
    });

    checks.emplace_back("parseval with the 1/N convention", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(3));
        const cvec x = random_cvec(rs, 16);
        const cvec X = dft(x);
        const double lhs = kernels::sum_abs2(x.data(), x.size());
        const double rhs = 16.0 * kernels::sum_abs2(X.data(), X.size());
        const double rel = std::abs(lhs - rhs) / lhs;
        if (rel > 1e-10)
            return "relative mismatch " + fmt(rel);
        return std::nullopt;
    });

    checks.emplace_back("simd equivalence (active vs scalar)", [&]() -> std::optional<std::string> {
        const auto saved = kernels::active_backend();
        if (!kernels::backend_available(kernels::Backend::avx2))
            return std::nullopt; // scalar-only host, nothing to compare
        RandomStream rs(base.derive(4));
        const cvec a = random_cvec(rs, 37);
        const cvec b = random_cvec(rs, 37);
        cvec prod_scalar(37), prod_simd(37), fft_scalar(32), fft_simd(32);
        kernels::force_backend(kernels::Backend::scalar);
        kernels::cmul(a.data(), b.data(), prod_scalar.data(), 37);
        kernels::fourier(a.data(), fft_scalar.data(), 32, -1, 1.0);
        const double dot_s = kernels::sum_abs2(a.data(), 37);
        kernels::force_backend(kernels::Backend::avx2);
        kernels::cmul(a.data(), b.data(), prod_simd.data(), 37);
        kernels::fourier(a.data(), fft_simd.data(), 32, -1, 1.0);
        const double dot_v = kernels::sum_abs2(a.data(), 37);
        kernels::force_backend(saved);
        if (max_abs_diff(prod_scalar, prod_simd) > 1e-13)
            return "cmul backends disagree";
        if (max_abs_diff(fft_scalar, fft_simd) > 1e-12)
            return "fft backends disagree";
        if (std::abs(dot_s - dot_v) > 1e-11 * dot_s)
            return "sum_abs2 backends disagree";
        return std::nullopt;
    });

    checks.emplace_back("hermitian eig reconstruction", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(5));
        const std::size_t n = 8;
        std::vector<cplx> g(n * n);
        for (auto& z : g)
            z = rs.next_cgauss(1.0);
        std::vector<cplx> psd(n * n, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t m = 0; m < n; ++m)
                    psd[i * n + j] += g[i * n + m] * std::conj(g[j * n + m]);
        const HermitianMatrix a = HermitianMatrix::from_dense(n, psd, 1e-9);
        const EigenDecomposition e = eig_hermitian(a);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                cplx acc(0.0, 0.0);
                for (std::size_t m = 0; m < n; ++m)
                    acc += e.basis_at(i, m) * e.values[m] * std::conj(e.basis_at(j, m));
                worst = std::max(worst, std::abs(acc - a(i, j)));
            }
        }
        if (worst > 1e-9)
            return "reconstruction error " + fmt(worst);
        return std::nullopt;
    });

    checks.emplace_back("hermitian solve residual", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(6));
        const std::size_t n = 8;
        std::vector<cplx> g(n * n);
        for (auto& z : g)
            z = rs.next_cgauss(1.0);
        std::vector<cplx> pd(n * n, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t m = 0; m < n; ++m)
                    pd[i * n + j] += g[i * n + m] * std::conj(g[j * n + m]);
            pd[i * n + i] += 0.5;
        }
        const HermitianMatrix a = HermitianMatrix::from_dense(n, pd, 1e-9);
        const cvec b = random_cvec(rs, n);
        const cvec x = solve_hermitian(a, b);
        cvec ax(n);
        kernels::matvec(a.data(), n, n, x.data(), ax.data());
        double rnorm = 0.0, bnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rnorm += std::norm(ax[i] - b[i]);
            bnorm += std::norm(b[i]);
        }
        const double rel = std::sqrt(rnorm / bnorm);
        if (rel > 1e-9)
            return "residual " + fmt(rel);
        return std::nullopt;
    });

    checks.emplace_back("gaussian stream moments", [&]() -> std::optional<std::string> {
        const cvec z = gaussian_pair_stream(base.derive(7), 100000, 2.0);
        const double mean = kernels::sum_abs2(z.data(), z.size()) / double(z.size());
        if (std::abs(mean - 2.0) > 0.04)
            return "E|z|^2 = " + fmt(mean) + ", expected 2";
        return std::nullopt;
    });

    checks.emplace_back("gaussian stream determinism", [&]() -> std::optional<std::string> {
        const cvec a = gaussian_pair_stream(base.derive(8), 64, 1.0);
        const cvec b = gaussian_pair_stream(base.derive(8), 64, 1.0);
        if (a != b)
            return "identical (seed, stream) produced different samples";
        return std::nullopt;
    });

    checks.emplace_back("modem round trip", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(9));
        for (ConstellationKind kind : {ConstellationKind::bpsk, ConstellationKind::qam16}) {
            const Constellation& cst = Constellation::get(kind);
            std::vector<std::uint8_t> bits(16 * cst.bits_per_symbol());
            for (auto& b : bits)
                b = static_cast<std::uint8_t>(rs.next_bit());
            const cvec sym = map_bits(bits, cst);
            const cvec y = ofdm_demodulate(ofdm_modulate(sym, 2), 16, 2);
            if (demap_symbols(y, cst) != bits)
                return std::string("bits not reproduced for ") + std::string(cst.name());
        }
        return std::nullopt;
    });

    checks.emplace_back("beta constants", [&]() -> std::optional<std::string> {
        const double b16 = hooks.beta_override.value_or(
            Constellation::get(ConstellationKind::qam16).beta());
        if (std::abs(b16 - 17.0 / 9.0) > 1e-12)
            return "qam16 beta = " + fmt(b16) + ", expected 17/9";
        if (Constellation::get(ConstellationKind::bpsk).beta() != 1.0)
            return "bpsk beta != 1";
        return std::nullopt;
    });

    checks.emplace_back("cp delay becomes a circular shift", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(10));
        const std::size_t n = 16, ng = 4, d = 3;
        const cvec x = random_cvec(rs, n);
        const ChannelModel m({{d, 1.0, 0.0}});
        const ChannelRealization real(m, {cplx(1.0, 0.0)}, 0);
        const cvec y = ofdm_demodulate(apply_channel(ofdm_modulate(x, ng), real, ng), n, ng);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const cplx expect = x[k] * std::polar(1.0, -2.0 * std::numbers::pi * double(d) *
                                                           double(k) / double(n));
            worst = std::max(worst, std::abs(y[k] - expect));
        }
        if (worst > 1e-9)
            return "shift property error " + fmt(worst);
        return std::nullopt;
    });

    checks.emplace_back("time-domain convolution oracle", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(11));
        const std::size_t n = 32, ng = 4;
        const ChannelModel m({{0, 0.6, 0.05}, {3, 0.4, 0.05}});
        const ChannelRealization real = draw_realization(m, base.derive(12));
        const cvec x = random_cvec(rs, n + ng);
        const cvec y = apply_channel(x, real, ng);
        double worst = 0.0;
        for (std::size_t mm = 0; mm < n + ng; ++mm) {
            cplx acc(0.0, 0.0);
            for (std::size_t t = 0; t < m.taps().size(); ++t) {
                if (mm < m.taps()[t].delay)
                    continue;
                const double ph = m.taps()[t].doppler *
                                  (double(real.start_sample()) + double(mm) - double(ng)) /
                                  double(n);
                acc += real.gains()[t] * std::polar(1.0, 2.0 * std::numbers::pi * ph) *
                       x[mm - m.taps()[t].delay];
            }
            worst = std::max(worst, std::abs(acc - y[mm]));
        }
        if (worst > 1e-12)
            return "convolution mismatch " + fmt(worst);
        return std::nullopt;
    });

    checks.emplace_back("decomposition Y = HX + I (noise off)", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(13));
        const std::size_t n = 32, ng = 4;
        const ChannelModel m({{0, 0.6, 0.05}, {3, 0.4, 0.05}});
        const ChannelRealization real =
            draw_realization(m, base.derive(14)).with_start(static_cast<std::int64_t>(ng));
        const cvec x = random_cvec(rs, n);
        const cvec y = ofdm_demodulate(apply_channel(ofdm_modulate(x, ng), real, ng), n, ng);
        const cvec h = freq_response(real, n);
        const cvec ici = ici_term(real, x, n);
        double err = 0.0, ref = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            err += std::norm(y[k] - (h[k] * x[k] + ici[k]));
            ref += std::norm(y[k]);
        }
        const double rel = std::sqrt(err / ref);
        if (rel > 1e-9)
            return "relative decomposition error " + fmt(rel);
        return std::nullopt;
    });

    checks.emplace_back("freq correlation structure", [&]() -> std::optional<std::string> {
        const ChannelModel m = ChannelModel::reference_profile();
        const std::size_t n = 32;
        const HermitianMatrix r = freq_correlation(m, n);
        for (std::size_t k = 0; k < n; ++k)
            if (std::abs(r(k, k).real() - 1.0) > 1e-12)
                return "diagonal is not 1";
        const EigenDecomposition e = eig_hermitian(r);
        std::size_t big = 0;
        for (double v : e.values)
            big += v > 1e-10 * e.values[0];
        if (big != m.path_count())
            return "rank " + std::to_string(big) + ", expected " + std::to_string(m.path_count());
        return std::nullopt;
    });

    checks.emplace_back("time correlation and the F identity", [&]() -> std::optional<std::string> {
        const ChannelModel m = ChannelModel::reference_profile();
        const std::size_t n = 16;
        const HermitianMatrix rgg = time_correlation(m, n);
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            tr += rgg(i, i).real();
        if (std::abs(tr - 1.0) > 1e-12)
            return "trace " + fmt(tr) + ", expected 1";
        const std::vector<cplx> f = fourier_matrix(n);
        const HermitianMatrix rhh = freq_correlation(m, n);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                cplx acc(0.0, 0.0);
                for (std::size_t d = 0; d < n; ++d)
                    acc += f[i * n + d] * rgg(d, d).real() * std::conj(f[j * n + d]);
                worst = std::max(worst, std::abs(acc - rhh(i, j) / double(n * n)));
            }
        }
        if (worst > 1e-12)
            return "F Rgg F^H != R_HH/N^2 (error " + fmt(worst) + ")";
        return std::nullopt;
    });

    checks.emplace_back("lmmse defining residual", [&]() -> std::optional<std::string> {
        const ChannelModel m = ChannelModel::reference_profile();
        const std::size_t n = 8;
        const HermitianMatrix r = freq_correlation(m, n);
        const double snr = 10.0, beta = 17.0 / 9.0;
        const PrecomputedFilter w = lmmse_precompute(r, snr, beta);
        const HermitianMatrix ridged = r.plus_scaled_identity(beta / snr);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                cplx acc(0.0, 0.0);
                for (std::size_t k = 0; k < n; ++k)
                    acc += w.matrix()[i * n + k] * ridged(k, j);
                worst = std::max(worst, std::abs(acc - r(i, j)));
            }
        }
        if (worst > 1e-9)
            return "W(R + (beta/SNR)I) != R (error " + fmt(worst) + ")";
        return std::nullopt;
    });

    checks.emplace_back("low-rank p=N equals simplified", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(15));
        const ChannelModel m = ChannelModel::reference_profile();
        const std::size_t n = 16;
        const HermitianMatrix r = freq_correlation(m, n);
        const PrecomputedFilter w = lmmse_precompute(r, 15.0, 17.0 / 9.0);
        const PrecomputedFilter lr = lowrank_precompute(r, 15.0, 17.0 / 9.0, n);
        const cvec h = random_cvec(rs, n);
        const double d = max_abs_diff(w.apply(h), lr.apply(h));
        if (d > 1e-8)
            return "full-rank mismatch " + fmt(d);
        return std::nullopt;
    });

    checks.emplace_back("mmse zero-noise collapse", [&]() -> std::optional<std::string> {
        RandomStream rs(base.derive(16));
        const std::size_t n = 8;
        std::vector<ChannelTap> taps(n);
        double tot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            taps[i] = {i, std::exp(-double(i) / 4.0), 0.0};
            tot += taps[i].power;
        }
        double partial = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            taps[i].power /= tot;
            partial += taps[i].power;
        }
        taps[n - 1].power = 1.0 - partial;
        const ChannelModel m(taps);
        const HermitianMatrix rgg = time_correlation(m, n);
        cvec x(n);
        const Constellation& cst = Constellation::get(ConstellationKind::qam16);
        for (auto& v : x)
            v = cst.points()[rs.next_index_pow2(16)];
        const cvec y = random_cvec(rs, n);
        const cvec mmse = mmse_estimate(y, x, rgg, 0.0);
        const cvec ls = ls_estimate(y, x);
        const double d = max_abs_diff(mmse, ls);
        if (d > 1e-8)
            return "collapse error " + fmt(d);
        return std::nullopt;
    });

    checks.emplace_back("no-ISI precondition (tau_max <= guard)", [&]() -> std::optional<std::string> {
        std::size_t worst = 0;
        for (const ChannelTap& t : cfg.taps)
            worst = std::max(worst, t.delay);
        if (worst > cfg.guard)
            return "max tap delay " + std::to_string(worst) + " exceeds guard " +
                   std::to_string(cfg.guard);
        return std::nullopt;
    });

    checks.emplace_back("tap energy is unit", [&]() -> std::optional<std::string> {
        double s = 0.0;
        for (const ChannelTap& t : cfg.taps)
            s += t.power;
        if (std::abs(s - 1.0) > 1e-12)
            return "tap powers sum to " + fmt(s);
        return std::nullopt;
    });

    checks.emplace_back("noise-off block has zero errors", [&]() -> std::optional<std::string> {
        OfdmConfig oc = cfg.ofdm();
        oc.fft_size = 16;
        oc.guard = std::min<std::size_t>(cfg.guard, 16);
        oc.active.clear();
        oc.block_len = 4;
        std::size_t max_delay = 0;
        for (const ChannelTap& t : cfg.taps)
            max_delay = std::max(max_delay, t.delay);
        if (max_delay > oc.guard)
            return std::nullopt; // covered by the no-ISI check above
        std::vector<ChannelTap> taps = cfg.taps;
        for (auto& t : taps)
            t.doppler = 0.0;
        const ChannelModel m(taps);
        const FrameScheme scheme = FrameScheme::make(oc, cfg.pilot_seed, cfg.pilot_mode);
        const BlockResult r = run_block(oc, scheme, m, "ls",
                                        NoiseSpec{0.0, 1e12, 120.0}, SeededStream{cfg.seed, 1});
        if (r.bit_errors != 0)
            return std::to_string(r.bit_errors) + " bit errors in a noise-free static block";
        if (r.channel_sq_error > 1e-18)
            return "channel error " + fmt(r.channel_sq_error) + " in a noise-free block";
        return std::nullopt;
    });

    checks.emplace_back("sweep determinism across thread counts", [&]() -> std::optional<std::string> {
        OfdmConfig oc;
        oc.fft_size = 16;
        oc.guard = 2;
        oc.block_len = 2;
        oc.constellation = cfg.constellation;
        const ChannelModel m({{0, 0.7, 0.0}, {2, 0.3, 0.0}});
        const FrameScheme scheme = FrameScheme::make(oc, 7, PilotMode::constellation);
        SimOptions a, b;
        a.threads = 1;
        b.threads = 4;
        const SweepResult ra = sweep(oc, scheme, m, {"ls", "lmmse"}, {0.0, 10.0}, 8, 3, a);
        const SweepResult rb = sweep(oc, scheme, m, {"ls", "lmmse"}, {0.0, 10.0}, 8, 3, b);
        for (std::size_t i = 0; i < ra.rows.size(); ++i) {
            if (ra.rows[i].bit_errors != rb.rows[i].bit_errors ||
                ra.rows[i].mse_sum != rb.rows[i].mse_sum)
                return "thread count changed the result";
        }
        return std::nullopt;
    });

    std::vector<CheckResult> results;
    results.reserve(checks.size());
    for (auto& [name, fn] : checks) {
        CheckResult r;
        r.name = name;
        try {
            const std::optional<std::string> fail = fn();
            r.passed = !fail.has_value();
            r.detail = fail.value_or("");
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace ofdmest
