// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/estimators.hpp"

#include "ofdmest/channel.hpp"
#include "ofdmest/kernels.hpp"
#include "ofdmest/modem.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ofdmest;

namespace {

// noise-free pilot pass through the chain; returns (Y, H_true) on all carriers
std::pair<cvec, cvec> noiseless_pilot(const ChannelModel& m, const cvec& pilots, std::size_t n,
                                      std::size_t ng, std::uint64_t stream)
{
    const ChannelRealization real =
        draw_realization(m, SeededStream{31, stream}).with_start(static_cast<std::int64_t>(ng));
    const cvec y = ofdm_demodulate(apply_channel(ofdm_modulate(pilots, ng), real, ng), n, ng);
    return {y, freq_response(real, n)};
}

cvec qam_pilots(std::size_t n, std::uint64_t stream)
{
    const Constellation& c = Constellation::get(ConstellationKind::qam16);
    RandomStream rs(SeededStream{77, stream});
    cvec x(n);
    for (auto& v : x)
        v = c.points()[rs.next_index_pow2(16)];
    return x;
}

} // namespace

TEST_CASE("ls: exact on a noise-free static channel")
{
    const std::size_t n = 32, ng = 9;
    const cvec x = qam_pilots(n, 1);
    const auto [y, h] = noiseless_pilot(ChannelModel::reference_profile(), x, n, ng, 2);
    const cvec est = ls_estimate(y, x);
    CHECK(oracles::max_abs_diff(est, h) < 1e-10);
}

TEST_CASE("ls: unit pilots return Y, near-zero pilots rejected")
{
    RandomStream rs(SeededStream{31, 5});
    const cvec y = oracles::random_cvec(rs, 8);
    CHECK(oracles::max_abs_diff(ls_estimate(y, cvec(8, cplx(1.0, 0.0))), y) == 0.0);

    cvec x(8, cplx(1.0, 0.0));
    x[3] = cplx(0.0, 1e-13);
    CHECK_THROWS_AS(ls_estimate(y, x), std::invalid_argument);
}

TEST_CASE("ls error is exactly W/X")
{
    RandomStream rs(SeededStream{31, 6});
    const std::size_t n = 16;
    const cvec x = qam_pilots(n, 7);
    const cvec h = oracles::random_cvec(rs, n);
    const cvec w = oracles::random_cvec(rs, n, 0.1);
    cvec y(n);
    for (std::size_t k = 0; k < n; ++k)
        y[k] = h[k] * x[k] + w[k];
    const cvec est = ls_estimate(y, x);
    for (std::size_t k = 0; k < n; ++k)
        CHECK(std::abs((est[k] - h[k]) - w[k] / x[k]) < 1e-12);
}

TEST_CASE("lmmse_full: zero noise with full-rank R_HH is the identity filter")
{
    RandomStream rs(SeededStream{31, 8});
    const std::size_t n = 8;
    const HermitianMatrix r = oracles::random_psd(rs, n, 0.1);
    const cvec h_ls = oracles::random_cvec(rs, n);
    const cvec x = qam_pilots(n, 9);
    CHECK(oracles::max_abs_diff(lmmse_full(h_ls, r, 0.0, x), h_ls) < 1e-10);
}

TEST_CASE("lmmse_full: all-ones R_HH against the dense closed form at N=4")
{
    RandomStream rs(SeededStream{31, 10});
    const std::size_t n = 4;
    HermitianMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            r.set(i, j, 1.0);
    const cvec x(n, cplx(1.0, 0.0)); // constant modulus
    const double sigma2 = 0.25;
    const cvec h_ls = oracles::random_cvec(rs, n);
    const cvec got = lmmse_full(h_ls, r, sigma2, x);

    // dense evaluation with an explicit inverse
    std::vector<cplx> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = cplx(1.0, 0.0) + (i == j ? cplx(sigma2, 0.0) : cplx(0.0, 0.0));
    const std::vector<cplx> ainv = oracles::gj_inverse(a, n);
    std::vector<cplx> rm(n * n, cplx(1.0, 0.0));
    const std::vector<cplx> w = oracles::matmul(rm, ainv, n);
    const cvec want = oracles::matvec(w, h_ls, n);
    CHECK(oracles::max_abs_diff(got, want) < 1e-12);

    // rank-1 smoother: output is the shrunk per-vector average replicated
    cplx avg(0.0, 0.0);
    for (const cplx& v : h_ls)
        avg += v;
    avg *= 1.0 / (double(n) + sigma2);
    for (const cplx& v : got)
        CHECK(std::abs(v - avg) < 1e-12);
}

TEST_CASE("lmmse_full equals the simplified filter for constant-modulus pilots")
{
    RandomStream rs(SeededStream{31, 11});
    const std::size_t n = 16;
    const HermitianMatrix r = freq_correlation(ChannelModel::reference_profile(), n);
    const double sigma2 = 0.05;
    cvec x(n);
    for (auto& v : x)
        v = rs.next_bit() ? cplx(-1.0, 0.0) : cplx(1.0, 0.0);
    const cvec h_ls = oracles::random_cvec(rs, n);
    const cvec full = lmmse_full(h_ls, r, sigma2, x);
    const PrecomputedFilter w = lmmse_precompute(r, 1.0 / sigma2, 1.0);
    CHECK(oracles::max_abs_diff(full, w.apply(h_ls)) < 1e-10);
}

TEST_CASE("lmmse_precompute: closed forms and the defining residual")
{
    const PrecomputedFilter half = lmmse_precompute(HermitianMatrix::identity(4), 1.0, 1.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(half.matrix()[i * 4 + j] -
                           (i == j ? cplx(0.5, 0.0) : cplx(0.0, 0.0))) < 1e-14);

    const PrecomputedFilter near_id = lmmse_precompute(HermitianMatrix::identity(4), 1e12, 1.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(near_id.matrix()[i * 4 + j] -
                           (i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0))) < 1e-6);

    RandomStream rs(SeededStream{31, 12});
    const std::size_t n = 8;
    const HermitianMatrix r = oracles::random_psd(rs, n);
    const double snr = 7.0, beta = 17.0 / 9.0;
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
    CHECK(worst < 1e-9);
}

TEST_CASE("simplified filter is independent of transmitted data by construction")
{
    const HermitianMatrix r = freq_correlation(ChannelModel::reference_profile(), 16);
    const PrecomputedFilter w1 = lmmse_precompute(r, 10.0, 17.0 / 9.0);
    const PrecomputedFilter w2 = lmmse_precompute(r, 10.0, 17.0 / 9.0);
    CHECK(w1.matrix() == w2.matrix()); // bit-for-bit, no data enters
}

TEST_CASE("lowrank: p=N equals the simplified filter, rank bounds enforced")
{
    RandomStream rs(SeededStream{31, 13});
    const std::size_t n = 16;
    const HermitianMatrix r = freq_correlation(ChannelModel::reference_profile(), n);
    const PrecomputedFilter w = lmmse_precompute(r, 12.0, 17.0 / 9.0);
    const PrecomputedFilter lr = lowrank_precompute(r, 12.0, 17.0 / 9.0, n);
    for (int t = 0; t < 20; ++t) {
        const cvec h = oracles::random_cvec(rs, n);
        CHECK(oracles::max_abs_diff(w.apply(h), lr.apply(h)) < 1e-8);
    }
    CHECK_THROWS_AS(lowrank_precompute(r, 12.0, 17.0 / 9.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(lowrank_precompute(r, 12.0, 17.0 / 9.0, n + 1), std::invalid_argument);
}

TEST_CASE("lowrank: truncating zero modes is exact (rank-1 all-ones)")
{
    RandomStream rs(SeededStream{31, 14});
    const std::size_t n = 8;
    HermitianMatrix ones(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            ones.set(i, j, 1.0);
    const PrecomputedFilter p1 = lowrank_precompute(ones, 9.0, 1.0, 1);
    const PrecomputedFilter pn = lowrank_precompute(ones, 9.0, 1.0, n);
    const cvec h = oracles::random_cvec(rs, n);
    CHECK(oracles::max_abs_diff(p1.apply(h), pn.apply(h)) < 1e-10);
}

TEST_CASE("lowrank at p = Ng+1 is MSE-lossless for on-grid delays")
{
    // Monte Carlo comparison against the full filter; the channel lives in 4
    // modes, so rank Ng+1 = 9 truncates only zero modes.
    RandomStream rs(SeededStream{31, 15});
    const std::size_t n = 64, ng = 8;
    const ChannelModel m({{0, 0.4, 0.0}, {2, 0.3, 0.0}, {5, 0.2, 0.0}, {7, 0.1, 0.0}});
    const HermitianMatrix r = freq_correlation(m, n);
    const double snr = 10.0, beta = 17.0 / 9.0;
    const PrecomputedFilter full = lmmse_precompute(r, snr, beta);
    const PrecomputedFilter lr = lowrank_precompute(r, snr, beta, ng + 1);

    double mse_full = 0.0, mse_lr = 0.0;
    const std::size_t trials = 10000;
    const cvec x = qam_pilots(n, 16);
    for (std::size_t t = 0; t < trials; ++t) {
        const ChannelRealization real = draw_realization(m, SeededStream{32, t});
        const cvec h = freq_response(real, n);
        cvec h_ls(n);
        RandomStream noise(SeededStream{33, t});
        for (std::size_t k = 0; k < n; ++k)
            h_ls[k] = h[k] + noise.next_cgauss(1.0 / snr) / x[k];
        const cvec hf = full.apply(h_ls);
        const cvec hl = lr.apply(h_ls);
        for (std::size_t k = 0; k < n; ++k) {
            mse_full += std::norm(hf[k] - h[k]);
            mse_lr += std::norm(hl[k] - h[k]);
        }
    }
    CHECK(std::abs(mse_lr - mse_full) < 1e-6 * mse_full);
}

TEST_CASE("rank improvement is monotone in p")
{
    RandomStream rs(SeededStream{31, 17});
    const std::size_t n = 16;
    const ChannelModel m = ChannelModel::reference_profile();
    const HermitianMatrix r = freq_correlation(m, n);
    const double snr = 8.0, beta = 17.0 / 9.0;
    const EigenDecomposition eig = eig_hermitian(r);
    const cvec x = qam_pilots(n, 18);

    const std::size_t trials = 10000;
    std::vector<double> mse(n + 1, 0.0);
    std::vector<PrecomputedFilter> filters;
    for (std::size_t p = 1; p <= n; ++p)
        filters.push_back(lowrank_precompute(eig, snr, beta, p));
    for (std::size_t t = 0; t < trials; ++t) {
        const ChannelRealization real = draw_realization(m, SeededStream{34, t});
        const cvec h = freq_response(real, n);
        cvec h_ls(n);
        RandomStream noise(SeededStream{35, t});
        for (std::size_t k = 0; k < n; ++k)
            h_ls[k] = h[k] + noise.next_cgauss(1.0 / snr) / x[k];
        for (std::size_t p = 1; p <= n; ++p) {
            const cvec hp = filters[p - 1].apply(h_ls);
            for (std::size_t k = 0; k < n; ++k)
                mse[p] += std::norm(hp[k] - h[k]);
        }
    }
    // statistical tolerance: successive ranks share the same trials, so the
    // difference is the energy of the dropped mode minus its noise cost
    for (std::size_t p = 1; p < n; ++p)
        CHECK(mse[p + 1] <= mse[p] * (1.0 + 1e-9) + 1e-9);
}

TEST_CASE("delta weights: formula, range, monotonicity")
{
    const std::size_t n = 16;
    const HermitianMatrix r = freq_correlation(ChannelModel::reference_profile(), n);
    const EigenDecomposition eig = eig_hermitian(r);
    const double snr = 5.0, beta = 17.0 / 9.0;
    const PrecomputedFilter lr = lowrank_precompute(eig, snr, beta, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double d = lr.delta()[k];
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        if (k > 0)
            CHECK(d <= lr.delta()[k - 1]);
        CHECK(std::abs(d * (eig.values[k] + beta / snr) - eig.values[k]) < 1e-12);
    }
}

TEST_CASE("apply_filter: full-rank identity limit at huge SNR")
{
    // every mode carries energy, so delta ~ 1 everywhere and any input
    // passes through
    RandomStream rs(SeededStream{31, 28});
    const HermitianMatrix r = oracles::random_psd(rs, 12, 0.1);
    const cvec h = oracles::random_cvec(rs, 12);
    const PrecomputedFilter w = lmmse_precompute(r, 1e12, 17.0 / 9.0);
    const PrecomputedFilter lr = lowrank_precompute(r, 1e12, 17.0 / 9.0, 12);
    CHECK(oracles::max_abs_diff(w.apply(h), h) < 1e-6);
    CHECK(oracles::max_abs_diff(lr.apply(h), h) < 1e-6);
}

TEST_CASE("apply_filter: limits and factored-vs-dense agreement")
{
    RandomStream rs(SeededStream{31, 19});
    const std::size_t n = 16;
    const HermitianMatrix r = freq_correlation(ChannelModel::reference_profile(), n);
    const cvec h = oracles::random_cvec(rs, n);

    // huge SNR: the filter passes the in-span part through; the reference
    // profile spans only 4 modes, so compare against the projected input
    const PrecomputedFilter hot = lowrank_precompute(r, 1e12, 1.0, n);
    const cvec h_span = [&] {
        const ChannelRealization real = draw_realization(ChannelModel::reference_profile(),
                                                         SeededStream{36, 0});
        return freq_response(real, n);
    }();
    CHECK(oracles::max_abs_diff(hot.apply(h_span), h_span) <
          1e-6 * oracles::l2(h_span));

    // zero-SNR limit: everything is shrunk away
    const PrecomputedFilter cold = lmmse_precompute(r, 1e-12, 1.0);
    CHECK(oracles::l2(cold.apply(h)) < 1e-9 * oracles::l2(h));

    // factored low-rank application equals the explicit matrix product
    const EigenDecomposition eig = eig_hermitian(r);
    const std::size_t p = 5;
    const PrecomputedFilter lr = lowrank_precompute(eig, 9.0, 17.0 / 9.0, p);
    std::vector<cplx> dense(n * n, cplx(0.0, 0.0));
    for (std::size_t m = 0; m < p; ++m)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dense[i * n + j] += lr.delta()[m] * eig.basis_at(i, m) *
                                    std::conj(eig.basis_at(j, m));
    CHECK(oracles::max_abs_diff(lr.apply(h), oracles::matvec(dense, h, n)) < 1e-10);

    CHECK_THROWS_AS(lr.apply(cvec(n + 1)), std::invalid_argument);
}

TEST_CASE("shrinkage: ||W h|| <= ||h|| for every PSD R_HH and finite SNR")
{
    RandomStream rs(SeededStream{31, 20});
    for (int t = 0; t < 25; ++t) {
        const std::size_t n = 4 + (t % 5);
        const HermitianMatrix r = oracles::random_psd(rs, n);
        const double snr = std::exp(double(t % 7));
        const PrecomputedFilter w = lmmse_precompute(r, snr, 17.0 / 9.0);
        const cvec h = oracles::random_cvec(rs, n);
        CHECK(oracles::l2(w.apply(h)) <= oracles::l2(h) * (1.0 + 1e-12));
    }
}

TEST_CASE("mmse: zero-noise collapse and the zero vector")
{
    RandomStream rs(SeededStream{31, 21});
    const std::size_t n = 16;
    // full-rank F R_gg F^H needs power on every delay
    std::vector<ChannelTap> taps(n);
    double tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        taps[i] = {i, std::exp(-double(i) / 6.0), 0.0};
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

    const cvec x = qam_pilots(n, 22);
    const cvec y = oracles::random_cvec(rs, n);
    CHECK(oracles::max_abs_diff(mmse_estimate(y, x, rgg, 0.0), ls_estimate(y, x)) < 1e-8);

    const cvec zero(n, cplx(0.0, 0.0));
    for (const cplx& v : mmse_estimate(zero, x, rgg, 0.1))
        CHECK(std::abs(v) == 0.0);
}

TEST_CASE("mmse matches the dense explicit-inverse oracle")
{
    RandomStream rs(SeededStream{31, 23});
    const std::size_t n = 16;
    const ChannelModel m = ChannelModel::reference_profile();
    const HermitianMatrix rgg = time_correlation(m, n);
    const cvec x = qam_pilots(n, 24);
    const double sigma2 = 0.1;
    const cvec y = oracles::random_cvec(rs, n);

    const cvec got = mmse_estimate(y, x, rgg, sigma2);

    // independent dense evaluation of the full formula
    const std::vector<cplx> f = fourier_matrix(n);
    std::vector<cplx> rgg_d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            rgg_d[i * n + j] = rgg(i, j);
    std::vector<cplx> fh(n * n), xh(n * n, cplx(0.0, 0.0)), xd(n * n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            fh[i * n + j] = std::conj(f[j * n + i]);
        xd[i * n + i] = x[i];
        xh[i * n + i] = std::conj(x[i]);
    }
    const std::vector<cplx> rhy = oracles::matmul(rgg_d, oracles::matmul(fh, xh, n), n);
    std::vector<cplx> ryy =
        oracles::matmul(xd, oracles::matmul(f, oracles::matmul(rgg_d, oracles::matmul(fh, xh, n), n), n), n);
    for (std::size_t i = 0; i < n; ++i)
        ryy[i * n + i] += sigma2;
    const std::vector<cplx> w = oracles::matmul(f, oracles::matmul(rhy, oracles::gj_inverse(ryy, n), n), n);
    const cvec want = oracles::matvec(w, y, n);
    CHECK(oracles::max_abs_diff(got, want) < 1e-9);
}

TEST_CASE("mmse signals an ill-conditioned R_YY")
{
    const std::size_t n = 8;
    const ChannelModel m({{0, 0.6, 0.0}, {3, 0.4, 0.0}}); // rank 2 < 8
    const HermitianMatrix rgg = time_correlation(m, n);
    const cvec x = qam_pilots(n, 25);
    const cvec y(n, cplx(1.0, 0.0));
    CHECK_THROWS_AS(mmse_estimate(y, x, rgg, 0.0), IllConditionedError);
}

TEST_CASE("mmse_matrix agrees with mmse_estimate")
{
    RandomStream rs(SeededStream{31, 26});
    const std::size_t n = 16;
    const ChannelModel m = ChannelModel::reference_profile();
    const HermitianMatrix rgg = time_correlation(m, n);
    const cvec x = qam_pilots(n, 27);
    std::vector<std::uint32_t> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = static_cast<std::uint32_t>(i);
    const std::vector<cplx> mm = mmse_matrix(x, rgg, 0.2, all);
    const cvec y = oracles::random_cvec(rs, n);
    CHECK(oracles::max_abs_diff(oracles::matvec(mm, y, n), mmse_estimate(y, x, rgg, 0.2)) < 1e-10);
}
