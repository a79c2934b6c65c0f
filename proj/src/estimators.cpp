// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/estimators.hpp"

#include "ofdmest/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ofdmest {

NoiseSpec NoiseSpec::from_snr_db(double snr_db)
{
    NoiseSpec n;
    n.snr_db = snr_db;
    if (std::isinf(snr_db)) {
        n.snr = std::numeric_limits<double>::infinity();
        n.sigma2 = 0.0;
    } else {
        n.snr = std::pow(10.0, snr_db / 10.0);
        n.sigma2 = 1.0 / n.snr; // unit constellation energy
    }
    return n;
}

cvec ls_estimate(const cvec& y, const cvec& x)
{
    if (y.size() != x.size())
        throw std::invalid_argument("ls_estimate: length mismatch");
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (std::abs(x[k]) < 1e-12)
            throw std::invalid_argument("ls_estimate: near-zero pilot at carrier " +
                                        std::to_string(k));
    }
    cvec out(y.size());
    kernels::cdiv(y.data(), x.data(), out.data(), y.size());
    return out;
}

cvec lmmse_full(const cvec& h_ls, const HermitianMatrix& r_hh, double sigma2, const cvec& x)
{
    const std::size_t n = r_hh.dim();
    if (h_ls.size() != n || x.size() != n)
        throw std::invalid_argument("lmmse_full: dimension mismatch");
    if (sigma2 < 0.0)
        throw std::invalid_argument("lmmse_full: negative noise variance");
    HermitianMatrix a = r_hh;
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double p = std::norm(x[k]);
        if (p < 1e-24)
            throw std::invalid_argument("lmmse_full: near-zero pilot at carrier " +
                                        std::to_string(k));
        d[k] = sigma2 / p;
        a.set(k, k, a(k, k).real() + d[k]);
    }
    // R (R + s D)^{-1} h = h - s D (R + s D)^{-1} h; this form keeps the
    // small-noise limit accurate when R is rank deficient
    const cvec z = solve_hermitian(a, h_ls);
    cvec out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = h_ls[k] - d[k] * z[k];
    return out;
}

PrecomputedFilter lmmse_precompute(const HermitianMatrix& r_hh, double snr, double beta)
{
    if (!(snr > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("lmmse_precompute: snr and beta must be positive");
    const std::size_t n = r_hh.dim();
    const double ridge = std::isinf(snr) ? 0.0 : beta / snr;

    PrecomputedFilter f;
    f.kind_ = FilterKind::lmmse_simplified;
    f.n_ = n;
    f.rank_ = n;
    f.snr_ = snr;
    f.beta_ = beta;
    f.ridge_ = ridge;
    if (ridge == 0.0) {
        // infinite-SNR limit: identity filter
        f.w_.assign(n * n, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            f.w_[i * n + i] = 1.0;
        return f;
    }
    // W = R (R + ridge I)^{-1} = I - ridge (R + ridge I)^{-1}; keep the
    // factorization for the apply path and materialize the dense form
    f.ridged_.emplace(r_hh.plus_scaled_identity(ridge));
    std::vector<cplx> identity(n * n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        identity[i * n + i] = 1.0;
    f.w_ = f.ridged_->solve_dense(identity, n);
    for (std::size_t i = 0; i < n * n; ++i)
        f.w_[i] = -ridge * f.w_[i];
    for (std::size_t i = 0; i < n; ++i)
        f.w_[i * n + i] += 1.0;
    return f;
}

PrecomputedFilter lowrank_precompute(const EigenDecomposition& eig, double snr, double beta,
                                     std::size_t rank)
{
    if (rank < 1 || rank > eig.dim)
        throw std::invalid_argument("lowrank_precompute: rank out of range");
    if (!(snr > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("lowrank_precompute: snr and beta must be positive");
    const std::size_t n = eig.dim;
    const double ridge = std::isinf(snr) ? 0.0 : beta / snr;

    PrecomputedFilter f;
    f.kind_ = FilterKind::lmmse_lowrank;
    f.n_ = n;
    f.rank_ = rank;
    f.snr_ = snr;
    f.beta_ = beta;
    f.delta_.resize(rank);
    f.modes_.resize(rank * n);
    for (std::size_t r = 0; r < rank; ++r) {
        const double lam = eig.values[r];
        f.delta_[r] = lam > 0.0 ? lam / (lam + ridge) : 0.0;
        for (std::size_t k = 0; k < n; ++k)
            f.modes_[r * n + k] = eig.basis_at(k, r);
    }
    return f;
}

PrecomputedFilter lowrank_precompute(const HermitianMatrix& r_hh, double snr, double beta,
                                     std::size_t rank)
{
    return lowrank_precompute(eig_hermitian(r_hh), snr, beta, rank);
}

cvec PrecomputedFilter::apply(const cvec& h_ls) const
{
    if (h_ls.size() != n_)
        throw std::invalid_argument("apply_filter: dimension mismatch");
    cvec out(n_, cplx(0.0, 0.0));
    if (kind_ == FilterKind::lmmse_simplified) {
        if (!ridged_)
            return h_ls; // identity limit
        const cvec z = ridged_->solve(h_ls);
        out = h_ls;
        kernels::caxpy(cplx(-ridge_, 0.0), z.data(), out.data(), n_);
        return out;
    }
    // factored form D_p (Delta_p (D_p^H h)): 2 p N multiplications
    for (std::size_t r = 0; r < rank_; ++r) {
        const cplx coeff = delta_[r] * kernels::dot_conj(modes_.data() + r * n_, h_ls.data(), n_);
        kernels::caxpy(coeff, modes_.data() + r * n_, out.data(), n_);
    }
    return out;
}

cvec apply_filter(const PrecomputedFilter& f, const cvec& h_ls)
{
    return f.apply(h_ls);
}

std::vector<cplx> fourier_matrix(std::size_t n)
{
    std::vector<cplx> f(n * n);
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(m) / nd;
            f[k * n + m] = cplx(std::cos(ang) / nd, std::sin(ang) / nd);
        }
    }
    return f;
}

namespace {

struct MmsePieces {
    HermitianMatrix a_mat;      // X T X^H + sigma2 I  (A x A)
    std::vector<cplx> g;        // T diag(conj(x))     (A x A); H_mmse = G A^{-1} Y
};

MmsePieces mmse_pieces(const cvec& x, const HermitianMatrix& r_gg, double sigma2,
                       std::span<const std::uint32_t> carriers)
{
    const std::size_t n = r_gg.dim();
    const std::size_t a = carriers.size();
    if (x.size() != a)
        throw std::invalid_argument("mmse: pilot/carrier count mismatch");
    if (sigma2 < 0.0)
        throw std::invalid_argument("mmse: negative noise variance");

    const double nd = static_cast<double>(n);
    // rows of F at the selected carriers
    std::vector<cplx> f_rows(a * n);
    for (std::size_t r = 0; r < a; ++r) {
        const double k = static_cast<double>(carriers[r]);
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * k * static_cast<double>(m) / nd;
            f_rows[r * n + m] = cplx(std::cos(ang) / nd, std::sin(ang) / nd);
        }
    }

    // C = R_gg F_S^H (N x A), then T = F_S C (A x A)
    std::vector<cplx> c(n * a, cplx(0.0, 0.0));
    for (std::size_t row = 0; row < n; ++row) {
        const cplx* rrow = r_gg.data() + row * n;
        for (std::size_t col = 0; col < a; ++col) {
            cplx acc(0.0, 0.0);
            for (std::size_t m = 0; m < n; ++m)
                acc += rrow[m] * std::conj(f_rows[col * n + m]);
            c[row * a + col] = acc;
        }
    }
    std::vector<cplx> t(a * a);
    for (std::size_t row = 0; row < a; ++row) {
        for (std::size_t col = 0; col < a; ++col) {
            cplx acc(0.0, 0.0);
            for (std::size_t m = 0; m < n; ++m)
                acc += f_rows[row * n + m] * c[m * a + col];
            t[row * a + col] = acc;
        }
    }

    std::vector<cplx> a_dense(a * a);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a; ++j)
            a_dense[i * a + j] = x[i] * t[i * a + j] * std::conj(x[j]);
    for (std::size_t i = 0; i < a; ++i)
        a_dense[i * a + i] += sigma2;

    MmsePieces p{HermitianMatrix::from_dense(a, a_dense, 1e-9), {}};
    p.g.resize(a * a);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a; ++j)
            p.g[i * a + j] = t[i * a + j] * std::conj(x[j]);
    return p;
}

} // namespace

cvec mmse_estimate(const cvec& y, const cvec& x, const HermitianMatrix& r_gg, double sigma2)
{
    const std::size_t n = r_gg.dim();
    if (y.size() != n || x.size() != n)
        throw std::invalid_argument("mmse_estimate: dimension mismatch");
    std::vector<std::uint32_t> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = static_cast<std::uint32_t>(i);
    const MmsePieces p = mmse_pieces(x, r_gg, sigma2, all);
    const cvec z = solve_hermitian(p.a_mat, y);
    cvec out(n);
    kernels::matvec(p.g.data(), n, n, z.data(), out.data());
    return out;
}

std::vector<cplx> mmse_matrix(const cvec& x, const HermitianMatrix& r_gg, double sigma2,
                              std::span<const std::uint32_t> carriers)
{
    const std::size_t a = carriers.size();
    const MmsePieces p = mmse_pieces(x, r_gg, sigma2, carriers);
    // M = G A^{-1}  =>  M^H = A^{-1} G^H
    std::vector<cplx> gh(a * a);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a; ++j)
            gh[i * a + j] = std::conj(p.g[j * a + i]);
    const std::vector<cplx> mh = HermitianCholesky(p.a_mat).solve_dense(gh, a);
    std::vector<cplx> m(a * a);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a; ++j)
            m[i * a + j] = std::conj(mh[j * a + i]);
    return m;
}

} // namespace ofdmest
