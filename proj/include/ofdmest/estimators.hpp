// SPDX-License-Identifier: Apache-2.0
//
// The four pilot-based channel estimators: per-carrier LS, full LMMSE with
// the exact (XX^H)^{-1} term, the data-averaged simplified LMMSE with the
// beta/SNR regularizer, its optimal rank-p truncation, and the time-domain
// MMSE estimator built on the DFT matrix F.
#pragma once

#include "ofdmest/common.hpp"
#include "ofdmest/numerics.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace ofdmest {

struct NoiseSpec {
    double sigma2 = 0.0; // frequency-domain per-carrier noise variance
    double snr = 1.0;    // linear, = E|x_k|^2 / sigma_n^2
    double snr_db = 0.0;

    static NoiseSpec from_snr_db(double snr_db);
};

// H_ls(k) = Y(k)/X(k). Throws when a pilot magnitude is below 1e-12.
cvec ls_estimate(const cvec& y, const cvec& x);

// h = R_HH (R_HH + sigma_n^2 (XX^H)^{-1})^{-1} h_ls with (XX^H)^{-1} =
// diag(1/|X(k)|^2). Realized as a Hermitian solve.
cvec lmmse_full(const cvec& h_ls, const HermitianMatrix& r_hh, double sigma2, const cvec& x);

enum class FilterKind { lmmse_simplified, lmmse_lowrank };

// A reusable smoothing filter: the simplified W = R_HH (R_HH + (beta/SNR)
// I)^{-1}, which is independent of the transmitted data, or the rank-p
// factors (basis columns, weights delta_k = lambda_k / (lambda_k +
// beta/SNR)). The simplified kind holds the Cholesky factor of the ridged
// matrix; apply() evaluates W h = h - (beta/SNR) (R + (beta/SNR) I)^{-1} h,
// which stays accurate even when the ridge is far below the spectrum (huge
// SNR). matrix() exposes the materialized dense W.
class PrecomputedFilter {
public:
    FilterKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return n_; }
    std::size_t rank() const noexcept { return rank_; }
    double snr() const noexcept { return snr_; }
    double beta() const noexcept { return beta_; }
    const std::vector<double>& delta() const noexcept { return delta_; }
    const std::vector<cplx>& matrix() const noexcept { return w_; } // simplified only

    cvec apply(const cvec& h_ls) const;

private:
    friend PrecomputedFilter lmmse_precompute(const HermitianMatrix&, double, double);
    friend PrecomputedFilter lowrank_precompute(const EigenDecomposition&, double, double,
                                                std::size_t);
    PrecomputedFilter() = default;

    FilterKind kind_ = FilterKind::lmmse_simplified;
    std::size_t n_ = 0;
    std::size_t rank_ = 0;
    double snr_ = 0.0;
    double beta_ = 0.0;
    double ridge_ = 0.0;
    std::optional<HermitianCholesky> ridged_; // factor of R + ridge I (simplified)
    std::vector<cplx> w_;     // dense N x N (simplified, materialized)
    std::vector<cplx> modes_; // rank x N, row r = r-th eigenvector (lowrank)
    std::vector<double> delta_;
};

PrecomputedFilter lmmse_precompute(const HermitianMatrix& r_hh, double snr, double beta);

// Rank-p truncation from an eigendecomposition of R_HH (reusable across SNR
// points). Throws if rank is outside [1, N].
PrecomputedFilter lowrank_precompute(const EigenDecomposition& eig, double snr, double beta,
                                     std::size_t rank);
PrecomputedFilter lowrank_precompute(const HermitianMatrix& r_hh, double snr, double beta,
                                     std::size_t rank);

cvec apply_filter(const PrecomputedFilter& f, const cvec& h_ls);

// H_mmse = F R_hY R_YY^{-1} Y with R_hY = R_gg F^H X^H and
// R_YY = X F R_gg F^H X^H + sigma2 I; F has entries (1/N) e^{-j2pi nk/N}.
// Computed via a Hermitian solve, no explicit inverse.
cvec mmse_estimate(const cvec& y, const cvec& x, const HermitianMatrix& r_gg, double sigma2);

// Row-major F with entries (1/N) e^{-j2pi nk/N};
// shared with the simkit MMSE context and the test oracles.
std::vector<cplx> fourier_matrix(std::size_t n);

// Generalized MMSE smoother for a carrier subset: returns the dense matrix M
// such that H_mmse = M * Y on the selected carriers.
std::vector<cplx> mmse_matrix(const cvec& x, const HermitianMatrix& r_gg, double sigma2,
                              std::span<const std::uint32_t> carriers);

} // namespace ofdmest
