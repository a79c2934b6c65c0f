// SPDX-License-Identifier: Apache-2.0
//
// Complex-vector and small dense Hermitian kernels: DFT/IDFT in the
// asymmetric 1/N-on-DFT convention, Jacobi eigendecomposition, Cholesky
// solves, and counter-based seeded random streams.
#pragma once

#include "ofdmest/common.hpp"

#include <cstdint>
#include <span>

namespace ofdmest {

// Y(k) = (1/N) * sum_n x(n) e^{-j2pi kn/N}. Throws on empty input.
cvec dft(const cvec& x);

// x(n) = sum_k X(k) e^{+j2pi kn/N}; inverse of dft under this convention
// (Parseval picks up a factor N: sum|x|^2 = N * sum|X|^2).
cvec idft(const cvec& x);

// N x N complex matrix, Hermitian by construction. Mutation goes through
// set(), which mirrors the conjugate entry.
class HermitianMatrix {
public:
    explicit HermitianMatrix(std::size_t n);
    static HermitianMatrix identity(std::size_t n);
    // Validates |a(i,j) - conj(a(j,i))| <= tol (absolute) and stores the
    // Hermitian part. Throws std::invalid_argument beyond tolerance.
    static HermitianMatrix from_dense(std::size_t n, const std::vector<cplx>& row_major,
                                      double tol = 1e-12);

    std::size_t dim() const noexcept { return n_; }
    cplx operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, cplx v);
    const cplx* data() const noexcept { return a_.data(); }
    const std::vector<cplx>& dense() const noexcept { return a_; }

    double frobenius_norm() const;
    HermitianMatrix plus_scaled_identity(double ridge) const;
    HermitianMatrix submatrix(std::span<const std::uint32_t> indices) const;
    void scale(double s);

private:
    std::size_t n_;
    std::vector<cplx> a_; // row-major
};

// basis is row-major N x N with eigenvectors in columns; values are sorted
// nonincreasing and clamped to zero when within rounding of it.
struct EigenDecomposition {
    std::size_t dim = 0;
    std::vector<double> values;
    std::vector<cplx> basis;

    cplx basis_at(std::size_t row, std::size_t col) const { return basis[row * dim + col]; }
    cvec column(std::size_t col) const;
};

// Cyclic Jacobi sweeps with off-diagonal tolerance 1e-12 * frobenius norm.
// Deterministic for identical input.
EigenDecomposition eig_hermitian(const HermitianMatrix& a);

// Cholesky factorization of a positive definite Hermitian matrix. Throws
// IllConditionedError when a pivot collapses (singular or near-singular A).
class HermitianCholesky {
public:
    explicit HermitianCholesky(const HermitianMatrix& a);
    std::size_t dim() const noexcept { return n_; }
    cvec solve(const cvec& b) const;
    // Solves A X = B for row-major B with `cols` columns; returns row-major X.
    std::vector<cplx> solve_dense(const std::vector<cplx>& b, std::size_t cols) const;

private:
    std::size_t n_;
    std::vector<cplx> l_; // lower triangle, row-major
};

cvec solve_hermitian(const HermitianMatrix& a, const cvec& b);

// Counter-based stream id: identical (seed, stream) gives identical samples
// on any thread count. derive() forks a decorrelated substream.
struct SeededStream {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    SeededStream derive(std::uint64_t tag) const;
};

class RandomStream {
public:
    explicit RandomStream(SeededStream s);

    std::uint64_t next_u64();
    // uniform on (0, 1]
    double next_unit();
    // circularly symmetric complex Gaussian, E|z|^2 = variance
    cplx next_cgauss(double variance);
    // uniform index in [0, bound), bound a power of two
    std::uint32_t next_index_pow2(std::uint32_t bound);
    bool next_bit();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// n i.i.d. samples with E|z|^2 = variance. Throws on negative variance.
cvec gaussian_pair_stream(SeededStream s, std::size_t n, double variance);

} // namespace ofdmest
