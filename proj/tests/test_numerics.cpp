// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/numerics.hpp"

#include "ofdmest/kernels.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ofdmest;

TEST_CASE("dft: impulse spreads flat with the 1/N factor")
{
    const cvec x = {1.0, 0.0, 0.0, 0.0};
    const cvec y = dft(x);
    for (const cplx& v : y)
        CHECK(std::abs(v - cplx(0.25, 0.0)) < 1e-15);
}

TEST_CASE("dft: constant collapses to the DC bin")
{
    const cvec x = {1.0, 1.0, 1.0, 1.0};
    const cvec y = dft(x);
    CHECK(std::abs(y[0] - cplx(1.0, 0.0)) < 1e-15);
    for (std::size_t k = 1; k < 4; ++k)
        CHECK(std::abs(y[k]) < 1e-15);
}

TEST_CASE("idft: DC bin and Nyquist bin")
{
    CHECK(oracles::max_abs_diff(idft({1.0, 0.0, 0.0, 0.0}), {1.0, 1.0, 1.0, 1.0}) < 1e-15);
    CHECK(oracles::max_abs_diff(idft({0.0, 1.0}), {1.0, -1.0}) < 1e-15);
}

TEST_CASE("dft/idft: round trip and direct-summation oracle")
{
    RandomStream rs(SeededStream{11, 1});
    const cvec x8 = oracles::random_cvec(rs, 8);
    CHECK(oracles::max_abs_diff(idft(dft(x8)), x8) < 1e-12);

    const cvec x16 = oracles::random_cvec(rs, 16);
    CHECK(oracles::max_abs_diff(idft(x16), oracles::direct_fourier(x16, +1, 1.0)) < 1e-12);
}

TEST_CASE("parseval carries the N factor under this convention")
{
    RandomStream rs(SeededStream{11, 2});
    for (std::size_t n : {5u, 16u, 33u, 128u}) {
        const cvec x = oracles::random_cvec(rs, n);
        const cvec y = dft(x);
        const double lhs = kernels::sum_abs2(x.data(), n);
        const double rhs = double(n) * kernels::sum_abs2(y.data(), n);
        CHECK(std::abs(lhs - rhs) < 1e-10 * lhs);
    }
}

TEST_CASE("dft/idft reject empty input")
{
    CHECK_THROWS_AS(dft({}), std::invalid_argument);
    CHECK_THROWS_AS(idft({}), std::invalid_argument);
}

TEST_CASE("eig: identity and rank-one all-ones")
{
    const EigenDecomposition id = eig_hermitian(HermitianMatrix::identity(4));
    for (double v : id.values)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    HermitianMatrix ones(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j)
            ones.set(i, j, 1.0);
    const EigenDecomposition e = eig_hermitian(ones);
    CHECK(e.values[0] == doctest::Approx(4.0).epsilon(1e-12));
    for (std::size_t i = 1; i < 4; ++i)
        CHECK(std::abs(e.values[i]) < 1e-10);
    // dominant eigenvector is (1/2)[1,1,1,1] up to a unit phase
    const cvec d0 = e.column(0);
    cplx overlap(0.0, 0.0);
    for (const cplx& v : d0)
        overlap += 0.5 * std::conj(v);
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("eig: reconstruction, unitarity and ordering on random PSD")
{
    RandomStream rs(SeededStream{11, 3});
    const HermitianMatrix a = oracles::random_psd(rs, 8);
    const EigenDecomposition e = eig_hermitian(a);

    for (std::size_t i = 1; i < 8; ++i)
        CHECK(e.values[i - 1] >= e.values[i]);
    for (double v : e.values)
        CHECK(v >= 0.0);

    // basis^H basis = I
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t m = 0; m < 8; ++m)
                acc += std::conj(e.basis_at(m, i)) * e.basis_at(m, j);
            CHECK(std::abs(acc - (i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0))) < 1e-10);
        }
    }
    // basis diag(values) basis^H = A
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            cplx acc(0.0, 0.0);
            for (std::size_t m = 0; m < 8; ++m)
                acc += e.basis_at(i, m) * e.values[m] * std::conj(e.basis_at(j, m));
            CHECK(std::abs(acc - a(i, j)) < 1e-9);
        }
    }
}

TEST_CASE("eig is deterministic for identical input")
{
    RandomStream rs(SeededStream{11, 4});
    const HermitianMatrix a = oracles::random_psd(rs, 6);
    const EigenDecomposition e1 = eig_hermitian(a);
    const EigenDecomposition e2 = eig_hermitian(a);
    CHECK(e1.values == e2.values);
    CHECK(e1.basis == e2.basis);
}

TEST_CASE("from_dense rejects non-Hermitian input beyond tolerance")
{
    std::vector<cplx> bad = {cplx(1.0, 0.0), cplx(0.5, 0.0), cplx(0.7, 0.0), cplx(1.0, 0.0)};
    CHECK_THROWS_AS(HermitianMatrix::from_dense(2, bad), std::invalid_argument);
}

TEST_CASE("solve: identity, scaled identity, residual oracle")
{
    RandomStream rs(SeededStream{11, 5});

    const cvec b = oracles::random_cvec(rs, 4);
    CHECK(oracles::max_abs_diff(solve_hermitian(HermitianMatrix::identity(4), b), b) < 1e-14);

    HermitianMatrix two = HermitianMatrix::identity(2);
    two.scale(2.0);
    const cvec x = solve_hermitian(two, {4.0, 6.0});
    CHECK(std::abs(x[0] - cplx(2.0, 0.0)) < 1e-14);
    CHECK(std::abs(x[1] - cplx(3.0, 0.0)) < 1e-14);

    const HermitianMatrix a = oracles::random_psd(rs, 8, 0.5);
    const cvec rhs = oracles::random_cvec(rs, 8);
    const cvec sol = solve_hermitian(a, rhs);
    cvec ax(8);
    kernels::matvec(a.data(), 8, 8, sol.data(), ax.data());
    double rnorm = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        rnorm += std::norm(ax[i] - rhs[i]);
        bnorm += std::norm(rhs[i]);
    }
    CHECK(std::sqrt(rnorm) < 1e-9 * std::sqrt(bnorm));
}

TEST_CASE("solve signals ill-conditioned input distinctly")
{
    // rank-1 matrix: outer product of a single vector
    RandomStream rs(SeededStream{11, 6});
    const cvec g = oracles::random_cvec(rs, 4);
    std::vector<cplx> dense(16);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            dense[i * 4 + j] = g[i] * std::conj(g[j]);
    const HermitianMatrix a = HermitianMatrix::from_dense(4, dense, 1e-9);
    CHECK_THROWS_AS(solve_hermitian(a, {1.0, 0.0, 0.0, 0.0}), IllConditionedError);
}

TEST_CASE("gaussian stream: zeros, determinism, moments")
{
    const cvec z0 = gaussian_pair_stream(SeededStream{3, 9}, 16, 0.0);
    for (const cplx& v : z0)
        CHECK(v == cplx(0.0, 0.0));

    CHECK(gaussian_pair_stream(SeededStream{3, 9}, 64, 1.5) ==
          gaussian_pair_stream(SeededStream{3, 9}, 64, 1.5));

    CHECK_THROWS_AS(gaussian_pair_stream(SeededStream{3, 9}, 4, -1.0), std::invalid_argument);

    const std::size_t n = 1000000;
    const cvec z = gaussian_pair_stream(SeededStream{3, 10}, n, 2.0);
    double mean_sq = 0.0, mean_re = 0.0, mean_im = 0.0;
    for (const cplx& v : z) {
        mean_sq += std::norm(v);
        mean_re += v.real();
        mean_im += v.imag();
    }
    mean_sq /= double(n);
    CHECK(std::abs(mean_sq - 2.0) < 0.02);               // within 1%
    CHECK(std::abs(mean_re / double(n)) < 0.01);
    CHECK(std::abs(mean_im / double(n)) < 0.01);
}

TEST_CASE("distinct stream ids decorrelate")
{
    const std::size_t n = 1000000;
    const cvec a = gaussian_pair_stream(SeededStream{5, 100}, n, 1.0);
    const cvec b = gaussian_pair_stream(SeededStream{5, 101}, n, 1.0);
    cplx cross(0.0, 0.0);
    double pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cross += a[i] * std::conj(b[i]);
        pa += std::norm(a[i]);
        pb += std::norm(b[i]);
    }
    const double rho = std::abs(cross) / std::sqrt(pa * pb);
    CHECK(rho < 0.01);
}

TEST_CASE("derive forks reproducible substreams")
{
    const SeededStream s{77, 5};
    CHECK(s.derive(1).stream == s.derive(1).stream);
    CHECK(s.derive(1).stream != s.derive(2).stream);
    CHECK(s.derive(1).seed == s.seed);
}
