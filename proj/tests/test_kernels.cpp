// SPDX-License-Identifier: Apache-2.0
//
// Backend equivalence (scalar vs AVX2) for every SIMD kernel, plus the
// direct-summation oracle for the transform.
#include "ofdmest/kernels.hpp"
#include "ofdmest/numerics.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace ofdmest;
namespace k = ofdmest::kernels;

namespace {

// restores the entry backend when a test leaves scope
struct BackendGuard {
    k::Backend saved = k::active_backend();
    ~BackendGuard() { k::force_backend(saved); }
};

cvec rand_vec(std::uint64_t stream, std::size_t n)
{
    RandomStream rs(SeededStream{42, stream});
    return oracles::random_cvec(rs, n);
}

} // namespace

TEST_CASE("fourier matches the direct-summation oracle on both paths")
{
    for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 8u, 12u, 16u, 64u}) {
        const cvec x = rand_vec(n, n);
        cvec out(n);
        k::fourier(x.data(), out.data(), n, -1, 1.0 / double(n));
        const cvec ref = oracles::direct_fourier(x, -1, 1.0 / double(n));
        CAPTURE(n);
        CHECK(oracles::max_abs_diff(out, ref) < 1e-12);

        k::fourier(x.data(), out.data(), n, +1, 1.0);
        const cvec ref2 = oracles::direct_fourier(x, +1, 1.0);
        CHECK(oracles::max_abs_diff(out, ref2) < 1e-11);
    }
}

TEST_CASE("fourier works in place")
{
    cvec x = rand_vec(5, 16);
    cvec copy = x;
    cvec out(16);
    k::fourier(copy.data(), copy.data(), 16, -1, 1.0 / 16.0);
    k::fourier(x.data(), out.data(), 16, -1, 1.0 / 16.0);
    CHECK(oracles::max_abs_diff(copy, out) == 0.0);
}

TEST_CASE("fourier rejects empty input")
{
    cvec x;
    cvec out;
    CHECK_THROWS_AS(k::fourier(x.data(), out.data(), 0, -1, 1.0), std::invalid_argument);
}

TEST_CASE("scalar and avx2 backends agree" * doctest::skip(!k::backend_available(k::Backend::avx2)))
{
    BackendGuard guard;
    const std::size_t n = 257; // odd length exercises the vector tails

    const cvec a = rand_vec(7, n);
    const cvec b = rand_vec(8, n);

    k::force_backend(k::Backend::scalar);
    cvec mul_s(n), div_s(n), axpy_s = b, mv_s(33);
    k::cmul(a.data(), b.data(), mul_s.data(), n);
    k::cdiv(a.data(), b.data(), div_s.data(), n);
    k::caxpy(cplx(0.3, -1.2), a.data(), axpy_s.data(), n);
    const double sum_s = k::sum_abs2(a.data(), n);
    const cplx dot_s = k::dot_conj(a.data(), b.data(), n);
    const cvec mat = rand_vec(9, 33 * n);
    k::matvec(mat.data(), 33, n, a.data(), mv_s.data());
    cvec fft_s(256);
    k::fourier(a.data(), fft_s.data(), 256, -1, 1.0 / 256.0);

    k::force_backend(k::Backend::avx2);
    cvec mul_v(n), div_v(n), axpy_v = b, mv_v(33);
    k::cmul(a.data(), b.data(), mul_v.data(), n);
    k::cdiv(a.data(), b.data(), div_v.data(), n);
    k::caxpy(cplx(0.3, -1.2), a.data(), axpy_v.data(), n);
    const double sum_v = k::sum_abs2(a.data(), n);
    const cplx dot_v = k::dot_conj(a.data(), b.data(), n);
    k::matvec(mat.data(), 33, n, a.data(), mv_v.data());
    cvec fft_v(256);
    k::fourier(a.data(), fft_v.data(), 256, -1, 1.0 / 256.0);

    // elementwise kernels share the exact arithmetic, so they match bitwise;
    // reductions only differ in summation order
    CHECK(oracles::max_abs_diff(mul_s, mul_v) == 0.0);
    CHECK(oracles::max_abs_diff(div_s, div_v) == 0.0);
    CHECK(oracles::max_abs_diff(axpy_s, axpy_v) == 0.0);
    CHECK(oracles::max_abs_diff(fft_s, fft_v) == 0.0);
    CHECK(sum_s == doctest::Approx(sum_v).epsilon(1e-12));
    CHECK(std::abs(dot_s - dot_v) < 1e-10 * std::abs(dot_s) + 1e-12);
    CHECK(oracles::max_abs_diff(mv_s, mv_v) < 1e-10);
}

TEST_CASE("forcing an unavailable backend throws")
{
    if (k::backend_available(k::Backend::avx2))
        return; // nothing unavailable to probe on this host
    CHECK_THROWS_AS(k::force_backend(k::Backend::avx2), std::runtime_error);
}

TEST_CASE("matvec against a hand-rolled triple loop")
{
    const std::size_t rows = 5, cols = 9;
    const cvec a = rand_vec(11, rows * cols);
    const cvec x = rand_vec(12, cols);
    cvec y(rows);
    k::matvec(a.data(), rows, cols, x.data(), y.data());
    cvec want(rows, cplx(0.0, 0.0));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            want[r] += a[r * cols + c] * x[c];
    CHECK(oracles::max_abs_diff(y, want) < 1e-12);
}
