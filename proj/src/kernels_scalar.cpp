// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels. These spell out the real/imag arithmetic
// explicitly so the AVX2 variants can match them operation for operation.
#include "kernels_internal.hpp"

namespace ofdmest::kernels::detail {

namespace {

void cmul_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

void cdiv_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        const double d = br * br + bi * bi;
        out[i] = cplx((ar * br + ai * bi) / d, (ai * br - ar * bi) / d);
    }
}

void caxpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n)
{
    const double cr = alpha.real(), ci = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cplx(y[i].real() + (cr * xr - ci * xi), y[i].imag() + (cr * xi + ci * xr));
    }
}

double sum_abs2_scalar(const cplx* a, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return acc;
}

cplx dot_conj_scalar(const cplx* a, const cplx* b, std::size_t n)
{
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

void matvec_scalar(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* out)
{
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = a + r * cols;
        double re = 0.0, im = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double ar = row[c].real(), ai = row[c].imag();
            const double xr = x[c].real(), xi = x[c].imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        out[r] = {re, im};
    }
}

void fft_pow2_scalar(cplx* a, std::size_t n, const FourierTables& t, int sign)
{
    std::size_t stage = 0;
    for (std::size_t half = 1; half < n; half <<= 1, ++stage) {
        const cplx* tw = t.stages[stage].data();
        for (std::size_t base = 0; base < n; base += 2 * half) {
            for (std::size_t j = 0; j < half; ++j) {
                const double wr = tw[j].real();
                const double wi = sign < 0 ? -tw[j].imag() : tw[j].imag();
                cplx& pa = a[base + j];
                cplx& pb = a[base + j + half];
                const double br = pb.real(), bi = pb.imag();
                const double tr = wr * br - wi * bi;
                const double ti = wr * bi + wi * br;
                const double ar = pa.real(), ai = pa.imag();
                pa = cplx(ar + tr, ai + ti);
                pb = cplx(ar - tr, ai - ti);
            }
        }
    }
}

} // namespace

const KernelOps& scalar_ops()
{
    static const KernelOps ops = {
        cmul_scalar, cdiv_scalar, caxpy_scalar,
        sum_abs2_scalar, dot_conj_scalar, matvec_scalar,
        fft_pow2_scalar,
    };
    return ops;
}

} // namespace ofdmest::kernels::detail
