// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernels. Each complex<double> pair lives in one __m256d as
// [re0, im0, re1, im1]. Multiplications use explicit mul/add intrinsics (no
// FMA) so the per-element arithmetic matches the scalar reference exactly;
// reductions differ only in summation order. This TU is compiled with -mavx2
// and is only entered after a runtime cpuid check.
#include "kernels_internal.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace ofdmest::kernels::detail {

namespace {

// [a0*b0, a1*b1] complex products, matching the scalar formula
// (ar*br - ai*bi, ar*bi + ai*br).
inline __m256d cmul2(__m256d a, __m256d b)
{
    const __m256d br = _mm256_movedup_pd(b);
    const __m256d bi = _mm256_permute_pd(b, 0xF);
    const __m256d asw = _mm256_permute_pd(a, 0x5);
    return _mm256_addsub_pd(_mm256_mul_pd(br, a), _mm256_mul_pd(bi, asw));
}

inline __m256d negate(__m256d v)
{
    return _mm256_xor_pd(v, _mm256_set1_pd(-0.0));
}

void cmul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
        const __m256d vb = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
        _mm256_storeu_pd(reinterpret_cast<double*>(out + i), cmul2(va, vb));
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

void cdiv_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
        const __m256d vb = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
        const __m256d ard = _mm256_movedup_pd(va);
        const __m256d aid = _mm256_permute_pd(va, 0xF);
        const __m256d bsw = _mm256_permute_pd(vb, 0x5);
        const __m256d x = _mm256_mul_pd(ard, vb);  // [ar*br, ar*bi]
        const __m256d y = _mm256_mul_pd(aid, bsw); // [ai*bi, ai*br]
        // [x0 + y0, y1 - x1] = [ar*br + ai*bi, ai*br - ar*bi]
        const __m256d num = _mm256_addsub_pd(y, negate(x));
        const __m256d sq = _mm256_mul_pd(vb, vb);
        const __m256d den = _mm256_add_pd(sq, _mm256_permute_pd(sq, 0x5));
        _mm256_storeu_pd(reinterpret_cast<double*>(out + i), _mm256_div_pd(num, den));
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        const double d = br * br + bi * bi;
        out[i] = cplx((ar * br + ai * bi) / d, (ai * br - ar * bi) / d);
    }
}

void caxpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n)
{
    const double cr = alpha.real(), ci = alpha.imag();
    const __m256d va = _mm256_set_pd(ci, cr, ci, cr);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
        const __m256d vy = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
        _mm256_storeu_pd(reinterpret_cast<double*>(y + i), _mm256_add_pd(vy, cmul2(vx, va)));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cplx(y[i].real() + (cr * xr - ci * xi), y[i].imag() + (cr * xi + ci * xr));
    }
}

inline double reduce4(__m256d v)
{
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline cplx reduce2c(__m256d v)
{
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    return cplx(lanes[0] + lanes[2], lanes[1] + lanes[3]);
}

double sum_abs2_avx2(const cplx* a, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double total = reduce4(acc);
    for (; i < n; ++i)
        total += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
    return total;
}

cplx dot_conj_avx2(const cplx* a, const cplx* b, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
        const __m256d vb = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
        const __m256d ard = _mm256_movedup_pd(va);
        const __m256d aid = _mm256_permute_pd(va, 0xF);
        const __m256d bsw = _mm256_permute_pd(vb, 0x5);
        const __m256d x = _mm256_mul_pd(ard, vb);  // [ar*br, ar*bi]
        const __m256d y = _mm256_mul_pd(aid, bsw); // [ai*bi, ai*br]
        // [x0 + y0, x1 - y1] = [ar*br + ai*bi, ar*bi - ai*br]
        acc = _mm256_add_pd(acc, _mm256_addsub_pd(x, negate(y)));
    }
    cplx total = reduce2c(acc);
    double re = total.real(), im = total.imag();
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

void matvec_avx2(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* out)
{
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = a + r * cols;
        __m256d acc = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 2 <= cols; c += 2) {
            const __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(row + c));
            const __m256d vx = _mm256_loadu_pd(reinterpret_cast<const double*>(x + c));
            acc = _mm256_add_pd(acc, cmul2(va, vx));
        }
        cplx total = reduce2c(acc);
        double re = total.real(), im = total.imag();
        for (; c < cols; ++c) {
            const double ar = row[c].real(), ai = row[c].imag();
            const double xr = x[c].real(), xi = x[c].imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        out[r] = {re, im};
    }
}

void fft_pow2_avx2(cplx* a, std::size_t n, const FourierTables& t, int sign)
{
    // half == 1: twiddle is exactly 1, plain add/sub butterflies.
    for (std::size_t base = 0; base + 2 <= n; base += 2) {
        const cplx u = a[base], v = a[base + 1];
        a[base] = cplx(u.real() + v.real(), u.imag() + v.imag());
        a[base + 1] = cplx(u.real() - v.real(), u.imag() - v.imag());
    }
    const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    std::size_t stage = 1;
    for (std::size_t half = 2; half < n; half <<= 1, ++stage) {
        const cplx* tw = t.stages[stage].data();
        for (std::size_t base = 0; base < n; base += 2 * half) {
            for (std::size_t j = 0; j + 2 <= half; j += 2) {
                __m256d w = _mm256_loadu_pd(reinterpret_cast<const double*>(tw + j));
                if (sign < 0)
                    w = _mm256_xor_pd(w, conj_mask);
                cplx* pa = a + base + j;
                cplx* pb = pa + half;
                const __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(pa));
                const __m256d vb = _mm256_loadu_pd(reinterpret_cast<const double*>(pb));
                const __m256d vt = cmul2(vb, w);
                _mm256_storeu_pd(reinterpret_cast<double*>(pa), _mm256_add_pd(va, vt));
                _mm256_storeu_pd(reinterpret_cast<double*>(pb), _mm256_sub_pd(va, vt));
            }
        }
    }
}

} // namespace

const KernelOps* avx2_ops()
{
    static const KernelOps ops = {
        cmul_avx2, cdiv_avx2, caxpy_avx2,
        sum_abs2_avx2, dot_conj_avx2, matvec_avx2,
        fft_pow2_avx2,
    };
    return &ops;
}

} // namespace ofdmest::kernels::detail

#else // !__AVX2__

namespace ofdmest::kernels::detail {

const KernelOps* avx2_ops() { return nullptr; }

} // namespace ofdmest::kernels::detail

#endif
