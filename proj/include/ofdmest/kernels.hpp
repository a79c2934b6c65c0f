// SPDX-License-Identifier: Apache-2.0
//
// SIMD kernel core: scalar reference implementations plus AVX2 variants
// selected at runtime. Every vector entry point below has a scalar and (on
// x86-64) an AVX2 implementation; the two are equivalence-tested against each
// other. Backend selection order: OFDMEST_SIMD env var (scalar|avx2|auto),
// then CPU detection.
#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace ofdmest::kernels {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
// Overrides the selection; throws std::runtime_error if unavailable.
// Not meant to be called concurrently with kernel use.
void force_backend(Backend b);
std::string_view backend_name(Backend b);

// Elementwise complex product / quotient; out may alias a or b.
// cdiv uses the plain (a*conj(b))/|b|^2 formula, no over/underflow guards;
// operands are O(1) baseband quantities.
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n);
void cdiv(const cplx* a, const cplx* b, cplx* out, std::size_t n);

// y += alpha * x
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);

// sum of |a_i|^2
double sum_abs2(const cplx* a, std::size_t n);

// sum of conj(a_i) * b_i
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n);

// out = A * x with A row-major rows x cols; out must not alias A or x.
void matvec(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* out);

// out[k] = scale * sum_n in[n] * e^{sign * j*2*pi*k*n/N}.
// Radix-2 FFT for power-of-two N (scalar and AVX2 butterfly paths), direct
// O(N^2) table-driven summation otherwise (scalar only). in == out allowed.
void fourier(const cplx* in, cplx* out, std::size_t n, int sign, double scale);

} // namespace ofdmest::kernels
