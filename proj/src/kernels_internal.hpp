// SPDX-License-Identifier: Apache-2.0
//
// Internal kernel plumbing shared by the scalar and AVX2 translation units.
#pragma once

#include "ofdmest/kernels.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace ofdmest::kernels::detail {

// Precomputed tables for one transform length. `unit[k] = e^{+j*2*pi*k/n}`
// backs the direct path; `stages[s]` holds the twiddles e^{+j*2*pi*j/2^(s+1)}
// for the radix-2 stage with half-size 2^s (copied out of `unit` so both
// backends see bit-identical values). `bitrev` is empty for non-pow2 n.
struct FourierTables {
    std::size_t n = 0;
    std::vector<cplx> unit;
    std::vector<std::vector<cplx>> stages;
    std::vector<std::uint32_t> bitrev;
};

std::shared_ptr<const FourierTables> fourier_tables(std::size_t n);

// In-place radix-2 passes over bit-reversed data.
using FftPow2Fn = void (*)(cplx* a, std::size_t n, const FourierTables& t, int sign);

struct KernelOps {
    void (*cmul)(const cplx*, const cplx*, cplx*, std::size_t);
    void (*cdiv)(const cplx*, const cplx*, cplx*, std::size_t);
    void (*caxpy)(cplx, const cplx*, cplx*, std::size_t);
    double (*sum_abs2)(const cplx*, std::size_t);
    cplx (*dot_conj)(const cplx*, const cplx*, std::size_t);
    void (*matvec)(const cplx*, std::size_t, std::size_t, const cplx*, cplx*);
    FftPow2Fn fft_pow2;
};

const KernelOps& scalar_ops();
const KernelOps* avx2_ops(); // nullptr when the TU was built without AVX2
bool cpu_has_avx2();

} // namespace ofdmest::kernels::detail
