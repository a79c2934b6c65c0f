// SPDX-License-Identifier: Apache-2.0
//
// Backend selection and the shared fourier driver (tables, bit reversal,
// scaling, non-pow2 direct path).
#include "kernels_internal.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace ofdmest::kernels {

namespace detail {

bool cpu_has_avx2()
{
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::shared_ptr<const FourierTables> build_tables(std::size_t n)
{
    auto t = std::make_shared<FourierTables>();
    t->n = n;
    t->unit.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        t->unit[k] = cplx(std::cos(ang), std::sin(ang));
    }
    if (is_pow2(n)) {
        t->bitrev.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n)
            ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                r |= ((i >> b) & 1u) << (bits - 1 - b);
            t->bitrev[i] = static_cast<std::uint32_t>(r);
        }
        // Stage twiddles are copies of unit-table entries so both backends
        // consume bit-identical values.
        for (std::size_t half = 1; half < n; half <<= 1) {
            const std::size_t step = n / (2 * half);
            std::vector<cplx> tw(half);
            for (std::size_t j = 0; j < half; ++j)
                tw[j] = t->unit[j * step];
            t->stages.push_back(std::move(tw));
        }
    }
    return t;
}

} // namespace

std::shared_ptr<const FourierTables> fourier_tables(std::size_t n)
{
    static std::mutex mtx;
    static std::unordered_map<std::size_t, std::shared_ptr<const FourierTables>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    auto t = build_tables(n);
    cache.emplace(n, t);
    return t;
}

} // namespace detail

namespace {

using detail::KernelOps;

const KernelOps* table_for(Backend b)
{
    return b == Backend::avx2 ? detail::avx2_ops() : &detail::scalar_ops();
}

Backend initial_backend()
{
    const char* env = std::getenv("OFDMEST_SIMD");
    const std::string choice = env ? env : "auto";
    if (choice == "scalar")
        return Backend::scalar;
    if (choice == "avx2") {
        if (!backend_available(Backend::avx2))
            throw std::runtime_error("OFDMEST_SIMD=avx2 requested but AVX2 is unavailable");
        return Backend::avx2;
    }
    if (choice == "auto" || choice.empty())
        return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
    throw std::runtime_error("OFDMEST_SIMD must be scalar, avx2 or auto (got '" + choice + "')");
}

std::atomic<const KernelOps*> g_ops{nullptr};

const KernelOps& ops()
{
    const KernelOps* p = g_ops.load(std::memory_order_acquire);
    if (!p) {
        p = table_for(initial_backend());
        g_ops.store(p, std::memory_order_release);
    }
    return *p;
}

} // namespace

bool backend_available(Backend b)
{
    if (b == Backend::scalar)
        return true;
    return detail::avx2_ops() != nullptr && detail::cpu_has_avx2();
}

Backend active_backend()
{
    return &ops() == detail::avx2_ops() ? Backend::avx2 : Backend::scalar;
}

void force_backend(Backend b)
{
    if (!backend_available(b))
        throw std::runtime_error(std::string("kernel backend unavailable: ") + std::string(backend_name(b)));
    g_ops.store(table_for(b), std::memory_order_release);
}

std::string_view backend_name(Backend b)
{
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) { ops().cmul(a, b, out, n); }
void cdiv(const cplx* a, const cplx* b, cplx* out, std::size_t n) { ops().cdiv(a, b, out, n); }
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) { ops().caxpy(alpha, x, y, n); }
double sum_abs2(const cplx* a, std::size_t n) { return ops().sum_abs2(a, n); }
cplx dot_conj(const cplx* a, const cplx* b, std::size_t n) { return ops().dot_conj(a, b, n); }

void matvec(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* out)
{
    ops().matvec(a, rows, cols, x, out);
}

void fourier(const cplx* in, cplx* out, std::size_t n, int sign, double scale)
{
    if (n == 0)
        throw std::invalid_argument("fourier: empty input");
    auto tables = detail::fourier_tables(n);
    if (!tables->bitrev.empty()) {
        if (out != in)
            std::copy(in, in + n, out);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = tables->bitrev[i];
            if (i < r)
                std::swap(out[i], out[r]);
        }
        ops().fft_pow2(out, n, *tables, sign);
    } else {
        // Direct table-driven summation; index (k*m) mod n walks the unit table.
        std::vector<cplx> src(in, in + n);
        const cplx* w = tables->unit.data();
        for (std::size_t k = 0; k < n; ++k) {
            double re = 0.0, im = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                const std::size_t idx = (k * m) % n;
                const double wr = w[idx].real();
                const double wi = sign < 0 ? -w[idx].imag() : w[idx].imag();
                const double ar = src[m].real(), ai = src[m].imag();
                re += ar * wr - ai * wi;
                im += ar * wi + ai * wr;
            }
            out[k] = {re, im};
        }
    }
    if (scale != 1.0) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] *= scale;
    }
}

} // namespace ofdmest::kernels
