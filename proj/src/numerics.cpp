// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/numerics.hpp"

#include "ofdmest/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ofdmest {

cvec dft(const cvec& x)
{
    if (x.empty())
        throw std::invalid_argument("dft: empty input");
    cvec out(x.size());
    kernels::fourier(x.data(), out.data(), x.size(), -1, 1.0 / static_cast<double>(x.size()));
    return out;
}

cvec idft(const cvec& x)
{
    if (x.empty())
        throw std::invalid_argument("idft: empty input");
    cvec out(x.size());
    kernels::fourier(x.data(), out.data(), x.size(), +1, 1.0);
    return out;
}

HermitianMatrix::HermitianMatrix(std::size_t n) : n_(n), a_(n * n) {}

HermitianMatrix HermitianMatrix::identity(std::size_t n)
{
    HermitianMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        m.a_[i * n + i] = 1.0;
    return m;
}

HermitianMatrix HermitianMatrix::from_dense(std::size_t n, const std::vector<cplx>& row_major,
                                            double tol)
{
    if (row_major.size() != n * n)
        throw std::invalid_argument("from_dense: size mismatch");
    HermitianMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const cplx upper = row_major[i * n + j];
            const cplx mirror = std::conj(row_major[j * n + i]);
            if (std::abs(upper - mirror) > tol)
                throw std::invalid_argument("from_dense: matrix is not Hermitian within tolerance");
            cplx v = 0.5 * (upper + mirror);
            if (i == j)
                v = cplx(v.real(), 0.0);
            m.a_[i * n + j] = v;
            m.a_[j * n + i] = std::conj(v);
        }
    }
    return m;
}

void HermitianMatrix::set(std::size_t i, std::size_t j, cplx v)
{
    if (i == j)
        v = cplx(v.real(), 0.0);
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = std::conj(v);
}

double HermitianMatrix::frobenius_norm() const
{
    return std::sqrt(kernels::sum_abs2(a_.data(), a_.size()));
}

HermitianMatrix HermitianMatrix::plus_scaled_identity(double ridge) const
{
    HermitianMatrix m = *this;
    for (std::size_t i = 0; i < n_; ++i)
        m.a_[i * n_ + i] += ridge;
    return m;
}

HermitianMatrix HermitianMatrix::submatrix(std::span<const std::uint32_t> indices) const
{
    HermitianMatrix m(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i)
        for (std::size_t j = 0; j < indices.size(); ++j)
            m.a_[i * indices.size() + j] = a_[indices[i] * n_ + indices[j]];
    return m;
}

void HermitianMatrix::scale(double s)
{
    for (auto& v : a_)
        v *= s;
}

cvec EigenDecomposition::column(std::size_t col) const
{
    cvec out(dim);
    for (std::size_t i = 0; i < dim; ++i)
        out[i] = basis[i * dim + col];
    return out;
}

EigenDecomposition eig_hermitian(const HermitianMatrix& input)
{
    const std::size_t n = input.dim();
    std::vector<cplx> a = input.dense();
    std::vector<cplx> v(n * n);
    for (std::size_t i = 0; i < n; ++i)
        v[i * n + i] = 1.0;

    const double fro = input.frobenius_norm();
    const double tol = 1e-12 * fro;
    const double skip_tol = n > 0 ? tol / static_cast<double>(n) : 0.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                s += std::norm(a[i * n + j]);
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a[p * n + q];
                const double mag = std::abs(apq);
                if (mag <= skip_tol)
                    continue;
                const cplx phase = apq / mag; // e^{j*arg(apq)}
                const double app = a[p * n + p].real();
                const double aqq = a[q * n + q].real();
                const double tau = (aqq - app) / (2.0 * mag);
                double t;
                if (tau >= 0.0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx se_p = s * phase;            // s * e^{+j phi}
                const cplx se_m = s * std::conj(phase); // s * e^{-j phi}

                // columns p, q of A (A <- A J)
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a[k * n + p];
                    const cplx akq = a[k * n + q];
                    a[k * n + p] = c * akp - se_m * akq;
                    a[k * n + q] = se_p * akp + c * akq;
                }
                // rows p, q (A <- J^H A)
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a[p * n + k];
                    const cplx aqk = a[q * n + k];
                    a[p * n + k] = c * apk - se_p * aqk;
                    a[q * n + k] = se_m * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                a[p * n + p] = cplx(a[p * n + p].real(), 0.0);
                a[q * n + q] = cplx(a[q * n + q].real(), 0.0);
                // accumulate V <- V J
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v[k * n + p];
                    const cplx vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - se_m * vkq;
                    v[k * n + q] = se_p * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i)
        vals[i] = a[i * n + i].real();

    double vmax = 0.0;
    for (double w : vals)
        vmax = std::max(vmax, std::abs(w));
    for (double& w : vals) {
        if (w < 0.0 && -w <= 1e-10 * vmax)
            w = 0.0;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t lhs, std::size_t rhs) { return vals[lhs] > vals[rhs]; });

    EigenDecomposition out;
    out.dim = n;
    out.values.resize(n);
    out.basis.resize(n * n);
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = vals[order[c]];
        for (std::size_t r = 0; r < n; ++r)
            out.basis[r * n + c] = v[r * n + order[c]];
    }
    return out;
}

HermitianCholesky::HermitianCholesky(const HermitianMatrix& input) : n_(input.dim()), l_(n_ * n_)
{
    const std::vector<cplx>& a = input.dense();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        max_diag = std::max(max_diag, std::abs(a[i * n_ + i].real()));
    const double pivot_floor = 1e-13 * max_diag;

    for (std::size_t k = 0; k < n_; ++k) {
        double d = a[k * n_ + k].real();
        for (std::size_t m = 0; m < k; ++m)
            d -= std::norm(l_[k * n_ + m]);
        if (!(d > pivot_floor) || max_diag == 0.0)
            throw IllConditionedError("Hermitian solve: matrix is singular or not positive definite");
        const double lkk = std::sqrt(d);
        l_[k * n_ + k] = lkk;
        for (std::size_t i = k + 1; i < n_; ++i) {
            cplx s = a[i * n_ + k];
            for (std::size_t m = 0; m < k; ++m)
                s -= l_[i * n_ + m] * std::conj(l_[k * n_ + m]);
            l_[i * n_ + k] = s / lkk;
        }
    }
}

cvec HermitianCholesky::solve(const cvec& b) const
{
    if (b.size() != n_)
        throw std::invalid_argument("solve: dimension mismatch");
    cvec y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        cplx s = b[i];
        for (std::size_t m = 0; m < i; ++m)
            s -= l_[i * n_ + m] * y[m];
        y[i] = s / l_[i * n_ + i].real();
    }
    cvec x(n_);
    for (std::size_t ii = n_; ii-- > 0;) {
        cplx s = y[ii];
        for (std::size_t m = ii + 1; m < n_; ++m)
            s -= std::conj(l_[m * n_ + ii]) * x[m];
        x[ii] = s / l_[ii * n_ + ii].real();
    }
    return x;
}

std::vector<cplx> HermitianCholesky::solve_dense(const std::vector<cplx>& b, std::size_t cols) const
{
    if (b.size() != n_ * cols)
        throw std::invalid_argument("solve_dense: dimension mismatch");
    std::vector<cplx> x(n_ * cols);
    cvec col(n_);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < n_; ++r)
            col[r] = b[r * cols + c];
        cvec sol = solve(col);
        for (std::size_t r = 0; r < n_; ++r)
            x[r * cols + c] = sol[r];
    }
    return x;
}

cvec solve_hermitian(const HermitianMatrix& a, const cvec& b)
{
    return HermitianCholesky(a).solve(b);
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z)
{
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

} // namespace

SeededStream SeededStream::derive(std::uint64_t tag) const
{
    return {seed, mix64(stream ^ mix64(tag + kGolden))};
}

RandomStream::RandomStream(SeededStream s)
    : key_(mix64(s.seed + kGolden) ^ mix64(s.stream * 0xda942042e4dd58b5ULL))
{
}

std::uint64_t RandomStream::next_u64()
{
    return mix64(key_ + (++counter_) * kGolden);
}

double RandomStream::next_unit()
{
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

cplx RandomStream::next_cgauss(double variance)
{
    // Box-Muller in polar form; one complex sample per two uniforms. The
    // uniform is strictly positive so the log is finite.
    const double u1 = next_unit();
    const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-variance * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(ang), r * std::sin(ang)};
}

std::uint32_t RandomStream::next_index_pow2(std::uint32_t bound)
{
    return static_cast<std::uint32_t>(next_u64() & (bound - 1));
}

bool RandomStream::next_bit()
{
    return (next_u64() & 1u) != 0;
}

cvec gaussian_pair_stream(SeededStream s, std::size_t n, double variance)
{
    if (variance < 0.0)
        throw std::invalid_argument("gaussian_pair_stream: negative variance");
    RandomStream rs(s);
    cvec out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = rs.next_cgauss(variance);
    return out;
}

} // namespace ofdmest
