// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/modem.hpp"

#include "ofdmest/kernels.hpp"
#include "ofdmest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ofdmest {

namespace {

cvec bpsk_points()
{
    return {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
}

cvec qam16_points()
{
    // 2-bit value -> amplitude level, Gray along each axis.
    static constexpr double level[4] = {-3.0, -1.0, +3.0, +1.0};
    const double s = 1.0 / std::sqrt(10.0);
    cvec pts(16);
    for (unsigned g = 0; g < 16; ++g) {
        const unsigned i_bits = (g >> 2) & 0x3;
        const unsigned q_bits = g & 0x3;
        pts[g] = cplx(level[i_bits] * s, level[q_bits] * s);
    }
    return pts;
}

} // namespace

Constellation::Constellation(ConstellationKind kind, unsigned bits, cvec points)
    : kind_(kind), bits_(bits), points_(std::move(points))
{
    double e = 0.0, einv = 0.0;
    for (const cplx& p : points_) {
        e += std::norm(p);
        einv += 1.0 / std::norm(p);
    }
    energy_ = e / static_cast<double>(points_.size());
    beta_ = energy_ * (einv / static_cast<double>(points_.size()));
}

const Constellation& Constellation::get(ConstellationKind kind)
{
    static const Constellation bpsk(ConstellationKind::bpsk, 1, bpsk_points());
    static const Constellation qam16(ConstellationKind::qam16, 4, qam16_points());
    return kind == ConstellationKind::bpsk ? bpsk : qam16;
}

const Constellation& Constellation::by_name(std::string_view name)
{
    if (name == "bpsk")
        return get(ConstellationKind::bpsk);
    if (name == "qam16")
        return get(ConstellationKind::qam16);
    throw std::invalid_argument("unknown constellation '" + std::string(name) + "'");
}

std::string_view Constellation::name() const noexcept
{
    return kind_ == ConstellationKind::bpsk ? "bpsk" : "qam16";
}

unsigned Constellation::demap_point(cplx y) const
{
    unsigned best = 0;
    double best_d = std::norm(y - points_[0]);
    for (unsigned i = 1; i < points_.size(); ++i) {
        const double d = std::norm(y - points_[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

cvec map_bits(std::span<const std::uint8_t> bits, const Constellation& c)
{
    const unsigned bps = c.bits_per_symbol();
    if (bits.size() % bps != 0)
        throw std::invalid_argument("map_bits: bit count not divisible by bits per symbol");
    cvec out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        unsigned group = 0;
        for (unsigned b = 0; b < bps; ++b)
            group = (group << 1) | (bits[s * bps + b] & 1u);
        out[s] = c.map_group(group);
    }
    return out;
}

std::vector<std::uint8_t> demap_symbols(std::span<const cplx> symbols, const Constellation& c)
{
    const unsigned bps = c.bits_per_symbol();
    std::vector<std::uint8_t> bits(symbols.size() * bps);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const unsigned group = c.demap_point(symbols[s]);
        for (unsigned b = 0; b < bps; ++b)
            bits[s * bps + b] = static_cast<std::uint8_t>((group >> (bps - 1 - b)) & 1u);
    }
    return bits;
}

cvec ofdm_modulate(const cvec& x_freq, std::size_t guard)
{
    const std::size_t n = x_freq.size();
    if (guard > n)
        throw std::invalid_argument("ofdm_modulate: guard longer than symbol");
    const cvec x = idft(x_freq);
    cvec out(n + guard);
    std::copy(x.end() - static_cast<std::ptrdiff_t>(guard), x.end(), out.begin());
    std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(guard));
    return out;
}

cvec ofdm_demodulate(const cvec& y_full, std::size_t n, std::size_t guard)
{
    if (y_full.size() != n + guard)
        throw std::invalid_argument("ofdm_demodulate: length mismatch");
    cvec window(y_full.begin() + static_cast<std::ptrdiff_t>(guard),
                y_full.begin() + static_cast<std::ptrdiff_t>(guard + n));
    return dft(window);
}

cvec equalize(const cvec& y, const cvec& h_est)
{
    if (y.size() != h_est.size())
        throw std::invalid_argument("equalize: length mismatch");
    for (std::size_t k = 0; k < h_est.size(); ++k) {
        if (std::abs(h_est[k]) < kEqualizerGuard)
            throw NearZeroChannelError("equalize: |H_e| below guard at carrier " + std::to_string(k));
    }
    cvec out(y.size());
    kernels::cdiv(y.data(), h_est.data(), out.data(), y.size());
    return out;
}

std::vector<std::uint32_t> OfdmConfig::active_indices() const
{
    if (!active.empty())
        return active;
    std::vector<std::uint32_t> all(fft_size);
    std::iota(all.begin(), all.end(), 0u);
    return all;
}

void OfdmConfig::validate() const
{
    if (fft_size == 0)
        throw std::invalid_argument("fft_size must be >= 1");
    if (guard > fft_size)
        throw std::invalid_argument("guard length exceeds fft_size");
    if (block_len < 1)
        throw std::invalid_argument("block length must be >= 1");
    if (!active.empty()) {
        if (!std::is_sorted(active.begin(), active.end()))
            throw std::invalid_argument("active carriers must be sorted");
        if (std::adjacent_find(active.begin(), active.end()) != active.end())
            throw std::invalid_argument("active carriers must be unique");
        if (active.back() >= fft_size)
            throw std::invalid_argument("active carrier index out of range");
    }
}

} // namespace ofdmest
