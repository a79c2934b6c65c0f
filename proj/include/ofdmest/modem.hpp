// SPDX-License-Identifier: Apache-2.0
//
// Bit <-> symbol mapping (BPSK, Gray 16-QAM), OFDM symbol assembly with
// cyclic prefix, receive-side CP removal + DFT, zero-forcing equalization.
#pragma once

#include "ofdmest/common.hpp"

#include <cstdint>
#include <span>
#include <string_view>

namespace ofdmest {

enum class ConstellationKind { bpsk, qam16 };

// Unit-average-energy alphabet with a fixed bit labeling. BPSK: bit 0 -> +1,
// bit 1 -> -1. 16-QAM: first two bits select the I level, last two the Q
// level, per-axis Gray map {00->-3, 01->-1, 11->+1, 10->+3}, scaled by
// 1/sqrt(10). Point index == bit-group value read MSB first; that index order
// is also the demapper's tie-break order.
class Constellation {
public:
    static const Constellation& get(ConstellationKind kind);
    static const Constellation& by_name(std::string_view name); // "bpsk" | "qam16"

    ConstellationKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept;
    unsigned bits_per_symbol() const noexcept { return bits_; }
    const cvec& points() const noexcept { return points_; }

    // E|x|^2 * E|1/x|^2 over the alphabet (17/9 for 16-QAM, 1 for BPSK).
    double beta() const noexcept { return beta_; }
    double mean_energy() const noexcept { return energy_; }

    cplx map_group(unsigned group) const { return points_[group]; }
    // nearest point by Euclidean distance, ties to the lowest index
    unsigned demap_point(cplx y) const;

private:
    Constellation(ConstellationKind kind, unsigned bits, cvec points);

    ConstellationKind kind_;
    unsigned bits_;
    cvec points_;
    double beta_;
    double energy_;
};

// Bit groups are consumed MSB first. Throws on ragged length.
cvec map_bits(std::span<const std::uint8_t> bits, const Constellation& c);
std::vector<std::uint8_t> demap_symbols(std::span<const cplx> symbols, const Constellation& c);

// x = idft(X); output = [x(N-Ng) .. x(N-1), x(0) .. x(N-1)]. Throws if Ng > N.
cvec ofdm_modulate(const cvec& x_freq, std::size_t guard);

// Y = dft(y_f[Ng .. Ng+N-1]). Throws on length mismatch.
cvec ofdm_demodulate(const cvec& y_full, std::size_t n, std::size_t guard);

// X_e(k) = Y(k) / H_e(k); throws NearZeroChannelError when |H_e(k)| < 1e-12.
cvec equalize(const cvec& y, const cvec& h_est);

constexpr double kEqualizerGuard = 1e-12;

struct OfdmConfig {
    std::size_t fft_size = 128;
    std::size_t guard = 16;
    std::vector<std::uint32_t> active; // sorted carrier indices; empty means "all"
    std::size_t block_len = 8;
    ConstellationKind constellation = ConstellationKind::qam16;

    std::size_t active_count() const { return active.empty() ? fft_size : active.size(); }
    std::vector<std::uint32_t> active_indices() const;
    void validate() const; // throws std::invalid_argument on any broken invariant
};

} // namespace ofdmest
