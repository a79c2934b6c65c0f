// SPDX-License-Identifier: Apache-2.0
//
// Time-varying multipath Rayleigh channel applied by time-domain convolution,
// AWGN injection, the analytic per-carrier response H(k) and ICI term I(k),
// and the correlation matrices the estimators consume.
#pragma once

#include "ofdmest/common.hpp"
#include "ofdmest/numerics.hpp"

#include <cstdint>
#include <utility>

namespace ofdmest {

struct ChannelTap {
    std::size_t delay = 0; // integer samples
    double power = 0.0;    // sigma_i^2
    double doppler = 0.0;  // normalized f_Di * T, dimensionless
};

// Unit-energy tap profile with strictly increasing integer delays.
class ChannelModel {
public:
    explicit ChannelModel(std::vector<ChannelTap> taps);

    const std::vector<ChannelTap>& taps() const noexcept { return taps_; }
    std::size_t path_count() const noexcept { return taps_.size(); }
    std::size_t max_delay() const noexcept { return taps_.back().delay; }
    bool has_doppler() const noexcept;

    // no-ISI bound: every delay must satisfy tau <= guard
    void check_guard(std::size_t guard) const;

    // 4 taps at delays {0, 2, 5, 9} with powers ~ e^{-tau/5}, normalized.
    static ChannelModel reference_profile(double doppler = 0.0);

private:
    std::vector<ChannelTap> taps_;
};

// One drawn set of complex tap gains. start_sample is the absolute index of
// the symbol's first post-CP sample, so the Doppler phase factor
// e^{j(2pi/N) f_i T (n0+n)} is continuous across the symbols of a block.
class ChannelRealization {
public:
    ChannelRealization(ChannelModel model, cvec gains, std::int64_t start_sample = 0);

    const ChannelModel& model() const noexcept { return model_; }
    const cvec& gains() const noexcept { return gains_; }
    std::int64_t start_sample() const noexcept { return start_; }
    ChannelRealization with_start(std::int64_t start_sample) const;

private:
    ChannelModel model_;
    cvec gains_;
    std::int64_t start_;
};

// gains i.i.d. circularly symmetric Gaussian with E|h_i|^2 = sigma_i^2.
ChannelRealization draw_realization(const ChannelModel& m, SeededStream s);

// y(m) = sum_i h_i e^{j(2pi/N) f_i T (n0 + m - Ng)} x(m - tau_i) over the
// CP-extended symbol (x indexed from the CP; missing pre-CP samples are the
// previous symbol's and only affect the discarded prefix). Throws if a delay
// exceeds the guard.
cvec apply_channel(const cvec& x_full, const ChannelRealization& c, std::size_t guard);

// sigma_n^2 = signal_power / 10^(snr_db/10); +inf snr_db means noise off.
// Returns the noisy vector and the injected per-sample variance.
std::pair<cvec, double> add_awgn(const cvec& y, double snr_db, double signal_power, SeededStream s);

// H(k) = sum_i h_i A_i e^{-j2pi tau_i k/N} with
// A_i = (1/N) sum_{n=0}^{N-1} e^{j(2pi/N) f_i T (n0+n)} computed directly.
cvec freq_response(const ChannelRealization& c, std::size_t n);

// I(k) such that dft(retained window) = H .* X + I when noise is off.
cvec ici_term(const ChannelRealization& c, const cvec& x_freq, std::size_t n);

// (R_HH)_{k,k'} = sum_i sigma_i^2 e^{-j2pi tau_i (k-k')/N}; Hermitian, PSD,
// unit diagonal for a unit-energy model.
HermitianMatrix freq_correlation(const ChannelModel& m, std::size_t n);

// Diagonal N x N with sigma_i^2 at index tau_i (uncorrelated scattering).
HermitianMatrix time_correlation(const ChannelModel& m, std::size_t n);

// Sample average of H H^H over `draws` realizations; sensitivity-experiment
// alternative to the analytic freq_correlation.
HermitianMatrix empirical_freq_correlation(const ChannelModel& m, std::size_t n,
                                           std::size_t draws, SeededStream s);

} // namespace ofdmest
