// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/channel.hpp"

#include <cmath>
#include <numbers>

namespace ofdmest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{j*2*pi*x}
cplx cis(double x)
{
    return {std::cos(kTwoPi * x), std::sin(kTwoPi * x)};
}

} // namespace

ChannelModel::ChannelModel(std::vector<ChannelTap> taps) : taps_(std::move(taps))
{
    if (taps_.empty())
        throw std::invalid_argument("channel model needs at least one tap");
    double total = 0.0;
    for (std::size_t i = 0; i < taps_.size(); ++i) {
        if (taps_[i].power < 0.0)
            throw std::invalid_argument("tap power must be nonnegative");
        if (i > 0 && taps_[i].delay <= taps_[i - 1].delay)
            throw std::invalid_argument("tap delays must be strictly increasing");
        total += taps_[i].power;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("tap powers must sum to 1");
}

bool ChannelModel::has_doppler() const noexcept
{
    for (const ChannelTap& t : taps_)
        if (t.doppler != 0.0)
            return true;
    return false;
}

void ChannelModel::check_guard(std::size_t guard) const
{
    if (max_delay() > guard)
        throw std::invalid_argument("tap delay " + std::to_string(max_delay()) +
                                    " exceeds guard length " + std::to_string(guard) +
                                    " (no-ISI precondition)");
}

ChannelModel ChannelModel::reference_profile(double doppler)
{
    static constexpr std::size_t delays[4] = {0, 2, 5, 9};
    double raw[4];
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        raw[i] = std::exp(-static_cast<double>(delays[i]) / 5.0);
        total += raw[i];
    }
    std::vector<ChannelTap> taps(4);
    for (int i = 0; i < 4; ++i)
        taps[i] = {delays[i], raw[i] / total, doppler};
    // kill the rounding residue so the unit-energy invariant holds exactly
    double sum = 0.0;
    for (int i = 0; i < 3; ++i)
        sum += taps[i].power;
    taps[3].power = 1.0 - sum;
    return ChannelModel(std::move(taps));
}

ChannelRealization::ChannelRealization(ChannelModel model, cvec gains, std::int64_t start_sample)
    : model_(std::move(model)), gains_(std::move(gains)), start_(start_sample)
{
    if (gains_.size() != model_.path_count())
        throw std::invalid_argument("gain count does not match tap count");
}

ChannelRealization ChannelRealization::with_start(std::int64_t start_sample) const
{
    return {model_, gains_, start_sample};
}

ChannelRealization draw_realization(const ChannelModel& m, SeededStream s)
{
    RandomStream rs(s);
    cvec gains(m.path_count());
    for (std::size_t i = 0; i < gains.size(); ++i)
        gains[i] = rs.next_cgauss(m.taps()[i].power);
    return {m, std::move(gains), 0};
}

cvec apply_channel(const cvec& x_full, const ChannelRealization& c, std::size_t guard)
{
    const std::size_t total = x_full.size();
    if (total <= guard)
        throw std::invalid_argument("apply_channel: waveform shorter than guard");
    const std::size_t n = total - guard;
    c.model().check_guard(guard);

    cvec y(total, cplx(0.0, 0.0));
    const auto& taps = c.model().taps();
    for (std::size_t i = 0; i < taps.size(); ++i) {
        const cplx h = c.gains()[i];
        if (h == cplx(0.0, 0.0))
            continue;
        const std::size_t tau = taps[i].delay;
        const double f = taps[i].doppler;
        if (f == 0.0) {
            for (std::size_t m = tau; m < total; ++m)
                y[m] += h * x_full[m - tau];
            continue;
        }
        // phase argument at array position m is f*(n0 + m - Ng)/N; advance by
        // a unit rotation per sample, resynced periodically against drift
        const double base = f * (static_cast<double>(c.start_sample()) -
                                 static_cast<double>(guard)) / static_cast<double>(n);
        const cplx step = cis(f / static_cast<double>(n));
        cplx rot = cis(base + f * static_cast<double>(tau) / static_cast<double>(n));
        for (std::size_t m = tau; m < total; ++m) {
            if ((m - tau) % 128 == 0)
                rot = cis(base + f * static_cast<double>(m) / static_cast<double>(n));
            y[m] += h * rot * x_full[m - tau];
            rot *= step;
        }
    }
    return y;
}

std::pair<cvec, double> add_awgn(const cvec& y, double snr_db, double signal_power, SeededStream s)
{
    if (!(signal_power > 0.0))
        throw std::invalid_argument("add_awgn: signal power must be positive");
    if (std::isinf(snr_db))
        return {y, 0.0};
    const double sigma2 = signal_power / std::pow(10.0, snr_db / 10.0);
    RandomStream rs(s);
    cvec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = y[i] + rs.next_cgauss(sigma2);
    return {std::move(out), sigma2};
}

namespace {

// A_i = (1/N) sum_{n<N} e^{j(2pi/N) f (n0+n)}, computed directly
cplx window_average(double f, std::int64_t n0, std::size_t n)
{
    if (f == 0.0)
        return {1.0, 0.0};
    cplx acc(0.0, 0.0);
    for (std::size_t m = 0; m < n; ++m)
        acc += cis(f * static_cast<double>(n0 + static_cast<std::int64_t>(m)) /
                   static_cast<double>(n));
    return acc / static_cast<double>(n);
}

// S(u) = (1/N) sum_{n<N} e^{j(2pi/N) u n}; closed geometric form, u not an
// exact multiple of N unless u == 0
cplx dirichlet_ratio(double u, std::size_t n)
{
    if (u == 0.0)
        return {1.0, 0.0};
    const double nd = static_cast<double>(n);
    const double den = std::sin(std::numbers::pi * u / nd);
    if (std::abs(den) < 1e-12)
        return cis(0.5 * u * (nd - 1.0) / nd);
    const double ratio = std::sin(std::numbers::pi * u) / (nd * den);
    return cis(0.5 * u * (nd - 1.0) / nd) * ratio;
}

} // namespace

cvec freq_response(const ChannelRealization& c, std::size_t n)
{
    const auto& taps = c.model().taps();
    cvec h(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < taps.size(); ++i) {
        const cplx coeff = c.gains()[i] * window_average(taps[i].doppler, c.start_sample(), n);
        const double tau = static_cast<double>(taps[i].delay);
        for (std::size_t k = 0; k < n; ++k)
            h[k] += coeff * cis(-tau * static_cast<double>(k) / static_cast<double>(n));
    }
    return h;
}

cvec ici_term(const ChannelRealization& c, const cvec& x_freq, std::size_t n)
{
    if (x_freq.size() != n)
        throw std::invalid_argument("ici_term: symbol length mismatch");
    cvec ici(n, cplx(0.0, 0.0));
    const auto& taps = c.model().taps();
    const double nd = static_cast<double>(n);
    std::vector<cplx> leak(2 * n - 1);
    cvec tap_phase(n);
    for (std::size_t i = 0; i < taps.size(); ++i) {
        const double f = taps[i].doppler;
        if (f == 0.0)
            continue; // no Doppler, no leakage from this path
        const cplx h0 = c.gains()[i] *
                        cis(f * static_cast<double>(c.start_sample()) / nd);
        const double tau = static_cast<double>(taps[i].delay);
        // S(f + d) for carrier offset d = K - k
        for (std::ptrdiff_t d = -(static_cast<std::ptrdiff_t>(n) - 1);
             d <= static_cast<std::ptrdiff_t>(n) - 1; ++d)
            leak[static_cast<std::size_t>(d + static_cast<std::ptrdiff_t>(n) - 1)] =
                dirichlet_ratio(f + static_cast<double>(d), n);
        for (std::size_t kk = 0; kk < n; ++kk)
            tap_phase[kk] = cis(-tau * static_cast<double>(kk) / nd);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc(0.0, 0.0);
            for (std::size_t kother = 0; kother < n; ++kother) {
                if (kother == k)
                    continue;
                const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(kother) -
                                         static_cast<std::ptrdiff_t>(k);
                acc += x_freq[kother] * tap_phase[kother] *
                       leak[static_cast<std::size_t>(d + static_cast<std::ptrdiff_t>(n) - 1)];
            }
            ici[k] += h0 * acc;
        }
    }
    return ici;
}

HermitianMatrix freq_correlation(const ChannelModel& m, std::size_t n)
{
    // entries depend only on k - k'; build the first row and mirror
    cvec row(n, cplx(0.0, 0.0));
    for (const ChannelTap& t : m.taps()) {
        const double tau = static_cast<double>(t.delay);
        for (std::size_t d = 0; d < n; ++d)
            row[d] += t.power * cis(-tau * static_cast<double>(d) / static_cast<double>(n));
    }
    HermitianMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            r.set(i, j, std::conj(row[j - i]));
    return r;
}

HermitianMatrix time_correlation(const ChannelModel& m, std::size_t n)
{
    HermitianMatrix r(n);
    for (const ChannelTap& t : m.taps()) {
        if (t.delay >= n)
            throw std::invalid_argument("time_correlation: tap delay outside matrix");
        r.set(t.delay, t.delay, t.power);
    }
    return r;
}

HermitianMatrix empirical_freq_correlation(const ChannelModel& m, std::size_t n,
                                           std::size_t draws, SeededStream s)
{
    if (draws == 0)
        throw std::invalid_argument("empirical_freq_correlation: need at least one draw");
    std::vector<cplx> acc(n * n, cplx(0.0, 0.0));
    for (std::size_t d = 0; d < draws; ++d) {
        const ChannelRealization real = draw_realization(m, s.derive(d));
        const cvec h = freq_response(real, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                acc[i * n + j] += h[i] * std::conj(h[j]);
    }
    const double inv = 1.0 / static_cast<double>(draws);
    HermitianMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            r.set(i, j, 0.5 * (acc[i * n + j] + std::conj(acc[j * n + i])) * inv);
    return r;
}

} // namespace ofdmest
