// SPDX-License-Identifier: Apache-2.0
#include "ofdmest/modem.hpp"

#include "ofdmest/numerics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>

using namespace ofdmest;

TEST_CASE("bpsk mapping: 0 -> +1, 1 -> -1")
{
    const std::vector<std::uint8_t> bits = {0, 1};
    const cvec sym = map_bits(bits, Constellation::get(ConstellationKind::bpsk));
    CHECK(sym[0] == cplx(1.0, 0.0));
    CHECK(sym[1] == cplx(-1.0, 0.0));
}

TEST_CASE("qam16 mapping: 0000 lands on the outer corner")
{
    const std::vector<std::uint8_t> bits = {0, 0, 0, 0};
    const cvec sym = map_bits(bits, Constellation::get(ConstellationKind::qam16));
    const double s = 1.0 / std::sqrt(10.0);
    CHECK(std::abs(sym[0] - cplx(-3.0 * s, -3.0 * s)) < 1e-15);
}

TEST_CASE("empty bit vector maps to an empty symbol vector")
{
    CHECK(map_bits({}, Constellation::get(ConstellationKind::qam16)).empty());
}

TEST_CASE("ragged bit count is rejected")
{
    const std::vector<std::uint8_t> bits = {0, 1, 0};
    CHECK_THROWS_AS(map_bits(bits, Constellation::get(ConstellationKind::qam16)),
                    std::invalid_argument);
}

TEST_CASE("constellations have unit average energy and the documented beta constants")
{
    for (ConstellationKind kind : {ConstellationKind::bpsk, ConstellationKind::qam16}) {
        const Constellation& c = Constellation::get(kind);
        double e = 0.0;
        for (const cplx& p : c.points())
            e += std::norm(p);
        CHECK(std::abs(e / double(c.points().size()) - 1.0) < 1e-12);
    }
    CHECK(Constellation::get(ConstellationKind::bpsk).beta() == 1.0);
    CHECK(std::abs(Constellation::get(ConstellationKind::qam16).beta() - 17.0 / 9.0) < 1e-12);
}

TEST_CASE("demap: sign decision and noiseless round trip")
{
    const Constellation& bpsk = Constellation::get(ConstellationKind::bpsk);
    const cvec rx = {cplx(0.9, 0.3), cplx(-0.2, -0.1)};
    CHECK(demap_symbols(rx, bpsk) == std::vector<std::uint8_t>{0, 1});

    const Constellation& qam = Constellation::get(ConstellationKind::qam16);
    for (unsigned g = 0; g < 16; ++g) {
        std::vector<std::uint8_t> bits(4);
        for (unsigned b = 0; b < 4; ++b)
            bits[b] = (g >> (3 - b)) & 1u;
        const cvec sym = map_bits(bits, qam);
        CHECK(demap_symbols(sym, qam) == bits);
    }
}

TEST_CASE("demap tie-break goes to the lowest point index")
{
    const Constellation& qam = Constellation::get(ConstellationKind::qam16);
    // enumerate midpoints of every unordered point pair; nearest set has >= 2
    // members, so the decision must pick the smaller index
    for (unsigned i = 0; i < 16; ++i) {
        for (unsigned j = i + 1; j < 16; ++j) {
            const cplx mid = 0.5 * (qam.points()[i] + qam.points()[j]);
            const unsigned pick = qam.demap_point(mid);
            const double dm = std::norm(mid - qam.points()[pick]);
            for (unsigned m = 0; m < pick; ++m)
                CHECK(std::norm(mid - qam.points()[m]) > dm); // no earlier point as close
        }
    }
    // an exact midpoint between two points resolves to the lower index
    const cplx mid01 = 0.5 * (qam.points()[0] + qam.points()[1]);
    CHECK(qam.demap_point(mid01) == 0);
}

TEST_CASE("gray property: axis-adjacent points differ in exactly one bit")
{
    const Constellation& qam = Constellation::get(ConstellationKind::qam16);
    const double s = 1.0 / std::sqrt(10.0);
    int adjacent_pairs = 0;
    for (unsigned i = 0; i < 16; ++i) {
        for (unsigned j = 0; j < 16; ++j) {
            if (i == j)
                continue;
            const cplx d = qam.points()[i] - qam.points()[j];
            const bool axis_neighbor = std::abs(std::abs(d) - 2.0 * s) < 1e-12 &&
                                       (std::abs(d.real()) < 1e-12 || std::abs(d.imag()) < 1e-12);
            if (!axis_neighbor)
                continue;
            ++adjacent_pairs;
            CHECK(std::popcount(i ^ j) == 1);
        }
    }
    CHECK(adjacent_pairs == 48); // 24 unordered neighbor pairs on the 4x4 grid
}

TEST_CASE("ofdm_modulate: no-guard impulse and CP structure")
{
    const cvec dc = {1.0, 0.0, 0.0, 0.0};
    CHECK(oracles::max_abs_diff(ofdm_modulate(dc, 0), {1.0, 1.0, 1.0, 1.0}) < 1e-15);

    RandomStream rs(SeededStream{21, 1});
    const cvec x = oracles::random_cvec(rs, 4);
    const cvec t = idft(x); // [a, b, c, d]
    const cvec out = ofdm_modulate(x, 2);
    const cvec want = {t[2], t[3], t[0], t[1], t[2], t[3]};
    CHECK(oracles::max_abs_diff(out, want) < 1e-15);

    const cvec big = oracles::random_cvec(rs, 16);
    const cvec full = ofdm_modulate(big, 4);
    const cvec time = idft(big);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(std::abs(full[4 + i] - time[i]) < 1e-15);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(full[i] - time[12 + i]) < 1e-15);

    CHECK_THROWS_AS(ofdm_modulate(dc, 5), std::invalid_argument);
}

TEST_CASE("ofdm_demodulate: inverse of modulate, ignores the CP")
{
    RandomStream rs(SeededStream{21, 2});
    const cvec x = oracles::random_cvec(rs, 16);
    CHECK(oracles::max_abs_diff(ofdm_demodulate(ofdm_modulate(x, 4), 16, 4), x) < 1e-10);

    const cvec garbage_cp = {cplx(9.0, -9.0), cplx(-3.0, 7.0), 1.0, 1.0, 1.0, 1.0};
    const cvec y = ofdm_demodulate(garbage_cp, 4, 2);
    CHECK(std::abs(y[0] - cplx(1.0, 0.0)) < 1e-15);
    for (std::size_t k = 1; k < 4; ++k)
        CHECK(std::abs(y[k]) < 1e-15);

    CHECK_THROWS_AS(ofdm_demodulate(garbage_cp, 16, 4), std::invalid_argument);
}

TEST_CASE("delay within the CP becomes a pure phase ramp")
{
    RandomStream rs(SeededStream{21, 3});
    const std::size_t n = 16, ng = 4, d = 3;
    const cvec x = oracles::random_cvec(rs, n);
    const cvec tx = ofdm_modulate(x, ng);
    cvec rx(tx.size(), cplx(0.0, 0.0));
    for (std::size_t m = d; m < tx.size(); ++m)
        rx[m] = tx[m - d];
    const cvec y = ofdm_demodulate(rx, n, ng);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx want = x[k] * std::polar(1.0, -2.0 * std::numbers::pi * double(d) * double(k) /
                                                     double(n));
        CHECK(std::abs(y[k] - want) < 1e-9);
    }
}

TEST_CASE("equalize: examples and the near-zero guard")
{
    const cvec y = {cplx(2.0, 0.0), cplx(0.0, 3.0)};
    const cvec h = {cplx(1.0, 0.0), cplx(0.0, 1.0)};
    const cvec out = equalize(y, h);
    CHECK(std::abs(out[0] - cplx(2.0, 0.0)) < 1e-15);
    CHECK(std::abs(out[1] - cplx(3.0, 0.0)) < 1e-15);

    RandomStream rs(SeededStream{21, 4});
    const cvec any = oracles::random_cvec(rs, 8);
    CHECK(oracles::max_abs_diff(equalize(any, cvec(8, cplx(1.0, 0.0))), any) == 0.0);

    cvec tiny(8, cplx(1.0, 0.0));
    tiny[5] = cplx(1e-15, 0.0);
    CHECK_THROWS_AS(equalize(any, tiny), NearZeroChannelError);
}

TEST_CASE("perfect-chain identity across sizes, guards and constellations")
{
    RandomStream rs(SeededStream{21, 5});
    for (ConstellationKind kind : {ConstellationKind::bpsk, ConstellationKind::qam16}) {
        const Constellation& c = Constellation::get(kind);
        for (std::size_t n : {16u, 64u, 128u}) {
            for (std::size_t ng : {std::size_t{0}, n / 8}) {
                std::vector<std::uint8_t> bits(n * c.bits_per_symbol());
                for (auto& b : bits)
                    b = static_cast<std::uint8_t>(rs.next_bit());
                const cvec sym = map_bits(bits, c);
                const cvec y = ofdm_demodulate(ofdm_modulate(sym, ng), n, ng);
                const cvec eq = equalize(y, cvec(n, cplx(1.0, 0.0)));
                CHECK(demap_symbols(eq, c) == bits);
            }
        }
    }
}

TEST_CASE("ofdm config invariants")
{
    OfdmConfig c;
    c.fft_size = 16;
    c.guard = 2;
    c.validate();

    c.guard = 17;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.guard = 2;
    c.active = {3, 3};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.active = {3, 16};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.active = {0, 3, 7};
    c.validate();
    CHECK(c.active_count() == 3);
}
