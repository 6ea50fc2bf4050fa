#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "core/klooster.hpp"
#include "core/modring.hpp"
#include "core/rng.hpp"

using namespace kloostpath;

TEST_CASE("naive sum, hand-checked values") {
    PrimePowerModulus m3(3, 1);
    auto v = kloosterman_naive(m3, 1, 1);
    // e(1/3) + e(2/3) = -1, normalized by sqrt(3)
    CHECK(v.real() == doctest::Approx(-0.5773502691896258).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-12);

    PrimePowerModulus m9(3, 2);
    auto w = kloosterman_naive(m9, 1, 1);
    // six-term sum collapses to 2 cos(4 pi / 9)
    CHECK(w.real() == doctest::Approx(0.3472963553338607).epsilon(1e-12));
    CHECK(std::abs(w.imag()) < 1e-12);

    PrimePowerModulus m25(5, 2);
    auto z = kloosterman_naive(m25, 2, 1);
    CHECK(std::abs(z) < 1e-9); // 2 is a non-residue mod 5

    CHECK_THROWS_AS(kloosterman_naive(m9, 1, 3), NotAUnit);
}

TEST_CASE("closed form matches the naive sum") {
    PrimePowerModulus m9(3, 2);
    SqrtBranch br9(m9);
    CHECK(kloosterman_closed(m9, 1, 1, br9) ==
          doctest::Approx(0.3472963553338607).epsilon(1e-10));
    CHECK(kloosterman_closed(m9, 2, 1, br9) == 0.0); // vanishing clause, exact

    PrimePowerModulus m27(3, 3);
    SqrtBranch br27(m27);
    double closed = kloosterman_closed(m27, 1, 1, br27);
    auto naive = kloosterman_naive(m27, 1, 1);
    CHECK(std::abs(closed) <= 2.0);
    CHECK(std::abs(closed - naive.real()) < 1e-9);

    PrimePowerModulus m3(3, 1);
    SqrtBranch br3(m3);
    CHECK_THROWS_AS(kloosterman_closed(m3, 1, 1, br3), UnsupportedDepth);
    CHECK_THROWS_AS(kloosterman_closed(m9, 1, 3, br9), NotAUnit);
}

TEST_CASE("oracle equivalence over small moduli") {
    for (auto [p, n] : {std::pair<std::uint64_t, unsigned>{3, 2}, {3, 3}, {3, 4},
                        {5, 2}, {5, 3}, {7, 2}}) {
        PrimePowerModulus m(p, n);
        SqrtBranch br(m);
        for (std::uint64_t a = 1; a < m.q(); ++a) {
            if (!m.is_unit(a)) continue;
            auto naive = kloosterman_naive(m, a, 1);
            double closed = kloosterman_closed(m, a, 1, br);
            CHECK(std::abs(naive.imag()) < 1e-9);
            CHECK(std::abs(naive.real() - closed) < 1e-8);
            CHECK(std::abs(closed) <= 2.0 + 1e-9);
        }
    }
}

TEST_CASE("symmetry Kl(a,b) = Kl(b,a) and product reduction Kl(a,b) = Kl(ab,1)") {
    PrimePowerModulus m(5, 3);
    Rng rng(5);
    for (int i = 0; i < 40; ++i) {
        std::uint64_t a = rng.next_below(m.q());
        std::uint64_t b = rng.next_below(m.q());
        if (!m.is_unit(a) || !m.is_unit(b)) continue;
        auto ab = kloosterman_naive(m, a, b);
        auto ba = kloosterman_naive(m, b, a);
        auto prod = kloosterman_naive(m, m.mul(a, b), 1);
        CHECK(std::abs(ab - ba) < 1e-9);
        CHECK(std::abs(ab - prod) < 1e-9);
    }
}

TEST_CASE("closed form is branch independent") {
    PrimePowerModulus m(7, 3);
    SqrtBranch def(m);
    // flip every choice to the opposite root
    std::vector<std::uint64_t> flipped(m.p(), 0);
    for (std::uint64_t r = 1; r < m.p(); ++r)
        if (m.legendre(r) == 1) flipped[r] = m.p() - def.s(r);
    SqrtBranch other(m, flipped);

    for (std::uint64_t a = 1; a < 80; ++a) {
        if (!m.is_unit(a)) continue;
        CHECK(kloosterman_closed(m, a, 1, def) ==
              doctest::Approx(kloosterman_closed(m, a, 1, other)).epsilon(1e-12));
    }
}

TEST_CASE("DFT sweep agrees with direct naive values") {
    PrimePowerModulus m(3, 3);
    auto sweep = kloosterman_naive_sweep(m, 1);
    REQUIRE(sweep.size() == m.q());
    for (std::uint64_t c = 0; c < m.q(); ++c) {
        auto direct = kloosterman_naive(m, c, 1);
        CHECK(std::abs(sweep[c] - direct) < 1e-9);
    }
}

TEST_CASE("summand census") {
    PrimePowerModulus m9(3, 2);
    SummandCensus c9 = summand_census(m9, 1, 1);
    CHECK(c9.distinct == 2);
    CHECK(c9.counts.at(2) == 3);
    CHECK(c9.counts.at(7) == 3);
    CHECK(c9.total == m9.phi());

    // modulo 27 there are only four distinct summand phases
    PrimePowerModulus m27(3, 3);
    SummandCensus c27 = summand_census(m27, 1, 1);
    CHECK(c27.distinct == 4);
    CHECK(c27.total == m27.phi());

    // partition property for random parameters
    PrimePowerModulus m(5, 3);
    SummandCensus c = summand_census(m, 7, 3);
    std::uint64_t total = 0;
    for (const auto& [u, count] : c.counts) total += count;
    CHECK(total == m.phi());

    CHECK_THROWS_AS(summand_census(m, 5, 1), NotAUnit);
}

TEST_CASE("multiplicity of popular stationary values") {
    PrimePowerModulus m(3, 5);
    // u = 2 + 9*1 lies in 2 + p^2 (units), kappa = 1: exactly 2p solutions
    CHECK(stationary_value_count(m, 11) == 6);
    // the other half of the family vanishes: (u^2-4)/9 a non-residue at u = 7
    CHECK(stationary_value_count(m, 7) == 0);
    // generic u: the quadratic x^2 - ux + 1 has 0 or 2 unit roots
    std::uint64_t generic = stationary_value_count(m, 1);
    CHECK((generic == 0 || generic == 2));

    MultiplicityReport r351 = multiplicity_check(m, 1);
    CHECK(r351.pass);
    CHECK(r351.expected == 6);
    CHECK(r351.classes_checked == 2 * PrimePowerModulus(3, 3).phi());
    // the dichotomy splits each family evenly
    CHECK(r351.attained == 18);
    CHECK(r351.vanishing == 18);

    PrimePowerModulus m55(5, 5);
    MultiplicityReport r552 = multiplicity_check(m55, 2);
    CHECK(r552.pass);
    CHECK(r552.expected == 50);
    CHECK(r552.attained == r552.vanishing);
    // a representative of the -2 family with (u^2-4)/5^4 a residue: u = -2 + 5^4
    CHECK(stationary_value_count(m55, m55.add(m55.q() - 2, 625)) == 50);
    CHECK_THROWS_AS(multiplicity_check(m55, 0), UsageError);
    CHECK_THROWS_AS(multiplicity_check(m55, 3), UsageError); // kappa >= n/2
}
