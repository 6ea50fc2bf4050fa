#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "modring.hpp"

namespace kloostpath {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// e_q(x) = e(x/q) for a residue x in [0, q).
inline std::complex<double> unit_phase(std::uint64_t x, std::uint64_t q) {
    double theta = kTwoPi * (static_cast<double>(x) / static_cast<double>(q));
    return {std::cos(theta), std::sin(theta)};
}

enum class EvalMethod { Naive, ClosedForm };

// Kl_{p^n}(a,b) by direct summation over units, divided by p^{n/2}.
// The imaginary part of the result is a numerical-zero check for callers.
std::complex<double> kloosterman_naive(const PrimePowerModulus& m,
                                       std::uint64_t a, std::uint64_t b);

// Closed-form evaluation for n >= 2: zero unless ab is a unit square mod p^n,
// otherwise 2*(Jacobi of (ab)_{1/2})*Re[eps_{p^n} e_{p^n}(2(ab)_{1/2})] with
// eps = 1 if 2|n or p = 1 (mod 4), eps = i otherwise.  O(n) ring operations.
double kloosterman_closed(const PrimePowerModulus& m, std::uint64_t a,
                          std::uint64_t b, const SqrtBranch& br);

// Kl_{p^n}(c, b) for every residue c in [0, q) at once, via one DFT of the
// sequence x -> e_q(b*inv(x)) on units.  Values are already normalized.
std::vector<std::complex<double>> kloosterman_naive_sweep(const PrimePowerModulus& m,
                                                          std::uint64_t b);

// Multiplicities of the summand phases u = ax + b*inv(x) over units x.
struct SummandCensus {
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t distinct = 0;
    std::uint64_t total = 0; // = phi(p^n)
};

SummandCensus summand_census(const PrimePowerModulus& m, std::uint64_t a,
                             std::uint64_t b);

// Checks the multiplicity dichotomy for u in +-2 + p^{2kappa} * (units mod
// p^{n-2kappa}): the count of units x with x + inv(x) = u (mod p^n) equals
// 2p^kappa exactly when (u^2-4)/p^{2kappa} is a residue class mod p, and 0
// otherwise.  Every summand value attained in these families is attained
// with multiplicity exactly 2p^kappa.
struct MultiplicityReport {
    bool pass = false;
    std::uint64_t expected = 0;    // 2 p^kappa, the attained multiplicity
    std::uint64_t classes_checked = 0;
    std::uint64_t attained = 0;    // classes with count 2 p^kappa
    std::uint64_t vanishing = 0;   // classes with count 0
    struct Counterexample {
        std::uint64_t u;
        std::uint64_t count;
        std::uint64_t expected;
    };
    std::vector<Counterexample> counterexamples;
};

MultiplicityReport multiplicity_check(const PrimePowerModulus& m, unsigned kappa);

// Count of units x with x + inv(x) = u (mod q), by exhaustive scan.
std::uint64_t stationary_value_count(const PrimePowerModulus& m, std::uint64_t u);

} // namespace kloostpath
