#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "modring.hpp"
#include "statphase.hpp"

namespace kloostpath {

enum class Ensemble { ClassA1, AllUnits, RearrangedSquares };

// Complex moment of path values: evaluation times t_i with conjugate
// exponents m_i and plain exponents n_i, averaged over the ensemble.
struct MomentSpec {
    std::vector<double> t;
    std::vector<unsigned> conj_exp;  // m_i
    std::vector<unsigned> plain_exp; // n_i
    std::uint64_t a1 = 1;
    std::uint64_t b0 = 1;
    Ensemble ensemble = Ensemble::ClassA1;

    unsigned total_degree() const;
};

std::complex<double> empirical_moment(const PrimePowerModulus& m,
                                      const MomentSpec& spec);

// Shift multiset tau -> multiplicity defining a moment of shifted
// Kloosterman sums.
struct ShiftMultiset {
    std::map<std::uint64_t, unsigned> mu;

    unsigned l1() const;
    std::vector<std::uint64_t> support() const;
    // Minimal p-adic distance min ||tau - tau'||_p = p^{-max ord} over
    // distinct support pairs; returns 1.0 for fewer than two shifts.
    double min_distance(const PrimePowerModulus& m) const;
};

// Normalized moment of shifted Kloosterman sums
//   2^{-||mu||_1} p^{-(n-1)} sum_{a = a1 (p)} prod_tau Kl_{p^n}(a-tau, b0)^{mu(tau)}
// with the closed-form evaluation; exactly 0 when some (a1-tau)b0 is not a
// residue class mod p.  The 2^{-||mu||_1} scale matches the main-term
// normalization prod_tau binom(mu,mu/2)/2^mu of the shifted-moment theorem.
double sum_of_products(const PrimePowerModulus& m, const ShiftMultiset& mu,
                       std::uint64_t a1, std::uint64_t b0, const SqrtBranch& br);

// Main term prod_tau delta_{2|mu} 2^{-mu} binom(mu, mu/2).
double sum_of_products_main_term(const ShiftMultiset& mu);

// Decomposition into complete exponential sums: pairs (coefficient, phase)
// with sum of coefficient * shifted_exp_sum(phase, a1) reproducing
// sum_of_products.  The phase weights are 2(mu(tau) - 2 u_tau).
std::vector<std::pair<std::complex<double>, ShiftPhase>> sop_decompose(
    const PrimePowerModulus& m, const ShiftMultiset& mu, std::uint64_t a1,
    std::uint64_t b0, const SqrtBranch& br);

// Kolmogorov-Smirnov distance of the ensemble {Kl_{p^n}(a, b0) : a = a1 (p)}
// from the arcsine-type law F_mu(x) = 1/2 + arcsin(x/2)/pi.  Degenerate
// ensembles (residue-class condition fails, all values 0) are flagged.
struct EquidistResult {
    double ks = 0.0;
    bool degenerate = false;
    std::uint64_t samples = 0;
};

EquidistResult equidist_stat(const PrimePowerModulus& m, std::uint64_t a1,
                             std::uint64_t b0, const SqrtBranch& br);

double arcsine_cdf(double x); // F_mu

// |(Z/p^nZ)^[T]| exactly (the condition only depends on a mod p, so the
// count is (#good classes mod p) * p^{n-1}) next to the square-root-counting
// prediction phi(p^n)/2^{|T mod p|}.
struct DomainCount {
    std::uint64_t exact = 0;
    double predicted = 0.0;
    unsigned tbar_size = 0;
};

DomainCount domain_count(const PrimePowerModulus& m,
                         const std::vector<std::uint64_t>& shifts,
                         std::uint64_t b0);

} // namespace kloostpath
