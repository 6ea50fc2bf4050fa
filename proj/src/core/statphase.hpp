#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "modring.hpp"

namespace kloostpath {

// A phase f : X -> Z/p^nZ with a discrete derivative system.  The domain X
// is given by a predicate and must be invariant under translation by
// p^{kappa0}; f, f1 (and optionally f2) satisfy
//   f(x + p^k t) = f(x) + f1(x) p^k t                      (mod p^{2k})
//   f(x + p^k t) = f(x) + f1(x) p^k t + inv(2) f2(x) p^{2k} t^2  (mod p^{2k+1})
// for k >= kappa0.  Phases are supplied as callables; no polynomial model is
// assumed.
struct DifferentiablePhase {
    unsigned kappa0 = 1;
    std::function<bool(std::uint64_t)> in_domain;
    std::function<std::uint64_t(std::uint64_t)> f;
    std::function<std::uint64_t(std::uint64_t)> f1;
    std::function<std::uint64_t(std::uint64_t)> f2; // empty if unavailable
};

// Direct oracle: sum of e(f(x)/p^n) over the whole domain.
std::complex<double> phase_full_sum(const PrimePowerModulus& m,
                                    const DifferentiablePhase& phase);

// First stationary-phase reduction: for kappa >= max(kappa0, n/2),
//   sum_X e(f/p^n) = p^{n-kappa} * sum over classes x mod p^kappa in X with
//                    f1(x) = 0 (mod p^{n-kappa}) of e(f(x)/p^n).
// The differentiability contract is spot-checked; violations raise
// InvalidPhase.
std::complex<double> reduce_sum_linear(const PrimePowerModulus& m,
                                       const DifferentiablePhase& phase,
                                       unsigned kappa);

// Second (Gauss-sum) reduction, n = 2 kappa + rho with rho in {0,1}:
//   sum_X e(f/p^n) = p^{n/2} * sum over critical classes x0 (f1 = 0 mod
//   p^kappa) of eps(2 f2(x0), p^rho) e((f(x0) - inv(2 f2(x0)) f1(x0)^2)/p^n).
// f2 must be unit-valued on the domain.
std::complex<double> reduce_sum_quadratic(const PrimePowerModulus& m,
                                          const DifferentiablePhase& phase,
                                          unsigned kappa);

// Hensel lifting with controlled singularity: given f(a) = 0 (mod p^j) and
// p^rho || f1(a) with j >= min(2 rho + 1, rho + kappa0), there is a unique
// t mod p^{n-j} with f(a + t p^{j-rho}) = 0 (mod p^n).
struct HenselReport {
    std::uint64_t shift = 0;        // the unique t mod p^{n-j}
    std::uint64_t root = 0;         // a + t p^{j-rho} mod p^n
    bool neighborhood_verified = false;
    std::uint64_t neighbors_checked = 0;
};

HenselReport hensel_lift_singular(const PrimePowerModulus& m,
                                  const std::function<std::uint64_t(std::uint64_t)>& f,
                                  const std::function<std::uint64_t(std::uint64_t)>& f1,
                                  unsigned kappa0, std::uint64_t a, unsigned j,
                                  unsigned rho);

// binom(1/2, j) as an exact element of Z_p reduced mod p^n:
// value = p^val * unit.  Always a p-adic integer for odd p.
struct PadicValue {
    unsigned val = 0;
    std::uint64_t unit = 1;   // unit part mod p^n
    std::uint64_t residue = 1; // p^val * unit mod p^n
};

PadicValue half_binomial(const PrimePowerModulus& m, unsigned j);

// The shifted square-root phase f_{T,eps}(a) = sum_tau eps_tau ((a-tau)b0)_{1/2}
// on the domain (Z/p^nZ)^[T] of a with every (a-tau)b0 a unit square.
class ShiftPhase {
public:
    ShiftPhase(const PrimePowerModulus& m, const SqrtBranch& br,
               std::vector<std::uint64_t> shifts, std::vector<std::int64_t> eps,
               std::uint64_t b0);

    const PrimePowerModulus& modulus() const { return *m_; }
    const SqrtBranch& branch() const { return *br_; }
    const std::vector<std::uint64_t>& shifts() const { return shifts_; }
    const std::vector<std::int64_t>& eps() const { return eps_; }
    std::uint64_t b0() const { return b0_; }

    bool in_domain(std::uint64_t a) const;
    std::uint64_t f(std::uint64_t a) const { return taylor(0, a); }

    // Exact Taylor system F_j = sum_tau eps_tau c_j b0^j ((a-tau)b0)_{1/2}^{1-2j}
    // with c_j = (1/2)(1/2 - 1)...(1/2 - j + 1); satisfies
    // F_j(x + p^k t) = F_j(x) + F_{j+1}(x) p^k t (mod p^{min(2k, n)}).
    std::uint64_t taylor(unsigned j, std::uint64_t a) const;

    // Derivative normalization used for singular loci:
    // f^(j)(a) = binom(1/2, j) sum_tau eps_tau ((a-tau)b0)_{1/2}^{1-2j}.
    std::uint64_t derivative(unsigned j, std::uint64_t a) const;

    // View as a generic phase (kappa0 = 1, f2 = F_2).
    DifferentiablePhase phase() const;

    // Shifts carrying a nonzero weight.
    std::vector<std::uint64_t> support() const;

private:
    const PrimePowerModulus* m_;
    const SqrtBranch* br_;
    std::vector<std::uint64_t> shifts_;
    std::vector<std::int64_t> eps_;
    std::uint64_t b0_;
};

// The set <f_{T,eps}, J, p^r> of p^r-singular points of order J intersected
// with the domain, as classes mod p^r.  Exhaustive scan for p^r below the
// threshold, digit-by-digit lifting of surviving classes beyond it.
std::vector<std::uint64_t> singular_locus(const ShiftPhase& sp, unsigned J,
                                          unsigned r);

enum class Emptiness { ProvedEmpty, Inconclusive };

// Vandermonde criterion: with rho1 = max_j ord_p binom(1/2,j),
// rho2 = min ord_p eps over the support and varrho = rho1 + rho2, a point of
// <f, |T|, p^r> forces sum over support pairs of ord_p(tau - tau') >= r - varrho.
// The strict contrapositive is reported; the boundary stays Inconclusive so
// that ProvedEmpty is unconditionally sound.
struct VandermondeReport {
    Emptiness verdict = Emptiness::Inconclusive;
    unsigned rho1 = 0;
    unsigned rho2 = 0;
    unsigned varrho = 0;
    unsigned pair_valuation_sum = 0;
    unsigned r = 0;
};

VandermondeReport vandermonde_emptiness(const ShiftPhase& sp, unsigned r);

// S^{T,eps}_{p^n}(a1, b0) = p^{-(n-1)} sum over a = a1 (mod p) in the domain
// of e(f_{T,eps}(a)/p^n).  Returns exactly 0 when some supported shift fails
// the residue-class condition.  Optionally accelerated by the linear
// stationary-phase reduction.
std::complex<double> shifted_exp_sum(const ShiftPhase& sp, std::uint64_t a1,
                                     bool accelerate = false);

} // namespace kloostpath
