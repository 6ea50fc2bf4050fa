#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "modring.hpp"

namespace kloostpath {

enum class PathVariant { Standard, Renormalized, Rearranged };

// Polygonal Kloosterman path: ordered partial sums of the normalized sum.
// Standard/Renormalized paths carry phi(p^n) vertices (they share the same
// partial sums and differ only in the t-parametrization); Rearranged paths
// carry phi(p^{n-1}) vertices of p-term groups.
struct KloostermanPath {
    const PrimePowerModulus* modulus = nullptr;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    PathVariant variant = PathVariant::Standard;
    std::vector<std::complex<double>> vertices;
};

// Prefix sums of e_{p^n}(ax + b inv(x))/p^{n/2} over units x ascending.
KloostermanPath path_vertices(const PrimePowerModulus& m, std::uint64_t a,
                              std::uint64_t b);

// Piecewise-linear (Standard/Rearranged) or step (Renormalized) evaluation
// at t in [0, 1].
std::complex<double> path_eval(const KloostermanPath& path, double t);

// Renormalized path value by direct summation: for t in the k-th interval
// ((k-1)/p^{n-1}, k/p^{n-1}], the sum over units x <= phi(p^n) t + k - 1.
// The empty sum at t = 0 is 0.
std::complex<double> renormalized_eval(const PrimePowerModulus& m, std::uint64_t a,
                                       std::uint64_t b, double t);

// Rearranged path: prefix sums of the p-term groups
// f_{p^n}(x;(a,b)) = sum_{k mod p} e_{p^n}(a(x+kp^{n-1}) + b inv(x+kp^{n-1}))
// over units x <= p^{n-1}, normalized by p^{n/2}.  Requires n >= 3.
KloostermanPath rearranged_vertices(const PrimePowerModulus& m, std::uint64_t a,
                                    std::uint64_t b);

// Completion coefficients: alpha by the closed geometric form, beta the
// limiting Fourier coefficient (e(ht)-1)/(2 pi i h), with beta(0;t) = t.
struct CompletionCoefficient {
    std::int64_t h = 0;
    double t = 0.0;
    std::complex<double> alpha;
    std::complex<double> beta;
};

// Index k of the renormalization interval containing t in (0,1], and the
// summation limit floor(x_k(t)).
std::uint64_t completion_cut(const PrimePowerModulus& m, double t);
std::complex<double> completion_alpha(const PrimePowerModulus& m, double t,
                                      std::int64_t h);
std::complex<double> completion_beta(double t, std::int64_t h);
std::vector<CompletionCoefficient> completion_coeffs(const PrimePowerModulus& m,
                                                     double t, std::int64_t h_min,
                                                     std::int64_t h_max);

// Residual of the completion identity
// | renorm(t) - p^{-n/2} sum_h alpha(h;t) Kl_closed(a-h, b) |,
// the h-sum restricted to (a-h)b a residue class mod p (the other terms
// vanish by the closed-form evaluation).  Exact in exact arithmetic.
double completion_identity_check(const PrimePowerModulus& m, std::uint64_t a,
                                 std::uint64_t b, double t, const SqrtBranch& br);

// Normalized incomplete sum over units x in [x0, x1].
std::complex<double> incomplete_sum(const PrimePowerModulus& m, std::uint64_t a,
                                    std::uint64_t b, std::uint64_t x0,
                                    std::uint64_t x1);

enum class PathFormat { Csv, Json, Svg };

struct SvgOptions {
    bool decimate = true;           // display-only decimation above the cap
    std::size_t decimate_cap = 100000;
};

void export_path(const KloostermanPath& path, PathFormat format, std::ostream& out,
                 const SvgOptions& svg = {});

} // namespace kloostpath
