#include "moments.hpp"

#include <algorithm>
#include <cmath>

#include "dft.hpp"
#include "klooster.hpp"
#include "parallel.hpp"
#include "paths.hpp"

namespace kloostpath {

namespace {

std::complex<double> int_pow(std::complex<double> z, unsigned e) {
    std::complex<double> r{1.0, 0.0};
    while (e) {
        if (e & 1) r *= z;
        z *= z;
        e >>= 1;
    }
    return r;
}

std::uint64_t binomial_u64(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Path values at one time t for every frequency a, through a single DFT:
// value(a) = (1-lambda) V_i(a) + lambda V_{i+1}(a) where V_i is the prefix
// sum over the first i units and V_{i+1} adds one explicit extra term.
std::vector<std::complex<double>> path_values_sweep(const PrimePowerModulus& m,
                                                    std::uint64_t b0, double t) {
    const std::uint64_t q = m.q();
    const std::uint64_t phi = m.phi();
    double u = t * static_cast<double>(phi - 1);
    auto idx = static_cast<std::uint64_t>(u);
    if (idx >= phi - 1) idx = phi - 2;
    double lambda = u - static_cast<double>(idx);
    // prefix over the first idx+1 units, extra term at unit idx+2 (1-based)
    std::uint64_t cut = m.nth_unit(idx + 1);
    std::uint64_t extra = m.nth_unit(idx + 2);

    std::vector<std::complex<double>> g(q, {0.0, 0.0});
    for (std::uint64_t x = 1; x <= cut; ++x) {
        if (x % m.p() == 0) continue;
        g[x] = unit_phase(m.mul(b0, m.inv(x)), q);
    }
    inverse_dft(g); // g[a] = V_{idx+1}(a) * sqrt(q)

    const double norm = 1.0 / std::sqrt(static_cast<double>(q));
    const std::complex<double> extra_phase = unit_phase(m.mul(b0, m.inv(extra)), q);
    std::vector<std::complex<double>> values(q);
    for (std::uint64_t a = 0; a < q; ++a) {
        std::complex<double> base = g[a] * norm;
        std::complex<double> step = unit_phase(m.mul(a, extra), q) * extra_phase * norm;
        values[a] = base + lambda * step;
    }
    return values;
}

} // namespace

unsigned MomentSpec::total_degree() const {
    unsigned total = 0;
    for (unsigned e : conj_exp) total += e;
    for (unsigned e : plain_exp) total += e;
    return total;
}

std::complex<double> empirical_moment(const PrimePowerModulus& m,
                                      const MomentSpec& spec) {
    const std::size_t k = spec.t.size();
    if (spec.conj_exp.size() != k || spec.plain_exp.size() != k)
        throw UsageError("moment spec arrays must have equal length");
    if (spec.total_degree() > 12)
        throw UsageError("total moment degree capped at 12");
    for (double t : spec.t)
        if (!(t >= 0.0 && t <= 1.0)) throw UsageError("moment times must lie in [0,1]");
    std::uint64_t b0 = spec.b0 % m.q();
    if (!m.is_unit(b0)) throw NotAUnit("moment spec requires b0 a unit");

    if (spec.ensemble == Ensemble::RearrangedSquares) {
        if (m.n() < 3) throw UnsupportedDepth("rearranged ensemble requires n >= 3");
        std::uint64_t inv_b0 = m.inv(b0);
        std::complex<double> acc{0.0, 0.0};
        std::uint64_t members = 0;
        for (std::uint64_t a = 1; a < m.q(); ++a) {
            if (!m.is_unit(a) || m.legendre(m.mul(a, inv_b0)) != 1) continue;
            KloostermanPath path = rearranged_vertices(m, a, b0);
            std::complex<double> prod{1.0, 0.0};
            for (std::size_t i = 0; i < k; ++i) {
                std::complex<double> v = path_eval(path, spec.t[i]);
                prod *= int_pow(std::conj(v), spec.conj_exp[i]) * int_pow(v, spec.plain_exp[i]);
            }
            acc += prod;
            ++members;
        }
        return acc / static_cast<double>(members);
    }

    // standard paths: batch the per-a values with one DFT per time
    std::vector<std::vector<std::complex<double>>> sweeps;
    sweeps.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        sweeps.push_back(path_values_sweep(m, b0, spec.t[i]));

    const bool class_only = spec.ensemble == Ensemble::ClassA1;
    std::uint64_t a1 = spec.a1 % m.p();
    if (class_only && a1 == 0) throw NotAUnit("class ensemble requires a1 a unit mod p");

    std::uint64_t members = class_only ? m.q() / m.p() : m.phi();
    auto acc = parallel_sum<std::complex<double>>(
        0, members, [&](std::uint64_t lo, std::uint64_t hi) {
            std::complex<double> s{0.0, 0.0};
            for (std::uint64_t i = lo; i < hi; ++i) {
                std::uint64_t a = class_only ? a1 + i * m.p() : m.nth_unit(i + 1);
                std::complex<double> prod{1.0, 0.0};
                for (std::size_t j = 0; j < k; ++j) {
                    std::complex<double> v = sweeps[j][a];
                    prod *= int_pow(std::conj(v), spec.conj_exp[j]) *
                            int_pow(v, spec.plain_exp[j]);
                }
                s += prod;
            }
            return s;
        });
    return acc / static_cast<double>(members);
}

unsigned ShiftMultiset::l1() const {
    unsigned total = 0;
    for (const auto& [tau, mult] : mu) total += mult;
    return total;
}

std::vector<std::uint64_t> ShiftMultiset::support() const {
    std::vector<std::uint64_t> out;
    for (const auto& [tau, mult] : mu)
        if (mult >= 1) out.push_back(tau);
    return out;
}

double ShiftMultiset::min_distance(const PrimePowerModulus& m) const {
    auto supp = support();
    if (supp.size() < 2) return 1.0;
    unsigned max_ord = 0;
    for (std::size_t i = 0; i < supp.size(); ++i)
        for (std::size_t k = i + 1; k < supp.size(); ++k) {
            Valuation v = m.ord(m.sub(supp[i] % m.q(), supp[k] % m.q()));
            max_ord = std::max(max_ord, v.infinite ? m.n() : v.value);
        }
    return std::pow(static_cast<double>(m.p()), -static_cast<double>(max_ord));
}

double sum_of_products_main_term(const ShiftMultiset& mu) {
    double main = 1.0;
    for (const auto& [tau, mult] : mu.mu) {
        if (mult == 0) continue;
        if (mult % 2 != 0) return 0.0;
        main *= static_cast<double>(binomial_u64(mult, mult / 2)) /
                std::pow(2.0, static_cast<double>(mult));
    }
    return main;
}

double sum_of_products(const PrimePowerModulus& m, const ShiftMultiset& mu,
                       std::uint64_t a1, std::uint64_t b0, const SqrtBranch& br) {
    if (m.n() < 2) throw UnsupportedDepth("sum_of_products requires n >= 2");
    a1 %= m.p();
    b0 %= m.q();
    if (a1 == 0 || !m.is_unit(b0))
        throw NotAUnit("sum_of_products requires unit a1, b0");

    std::vector<std::pair<std::uint64_t, unsigned>> entries;
    for (const auto& [tau, mult] : mu.mu)
        if (mult >= 1) entries.emplace_back(tau % m.q(), mult);

    for (const auto& [tau, mult] : entries) {
        std::uint64_t cls = (a1 + m.p() - tau % m.p()) % m.p();
        if (m.legendre(m.mul(cls, b0)) != 1) return 0.0;
    }

    const std::uint64_t members = m.q() / m.p();
    double avg = parallel_sum<double>(
        0, members, [&](std::uint64_t lo, std::uint64_t hi) {
            double s = 0.0;
            for (std::uint64_t i = lo; i < hi; ++i) {
                std::uint64_t a = a1 + i * m.p();
                double prod = 1.0;
                for (const auto& [tau, mult] : entries) {
                    double kl = kloosterman_closed(m, m.sub(a, tau), b0, br);
                    double power = 1.0;
                    for (unsigned e = 0; e < mult; ++e) power *= kl;
                    prod *= power;
                }
                s += prod;
            }
            return s;
        });
    avg /= static_cast<double>(members);
    return avg / std::pow(2.0, static_cast<double>(mu.l1()));
}

std::vector<std::pair<std::complex<double>, ShiftPhase>> sop_decompose(
    const PrimePowerModulus& m, const ShiftMultiset& mu, std::uint64_t a1,
    std::uint64_t b0, const SqrtBranch& br) {
    a1 %= m.p();
    b0 %= m.q();
    if (a1 == 0 || !m.is_unit(b0))
        throw NotAUnit("sop_decompose requires unit a1, b0");

    std::vector<std::uint64_t> shifts;
    std::vector<unsigned> mults;
    for (const auto& [tau, mult] : mu.mu)
        if (mult >= 1) {
            shifts.push_back(tau % m.q());
            mults.push_back(mult);
        }

    // residue-class condition for every supported shift
    std::vector<int> jacobi_sign(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        std::uint64_t cls = (a1 + m.p() - shifts[i] % m.p()) % m.p();
        if (m.legendre(m.mul(cls, b0)) != 1)
            throw PreconditionFailed("sop_decompose requires every (a1-tau)b0 a residue class");
        // Jacobi symbol of ((a1-tau)b0)_{1/2}: determined by the branch choice mod p
        std::uint64_t root_class = br.s(m.mul(cls, b0) % m.p());
        int leg = m.legendre(root_class);
        jacobi_sign[i] = (leg == -1 && (m.n() & 1)) ? -1 : 1;
    }

    const bool eps_is_one = (m.n() % 2 == 0) || (m.p() % 4 == 1);
    const std::complex<double> eps_pn = eps_is_one ? std::complex<double>{1.0, 0.0}
                                                   : std::complex<double>{0.0, 1.0};
    const double scale = std::pow(2.0, -static_cast<double>(mu.l1()));

    std::vector<std::pair<std::complex<double>, ShiftPhase>> terms;
    std::vector<unsigned> u(shifts.size(), 0);
    while (true) {
        std::complex<double> coeff{scale, 0.0};
        std::vector<std::int64_t> eps(shifts.size());
        for (std::size_t i = 0; i < shifts.size(); ++i) {
            int exponent = static_cast<int>(mults[i]) - 2 * static_cast<int>(u[i]);
            coeff *= static_cast<double>(binomial_u64(mults[i], u[i]));
            double jac = 1.0;
            for (unsigned e = 0; e < mults[i]; ++e) jac *= jacobi_sign[i];
            coeff *= jac;
            // eps_{p^n}^{exponent} with |eps| = 1
            std::complex<double> ep = exponent >= 0 ? eps_pn : std::conj(eps_pn);
            for (int e = 0; e < std::abs(exponent); ++e) coeff *= ep;
            // the real-part expansion doubles the phase weight
            eps[i] = 2 * static_cast<std::int64_t>(exponent);
        }
        terms.emplace_back(coeff, ShiftPhase(m, br, shifts, eps, b0));

        std::size_t pos = 0;
        while (pos < u.size() && u[pos] == mults[pos]) {
            u[pos] = 0;
            ++pos;
        }
        if (pos == u.size()) break;
        ++u[pos];
    }
    return terms;
}

double arcsine_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + std::asin(0.5 * x) / 3.141592653589793238462643383279;
}

EquidistResult equidist_stat(const PrimePowerModulus& m, std::uint64_t a1,
                             std::uint64_t b0, const SqrtBranch& br) {
    if (m.n() < 2) throw UnsupportedDepth("equidist_stat requires n >= 2");
    a1 %= m.p();
    b0 %= m.q();
    if (a1 == 0 || !m.is_unit(b0))
        throw NotAUnit("equidist_stat requires unit a1, b0");

    EquidistResult result;
    result.degenerate = m.legendre(m.mul(a1, b0)) != 1;

    const std::uint64_t members = m.q() / m.p();
    std::vector<double> values(members);
    // per-chunk fill, deterministic layout
    parallel_sum<int>(0, members, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i)
            values[i] = kloosterman_closed(m, a1 + i * m.p(), b0, br);
        return 0;
    });
    std::sort(values.begin(), values.end());

    double ks = 0.0;
    const double n_inv = 1.0 / static_cast<double>(members);
    for (std::uint64_t i = 0; i < members; ++i) {
        double cdf = arcsine_cdf(values[i]);
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) * n_inv));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) * n_inv - cdf));
    }
    result.ks = ks;
    result.samples = members;
    return result;
}

DomainCount domain_count(const PrimePowerModulus& m,
                         const std::vector<std::uint64_t>& shifts,
                         std::uint64_t b0) {
    b0 %= m.q();
    if (!m.is_unit(b0)) throw NotAUnit("domain_count requires b0 a unit");

    std::vector<std::uint64_t> tbar;
    for (std::uint64_t tau : shifts) {
        std::uint64_t cls = tau % m.p();
        if (std::find(tbar.begin(), tbar.end(), cls) == tbar.end())
            tbar.push_back(cls);
    }

    // the class condition only depends on a mod p; a itself need not be a unit
    std::uint64_t good = 0;
    for (std::uint64_t a = 0; a < m.p(); ++a) {
        bool ok = true;
        for (std::uint64_t cls : tbar) {
            std::uint64_t diff = (a + m.p() - cls) % m.p();
            if (m.legendre(m.mul(diff, b0)) != 1) { ok = false; break; }
        }
        if (ok) ++good;
    }

    DomainCount out;
    out.exact = good * (m.q() / m.p());
    out.tbar_size = static_cast<unsigned>(tbar.size());
    out.predicted = static_cast<double>(m.phi()) /
                    std::pow(2.0, static_cast<double>(tbar.size()));
    return out;
}

} // namespace kloostpath
