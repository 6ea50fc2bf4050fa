#include "klooster.hpp"

#include <cmath>

#include "dft.hpp"
#include "parallel.hpp"

namespace kloostpath {

std::complex<double> kloosterman_naive(const PrimePowerModulus& m,
                                       std::uint64_t a, std::uint64_t b) {
    b %= m.q();
    if (!m.is_unit(b)) throw NotAUnit("kloosterman_naive requires b a unit");
    a %= m.q();
    const std::uint64_t q = m.q();
    auto sum = parallel_sum<std::complex<double>>(
        1, q, [&](std::uint64_t lo, std::uint64_t hi) {
            std::complex<double> s{0.0, 0.0};
            for (std::uint64_t x = lo; x < hi; ++x) {
                if (x % m.p() == 0) continue;
                std::uint64_t phase = m.add(m.mul(a, x), m.mul(b, m.inv(x)));
                s += unit_phase(phase, q);
            }
            return s;
        });
    return sum / std::sqrt(static_cast<double>(q));
}

double kloosterman_closed(const PrimePowerModulus& m, std::uint64_t a,
                          std::uint64_t b, const SqrtBranch& br) {
    if (m.n() < 2)
        throw UnsupportedDepth("closed form requires n >= 2; use the naive sum for n = 1");
    b %= m.q();
    if (!m.is_unit(b)) throw NotAUnit("kloosterman_closed requires b a unit");
    std::uint64_t ab = m.mul(a % m.q(), b);
    if (!m.is_unit(ab) || m.legendre(ab) != 1) return 0.0;

    std::uint64_t y = br.sqrt(ab);
    int jac = m.jacobi(y); // +-1, y is a unit
    double theta = kTwoPi * (static_cast<double>(m.add(y, y)) / static_cast<double>(m.q()));
    bool eps_is_one = (m.n() % 2 == 0) || (m.p() % 4 == 1);
    // Re[e(theta)] or Re[i e(theta)]
    double re = eps_is_one ? std::cos(theta) : -std::sin(theta);
    return 2.0 * jac * re;
}

std::vector<std::complex<double>> kloosterman_naive_sweep(const PrimePowerModulus& m,
                                                          std::uint64_t b) {
    b %= m.q();
    if (!m.is_unit(b)) throw NotAUnit("sweep requires b a unit");
    const std::uint64_t q = m.q();
    std::vector<std::complex<double>> g(q, {0.0, 0.0});
    for (std::uint64_t x = 1; x < q; ++x) {
        if (x % m.p() == 0) continue;
        g[x] = unit_phase(m.mul(b, m.inv(x)), q);
    }
    inverse_dft(g); // g[c] = sum_x e_q(b inv(x)) e_q(c x)
    double norm = 1.0 / std::sqrt(static_cast<double>(q));
    for (auto& v : g) v *= norm;
    return g;
}

SummandCensus summand_census(const PrimePowerModulus& m, std::uint64_t a,
                             std::uint64_t b) {
    a %= m.q();
    b %= m.q();
    if (!m.is_unit(a) || !m.is_unit(b))
        throw NotAUnit("summand_census requires unit a, b");
    SummandCensus census;
    for (std::uint64_t x = 1; x < m.q(); ++x) {
        if (x % m.p() == 0) continue;
        std::uint64_t u = m.add(m.mul(a, x), m.mul(b, m.inv(x)));
        ++census.counts[u];
        ++census.total;
    }
    census.distinct = census.counts.size();
    return census;
}

std::uint64_t stationary_value_count(const PrimePowerModulus& m, std::uint64_t u) {
    u %= m.q();
    std::uint64_t count = 0;
    for (std::uint64_t x = 1; x < m.q(); ++x) {
        if (x % m.p() == 0) continue;
        if (m.add(x, m.inv(x)) == u) ++count;
    }
    return count;
}

MultiplicityReport multiplicity_check(const PrimePowerModulus& m, unsigned kappa) {
    if (kappa < 1 || 2 * kappa >= m.n())
        throw UsageError("multiplicity_check requires 1 <= kappa < n/2");

    MultiplicityReport report;
    report.expected = 2 * m.p_power(kappa);

    // one full census of x + inv(x), then read off the targeted classes
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    counts.reserve(m.q() / 2);
    for (std::uint64_t x = 1; x < m.q(); ++x) {
        if (x % m.p() == 0) continue;
        ++counts[m.add(x, m.inv(x))];
    }

    const std::uint64_t pk2 = m.p_power(2 * kappa);
    const std::uint64_t vmod = m.p_power(m.n() - 2 * kappa);
    report.pass = true;
    for (std::uint64_t v = 1; v < vmod; ++v) {
        if (v % m.p() == 0) continue;
        for (int sign : {+1, -1}) {
            std::uint64_t base = sign > 0 ? 2 : m.q() - 2;
            std::uint64_t u = m.add(base, m.mul(pk2 % m.q(), v));
            auto it = counts.find(u);
            std::uint64_t c = it == counts.end() ? 0 : it->second;
            ++report.classes_checked;
            // count is 2p^kappa exactly when (u^2-4)/p^{2kappa} is a residue
            // class mod p, and 0 otherwise
            std::uint64_t disc = m.sub(m.mul(u, u), 4);
            std::uint64_t expect =
                m.legendre(disc / pk2) == 1 ? report.expected : 0;
            if (c == report.expected) ++report.attained;
            if (c == 0) ++report.vanishing;
            if (c != expect) {
                report.pass = false;
                if (report.counterexamples.size() < 16)
                    report.counterexamples.push_back({u, c, expect});
            }
        }
    }
    return report;
}

} // namespace kloostpath
