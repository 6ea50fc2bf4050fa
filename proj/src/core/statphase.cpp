#include "statphase.hpp"

#include <algorithm>
#include <cmath>

#include "klooster.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace kloostpath {

namespace {

unsigned ceil_half(unsigned n) { return (n + 1) / 2; }

unsigned ord_int(std::uint64_t p, std::uint64_t x) {
    unsigned v = 0;
    while (x % p == 0) { x /= p; ++v; }
    return v;
}

// Spot check of the differentiability contract on deterministic samples.
void validate_phase(const PrimePowerModulus& m, const DifferentiablePhase& phase,
                    bool quadratic) {
    if (!phase.in_domain || !phase.f || !phase.f1)
        throw InvalidPhase("phase must provide a domain, f and f1");
    if (quadratic && !phase.f2)
        throw InvalidPhase("quadratic reduction requires f2");
    if (phase.kappa0 < 1 || phase.kappa0 > m.n())
        throw InvalidPhase("kappa0 out of range");

    Rng rng(0x9e3779b9u ^ m.q());
    const unsigned samples = 64;
    unsigned found = 0, attempts = 0;
    while (found < samples && attempts < 20000) {
        ++attempts;
        std::uint64_t x = rng.next_below(m.q());
        if (!phase.in_domain(x)) continue;
        ++found;
        std::uint64_t t = rng.next_below(m.q());
        unsigned kappa = phase.kappa0 +
            static_cast<unsigned>(rng.next_below(m.n() - phase.kappa0 + 1));
        std::uint64_t step = m.mul(m.p_power(std::min(kappa, m.n())) % m.q(), t);
        std::uint64_t y = m.add(x, step);

        unsigned prec1 = std::min(2 * kappa, m.n());
        std::uint64_t mod1 = m.p_power(prec1);
        std::uint64_t lhs = phase.f(y);
        std::uint64_t rhs = m.add(phase.f(x), m.mul(phase.f1(x), step));
        if ((m.sub(lhs, rhs)) % mod1 != 0)
            throw InvalidPhase("first-order differentiability check failed");

        if (quadratic) {
            unsigned prec2 = std::min(2 * kappa + 1, m.n());
            std::uint64_t mod2 = m.p_power(prec2);
            std::uint64_t quad =
                m.mul(m.inv(2), m.mul(phase.f2(x), m.mul(step, step)));
            std::uint64_t rhs2 = m.add(rhs, quad);
            if ((m.sub(lhs, rhs2)) % mod2 != 0)
                throw InvalidPhase("second-order differentiability check failed");
        }
    }
    if (found == 0) throw InvalidPhase("phase domain appears to be empty");
}

} // namespace

std::complex<double> phase_full_sum(const PrimePowerModulus& m,
                                    const DifferentiablePhase& phase) {
    return parallel_sum<std::complex<double>>(
        0, m.q(), [&](std::uint64_t lo, std::uint64_t hi) {
            std::complex<double> s{0.0, 0.0};
            for (std::uint64_t x = lo; x < hi; ++x)
                if (phase.in_domain(x)) s += unit_phase(phase.f(x), m.q());
            return s;
        });
}

std::complex<double> reduce_sum_linear(const PrimePowerModulus& m,
                                       const DifferentiablePhase& phase,
                                       unsigned kappa) {
    if (kappa < std::max(phase.kappa0, ceil_half(m.n())) || kappa > m.n())
        throw UsageError("reduce_sum_linear requires max(kappa0, n/2) <= kappa <= n");
    validate_phase(m, phase, false);

    const std::uint64_t pk = m.p_power(kappa);
    const std::uint64_t crit_mod = m.p_power(m.n() - kappa);
    auto sum = parallel_sum<std::complex<double>>(
        0, pk, [&](std::uint64_t lo, std::uint64_t hi) {
            std::complex<double> s{0.0, 0.0};
            for (std::uint64_t x = lo; x < hi; ++x) {
                if (!phase.in_domain(x)) continue;
                if (phase.f1(x) % crit_mod != 0) continue;
                s += unit_phase(phase.f(x), m.q());
            }
            return s;
        });
    return sum * static_cast<double>(crit_mod);
}

std::complex<double> reduce_sum_quadratic(const PrimePowerModulus& m,
                                          const DifferentiablePhase& phase,
                                          unsigned kappa) {
    unsigned rho = m.n() >= 2 * kappa ? m.n() - 2 * kappa : 3;
    if (rho > 1)
        throw UsageError("reduce_sum_quadratic requires n = 2 kappa + rho, rho in {0,1}");
    if (kappa < phase.kappa0)
        throw UsageError("reduce_sum_quadratic requires kappa >= kappa0");
    validate_phase(m, phase, true);

    const std::uint64_t pk = m.p_power(kappa);
    const bool odd_depth = rho == 1;
    const bool p1mod4 = m.p() % 4 == 1;
    auto sum = parallel_sum<std::complex<double>>(
        0, pk, [&](std::uint64_t lo, std::uint64_t hi) {
            std::complex<double> s{0.0, 0.0};
            for (std::uint64_t x = lo; x < hi; ++x) {
                if (!phase.in_domain(x)) continue;
                std::uint64_t d1 = phase.f1(x);
                if (d1 % pk != 0) continue;
                std::uint64_t c = m.mul(2, phase.f2(x));
                if (!m.is_unit(c))
                    throw SingularQuadratic("f2 is not unit-valued at a critical point");
                std::uint64_t corrected = m.sub(phase.f(x), m.mul(m.inv(c), m.mul(d1, d1)));
                std::complex<double> term = unit_phase(corrected, m.q());
                if (odd_depth) {
                    term *= static_cast<double>(m.legendre(c));
                    if (!p1mod4) term *= std::complex<double>{0.0, 1.0};
                }
                s += term;
            }
            return s;
        });
    return sum * std::sqrt(static_cast<double>(m.q()));
}

HenselReport hensel_lift_singular(const PrimePowerModulus& m,
                                  const std::function<std::uint64_t(std::uint64_t)>& f,
                                  const std::function<std::uint64_t(std::uint64_t)>& f1,
                                  unsigned kappa0, std::uint64_t a, unsigned j,
                                  unsigned rho) {
    a %= m.q();
    if (j < 1 || j > m.n() || rho >= m.n())
        throw PreconditionFailed("hensel_lift_singular: j, rho out of range");
    if (f(a) % m.p_power(j) != 0)
        throw PreconditionFailed("hensel_lift_singular: f(a) != 0 (mod p^j)");
    Valuation v1 = m.ord(f1(a));
    if (v1.infinite || v1.value != rho)
        throw PreconditionFailed("hensel_lift_singular: p^rho does not exactly divide f1(a)");
    if (j < std::min(2 * rho + 1, rho + kappa0))
        throw PreconditionFailed("hensel_lift_singular: j < min(2 rho + 1, rho + kappa0)");

    HenselReport report;
    std::uint64_t current = a;
    std::uint64_t shift = 0;
    for (unsigned level = j; level < m.n(); ++level) {
        std::uint64_t val = f(current);
        if (val % m.p_power(level) != 0)
            throw PreconditionFailed("hensel_lift_singular: lifting step left the root family");
        Valuation vc = m.ord(f1(current));
        if (vc.infinite || vc.value != rho)
            throw PreconditionFailed("hensel_lift_singular: derivative valuation drifted");
        std::uint64_t c = (val / m.p_power(level)) % m.p();
        std::uint64_t d_inv = m.inv((f1(current) / m.p_power(rho)) % m.p()) % m.p();
        std::uint64_t t = (m.p() - (c * d_inv) % m.p()) % m.p();
        current = m.add(current, m.mul(t, m.p_power(level - rho) % m.q()));
        shift += t * m.p_power(level - j);
    }
    if (f(current) % m.q() != 0)
        throw PreconditionFailed("hensel_lift_singular: lift did not reach a root mod p^n");

    report.shift = shift % m.p_power(m.n() - j);
    report.root = current;

    // part (1) of the lemma: the whole congruence class a + p^{j-rho} Z keeps
    // f = 0 (mod p^j) and the exact f1 valuation
    const std::uint64_t stride = m.p_power(j - rho);
    const std::uint64_t family = m.q() / stride;
    const std::uint64_t step = family <= 512 ? 1 : family / 512;
    report.neighborhood_verified = true;
    for (std::uint64_t i = 0; i < family; i += step) {
        std::uint64_t b = m.add(a, m.mul(i % m.q(), stride % m.q()));
        ++report.neighbors_checked;
        Valuation vb = m.ord(f1(b));
        if (f(b) % m.p_power(j) != 0 || vb.infinite || vb.value != rho) {
            report.neighborhood_verified = false;
            break;
        }
    }
    return report;
}

PadicValue half_binomial(const PrimePowerModulus& m, unsigned j) {
    if (j > 16) throw UsageError("half_binomial supports j <= 16");
    PadicValue out;
    if (j == 0) {
        out.val = 0;
        out.unit = 1;
        out.residue = 1;
        return out;
    }
    // binom(1/2, j) = prod_{i<j} (1 - 2i) / (2^j j!)
    std::int64_t num = 1;
    for (unsigned i = 0; i < j; ++i) num *= 1 - 2 * static_cast<std::int64_t>(i);
    std::uint64_t num_abs = static_cast<std::uint64_t>(num < 0 ? -num : num);
    bool negative = num < 0;

    std::uint64_t fact = 1;
    for (unsigned i = 2; i <= j; ++i) fact *= i;

    unsigned vn = ord_int(m.p(), num_abs);
    unsigned vd = ord_int(m.p(), fact);
    if (vn < vd) throw UsageError("half_binomial valuation must be non-negative");
    out.val = vn - vd;

    std::uint64_t nu = (num_abs / m.p_power(vn)) % m.q();
    std::uint64_t du = (fact / m.p_power(vd)) % m.q();
    std::uint64_t unit = m.mul(nu, m.inv(du));
    unit = m.mul(unit, m.inv(m.pow(2, j)));
    if (negative) unit = m.neg(unit);
    out.unit = unit;
    out.residue = out.val >= m.n() ? 0 : m.mul(m.p_power(out.val) % m.q(), unit);
    return out;
}

ShiftPhase::ShiftPhase(const PrimePowerModulus& m, const SqrtBranch& br,
                       std::vector<std::uint64_t> shifts, std::vector<std::int64_t> eps,
                       std::uint64_t b0)
    : m_(&m), br_(&br), shifts_(std::move(shifts)), eps_(std::move(eps)), b0_(b0 % m.q()) {
    if (shifts_.size() != eps_.size())
        throw UsageError("shift and weight lists must have equal length");
    if (shifts_.empty() || shifts_.size() > 8)
        throw UsageError("shift phases support 1 <= |T| <= 8");
    if (!m.is_unit(b0_)) throw NotAUnit("shift phase requires b0 a unit");
    for (auto& tau : shifts_) tau %= m.q();
    for (std::size_t i = 0; i < shifts_.size(); ++i)
        for (std::size_t k = i + 1; k < shifts_.size(); ++k)
            if (shifts_[i] == shifts_[k])
                throw UsageError("shifts must be distinct residues");
}

bool ShiftPhase::in_domain(std::uint64_t a) const {
    for (std::uint64_t tau : shifts_)
        if (m_->legendre(m_->mul(m_->sub(a % m_->q(), tau), b0_)) != 1) return false;
    return true;
}

std::uint64_t ShiftPhase::taylor(unsigned j, std::uint64_t a) const {
    a %= m_->q();
    // c_j = (1/2)(1/2-1)...(1/2-j+1) = prod (1-2i) * inv(2)^j
    std::uint64_t cj = 1;
    for (unsigned i = 0; i < j; ++i)
        cj = m_->mul(cj, m_->reduce_signed(1 - 2 * static_cast<std::int64_t>(i)));
    cj = m_->mul(cj, m_->pow(m_->inv(2), j));
    std::uint64_t scale = m_->mul(cj, m_->pow(b0_, j));

    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
        if (eps_[i] == 0) continue;
        std::uint64_t y = m_->mul(m_->sub(a, shifts_[i]), b0_);
        std::uint64_t root = br_->sqrt(y);
        // root^{1-2j} = root * (y^{-1})^j
        std::uint64_t term = m_->mul(root, m_->pow(m_->inv(y), j));
        acc = m_->add(acc, m_->mul(m_->reduce_signed(eps_[i]), term));
    }
    return m_->mul(scale, acc);
}

std::uint64_t ShiftPhase::derivative(unsigned j, std::uint64_t a) const {
    a %= m_->q();
    std::uint64_t coeff = half_binomial(*m_, j).residue;
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
        if (eps_[i] == 0) continue;
        std::uint64_t y = m_->mul(m_->sub(a, shifts_[i]), b0_);
        std::uint64_t root = br_->sqrt(y);
        std::uint64_t term = m_->mul(root, m_->pow(m_->inv(y), j));
        acc = m_->add(acc, m_->mul(m_->reduce_signed(eps_[i]), term));
    }
    return m_->mul(coeff, acc);
}

DifferentiablePhase ShiftPhase::phase() const {
    DifferentiablePhase ph;
    ph.kappa0 = 1;
    ph.in_domain = [this](std::uint64_t a) { return in_domain(a); };
    ph.f = [this](std::uint64_t a) { return taylor(0, a); };
    ph.f1 = [this](std::uint64_t a) { return taylor(1, a); };
    ph.f2 = [this](std::uint64_t a) { return taylor(2, a); };
    return ph;
}

std::vector<std::uint64_t> ShiftPhase::support() const {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < shifts_.size(); ++i)
        if (eps_[i] != 0) out.push_back(shifts_[i]);
    return out;
}

std::vector<std::uint64_t> singular_locus(const ShiftPhase& sp, unsigned J,
                                          unsigned r) {
    const PrimePowerModulus& m = sp.modulus();
    if (J < 1) throw UsageError("singular_locus requires J >= 1");
    if (r > m.n()) throw UsageError("singular_locus requires r <= n");
    if (r == 0) throw UsageError("singular_locus requires r >= 1");

    auto is_singular = [&](std::uint64_t a, unsigned level) {
        std::uint64_t mod = m.p_power(level);
        for (unsigned j = 1; j <= J; ++j)
            if (sp.derivative(j, a) % mod != 0) return false;
        return true;
    };

    constexpr std::uint64_t kScanLimit = 1000000;
    unsigned r0 = r;
    while (r0 > 1 && m.p_power(r0) > kScanLimit) --r0;

    std::vector<std::uint64_t> survivors;
    for (std::uint64_t a = 0; a < m.p_power(r0); ++a) {
        if (!sp.in_domain(a)) continue;
        if (is_singular(a, r0)) survivors.push_back(a);
    }
    // lift surviving classes one p-adic digit at a time
    for (unsigned level = r0 + 1; level <= r; ++level) {
        std::vector<std::uint64_t> next;
        const std::uint64_t stride = m.p_power(level - 1);
        for (std::uint64_t base : survivors)
            for (std::uint64_t d = 0; d < m.p(); ++d) {
                std::uint64_t a = base + d * stride;
                if (is_singular(a, level)) next.push_back(a);
            }
        survivors = std::move(next);
        std::sort(survivors.begin(), survivors.end());
    }
    return survivors;
}

VandermondeReport vandermonde_emptiness(const ShiftPhase& sp, unsigned r) {
    const PrimePowerModulus& m = sp.modulus();
    std::vector<std::uint64_t> supp;
    std::vector<std::int64_t> supp_eps;
    for (std::size_t i = 0; i < sp.shifts().size(); ++i) {
        if (sp.eps()[i] == 0) continue;
        supp.push_back(sp.shifts()[i]);
        supp_eps.push_back(sp.eps()[i]);
    }
    if (supp.size() < 2)
        throw UsageError("vandermonde_emptiness requires two distinct supported shifts");

    VandermondeReport report;
    report.r = r;
    for (unsigned j = 1; j <= supp.size(); ++j)
        report.rho1 = std::max(report.rho1, half_binomial(m, j).val);
    report.rho2 = m.n();
    for (std::int64_t e : supp_eps) {
        std::uint64_t ae = static_cast<std::uint64_t>(e < 0 ? -e : e);
        report.rho2 = std::min(report.rho2, ord_int(m.p(), ae));
    }
    report.varrho = report.rho1 + report.rho2;

    unsigned pair_sum = 0;
    for (std::size_t i = 0; i < supp.size(); ++i)
        for (std::size_t k = i + 1; k < supp.size(); ++k) {
            Valuation v = m.ord(m.sub(supp[i], supp[k]));
            pair_sum += v.infinite ? m.n() : v.value;
        }
    report.pair_valuation_sum = pair_sum;

    // A singular point of order |T| forces sum of pair valuations >= r - varrho;
    // the strict converse below is therefore sound.
    bool empty = r > report.varrho && pair_sum < r - report.varrho;
    report.verdict = empty ? Emptiness::ProvedEmpty : Emptiness::Inconclusive;
    return report;
}

std::complex<double> shifted_exp_sum(const ShiftPhase& sp, std::uint64_t a1,
                                     bool accelerate) {
    const PrimePowerModulus& m = sp.modulus();
    a1 %= m.p();
    if (a1 == 0) throw NotAUnit("shifted_exp_sum requires a1 a unit mod p");

    for (std::size_t i = 0; i < sp.shifts().size(); ++i) {
        if (sp.eps()[i] == 0) continue;
        std::uint64_t cls = (a1 + m.p() - sp.shifts()[i] % m.p()) % m.p();
        if (m.legendre(m.mul(cls, sp.b0())) != 1) return {0.0, 0.0};
    }

    const double norm = static_cast<double>(m.q() / m.p());
    if (accelerate) {
        DifferentiablePhase ph = sp.phase();
        ph.in_domain = [&m, a1](std::uint64_t a) { return a % m.p() == a1; };
        unsigned kappa = std::max(1u, (m.n() + 1) / 2);
        return reduce_sum_linear(m, ph, kappa) / norm;
    }

    const std::uint64_t members = m.q() / m.p();
    auto sum = parallel_sum<std::complex<double>>(
        0, members, [&](std::uint64_t lo, std::uint64_t hi) {
            std::complex<double> s{0.0, 0.0};
            for (std::uint64_t i = lo; i < hi; ++i) {
                std::uint64_t a = a1 + i * m.p();
                s += unit_phase(sp.f(a), m.q());
            }
            return s;
        });
    return sum / norm;
}

} // namespace kloostpath
