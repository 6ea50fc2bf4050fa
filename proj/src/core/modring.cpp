#include "modring.hpp"

#include <algorithm>
#include <mutex>

namespace kloostpath {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace

bool is_prime_u64(std::uint64_t x) {
    if (x < 2) return false;
    for (std::uint64_t sp : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (x % sp == 0) return x == sp;
    }
    std::uint64_t d = x - 1;
    unsigned s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t y = powmod_u64(a, d, x);
        if (y == 1 || y == x - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            y = mulmod_u64(y, y, x);
            if (y == x - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

PrimePowerModulus::PrimePowerModulus(std::uint64_t p, unsigned n) : p_(p), n_(n) {
    if (p < 3 || p % 2 == 0 || !is_prime_u64(p))
        throw UsageError("modulus base must be an odd prime >= 3");
    if (n < 1) throw UsageError("modulus exponent must be >= 1");

    constexpr std::uint64_t kMaxQ = 1ull << 62; // q^2 must fit the widest native width
    unsigned __int128 q = 1;
    p_pows_.reserve(n + 1);
    p_pows_.push_back(1);
    for (unsigned i = 0; i < n; ++i) {
        q *= p;
        if (q > kMaxQ) throw OverflowError("p^n exceeds the supported modulus width");
        p_pows_.push_back(static_cast<std::uint64_t>(q));
    }
    q_ = static_cast<std::uint64_t>(q);
    phi_ = q_ / p_ * (p_ - 1);
}

std::uint64_t PrimePowerModulus::reduce_signed(std::int64_t x) const {
    std::int64_t r = x % static_cast<std::int64_t>(q_);
    if (r < 0) r += static_cast<std::int64_t>(q_);
    return static_cast<std::uint64_t>(r);
}

std::uint64_t PrimePowerModulus::add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b; // q < 2^62, no wrap
    return s >= q_ ? s - q_ : s;
}

std::uint64_t PrimePowerModulus::sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + q_ - b;
}

std::uint64_t PrimePowerModulus::pow(std::uint64_t a, std::uint64_t e) const {
    return powmod_u64(a % q_, e, q_);
}

std::uint64_t PrimePowerModulus::inv(std::uint64_t x) const {
    x %= q_;
    if (x % p_ == 0) throw NotAUnit("inverse of a non-unit mod p^n");
    std::int64_t t0 = 0, t1 = 1;
    std::uint64_t r0 = q_, r1 = x;
    while (r1 != 0) {
        std::uint64_t qt = r0 / r1;
        std::uint64_t r2 = r0 - qt * r1;
        r0 = r1; r1 = r2;
        std::int64_t t2 = t0 - static_cast<std::int64_t>(qt) * t1;
        t0 = t1; t1 = t2;
    }
    return t0 < 0 ? static_cast<std::uint64_t>(t0 + static_cast<std::int64_t>(q_))
                  : static_cast<std::uint64_t>(t0);
}

Valuation PrimePowerModulus::ord(std::uint64_t x) const {
    x %= q_;
    if (x == 0) return {n_, true};
    unsigned v = 0;
    while (x % p_ == 0) { x /= p_; ++v; }
    return {v, false};
}

int PrimePowerModulus::legendre(std::uint64_t x) const {
    std::uint64_t r = x % p_;
    if (r == 0) return 0;
    std::uint64_t e = powmod_u64(r, (p_ - 1) / 2, p_);
    return e == 1 ? 1 : -1;
}

int PrimePowerModulus::jacobi(std::uint64_t x) const {
    int l = legendre(x);
    if (l == 0) return 0;
    return (l == -1 && (n_ & 1)) ? -1 : 1;
}

std::uint64_t PrimePowerModulus::nth_unit(std::uint64_t m) const {
    // units come in blocks of p-1 per p consecutive integers
    std::uint64_t block = (m - 1) / (p_ - 1);
    std::uint64_t rest = (m - 1) % (p_ - 1);
    return block * p_ + rest + 1;
}

SqrtBranch::SqrtBranch(const PrimePowerModulus& m) : m_(&m) {
    const std::uint64_t p = m.p();
    if (p > (1ull << 24)) throw UsageError("branch table limited to p < 2^24");
    s_table_.assign(p, 0);
    for (std::uint64_t u = 1; u <= (p - 1) / 2; ++u)
        s_table_[(u * u) % p] = u;
    inv2_ = m.inv(2);
}

SqrtBranch::SqrtBranch(const PrimePowerModulus& m, const std::vector<std::uint64_t>& choice)
    : m_(&m) {
    const std::uint64_t p = m.p();
    if (choice.size() != p)
        throw UsageError("choice table must have p entries");
    s_table_.assign(p, 0);
    for (std::uint64_t r = 1; r < p; ++r) {
        if (m.legendre(r) != 1) continue;
        std::uint64_t u = choice[r] % p;
        if ((u * u) % p != r)
            throw UsageError("choice table entry is not a square root of its class");
        s_table_[r] = u;
    }
    inv2_ = m.inv(2);
}

std::uint64_t SqrtBranch::s(std::uint64_t r) const {
    std::uint64_t rp = r % m_->p();
    if (rp == 0) throw NotAUnit("square-root branch of a non-unit");
    std::uint64_t u = s_table_[rp];
    if (u == 0) throw NotASquare("square-root branch of a non-residue class");
    return u;
}

std::uint64_t SqrtBranch::lift(std::uint64_t x) const {
    // Newton iteration u <- (u + x/u)/2 doubles p-adic precision per step.
    std::uint64_t u = s(x);
    unsigned prec = 1;
    while (prec < m_->n()) {
        u = m_->mul(m_->add(u, m_->mul(x, m_->inv(u))), inv2_);
        prec *= 2;
    }
    return u;
}

std::uint64_t SqrtBranch::sqrt_uncached(std::uint64_t x) const {
    x %= m_->q();
    if (!m_->is_unit(x)) throw NotAUnit("square root of a non-unit");
    return lift(x);
}

std::uint64_t SqrtBranch::sqrt(std::uint64_t x) const {
    x %= m_->q();
    if (!m_->is_unit(x)) throw NotAUnit("square root of a non-unit");
    {
        std::shared_lock lock(memo_mutex_);
        auto it = memo_.find(x);
        if (it != memo_.end()) return it->second;
    }
    std::uint64_t u = lift(x);
    {
        std::unique_lock lock(memo_mutex_);
        if (memo_.size() < kMemoCap) memo_.emplace(x, u);
    }
    return u;
}

std::uint64_t SqrtBranch::sqrt_pow(std::uint64_t x, std::int64_t k) const {
    std::uint64_t u = sqrt(x);
    if (k < 0) {
        u = m_->inv(u);
        k = -k;
    }
    return m_->pow(u, static_cast<std::uint64_t>(k));
}

} // namespace kloostpath
