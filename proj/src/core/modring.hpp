#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace kloostpath {

// p-adic valuation of a residue class mod p^n.  The zero class has every
// power of p as a divisor, reported as infinite.
struct Valuation {
    unsigned value = 0;
    bool infinite = false;

    bool operator==(const Valuation&) const = default;
};

// The pair (p, n) with q = p^n cached, plus exact ring arithmetic in Z/qZ.
// Residues are canonical representatives in [0, q).  All products go through
// a widening 128-bit multiply, so any q < 2^62 is overflow-free.
class PrimePowerModulus {
public:
    PrimePowerModulus(std::uint64_t p, unsigned n);

    std::uint64_t p() const { return p_; }
    unsigned n() const { return n_; }
    std::uint64_t q() const { return q_; }
    std::uint64_t phi() const { return phi_; }

    std::uint64_t reduce(std::uint64_t x) const { return x % q_; }
    std::uint64_t reduce_signed(std::int64_t x) const;

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : q_ - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(a) * b) % q_);
    }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
    // Inverse mod q; requires gcd(x, p) = 1.
    std::uint64_t inv(std::uint64_t x) const;

    bool is_unit(std::uint64_t x) const { return (x % p_) != 0; }

    // Largest tau <= n with p^tau | x, infinite for the zero class.
    Valuation ord(std::uint64_t x) const;

    // Legendre symbol (x/p) in {-1, 0, +1}.
    int legendre(std::uint64_t x) const;
    // Jacobi symbol (x/p^n) = (x/p)^n.
    int jacobi(std::uint64_t x) const;

    // p^k for k <= n.
    std::uint64_t p_power(unsigned k) const { return p_pows_[k]; }

    // Number of units in [1, x] for 0 <= x <= q.
    std::uint64_t units_up_to(std::uint64_t x) const { return x - x / p_; }
    // Value of the m-th unit (1-based, ascending); requires 1 <= m <= phi.
    std::uint64_t nth_unit(std::uint64_t m) const;

private:
    std::uint64_t p_;
    unsigned n_;
    std::uint64_t q_;
    std::uint64_t phi_;
    std::vector<std::uint64_t> p_pows_;
};

// The fixed branch of the square root mod p^n: a choice function
// s : (Z/pZ)^x2 -> (Z/pZ)^x with s(r)^2 = r, Hensel-lifted to x_{1/2} mod p^n
// with x_{1/2} = s(x mod p) (mod p).  The lifted-root table is lazily
// memoized; lookups are safe for concurrent readers and writers.
class SqrtBranch {
public:
    // Default branch: s(r) is the root in [1, (p-1)/2].
    explicit SqrtBranch(const PrimePowerModulus& m);
    // Custom branch from an explicit table s[r] for r in 1..p-1
    // (entries for non-residues are ignored; residue entries are validated).
    SqrtBranch(const PrimePowerModulus& m, const std::vector<std::uint64_t>& choice);

    const PrimePowerModulus& modulus() const { return *m_; }

    // Choice root mod p for a residue class r mod p; throws NotASquare /
    // NotAUnit when r is not a unit square mod p.
    std::uint64_t s(std::uint64_t r) const;

    // x_{1/2}: requires x a unit with x mod p a quadratic residue.
    std::uint64_t sqrt(std::uint64_t x) const;
    // Same, bypassing the memo table (for one-shot sweeps).
    std::uint64_t sqrt_uncached(std::uint64_t x) const;
    // x_{1/2}^k for k in Z (negative exponents use the inverse root).
    std::uint64_t sqrt_pow(std::uint64_t x, std::int64_t k) const;

    bool is_square_class(std::uint64_t x) const { return m_->legendre(x) == 1; }

private:
    std::uint64_t lift(std::uint64_t x) const;

    const PrimePowerModulus* m_;
    std::vector<std::uint64_t> s_table_; // index r mod p, 0 = not a residue
    std::uint64_t inv2_;
    mutable std::unordered_map<std::uint64_t, std::uint64_t> memo_;
    mutable std::shared_mutex memo_mutex_;
    static constexpr std::size_t kMemoCap = 1u << 20;
};

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime_u64(std::uint64_t x);

} // namespace kloostpath
