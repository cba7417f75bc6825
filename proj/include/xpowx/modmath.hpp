#pragma once

// Integer and modular arithmetic primitives. Every function here is pure and
// every residue returned is the canonical representative in [0, modulus).

#include <cstdint>
#include <span>
#include <vector>

namespace xpowx {

using u64 = std::uint64_t;
using u32 = std::uint32_t;
using i64 = std::int64_t;

/// All primes <= limit, ascending.
struct PrimeSieve {
  u64 limit = 0;
  std::vector<u64> primes;

  /// pi(limit)
  std::size_t count() const noexcept { return primes.size(); }
  /// pi(x) for x <= limit.
  std::size_t count_up_to(u64 x) const;
  bool contains(u64 n) const;
};

/// Throws DomainError when limit < 2.
PrimeSieve primes_up_to(u64 limit);

/// Deterministic over the full 64-bit range.
bool is_prime(u64 n);

struct PrimePower {
  u64 prime;
  u32 exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Canonical factorization of n >= 1; `factors` is empty iff n == 1.
struct Factorization {
  u64 n = 1;
  std::vector<PrimePower> factors;

  /// Largest squarefree divisor.
  u64 rad() const noexcept;
  /// Largest prime divisor; P(1) = 1.
  u64 largest_prime() const noexcept;
  /// nu_p(n).
  u32 valuation(u64 p) const noexcept;
  /// Number of distinct prime divisors.
  std::size_t omega() const noexcept { return factors.size(); }
  /// Number of divisors.
  u64 tau() const noexcept;
};

/// Trial division by primes below 10^6, then Pollard rho (Brent) on the
/// cofactor. Throws DomainError for n == 0.
Factorization factorize(u64 n);

u64 mul_mod(u64 a, u64 b, u64 m) noexcept;
/// base^exp mod modulus by square-and-multiply. Throws DomainError if modulus < 2.
u64 pow_mod(u64 base, u64 exp, u64 modulus);

/// ord_p(a), found by stripping prime factors of p - 1 from p - 1.
/// Throws DomainError when p | a or p is not prime.
u64 multiplicative_order(u64 a, u64 p);
/// Same, reusing a precomputed factorization of p - 1.
u64 multiplicative_order(u64 a, u64 p, const Factorization& pm1);

/// Smallest primitive root modulo the prime p.
u64 primitive_root(u64 p, const Factorization& pm1);

u64 euler_phi(u64 n);
u64 euler_phi(const Factorization& f);
/// All divisors, ascending.
std::vector<u64> divisors(u64 n);
std::vector<u64> divisors(const Factorization& f);

u64 gcd(u64 a, u64 b) noexcept;

/// Clamped iterated logarithm: log x = max(ln x, 2), log_k x = log(log_{k-1} x).
double log_iter(int k, double x);
/// Single clamped logarithm, log_iter(1, x).
double clamped_log(double x);

/// Floor of the k-th root of n, exact (no floating point in the result).
u64 integer_root(u64 n, unsigned k);

struct PowerBase {
  u64 base;
  u32 exponent;
};

/// Writes n = base^exponent with exponent maximal (so base is not a perfect
/// power). Non-powers give {n, 1}.
PowerBase perfect_power_base(u64 n);

/// Remainder by a fixed 64-bit divisor using a precomputed reciprocal.
/// Exact for every 64-bit numerator.
class FastDivisor {
 public:
  FastDivisor() = default;
  explicit FastDivisor(u64 d);

  u64 divisor() const noexcept { return d_; }

  u64 mod(u64 x) const noexcept {
    const u64 q = static_cast<u64>((static_cast<unsigned __int128>(x) * m_) >> 64);
    u64 r = x - q * d_;
    while (r >= d_) r -= d_;
    return r;
  }

 private:
  u64 d_ = 1;
  u64 m_ = 0;
};

}  // namespace xpowx
