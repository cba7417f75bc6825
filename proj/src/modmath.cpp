#include "xpowx/modmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xpowx/error.hpp"

namespace xpowx {

namespace {

constexpr u64 kTrialLimit = 1'000'000;

const std::vector<u64>& trial_primes() {
  static const std::vector<u64> primes = primes_up_to(kTrialLimit).primes;
  return primes;
}

bool miller_rabin_round(u64 n, u64 a, u64 d, unsigned s) {
  a %= n;
  if (a == 0) return true;
  u64 x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

u64 pollard_brent(u64 n, u64 c) {
  // Brent's cycle detection with batched gcds.
  auto f = [&](u64 x) { return (mul_mod(x, x, n) + c) % n; };
  u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
  const u64 m = 128;
  for (u64 r = 1; g == 1; r <<= 1) {
    x = y;
    for (u64 i = 0; i < r; ++i) y = f(y);
    for (u64 k = 0; k < r && g == 1; k += m) {
      ys = y;
      for (u64 i = 0; i < std::min(m, r - k); ++i) {
        y = f(y);
        q = mul_mod(q, x > y ? x - y : y - x, n);
      }
      g = gcd(q, n);
    }
  }
  if (g == n) {
    do {
      ys = f(ys);
      g = gcd(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

void factor_large(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  for (u64 c = 1;; ++c) {
    const u64 g = pollard_brent(n, c);
    if (g != n && g != 1) {
      factor_large(g, out);
      factor_large(n / g, out);
      return;
    }
  }
}

}  // namespace

std::size_t PrimeSieve::count_up_to(u64 x) const {
  return static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), x) -
                                  primes.begin());
}

bool PrimeSieve::contains(u64 n) const {
  return std::binary_search(primes.begin(), primes.end(), n);
}

PrimeSieve primes_up_to(u64 limit) {
  if (limit < 2) {
    throw DomainError("primes_up_to: limit must be >= 2, got " + std::to_string(limit));
  }
  // Odd-only Eratosthenes.
  const u64 half = (limit - 1) / 2;  // index i <-> 2i + 1, i >= 1
  std::vector<bool> composite(half + 1, false);
  for (u64 i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
    if (composite[i]) continue;
    const u64 p = 2 * i + 1;
    for (u64 j = (p * p - 1) / 2; j <= half; j += p) composite[j] = true;
  }
  PrimeSieve sieve;
  sieve.limit = limit;
  sieve.primes.push_back(2);
  for (u64 i = 1; i <= half; ++i) {
    if (!composite[i]) sieve.primes.push_back(2 * i + 1);
  }
  return sieve;
}

u64 mul_mod(u64 a, u64 b, u64 m) noexcept {
  return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m);
}

u64 pow_mod(u64 base, u64 exp, u64 modulus) {
  if (modulus < 2) {
    throw DomainError("pow_mod: modulus must be >= 2, got " + std::to_string(modulus));
  }
  u64 result = 1;
  base %= modulus;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, modulus);
    base = mul_mod(base, base, modulus);
    exp >>= 1;
  }
  return result;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  if (n < 41 * 41) return true;
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Jim Sinclair's 7-base set, deterministic for n < 2^64.
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    if (!miller_rabin_round(n, a, d, s)) return false;
  }
  return true;
}

u64 Factorization::rad() const noexcept {
  u64 r = 1;
  for (const auto& f : factors) r *= f.prime;
  return r;
}

u64 Factorization::largest_prime() const noexcept {
  return factors.empty() ? 1 : factors.back().prime;
}

u32 Factorization::valuation(u64 p) const noexcept {
  auto it = std::lower_bound(factors.begin(), factors.end(), p,
                             [](const PrimePower& f, u64 v) { return f.prime < v; });
  return (it != factors.end() && it->prime == p) ? it->exponent : 0;
}

u64 Factorization::tau() const noexcept {
  u64 t = 1;
  for (const auto& f : factors) t *= f.exponent + 1;
  return t;
}

Factorization factorize(u64 n) {
  if (n == 0) throw DomainError("factorize: 0 has no factorization");
  Factorization result;
  result.n = n;
  u64 rest = n;
  for (u64 p : trial_primes()) {
    if (p * p > rest) break;
    if (rest % p != 0) continue;
    u32 e = 0;
    do {
      rest /= p;
      ++e;
    } while (rest % p == 0);
    result.factors.push_back({p, e});
  }
  if (rest == 1) return result;
  // Trial division stops at sqrt(rest) or after exhausting the table; in the
  // first case rest is prime, in the second is_prime decides.
  if (is_prime(rest)) {
    result.factors.push_back({rest, 1});
    return result;
  }
  std::vector<u64> big;
  factor_large(rest, big);
  std::sort(big.begin(), big.end());
  for (u64 p : big) {
    if (!result.factors.empty() && result.factors.back().prime == p) {
      ++result.factors.back().exponent;
    } else {
      result.factors.push_back({p, 1});
    }
  }
  return result;
}

u64 multiplicative_order(u64 a, u64 p, const Factorization& pm1) {
  if (a % p == 0) {
    throw DomainError("multiplicative_order: " + std::to_string(p) + " divides " +
                      std::to_string(a));
  }
  u64 order = p - 1;
  for (const auto& f : pm1.factors) {
    for (u32 e = 0; e < f.exponent; ++e) {
      if (pow_mod(a, order / f.prime, p) != 1) break;
      order /= f.prime;
    }
  }
  return order;
}

u64 multiplicative_order(u64 a, u64 p) {
  if (!is_prime(p)) {
    throw DomainError("multiplicative_order: " + std::to_string(p) + " is not prime");
  }
  return multiplicative_order(a, p, factorize(p - 1));
}

u64 primitive_root(u64 p, const Factorization& pm1) {
  if (p == 2) return 1;
  for (u64 g = 2;; ++g) {
    bool ok = true;
    for (const auto& f : pm1.factors) {
      if (pow_mod(g, (p - 1) / f.prime, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
}

u64 euler_phi(const Factorization& f) {
  u64 phi = f.n;
  for (const auto& pp : f.factors) phi = phi / pp.prime * (pp.prime - 1);
  return phi;
}

u64 euler_phi(u64 n) {
  if (n == 0) throw DomainError("euler_phi: n must be >= 1");
  return euler_phi(factorize(n));
}

std::vector<u64> divisors(const Factorization& f) {
  std::vector<u64> out{1};
  for (const auto& pp : f.factors) {
    const std::size_t base = out.size();
    u64 pk = 1;
    for (u32 e = 1; e <= pp.exponent; ++e) {
      pk *= pp.prime;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<u64> divisors(u64 n) {
  if (n == 0) throw DomainError("divisors: n must be >= 1");
  return divisors(factorize(n));
}

u64 gcd(u64 a, u64 b) noexcept { return std::gcd(a, b); }

double clamped_log(double x) { return std::max(std::log(x), 2.0); }

double log_iter(int k, double x) {
  if (k < 1 || !(x > 0)) throw DomainError("log_iter: need k >= 1 and x > 0");
  double v = clamped_log(x);
  for (int i = 1; i < k; ++i) v = clamped_log(v);
  return v;
}

u64 integer_root(u64 n, unsigned k) {
  if (k == 0) throw DomainError("integer_root: k must be >= 1");
  if (k == 1 || n < 2) return n;
  // Floating estimate, then exact correction with overflow-checked powers.
  u64 r = static_cast<u64>(std::pow(static_cast<double>(n), 1.0 / k));
  auto pow_leq = [&](u64 b) {  // b^k <= n, without overflow
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      acc *= b;
      if (acc > n) return false;
    }
    return true;
  };
  while (r > 0 && !pow_leq(r)) --r;
  while (pow_leq(r + 1)) ++r;
  return r;
}

PowerBase perfect_power_base(u64 n) {
  if (n < 4) return {n, 1};
  // The largest k with an exact k-th root is the maximal exponent, and its
  // root is then not itself a perfect power.
  for (unsigned k = 63; k >= 2; --k) {
    const u64 b = integer_root(n, k);
    if (b < 2) continue;
    u64 v = 1;
    for (unsigned i = 0; i < k; ++i) v *= b;
    if (v == n) return {b, k};
  }
  return {n, 1};
}

FastDivisor::FastDivisor(u64 d) : d_(d), m_(~u64{0} / d) {
  if (d == 0) throw DomainError("FastDivisor: zero divisor");
}

}  // namespace xpowx
