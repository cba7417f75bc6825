#pragma once

// The large subset N_q of {2, ..., q-1} whose small-prime exponents are
// bounded by f(q) and whose large-prime part is squarefree.

#include <iosfwd>
#include <vector>

#include "xpowx/modmath.hpp"

namespace xpowx {

struct NSetParams {
  u64 q = 0;
  double c1 = 1.0;
  double c2 = 3.0;
  double B = 0;  ///< c1 * log_2 q (clamped logs)
  double f = 0;  ///< c2 * log_3 q
  /// Largest admissible exponent of a prime p <= B, floor(f).
  u32 max_small_exponent() const noexcept { return static_cast<u32>(f); }
};

inline constexpr double kDefaultC1 = 1.0;
inline constexpr double kDefaultC2 = 3.0;

/// Throws DomainError for q < 3 or c1 <= 0, ConfigError for c2 <= 2/ln 2.
NSetParams params_for(u64 q, double c1 = kDefaultC1, double c2 = kDefaultC2);

/// n in N_q iff nu_p(n) <= floor(f) for every prime p <= B dividing n and
/// nu_p(n) <= 1 for every prime p > B dividing n. Requires 2 <= n <= q-1.
bool is_member(u64 n, const NSetParams& params);

struct NSet {
  NSetParams params;
  std::vector<u64> members;      ///< ascending
  std::vector<bool> membership;  ///< index n, size q
  u64 complement_size = 0;       ///< q - 2 - |members|

  bool contains(u64 n) const noexcept { return n < membership.size() && membership[n]; }
};

/// Sieves out multiples of p^(floor(f)+1) for p <= B and of p^2 for p > B.
NSet build(const NSetParams& params);

/// q pi(B) / 2^f + 3q / (B log B), with the actual pi(B) and clamped log.
double theoretical_complement_bound(const NSetParams& params);

/// Little-endian bitset: q bits, byte i bit j (LSB first) is n = 8i + j.
void write_bitmap(std::ostream& out, const NSet& set);
/// Reads a bitmap of `q` bits back into a membership vector.
std::vector<bool> read_bitmap(std::istream& in, u64 q);

}  // namespace xpowx
