#pragma once

// The map psi_p(x) = x^x mod p on {1, ..., p-1}: fixed points, images,
// preimages, collisions, prime-range scans and the lifted solution counts
// over the window [1, p(p-1)].

#include <functional>
#include <iosfwd>
#include <vector>

#include "xpowx/modmath.hpp"

namespace xpowx {

struct PsiStats {
  u64 p = 0;
  u64 F = 0;           ///< fixed points
  u64 image_size = 0;  ///< distinct values of psi_p
  u64 n_of_1 = 0;      ///< N(p, 1)
  u64 M = 0;           ///< collision pairs, sum_a N(p, a)^2
};

struct ScanRow {
  u64 p = 0;
  u64 F = 0;
  u32 omega_pm1 = 0;

  friend bool operator==(const ScanRow&, const ScanRow&) = default;
};

struct ScanSummary {
  std::vector<ScanRow> rows;
  u64 prime_count = 0;
  u64 trivial_only = 0;  ///< primes with F(p) = 1

  double trivial_fraction() const {
    return prime_count ? static_cast<double>(trivial_only) / static_cast<double>(prime_count)
                       : 0.0;
  }
};

using RowSink = std::function<void(const ScanRow&)>;

/// x^x mod p for 1 <= x <= p-1.
u64 psi(u64 p, u64 x);

/// psi_p for every x at once: element x (1 <= x <= p-1) of the result is
/// psi_p(x); element 0 is unused. Walks a primitive root g, using
/// (g^k)^(g^k) = g^(k * g^k mod (p-1)).
std::vector<u64> psi_table(u64 p);

/// F(p) by evaluating pow_mod(x, x, p) for every x.
u64 count_fixed_points(u64 p);

/// F(p) from the order criterion: x = g^k is fixed iff ord_p(x) | x - 1,
/// i.e. (p-1) | k(x-1). One multiplication per x; used by scan_primes.
u64 count_fixed_points_by_order(u64 p);

/// N(p, a) for 1 <= a <= p-1.
u64 preimage_count(u64 p, u64 a);
/// M(p), from the preimage histogram.
u64 collision_count(u64 p);
u64 image_size(u64 p);
PsiStats psi_stats(u64 p);

/// One row per prime in [lo, hi], delivered to `sink` (if set) and returned,
/// ascending in p for any thread count. threads == 0 means hardware
/// concurrency.
ScanSummary scan_primes(u64 lo, u64 hi, const RowSink& sink = {}, unsigned threads = 0);

/// Computes a single ScanRow.
ScanRow scan_row(u64 p);

/// #{x in [1, p(p-1)] : p does not divide x, x^x = y mod p, ord_p(x) = d},
/// by brute force. Requires d | p-1, p not dividing y and ord_p(y) | d
/// (PreconditionError otherwise).
u64 lifted_solution_count(u64 p, u64 y, u64 d);

/// Same count restricted to one residue class x = a (mod p), ord_p(a) = d.
u64 lifted_solution_count_for_residue(u64 p, u64 y, u64 a);

/// #{x in [1, p(p-1)] : p does not divide x, x^x = x mod p}, by brute force.
u64 lifted_fixed_total(u64 p);

/// (p-1) * sum_{d | p-1} phi(d)/d, evaluated exactly.
u64 lifted_fixed_total_formula(u64 p);

/// CSV with header `p,F,omega_pm1`.
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);
std::vector<ScanRow> read_scan_csv(std::istream& in);

}  // namespace xpowx
