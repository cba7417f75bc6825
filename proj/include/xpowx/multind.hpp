#pragma once

// Multiplicative independence of integer tuples, decided exactly through the
// rational rank of their prime-exponent matrix.

#include <optional>
#include <span>
#include <vector>

#include "xpowx/modmath.hpp"

namespace xpowx {

/// Row i holds nu_{primes[j]}(tuple[i]) for the ascending primes dividing
/// some element of the tuple.
struct ExponentMatrix {
  std::vector<u64> tuple;
  std::vector<u64> primes;
  std::vector<std::vector<i64>> entries;

  std::size_t rows() const noexcept { return entries.size(); }
  std::size_t cols() const noexcept { return primes.size(); }
};

/// An integer vector alpha, content 1, first nonzero entry positive, with
/// prod tuple[i]^alpha[i] = 1.
struct MultRelation {
  std::vector<i64> alphas;

  friend bool operator==(const MultRelation&, const MultRelation&) = default;
};

/// Throws DomainError for elements < 2 or repeated elements.
ExponentMatrix exponent_matrix(std::span<const u64> tuple);

/// Rank over Q by fraction-free (Bareiss) elimination. Runs in 64-bit
/// arithmetic and redoes the elimination with big integers if an entry
/// leaves that range.
std::size_t integer_rank(std::vector<std::vector<i64>> matrix);

std::size_t multiplicative_rank(std::span<const u64> tuple);
bool is_mult_independent(std::span<const u64> tuple);

/// None iff the tuple is independent. The product identity is re-checked with
/// big integers before returning.
std::optional<MultRelation> find_relation(std::span<const u64> tuple);

/// Exact check of prod tuple[i]^alpha[i] == 1.
bool verify_relation(std::span<const u64> tuple, const MultRelation& relation);

/// Number of multiplicatively dependent 2-subsets of [2, q-1]. Two integers
/// are dependent iff they are powers of the same non-power base, so this sums
/// C(#powers, 2) over bases b with b^2 < q.
u64 dependent_pair_count_exact(u64 q);

/// Same count by computing the rank of every pair. Quadratic; for checks.
u64 dependent_pair_count_by_rank(u64 q);

struct DependenceRate {
  u64 trials = 0;
  u64 dependent = 0;
  double fraction = 0;
  double std_error = 0;
};

/// Samples `trials` uniform k-subsets of `set` (without replacement inside a
/// subset) and reports the dependent fraction with its binomial standard
/// error. Trial t draws from SplitMix64(seed, t), so the result depends only
/// on (set, k, trials, seed).
DependenceRate sample_dependence_rate(std::span<const u64> set, std::size_t k, u64 trials,
                                      u64 seed, unsigned threads = 1);

}  // namespace xpowx
