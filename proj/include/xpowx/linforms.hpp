#pragma once

// The linear forms L_n(v) = sum_i nu_{p_i}(n) v_i over F_q, n in [1, q-1],
// indexed by the primes p_1 < ... < p_d < q. Counts of vectors avoiding or
// hitting prescribed values, exact and Monte-Carlo.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "xpowx/modmath.hpp"

namespace xpowx {

using BigInt = boost::multiprecision::cpp_int;

struct FormTerm {
  u32 column;  ///< index of the prime in the family's prime list
  u32 coeff;   ///< nu_p(n) mod q, nonzero
};

/// Non-owning view of one form; valid while its FormFamily lives.
struct LinForm {
  u64 n = 0;
  u64 q = 0;
  std::size_t d = 0;
  std::span<const FormTerm> terms;

  /// Number of nonzero coefficients, omega(n).
  std::size_t support() const noexcept { return terms.size(); }
};

class FormFamily {
 public:
  /// Throws DomainError unless q is a prime >= 3 below 2^31.
  explicit FormFamily(u64 q);

  u64 q() const noexcept { return q_; }
  /// d = pi(q - 1).
  std::size_t d() const noexcept { return primes_.size(); }
  const std::vector<u64>& primes() const noexcept { return primes_; }
  /// Column of a prime p < q; nullopt for anything else.
  std::optional<std::size_t> column_of(u64 p) const noexcept;

  /// L_n for 1 <= n <= q-1; L_1 is the zero form.
  LinForm form(u64 n) const;

  /// Smallest-prime-factor decomposition n = p_{col} * cofactor, used to
  /// evaluate every form at once through L_n = L_{n/p} + v_p.
  struct Step {
    u32 cofactor;
    u32 column;
  };
  const std::vector<Step>& steps() const noexcept { return steps_; }

 private:
  u64 q_;
  std::vector<u64> primes_;
  std::vector<u32> column_;  // by n; UINT32_MAX unless n is prime
  std::vector<std::size_t> offsets_;
  std::vector<FormTerm> terms_;
  std::vector<Step> steps_;  // by n, n >= 2
};

FormFamily build_family(u64 q);

/// sum_i mu_i(n) v_i mod q. Throws DomainError if v.size() != d.
u64 eval_form(const LinForm& form, std::span<const u64> v);

/// Rank over F_q of {L_n : n in ns}.
std::size_t rank_mod_q(const FormFamily& family, std::span<const u64> ns);

/// M_{q,S} = #{v : L_n(v) = 1 for all n in S}, which is either 0 or q^(d-r).
struct AffineCount {
  bool consistent = true;
  bool has_zero_form = false;  ///< S contains n = 1
  std::size_t rank = 0;        ///< rank of the homogeneous part
  std::size_t exponent = 0;    ///< d - rank when consistent

  BigInt value(u64 q) const;
};

AffineCount count_affine_solutions(const FormFamily& family, std::span<const u64> ns);

inline constexpr u64 kDefaultBudget = 1'000'000'000;

/// q^d, or nullopt above 2^64 - 1.
std::optional<u64> vector_space_size(u64 q, std::size_t d);

/// N_q(x0) by enumerating F_q^d. Throws BudgetError (naming q^d) when
/// q^d > budget.
u64 exact_Nq(const FormFamily& family, u64 x0, u64 budget = kDefaultBudget);
u64 exact_Nq(u64 q, u64 x0, u64 budget = kDefaultBudget);

enum class EstimateMode { exact, monte_carlo };

struct AvoidanceEstimate {
  u64 q = 0;
  u64 x0 = 1;
  std::size_t d = 0;
  EstimateMode mode = EstimateMode::exact;
  double value = 0;
  u64 samples = 0;
  double std_error = 0;
  u64 seed = 0;
  std::string generator;
  u64 hits = 0;  ///< N_q in exact mode, hit count in Monte-Carlo mode

  /// "N/q^d" with q^d written out (exact mode only).
  std::string fraction() const;
};

AvoidanceEstimate exact_estimate(const FormFamily& family, u64 x0, u64 budget = kDefaultBudget);

struct MonteCarloOptions {
  unsigned threads = 1;
  /// Test hook: every sample uses v = 0.
  bool force_zero_vector = false;
};

/// Draws v uniformly from F_q^d; a sample hits iff L_n(v) != x0 for every
/// n in [2, q-1]. Sample s uses SplitMix64(seed, s) and draws coordinates
/// lazily in ascending prime order, stopping at the first n with L_n(v) = x0.
AvoidanceEstimate mc_estimate_c(const FormFamily& family, u64 x0, u64 samples, u64 seed,
                                const MonteCarloOptions& options = {});

/// N_q(x0) == N_q(1) for every x0 in [1, q-1].
bool check_scaling_symmetry(const FormFamily& family, u64 budget = kDefaultBudget);

struct RankComparison {
  std::size_t mult_rank = 0;
  std::size_t fq_rank = 0;
  bool agree = false;
  /// k^(k/2) * prod_{j<=k} log q / log p_j over the k smallest primes in the
  /// tuple's support.
  double hadamard_bound = 0;
  /// k < log q / (10 log_2 q)
  bool hypothesis_holds = false;
};

RankComparison compare_ranks(const FormFamily& family, std::span<const u64> tuple);

inline constexpr std::size_t kMaxBonferroniFamily = 20;

/// Truncated inclusion-exclusion around M_{q,N'} = #{v : L_n(v) != 1 for all
/// n in N'}. All values share the factor q^scale, which is kept symbolic:
/// value = mantissa * q^scale.
struct BonferroniBounds {
  u64 q = 0;
  std::size_t K = 0;
  std::size_t family_size = 0;
  std::size_t scale = 0;
  BigInt lower;  ///< sum over |S| <= 2K-1
  BigInt upper;  ///< sum over |S| <= 2K
  BigInt total;  ///< untruncated sum, equal to M_{q,N'}
  std::optional<BigInt> enumerated;  ///< M_{q,N'} by enumeration, if within budget

  /// True when both truncations already contain every subset.
  bool untruncated() const noexcept { return 2 * K >= family_size + 1; }
  BigInt materialize(const BigInt& mantissa) const;
};

/// Throws BudgetError for |N'| > 20 and DomainError for elements outside
/// [2, q-1], repeats, or K == 0.
BonferroniBounds bonferroni_bounds(const FormFamily& family, std::span<const u64> subfamily,
                                   std::size_t K, u64 budget = kDefaultBudget);

/// #{v in F_q^d : L_n(v) != target for all n in ns} by enumeration.
u64 enumerate_avoiding(const FormFamily& family, std::span<const u64> ns, u64 target,
                       u64 budget = kDefaultBudget);

}  // namespace xpowx
