#include "xpowx/linforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "xpowx/error.hpp"
#include "xpowx/multind.hpp"
#include "xpowx/rng.hpp"

namespace xpowx {

namespace {

constexpr u32 kNotPrime = std::numeric_limits<u32>::max();

u64 inverse_mod(u64 a, u64 q) { return pow_mod(a, q - 2, q); }

std::string power_string(u64 q, std::size_t d) {
  BigInt v = boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(d));
  return std::to_string(q) + "^" + std::to_string(d) + " = " + v.str();
}

u64 checked_space(const FormFamily& family, u64 budget) {
  const auto size = vector_space_size(family.q(), family.d());
  if (!size || *size > budget) {
    throw BudgetError("enumeration of F_q^d refused: q^d exceeds budget " + std::to_string(budget),
                      power_string(family.q(), family.d()));
  }
  return *size;
}

// Calls visit(v) for every v in F_q^d, lexicographically.
template <class Visit>
void for_each_vector(u64 q, std::size_t d, Visit&& visit) {
  std::vector<u64> v(d, 0);
  while (true) {
    visit(std::span<const u64>(v));
    std::size_t i = 0;
    while (i < d && ++v[i] == q) v[i++] = 0;
    if (i == d) return;
  }
}

// Support columns of a set of forms, with each form as a dense row over them.
struct DenseSystem {
  std::vector<std::vector<u64>> rows;  // last entry is the right-hand side
  std::size_t cols = 0;
};

DenseSystem dense_system(const FormFamily& family, std::span<const u64> ns, u64 rhs) {
  std::vector<u32> support;
  for (u64 n : ns)
    for (const auto& t : family.form(n).terms) support.push_back(t.column);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  DenseSystem sys;
  sys.cols = support.size();
  for (u64 n : ns) {
    std::vector<u64> row(sys.cols + 1, 0);
    for (const auto& t : family.form(n).terms) {
      const auto j = std::lower_bound(support.begin(), support.end(), t.column) - support.begin();
      row[static_cast<std::size_t>(j)] = t.coeff;
    }
    row[sys.cols] = rhs % family.q();
    sys.rows.push_back(std::move(row));
  }
  return sys;
}

// Reduced echelon basis over F_q, grown one row at a time. A row whose
// coefficients reduce to zero but whose right-hand side does not marks the
// system inconsistent.
class EchelonBasis {
 public:
  EchelonBasis(u64 q, std::size_t cols) : q_(q), cols_(cols) {}

  /// Returns false if the system became inconsistent.
  bool insert(std::vector<u64> row) {
    for (std::size_t i = 0; i < pivots_.size(); ++i) {
      const u64 f = row[pivots_[i]];
      if (f == 0) continue;
      const auto& b = basis_[i];
      for (std::size_t j = 0; j <= cols_; ++j) {
        row[j] = (row[j] + (q_ - f) * b[j]) % q_;
      }
    }
    std::size_t lead = 0;
    while (lead < cols_ && row[lead] == 0) ++lead;
    if (lead == cols_) {
      if (row[cols_] != 0) consistent_ = false;
      return consistent_;
    }
    const u64 inv = inverse_mod(row[lead], q_);
    for (auto& x : row) x = x * inv % q_;
    pivots_.push_back(lead);
    basis_.push_back(std::move(row));
    return consistent_;
  }

  std::size_t rank() const noexcept { return pivots_.size(); }
  bool consistent() const noexcept { return consistent_; }

 private:
  u64 q_;
  std::size_t cols_;
  std::vector<std::size_t> pivots_;
  std::vector<std::vector<u64>> basis_;
  bool consistent_ = true;
};

}  // namespace

FormFamily::FormFamily(u64 q) : q_(q) {
  if (q < 3 || !is_prime(q)) throw DomainError("build_family: q = " + std::to_string(q) + " must be an odd prime");
  if (q >= (u64{1} << 31)) throw DomainError("build_family: q too large");

  // Smallest prime factor sieve on [2, q-1].
  std::vector<u32> spf(q, 0);
  for (u64 i = 2; i < q; ++i) {
    if (spf[i] != 0) continue;
    spf[i] = static_cast<u32>(i);
    if (i * i >= q) continue;
    for (u64 j = i * i; j < q; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<u32>(i);
    }
  }
  column_.assign(q, kNotPrime);
  for (u64 n = 2; n < q; ++n) {
    if (spf[n] == n) {
      column_[n] = static_cast<u32>(primes_.size());
      primes_.push_back(n);
    }
  }

  steps_.assign(q, Step{0, 0});
  offsets_.assign(q + 1, 0);
  terms_.reserve(3 * q);
  for (u64 n = 1; n < q; ++n) {
    offsets_[n] = terms_.size();
    if (n >= 2) steps_[n] = {static_cast<u32>(n / spf[n]), column_[spf[n]]};
    u64 rest = n;
    while (rest > 1) {
      const u64 p = spf[rest];
      u32 e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      terms_.push_back({column_[p], static_cast<u32>(e % q)});
    }
  }
  offsets_[q] = terms_.size();
}

std::optional<std::size_t> FormFamily::column_of(u64 p) const noexcept {
  if (p >= q_ || column_[p] == kNotPrime) return std::nullopt;
  return column_[p];
}

LinForm FormFamily::form(u64 n) const {
  if (n < 1 || n >= q_) {
    throw DomainError("form: n = " + std::to_string(n) + " outside [1, q-1]");
  }
  LinForm f;
  f.n = n;
  f.q = q_;
  f.d = d();
  f.terms = std::span<const FormTerm>(terms_.data() + offsets_[n], offsets_[n + 1] - offsets_[n]);
  return f;
}

FormFamily build_family(u64 q) { return FormFamily(q); }

u64 eval_form(const LinForm& form, std::span<const u64> v) {
  if (v.size() != form.d) {
    throw DomainError("eval_form: vector has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(form.d));
  }
  u64 acc = 0;
  for (const auto& t : form.terms) acc = (acc + mul_mod(t.coeff, v[t.column] % form.q, form.q)) % form.q;
  return acc;
}

std::size_t rank_mod_q(const FormFamily& family, std::span<const u64> ns) {
  DenseSystem sys = dense_system(family, ns, 0);
  EchelonBasis basis(family.q(), sys.cols);
  for (auto& row : sys.rows) basis.insert(std::move(row));
  return basis.rank();
}

BigInt AffineCount::value(u64 q) const {
  if (!consistent) return 0;
  return boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(exponent));
}

AffineCount count_affine_solutions(const FormFamily& family, std::span<const u64> ns) {
  AffineCount out;
  out.has_zero_form = std::find(ns.begin(), ns.end(), u64{1}) != ns.end();
  DenseSystem sys = dense_system(family, ns, 1);
  EchelonBasis basis(family.q(), sys.cols);
  for (auto& row : sys.rows) basis.insert(std::move(row));
  out.rank = basis.rank();
  out.consistent = basis.consistent();
  out.exponent = out.consistent ? family.d() - out.rank : 0;
  return out;
}

std::optional<u64> vector_space_size(u64 q, std::size_t d) {
  u64 size = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (size > std::numeric_limits<u64>::max() / q) return std::nullopt;
    size *= q;
  }
  return size;
}

u64 exact_Nq(const FormFamily& family, u64 x0, u64 budget) {
  const u64 q = family.q();
  if (x0 == 0 || x0 >= q) throw DomainError("exact_Nq: x0 must lie in [1, q-1]");
  checked_space(family, budget);
  const auto& steps = family.steps();
  std::vector<u64> values(q, 0);  // values[n] = L_n(v), L_1 = 0 != x0
  u64 count = 0;
  for_each_vector(q, family.d(), [&](std::span<const u64> v) {
    for (u64 n = 2; n < q; ++n) {
      u64 val = values[steps[n].cofactor] + v[steps[n].column];
      if (val >= q) val -= q;
      if (val == x0) return;
      values[n] = val;
    }
    ++count;
  });
  return count;
}

u64 exact_Nq(u64 q, u64 x0, u64 budget) { return exact_Nq(FormFamily(q), x0, budget); }

std::string AvoidanceEstimate::fraction() const {
  if (mode != EstimateMode::exact) return {};
  return std::to_string(hits) + "/" + std::to_string(samples);
}

AvoidanceEstimate exact_estimate(const FormFamily& family, u64 x0, u64 budget) {
  AvoidanceEstimate e;
  e.q = family.q();
  e.x0 = x0;
  e.d = family.d();
  e.mode = EstimateMode::exact;
  e.hits = exact_Nq(family, x0, budget);
  e.samples = *vector_space_size(e.q, e.d);
  e.value = static_cast<double>(e.hits) / static_cast<double>(e.samples);
  return e;
}

AvoidanceEstimate mc_estimate_c(const FormFamily& family, u64 x0, u64 samples, u64 seed,
                                const MonteCarloOptions& options) {
  const u64 q = family.q();
  if (x0 == 0 || x0 >= q) throw DomainError("mc_estimate_c: x0 must lie in [1, q-1]");
  if (samples == 0) throw DomainError("mc_estimate_c: samples must be >= 1");
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<u64>(threads, samples));

  const auto& steps = family.steps();
  const u32 qq = static_cast<u32>(q);
  const u32 target = static_cast<u32>(x0);
  std::vector<u64> hits(threads, 0);

  auto work = [&](unsigned w) {
    std::vector<u32> values(q, 0);
    std::vector<u32> v(family.d(), 0);
    for (u64 s = w; s < samples; s += threads) {
      SplitMix64 rng(seed, s);
      bool hit = true;
      for (u64 n = 2; n < q; ++n) {
        const FormFamily::Step st = steps[n];
        u32 val;
        if (st.cofactor == 1) {
          // n is the prime p_{column}; its coordinate is drawn on first use.
          val = options.force_zero_vector ? 0u : static_cast<u32>(rng.below(q));
          v[st.column] = val;
        } else {
          val = values[st.cofactor] + v[st.column];
          if (val >= qq) val -= qq;
        }
        if (val == target) {
          hit = false;
          break;
        }
        values[n] = val;
      }
      if (hit) ++hits[w];
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  AvoidanceEstimate e;
  e.q = q;
  e.x0 = x0;
  e.d = family.d();
  e.mode = EstimateMode::monte_carlo;
  e.samples = samples;
  e.seed = seed;
  e.generator = std::string(SplitMix64::kName);
  for (u64 h : hits) e.hits += h;
  e.value = static_cast<double>(e.hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.value * (1 - e.value) / static_cast<double>(samples));
  return e;
}

bool check_scaling_symmetry(const FormFamily& family, u64 budget) {
  const u64 reference = exact_Nq(family, 1, budget);
  for (u64 x0 = 2; x0 < family.q(); ++x0) {
    if (exact_Nq(family, x0, budget) != reference) return false;
  }
  return true;
}

RankComparison compare_ranks(const FormFamily& family, std::span<const u64> tuple) {
  RankComparison rec;
  const double q = static_cast<double>(family.q());
  for (u64 n : tuple) {
    if (n < 2 || n >= family.q()) throw DomainError("compare_ranks: elements must lie in [2, q-1]");
  }
  const ExponentMatrix em = exponent_matrix(tuple);
  rec.mult_rank = integer_rank(em.entries);
  rec.fq_rank = rank_mod_q(family, tuple);
  rec.agree = rec.mult_rank == rec.fq_rank;

  const double k = static_cast<double>(tuple.size());
  double bound = std::pow(k, k / 2);
  for (std::size_t j = 0; j < std::min(tuple.size(), em.primes.size()); ++j) {
    bound *= clamped_log(q) / std::log(static_cast<double>(em.primes[j]));
  }
  rec.hadamard_bound = bound;
  rec.hypothesis_holds = k < clamped_log(q) / (10 * log_iter(2, q));
  return rec;
}

BigInt BonferroniBounds::materialize(const BigInt& mantissa) const {
  return mantissa * boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(scale));
}

u64 enumerate_avoiding(const FormFamily& family, std::span<const u64> ns, u64 target,
                       u64 budget) {
  checked_space(family, budget);
  std::vector<LinForm> forms;
  for (u64 n : ns) forms.push_back(family.form(n));
  u64 count = 0;
  for_each_vector(family.q(), family.d(), [&](std::span<const u64> v) {
    for (const auto& f : forms) {
      if (eval_form(f, v) == target) return;
    }
    ++count;
  });
  return count;
}

BonferroniBounds bonferroni_bounds(const FormFamily& family, std::span<const u64> subfamily,
                                   std::size_t K, u64 budget) {
  const std::size_t m = subfamily.size();
  if (m > kMaxBonferroniFamily) {
    throw BudgetError("bonferroni_bounds: family of " + std::to_string(m) +
                          " forms refused (at most 20)",
                      "2^" + std::to_string(m) + " subsets");
  }
  if (K == 0) throw DomainError("bonferroni_bounds: K must be >= 1");
  std::vector<u64> sorted(subfamily.begin(), subfamily.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("bonferroni_bounds: family elements must be distinct");
  }
  for (u64 n : sorted) {
    if (n < 2 || n >= family.q()) throw DomainError("bonferroni_bounds: elements must lie in [2, q-1]");
  }

  const u64 q = family.q();
  const std::size_t d = family.d();
  DenseSystem sys = dense_system(family, subfamily, 1);

  // counts[k][r]: consistent subsets of size k whose forms have rank r.
  std::vector<std::vector<u64>> counts(m + 1, std::vector<u64>(m + 1, 0));
  // Depth-first over subsets in index order; inconsistent prefixes prune the
  // whole subtree, since every superset is inconsistent too.
  auto dfs = [&](auto&& self, std::size_t next, std::size_t size, const EchelonBasis& basis) -> void {
    ++counts[size][basis.rank()];
    for (std::size_t i = next; i < m; ++i) {
      EchelonBasis extended = basis;
      if (!extended.insert(sys.rows[i])) continue;
      self(self, i + 1, size + 1, extended);
    }
  };
  dfs(dfs, 0, 0, EchelonBasis(q, sys.cols));

  BonferroniBounds out;
  out.q = q;
  out.K = K;
  out.family_size = m;
  out.scale = d - std::min(m, d);
  auto partial_sum = [&](std::size_t max_size) {
    BigInt sum = 0;
    for (std::size_t k = 0; k <= std::min(max_size, m); ++k) {
      for (std::size_t r = 0; r <= k; ++r) {
        if (counts[k][r] == 0) continue;
        const BigInt term =
            BigInt(counts[k][r]) * boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(d - r - out.scale));
        if (k % 2 == 0) sum += term;
        else sum -= term;
      }
    }
    return sum;
  };
  out.lower = partial_sum(2 * K - 1);
  out.upper = partial_sum(2 * K);
  out.total = partial_sum(m);

  if (const auto size = vector_space_size(q, d); size && *size <= budget) {
    const BigInt exact = enumerate_avoiding(family, subfamily, 1, budget);
    const BigInt unit = boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(out.scale));
    if (exact % unit != 0) throw std::logic_error("bonferroni_bounds: enumerated count not divisible by q^scale");
    out.enumerated = exact / unit;
  }
  return out;
}

}  // namespace xpowx
