#include "xpowx/multind.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "xpowx/error.hpp"
#include "xpowx/rng.hpp"

namespace xpowx {

namespace mp = boost::multiprecision;

namespace {

// Fraction-free elimination to echelon form. Returns nullopt if an i64
// entry would overflow.
template <class Int>
std::optional<std::size_t> bareiss_rank(std::vector<std::vector<Int>>& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  Int prev = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        if constexpr (std::is_same_v<Int, i64>) {
          const __int128 v = (static_cast<__int128>(m[rank][c]) * m[i][j] -
                              static_cast<__int128>(m[i][c]) * m[rank][j]) /
                             prev;
          if (v > INT64_MAX || v < INT64_MIN) return std::nullopt;
          m[i][j] = static_cast<i64>(v);
        } else {
          m[i][j] = (m[rank][c] * m[i][j] - m[i][c] * m[rank][j]) / prev;
        }
      }
      m[i][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return rank;
}

std::vector<std::vector<mp::cpp_rational>> to_rational(const std::vector<std::vector<i64>>& m) {
  std::vector<std::vector<mp::cpp_rational>> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i].assign(m[i].begin(), m[i].end());
  }
  return out;
}

}  // namespace

ExponentMatrix exponent_matrix(std::span<const u64> tuple) {
  ExponentMatrix em;
  em.tuple.assign(tuple.begin(), tuple.end());
  std::vector<u64> sorted = em.tuple;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("exponent_matrix: tuple elements must be distinct");
  }
  std::vector<Factorization> facs;
  facs.reserve(tuple.size());
  for (u64 n : tuple) {
    if (n < 2) throw DomainError("exponent_matrix: elements must be >= 2, got " + std::to_string(n));
    facs.push_back(factorize(n));
    for (const auto& f : facs.back().factors) em.primes.push_back(f.prime);
  }
  std::sort(em.primes.begin(), em.primes.end());
  em.primes.erase(std::unique(em.primes.begin(), em.primes.end()), em.primes.end());
  em.entries.assign(tuple.size(), std::vector<i64>(em.primes.size(), 0));
  for (std::size_t i = 0; i < facs.size(); ++i) {
    for (const auto& f : facs[i].factors) {
      const auto j = std::lower_bound(em.primes.begin(), em.primes.end(), f.prime) - em.primes.begin();
      em.entries[i][static_cast<std::size_t>(j)] = f.exponent;
    }
  }
  return em;
}

std::size_t integer_rank(std::vector<std::vector<i64>> matrix) {
  std::vector<std::vector<i64>> work = matrix;
  if (auto r = bareiss_rank(work)) return *r;
  std::vector<std::vector<mp::cpp_int>> big(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) big[i].assign(matrix[i].begin(), matrix[i].end());
  return *bareiss_rank(big);
}

std::size_t multiplicative_rank(std::span<const u64> tuple) {
  return integer_rank(exponent_matrix(tuple).entries);
}

bool is_mult_independent(std::span<const u64> tuple) {
  return multiplicative_rank(tuple) == tuple.size();
}

std::optional<MultRelation> find_relation(std::span<const u64> tuple) {
  const ExponentMatrix em = exponent_matrix(tuple);
  const std::size_t k = em.rows();
  const std::size_t d = em.cols();
  // Solve E^T alpha = 0: rows are primes, columns are tuple elements.
  std::vector<std::vector<i64>> et(d, std::vector<i64>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < d; ++j) et[j][i] = em.entries[i][j];
  auto a = to_rational(et);

  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < k && r < d; ++c) {
    std::size_t pivot = r;
    while (pivot < d && a[pivot][c] == 0) ++pivot;
    if (pivot == d) continue;
    std::swap(a[pivot], a[r]);
    const mp::cpp_rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    for (std::size_t i = 0; i < d; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const mp::cpp_rational factor = a[i][c];
      for (std::size_t j = 0; j < k; ++j) a[i][j] -= factor * a[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  if (pivot_cols.size() == k) return std::nullopt;

  std::size_t free_col = 0;
  while (std::find(pivot_cols.begin(), pivot_cols.end(), free_col) != pivot_cols.end()) ++free_col;
  std::vector<mp::cpp_rational> alpha(k, 0);
  alpha[free_col] = 1;
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) alpha[pivot_cols[i]] = -a[i][free_col];

  mp::cpp_int lcm = 1;
  for (const auto& v : alpha) {
    const mp::cpp_int den = mp::denominator(v);
    lcm = lcm / mp::gcd(lcm, den) * den;
  }
  std::vector<mp::cpp_int> ints;
  mp::cpp_int content = 0;
  for (const auto& v : alpha) {
    ints.push_back(mp::numerator(v) * (lcm / mp::denominator(v)));
    content = mp::gcd(content, mp::abs(ints.back()));
  }
  MultRelation rel;
  int sign = 0;
  for (const auto& v : ints) {
    if (sign == 0 && v != 0) sign = v > 0 ? 1 : -1;
  }
  for (const auto& v : ints) rel.alphas.push_back(static_cast<i64>(sign * (v / content)));
  if (!verify_relation(tuple, rel)) {
    throw std::logic_error("find_relation: kernel vector failed the product check");
  }
  return rel;
}

bool verify_relation(std::span<const u64> tuple, const MultRelation& relation) {
  if (relation.alphas.size() != tuple.size()) return false;
  if (std::all_of(relation.alphas.begin(), relation.alphas.end(), [](i64 a) { return a == 0; })) {
    return false;
  }
  mp::cpp_int num = 1, den = 1;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const i64 a = relation.alphas[i];
    if (a > 0) num *= mp::pow(mp::cpp_int(tuple[i]), static_cast<unsigned>(a));
    if (a < 0) den *= mp::pow(mp::cpp_int(tuple[i]), static_cast<unsigned>(-a));
  }
  return num == den;
}

u64 dependent_pair_count_exact(u64 q) {
  u64 total = 0;
  for (u64 b = 2; b * b < q; ++b) {
    if (perfect_power_base(b).exponent != 1) continue;
    u64 powers = 0;
    for (u64 v = b; v < q; v *= b) {
      ++powers;
      if (v > (q - 1) / b) break;
    }
    total += powers * (powers - 1) / 2;
  }
  return total;
}

u64 dependent_pair_count_by_rank(u64 q) {
  u64 total = 0;
  for (u64 m = 2; m < q; ++m) {
    for (u64 n = m + 1; n < q; ++n) {
      const u64 pair[2] = {m, n};
      if (multiplicative_rank(pair) < 2) ++total;
    }
  }
  return total;
}

DependenceRate sample_dependence_rate(std::span<const u64> set, std::size_t k, u64 trials,
                                      u64 seed, unsigned threads) {
  if (trials == 0) throw DomainError("sample_dependence_rate: trials must be >= 1");
  if (k < 2 || set.size() < k) {
    throw DomainError("sample_dependence_rate: need |set| >= k >= 2");
  }
  const u64 n = set.size();
  // Factor each element once; the exponent matrix of a sample is assembled
  // from these.
  std::vector<Factorization> facs;
  facs.reserve(set.size());
  for (u64 v : set) {
    if (v < 2) throw DomainError("sample_dependence_rate: set elements must be >= 2");
    facs.push_back(factorize(v));
  }

  auto run_trial = [&](u64 t, std::vector<u64>& chosen) {
    SplitMix64 rng(seed, t);
    chosen.clear();
    // Floyd's algorithm: k distinct indices, uniform over k-subsets.
    for (u64 j = n - k; j < n; ++j) {
      const u64 pick = rng.below(j + 1);
      if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end()) {
        chosen.push_back(pick);
      } else {
        chosen.push_back(j);
      }
    }
    std::vector<u64> primes;
    for (u64 idx : chosen)
      for (const auto& f : facs[idx].factors) primes.push_back(f.prime);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    std::vector<std::vector<i64>> m(k, std::vector<i64>(primes.size(), 0));
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& f : facs[chosen[i]].factors) {
        const auto j = std::lower_bound(primes.begin(), primes.end(), f.prime) - primes.begin();
        m[i][static_cast<std::size_t>(j)] = f.exponent;
      }
    }
    return integer_rank(std::move(m)) < k;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<u64> dependent(threads, 0);
  auto work = [&](unsigned w) {
    std::vector<u64> chosen;
    for (u64 t = w; t < trials; t += threads) dependent[w] += run_trial(t, chosen) ? 1 : 0;
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }

  DependenceRate rate;
  rate.trials = trials;
  for (u64 c : dependent) rate.dependent += c;
  rate.fraction = static_cast<double>(rate.dependent) / static_cast<double>(trials);
  rate.std_error = std::sqrt(rate.fraction * (1 - rate.fraction) / static_cast<double>(trials));
  return rate;
}

}  // namespace xpowx
