#include "xpowx/psimap.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include "xpowx/csv.hpp"
#include "xpowx/error.hpp"

namespace xpowx {

namespace {

void require_prime(u64 p, const char* op) {
  if (!is_prime(p)) throw DomainError(std::string(op) + ": " + std::to_string(p) + " is not prime");
}

constexpr u64 kWordModulus = u64{1} << 32;

// Walks x_k = g^k for k = 0, ..., p-2 and hands (k, x_k) to `visit`.
template <class Visit>
void walk_primitive_root(u64 p, const Factorization& pm1, Visit&& visit) {
  const u64 g = primitive_root(p, pm1);
  u64 x = 1;
  if (p < kWordModulus) {
    const FastDivisor modp(p);
    for (u64 k = 0; k + 1 < p; ++k) {
      visit(k, x);
      x = modp.mod(x * g);
    }
  } else {
    for (u64 k = 0; k + 1 < p; ++k) {
      visit(k, x);
      x = mul_mod(x, g, p);
    }
  }
}

}  // namespace

u64 psi(u64 p, u64 x) {
  if (x < 1 || x >= p) {
    throw DomainError("psi: x = " + std::to_string(x) + " outside [1, " + std::to_string(p - 1) +
                      "]");
  }
  return pow_mod(x, x, p);
}

std::vector<u64> psi_table(u64 p) {
  require_prime(p, "psi_table");
  std::vector<u64> table(p, 0);
  if (p == 2) {
    table[1] = 1;
    return table;
  }
  const Factorization pm1 = factorize(p - 1);
  std::vector<u64> powers(p - 1);  // powers[k] = g^k
  walk_primitive_root(p, pm1, [&](u64 k, u64 x) { powers[k] = x; });
  for (u64 k = 0; k + 1 < p; ++k) {
    const u64 x = powers[k];
    table[x] = powers[mul_mod(k, x, p - 1)];
  }
  return table;
}

u64 count_fixed_points(u64 p) {
  require_prime(p, "count_fixed_points");
  u64 count = 0;
  for (u64 x = 1; x < p; ++x) {
    if (pow_mod(x, x, p) == x) ++count;
  }
  return count;
}

u64 count_fixed_points_by_order(u64 p) {
  require_prime(p, "count_fixed_points_by_order");
  if (p == 2) return 1;
  const Factorization pm1 = factorize(p - 1);
  u64 count = 0;
  if (p < kWordModulus) {
    const FastDivisor mod_group(p - 1);
    walk_primitive_root(p, pm1, [&](u64 k, u64 x) {
      // k, x - 1 < 2^32, so the product fits in 64 bits.
      if (mod_group.mod(k * (x - 1)) == 0) ++count;
    });
  } else {
    walk_primitive_root(p, pm1, [&](u64 k, u64 x) {
      if (mul_mod(k, x - 1, p - 1) == 0) ++count;
    });
  }
  return count;
}

PsiStats psi_stats(u64 p) {
  const std::vector<u64> table = psi_table(p);
  std::vector<u64> hist(p, 0);
  PsiStats s;
  s.p = p;
  for (u64 x = 1; x < p; ++x) {
    ++hist[table[x]];
    if (table[x] == x) ++s.F;
  }
  for (u64 a = 1; a < p; ++a) {
    if (hist[a] == 0) continue;
    ++s.image_size;
    s.M += hist[a] * hist[a];
  }
  s.n_of_1 = hist[1];
  return s;
}

u64 preimage_count(u64 p, u64 a) {
  if (a % p == 0) throw DomainError("preimage_count: a must be a unit mod p");
  if (a >= p) throw DomainError("preimage_count: a must lie in [1, p-1]");
  const std::vector<u64> table = psi_table(p);
  return static_cast<u64>(std::count(table.begin() + 1, table.end(), a));
}

u64 collision_count(u64 p) { return psi_stats(p).M; }

u64 image_size(u64 p) { return psi_stats(p).image_size; }

ScanRow scan_row(u64 p) {
  ScanRow row;
  row.p = p;
  row.F = count_fixed_points_by_order(p);
  row.omega_pm1 = p > 2 ? static_cast<u32>(factorize(p - 1).omega()) : 0;
  return row;
}

ScanSummary scan_primes(u64 lo, u64 hi, const RowSink& sink, unsigned threads) {
  if (lo < 2 || lo > hi) {
    throw DomainError("scan_primes: need 2 <= lo <= hi, got [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  std::vector<u64> primes;
  if (hi <= 200'000'000) {
    for (u64 p : primes_up_to(hi).primes) {
      if (p >= lo) primes.push_back(p);
    }
  } else {
    for (u64 n = lo; n <= hi && n >= lo; ++n) {
      if (is_prime(n)) primes.push_back(n);
    }
  }

  ScanSummary summary;
  summary.rows.resize(primes.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, primes.size())));

  // Interleaved assignment balances the cost, which grows with p.
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < primes.size(); i += threads) {
      summary.rows[i] = scan_row(primes[i]);
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  summary.prime_count = primes.size();
  for (const ScanRow& row : summary.rows) {
    if (row.F == 1) ++summary.trivial_only;
    if (sink) sink(row);
  }
  return summary;
}

namespace {

void check_lifted_preconditions(u64 p, u64 y, u64 d, const Factorization& pm1) {
  if (d == 0 || (p - 1) % d != 0) {
    throw PreconditionError("lifted_solution_count: d = " + std::to_string(d) +
                            " does not divide p - 1 = " + std::to_string(p - 1));
  }
  if (y % p == 0) throw PreconditionError("lifted_solution_count: p divides y");
  const u64 oy = multiplicative_order(y % p, p, pm1);
  if (d % oy != 0) {
    throw PreconditionError("lifted_solution_count: ord_p(y) = " + std::to_string(oy) +
                            " does not divide d = " + std::to_string(d));
  }
}

std::vector<u64> order_table(u64 p, const Factorization& pm1) {
  std::vector<u64> ord(p, 0);
  for (u64 a = 1; a < p; ++a) ord[a] = multiplicative_order(a, p, pm1);
  return ord;
}

}  // namespace

u64 lifted_solution_count(u64 p, u64 y, u64 d) {
  require_prime(p, "lifted_solution_count");
  const Factorization pm1 = factorize(p - 1);
  check_lifted_preconditions(p, y, d, pm1);
  const std::vector<u64> ord = order_table(p, pm1);
  const u64 target = y % p;
  u64 count = 0;
  for (u64 x = 1; x <= p * (p - 1); ++x) {
    const u64 r = x % p;
    if (r == 0 || ord[r] != d) continue;
    if (pow_mod(r, x, p) == target) ++count;
  }
  return count;
}

u64 lifted_solution_count_for_residue(u64 p, u64 y, u64 a) {
  require_prime(p, "lifted_solution_count_for_residue");
  if (a % p == 0) throw PreconditionError("lifted_solution_count_for_residue: p divides a");
  const Factorization pm1 = factorize(p - 1);
  check_lifted_preconditions(p, y, multiplicative_order(a % p, p, pm1), pm1);
  const u64 target = y % p;
  u64 count = 0;
  for (u64 x = a % p; x <= p * (p - 1); x += p) {
    if (x != 0 && pow_mod(x, x, p) == target) ++count;
  }
  return count;
}

u64 lifted_fixed_total(u64 p) {
  require_prime(p, "lifted_fixed_total");
  u64 count = 0;
  for (u64 x = 1; x <= p * (p - 1); ++x) {
    const u64 r = x % p;
    if (r != 0 && pow_mod(r, x, p) == r) ++count;
  }
  return count;
}

u64 lifted_fixed_total_formula(u64 p) {
  require_prime(p, "lifted_fixed_total_formula");
  const Factorization pm1 = factorize(p - 1);
  u64 total = 0;
  for (u64 d : divisors(pm1)) total += euler_phi(d) * ((p - 1) / d);
  return total;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "p,F,omega_pm1\n";
  for (const ScanRow& r : rows) out << r.p << ',' << r.F << ',' << r.omega_pm1 << '\n';
}

std::vector<ScanRow> read_scan_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<ScanRow> rows;
  while (reader.next()) {
    ScanRow r;
    r.p = reader.integer("p");
    r.F = reader.integer("F");
    r.omega_pm1 = static_cast<u32>(reader.integer("omega_pm1"));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace xpowx
