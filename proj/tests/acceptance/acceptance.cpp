// One PASS/FAIL line per acceptance criterion. `acceptance --only N` runs a
// single criterion; exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "xpowx/fhstats.hpp"
#include "xpowx/linforms.hpp"
#include "xpowx/multind.hpp"
#include "xpowx/nset.hpp"
#include "xpowx/psimap.hpp"

using namespace xpowx;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

unsigned cores() { return std::max(1u, std::thread::hardware_concurrency()); }

// N_q(x0) by walking all of F_q^d; exponents come from trial division.
u64 naive_Nq(u64 q, u64 x0) {
  std::vector<u64> primes;
  for (u64 n = 2; n < q; ++n) {
    bool prime = true;
    for (u64 d = 2; d * d <= n; ++d) prime = prime && n % d != 0;
    if (prime) primes.push_back(n);
  }
  const std::size_t d = primes.size();
  std::vector<std::vector<u64>> expo(q, std::vector<u64>(d, 0));
  for (u64 n = 2; n < q; ++n) {
    u64 m = n;
    for (std::size_t i = 0; i < d; ++i) {
      while (m % primes[i] == 0) {
        ++expo[n][i];
        m /= primes[i];
      }
    }
  }
  std::vector<u64> v(d, 0);
  u64 count = 0;
  while (true) {
    bool avoids = true;
    for (u64 n = 2; n < q && avoids; ++n) {
      u64 s = 0;
      for (std::size_t i = 0; i < d; ++i) s += expo[n][i] * v[i];
      avoids = s % q != x0;
    }
    if (avoids) ++count;
    std::size_t i = 0;
    while (i < d && ++v[i] == q) v[i++] = 0;
    if (i == d) break;
  }
  return count;
}

Outcome criterion1() {
  const u64 qs[] = {3, 5, 7, 11, 13};
  std::string values;
  bool ok = true;
  for (u64 q : qs) {
    const u64 fast = exact_Nq(q, 1);
    const u64 slow = naive_Nq(q, 1);
    ok = ok && fast == slow;
    values += fmt(" N%llu=%llu", (unsigned long long)q, (unsigned long long)fast);
    if (fast != slow) values += fmt("(naive %llu)", (unsigned long long)slow);
  }
  ok = ok && exact_Nq(3, 1) == 2 && exact_Nq(5, 1) == 12 && exact_Nq(7, 1) == 156;
  return {ok, "exact_Nq vs naive enumeration:" + values};
}

Outcome criterion2() {
  bool ok = true;
  std::string detail = "N_q(x0) constant over x0 in [1, q-1]:";
  for (u64 q : {3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    const FormFamily f(q);
    const u64 base = exact_Nq(f, 1);
    u64 bad = 0;
    for (u64 x0 = 2; x0 < q; ++x0) bad += exact_Nq(f, x0) != base;
    ok = ok && bad == 0;
    detail += fmt(" q=%llu %s", (unsigned long long)q, bad ? "differs" : "ok");
  }
  return {ok, detail};
}

Outcome criterion3() {
  const double inv_e = std::exp(-1.0);
  const u64 qs[] = {10007, 100003, 1000003};
  std::vector<double> err, se;
  std::string detail;
  bool ok = true;
  for (u64 q : qs) {
    const FormFamily f(q);
    const auto e = mc_estimate_c(f, 1, 200000, 1, {cores(), false});
    err.push_back(std::abs(e.value - inv_e));
    se.push_back(e.std_error);
    ok = ok && err.back() <= 0.02;
    detail += fmt(" c(%llu)=%.5f+-%.5f", (unsigned long long)q, e.value, e.std_error);
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double slack = 2 * std::sqrt(se[i] * se[i] + se[i - 1] * se[i - 1]);
    ok = ok && err[i] <= err[i - 1] + slack;
  }
  return {ok, "Monte-Carlo c(q) within 0.02 of 1/e, |c - 1/e| nonincreasing within 2 stderr;" + detail};
}

Outcome criterion4() {
  std::mt19937_64 rng(2024);
  const u64 qs[] = {5, 7, 11};
  u64 checks = 0, failures = 0;
  for (int t = 0; t < 100; ++t) {
    const u64 q = qs[t % 3];
    const FormFamily f(q);
    std::vector<u64> pool;
    for (u64 n = 2; n < q; ++n) pool.push_back(n);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t m = 1 + rng() % std::min<std::size_t>(10, pool.size());
    std::vector<u64> sub(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    const BigInt exact = enumerate_avoiding(f, sub, 1);
    for (std::size_t K = 1; K <= m; ++K) {
      const auto b = bonferroni_bounds(f, sub, K);
      const BigInt lower = b.materialize(b.lower), upper = b.materialize(b.upper);
      ++checks;
      if (!(lower <= exact && exact <= upper)) ++failures;
    }
  }
  return {failures == 0, fmt("Bonferroni sandwich on 100 families, %llu (family, K) pairs, %llu violations",
                             (unsigned long long)checks, (unsigned long long)failures)};
}

Outcome criterion5() {
  std::mt19937_64 rng(77);
  const FormFamily f101(101), f10007(10007);
  u64 violations = 0, disagreements = 0;
  std::string examples;
  for (int t = 0; t < 10000; ++t) {
    const FormFamily& f = t % 2 ? f10007 : f101;
    const std::size_t k = 1 + rng() % 5;
    std::set<u64> picked;
    while (picked.size() < k) picked.insert(2 + rng() % (f.q() - 2));
    const std::vector<u64> tuple(picked.begin(), picked.end());
    const auto r = compare_ranks(f, tuple);
    if (r.fq_rank > r.mult_rank) ++violations;
    if (!r.agree) {
      ++disagreements;
      if (disagreements <= 3) {
        examples += fmt(" q=%llu tuple=", (unsigned long long)f.q());
        for (std::size_t i = 0; i < tuple.size(); ++i) examples += (i ? "," : "") + std::to_string(tuple[i]);
      }
    }
  }
  return {violations == 0, fmt("fq_rank <= mult_rank on 10000 tuples: %llu violations, %llu rank disagreements",
                               (unsigned long long)violations, (unsigned long long)disagreements) +
                               examples};
}

Outcome criterion6() {
  bool ok = dependent_pair_count_exact(5) == 1 && dependent_pair_count_exact(10) == 4 &&
            dependent_pair_count_exact(17) == 7;
  u64 mismatches = 0;
  for (u64 q = 3; q <= 300; ++q) mismatches += dependent_pair_count_exact(q) != dependent_pair_count_by_rank(q);
  ok = ok && mismatches == 0;
  const auto set = build(params_for(100003)).members;
  const auto rate = sample_dependence_rate(set, 3, 100000, 1, cores());
  ok = ok && rate.fraction <= 1e-3;
  return {ok, fmt("pair counts match rank brute force for q <= 300 (%llu mismatches); k=3 over N_100003: "
                  "%llu/%llu dependent",
                  (unsigned long long)mismatches, (unsigned long long)rate.dependent,
                  (unsigned long long)rate.trials)};
}

Outcome criterion7() {
  bool ok = true;
  std::string detail = "complement of N_q vs bound (c1=1, c2=3):";
  for (u64 q : {100000ULL, 1000000ULL}) {
    const auto params = params_for(q);
    const auto set = build(params);
    const double bound = theoretical_complement_bound(params);
    const double c = static_cast<double>(set.complement_size);
    ok = ok && c <= bound && c / static_cast<double>(q) < 1;
    detail += fmt(" q=%llu complement=%llu bound=%.1f ratio=%.4f", (unsigned long long)q,
                  (unsigned long long)set.complement_size, bound, c / static_cast<double>(q));
  }
  return {ok, detail};
}

Outcome criterion8() {
  u64 cases = 0, stated_fail = 0, corrected_fail = 0;
  for (u64 p : primes_up_to(200).primes) {
    if (p == 2) continue;
    const auto pm1 = factorize(p - 1);
    for (u64 d : divisors(pm1)) {
      for (u64 y = 1; y < p; ++y) {
        if (d % multiplicative_order(y, p, pm1) != 0) continue;
        const u64 got = lifted_solution_count(p, y, d);
        ++cases;
        stated_fail += got != (p - 1) / d;
        corrected_fail += got != euler_phi(d) * (p - 1) / d;
      }
    }
  }
  u64 total_fail = 0;
  for (u64 p : primes_up_to(500).primes) {
    boost::multiprecision::cpp_rational s = 0;
    for (u64 d : divisors(p - 1)) s += boost::multiprecision::cpp_rational(euler_phi(d), d);
    s *= p - 1;
    total_fail += boost::multiprecision::cpp_rational(lifted_fixed_total(p)) != s;
  }
  std::printf("  note 8: count = phi(d)(p-1)/d holds in %llu of %llu cases\n",
              (unsigned long long)(cases - corrected_fail), (unsigned long long)cases);
  return {stated_fail == 0 && total_fail == 0,
          fmt("(a) count = (p-1)/d for p <= 200: %llu of %llu cases differ; (b) lifted total formula for "
              "p <= 500: %llu mismatches",
              (unsigned long long)stated_fail, (unsigned long long)cases, (unsigned long long)total_fail)};
}

Outcome criterion9() {
  const auto scan = scan_primes(1000000, 1100000, {}, cores());
  std::vector<double> z;
  for (const auto& s : score_rows(scan.rows)) {
    if (s.row.omega_pm1 >= 3) z.push_back(s.z);
  }
  const auto g = summarize(z, "omega>=3", 1000000, 1100000, false);
  const bool mean_ok = std::abs(g.mean_z) <= 0.15;
  const bool sd_ok = g.sd_z >= 0.85 && g.sd_z <= 1.25;
  const bool r2_ok = g.r2 >= 0.9;
  return {mean_ok && sd_ok && r2_ok,
          fmt("z over %zu primes in [1e6, 1.1e6] with omega(p-1) >= 3: mean=%.4f (%s) sd=%.4f (%s) R2=%.4f (%s)",
              g.n, g.mean_z, mean_ok ? "ok" : "outside [-0.15, 0.15]", g.sd_z, sd_ok ? "ok" : "outside",
              g.r2, r2_ok ? "ok" : "below 0.9")};
}

Outcome criterion10() {
  const auto s = scan_primes(2, 100000, {}, cores());
  const bool ok = s.trivial_fraction() < 0.5 && s.trivial_only == 567 && s.prime_count == 9592;
  return {ok, fmt("primes p <= 1e5 with F(p) = 1: %llu/%llu = %.5f (regression 567/9592)",
                  (unsigned long long)s.trivial_only, (unsigned long long)s.prime_count, s.trivial_fraction())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                        criterion5, criterion6, criterion7, criterion8,
                                                        criterion9, criterion10};
  bool all = true;
  for (int i = 1; i <= 10; ++i) {
    if (only && i != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = criteria[static_cast<std::size_t>(i - 1)]();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s [%.1fs]\n", i, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
