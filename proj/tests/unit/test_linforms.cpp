#include <doctest.h>

#include <cmath>

#include "xpowx/error.hpp"
#include "xpowx/linforms.hpp"

using namespace xpowx;

TEST_CASE("form family layout") {
  const FormFamily f(13);
  CHECK(f.d() == 5);
  CHECK(f.primes() == std::vector<u64>{2, 3, 5, 7, 11});
  CHECK(f.column_of(7) == 3);
  CHECK_FALSE(f.column_of(9).has_value());
  CHECK(f.form(1).support() == 0);
  const auto l12 = f.form(12);
  REQUIRE(l12.support() == 2);
  CHECK(l12.terms[0].column == 0);
  CHECK(l12.terms[0].coeff == 2);
  CHECK(l12.terms[1].column == 1);
  CHECK(l12.terms[1].coeff == 1);
  CHECK_THROWS_AS(f.form(13), DomainError);
  CHECK_THROWS_AS(FormFamily(15), DomainError);
  CHECK_THROWS_AS(FormFamily(2), DomainError);

  const std::vector<u64> v{1, 2, 3, 4, 5};
  CHECK(eval_form(l12, v) == 4);
  CHECK_THROWS_AS(eval_form(l12, std::vector<u64>{1, 2}), DomainError);
}

TEST_CASE("exact avoidance counts (brute-force oracle)") {
  CHECK(exact_Nq(3, 1) == 2);
  CHECK(exact_Nq(5, 1) == 12);
  CHECK(exact_Nq(7, 1) == 156);
  CHECK(exact_Nq(11, 1) == 5940);
  const auto e = exact_estimate(FormFamily(7), 1);
  CHECK(e.fraction() == "156/343");
  CHECK(e.value == doctest::Approx(156.0 / 343));
}

TEST_CASE("scaling symmetry") {
  for (u64 q : {3ULL, 5ULL, 7ULL, 11ULL}) {
    const FormFamily f(q);
    CHECK(check_scaling_symmetry(f));
    for (u64 x0 = 1; x0 < q; ++x0) REQUIRE(exact_Nq(f, x0) == exact_Nq(f, 1));
  }
  CHECK_THROWS_AS(exact_Nq(7, 0), DomainError);
  CHECK_THROWS_AS(exact_Nq(7, 7), DomainError);
}

TEST_CASE("budget refusal names q^d") {
  try {
    exact_Nq(23, 1);
    FAIL("expected a budget refusal");
  } catch (const BudgetError& e) {
    CHECK(e.required() == "23^8 = 78310985281");
  }
  CHECK(vector_space_size(23, 8) == 78310985281ULL);
  CHECK_FALSE(vector_space_size(1000003, 78498).has_value());
}

TEST_CASE("affine counts on q = 5 (brute-force oracle)") {
  const FormFamily f(5);
  auto M = [&](std::vector<u64> s) { return count_affine_solutions(f, s).value(5); };
  CHECK(M({}) == 25);
  CHECK(M({2}) == 5);
  CHECK(M({3}) == 5);
  CHECK(M({4}) == 5);
  CHECK(M({2, 3}) == 1);
  CHECK(M({2, 4}) == 0);
  CHECK(M({3, 4}) == 1);
  CHECK(M({1}) == 0);
  CHECK(enumerate_avoiding(f, std::vector<u64>{2, 3, 4}, 1) == 12);
  CHECK(rank_mod_q(f, std::vector<u64>{2, 3, 4}) == 2);
}

TEST_CASE("Bonferroni bounds on q = 5") {
  const FormFamily f(5);
  const std::vector<u64> sub{2, 3, 4};
  const auto k1 = bonferroni_bounds(f, sub, 1);
  CHECK(k1.materialize(k1.lower) == 10);
  CHECK(k1.materialize(k1.upper) == 12);
  CHECK(k1.materialize(k1.total) == 12);
  CHECK_FALSE(k1.untruncated());
  const auto k2 = bonferroni_bounds(f, sub, 2);
  CHECK(k2.untruncated());
  CHECK(k2.lower == k2.upper);
  CHECK(k2.materialize(k2.lower) == 12);
  REQUIRE(k2.enumerated.has_value());
  CHECK(*k2.enumerated == 12);

  CHECK_THROWS_AS(bonferroni_bounds(f, sub, 0), DomainError);
  CHECK_THROWS_AS(bonferroni_bounds(f, std::vector<u64>{2, 2}, 1), DomainError);
  CHECK_THROWS_AS(bonferroni_bounds(f, std::vector<u64>{5}, 1), DomainError);
  const FormFamily big(31);
  std::vector<u64> many;
  for (u64 n = 2; n <= 22; ++n) many.push_back(n);
  CHECK_THROWS_AS(bonferroni_bounds(big, many, 1), BudgetError);
}

TEST_CASE("Monte-Carlo estimator") {
  const FormFamily f(11);
  const auto a = mc_estimate_c(f, 1, 40000, 9);
  const double exact = 5940.0 / 14641;
  CHECK(std::abs(a.value - exact) <= 4 * a.std_error);
  CHECK(a.generator == "splitmix64");
  CHECK(a.mode == EstimateMode::monte_carlo);

  const auto b = mc_estimate_c(f, 1, 40000, 9, {3, false});
  CHECK(a.hits == b.hits);
  CHECK(a.value == b.value);

  const auto zero = mc_estimate_c(f, 1, 100, 9, {1, true});
  CHECK(zero.value == 1.0);
  CHECK(zero.std_error == 0.0);
  CHECK_THROWS_AS(mc_estimate_c(f, 1, 0, 9), DomainError);
}

TEST_CASE("rank comparison record") {
  const FormFamily f(101);
  const auto r = compare_ranks(f, std::vector<u64>{2, 3, 6});
  CHECK(r.mult_rank == 2);
  CHECK(r.fq_rank == 2);
  CHECK(r.agree);
  const auto s = compare_ranks(f, std::vector<u64>{2, 3, 5});
  CHECK(s.mult_rank == 3);
  CHECK(s.fq_rank == 3);
}
