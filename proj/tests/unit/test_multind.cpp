#include <doctest.h>

#include <random>

#include "xpowx/error.hpp"
#include "xpowx/multind.hpp"

using namespace xpowx;

TEST_CASE("exponent matrix") {
  const std::vector<u64> t{12, 18};
  const auto m = exponent_matrix(t);
  CHECK(m.primes == std::vector<u64>{2, 3});
  CHECK(m.entries == std::vector<std::vector<i64>>{{2, 1}, {1, 2}});
  CHECK_THROWS_AS(exponent_matrix(std::vector<u64>{2, 2}), DomainError);
  CHECK_THROWS_AS(exponent_matrix(std::vector<u64>{1, 3}), DomainError);
}

TEST_CASE("ranks and relations") {
  const std::vector<u64> a{2, 3, 6};
  CHECK(multiplicative_rank(a) == 2);
  CHECK_FALSE(is_mult_independent(a));
  const auto r = find_relation(a);
  REQUIRE(r.has_value());
  CHECK(r->alphas == std::vector<i64>{1, 1, -1});
  CHECK(verify_relation(a, *r));
  CHECK_FALSE(verify_relation(a, MultRelation{{1, 1, 1}}));

  const std::vector<u64> b{4, 8};
  const auto rb = find_relation(b);
  REQUIRE(rb.has_value());
  CHECK(rb->alphas == std::vector<i64>{3, -2});

  const std::vector<u64> c{2, 3, 5, 7};
  CHECK(is_mult_independent(c));
  CHECK_FALSE(find_relation(c).has_value());
  CHECK(multiplicative_rank(std::vector<u64>{12, 18, 6}) == 2);
}

TEST_CASE("integer rank falls back to big integers") {
  const i64 big = i64{1} << 40;
  CHECK(integer_rank({{big, 1}, {1, big}}) == 2);
  CHECK(integer_rank({{big, 2 * big}, {3 * big, 6 * big}}) == 1);
  CHECK(integer_rank({{big, big + 1, 7}, {big + 3, big, 11}, {2 * big + 3, 2 * big + 1, 18}}) == 2);
  CHECK(integer_rank({}) == 0);
  CHECK(integer_rank({{0, 0}, {0, 0}}) == 0);
}

TEST_CASE("relations are verified on random dependent tuples") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    // x, y, x^i * y^j with small bases is always dependent.
    const u64 x = 2 + rng() % 30, y = 2 + rng() % 30;
    if (x == y) continue;
    const u64 i = 1 + rng() % 3, j = 1 + rng() % 3;
    u64 z = 1;
    for (u64 e = 0; e < i; ++e) z *= x;
    for (u64 e = 0; e < j; ++e) z *= y;
    const std::vector<u64> t{x, y, z};
    const auto r = find_relation(t);
    REQUIRE(r.has_value());
    REQUIRE(verify_relation(t, *r));
  }
}

TEST_CASE("dependent pair counts") {
  CHECK(dependent_pair_count_exact(5) == 1);
  CHECK(dependent_pair_count_exact(10) == 4);
  CHECK(dependent_pair_count_exact(17) == 7);
  for (u64 q = 3; q <= 150; ++q) {
    REQUIRE(dependent_pair_count_exact(q) == dependent_pair_count_by_rank(q));
  }
}

TEST_CASE("sampled dependence rate") {
  std::vector<u64> set;
  for (u64 n = 2; n <= 9; ++n) set.push_back(n);
  const auto r = sample_dependence_rate(set, 2, 20000, 1);
  CHECK(r.trials == 20000);
  // 4 of the 28 pairs are dependent.
  CHECK(r.fraction == doctest::Approx(4.0 / 28).epsilon(0.1));
  const auto again = sample_dependence_rate(set, 2, 20000, 1, 3);
  CHECK(again.dependent == r.dependent);
  CHECK(sample_dependence_rate(set, 2, 20000, 2).dependent != r.dependent);
  CHECK_THROWS_AS(sample_dependence_rate(set, 9, 10, 1), DomainError);
  CHECK_THROWS_AS(sample_dependence_rate(set, 2, 0, 1), DomainError);
}
