#include <doctest.h>

#include <cmath>
#include <sstream>

#include "xpowx/error.hpp"
#include "xpowx/nset.hpp"

using namespace xpowx;

TEST_CASE("parameters with clamped logs") {
  const auto p = params_for(10);
  CHECK(p.B == 2.0);
  CHECK(p.f == 6.0);
  CHECK(p.max_small_exponent() == 6);
  CHECK(params_for(1000000).B == doctest::Approx(std::log(std::log(1e6))));
  CHECK_THROWS_AS(params_for(2), DomainError);
  CHECK_THROWS_AS(params_for(100, 0.0), DomainError);
  CHECK_THROWS_AS(params_for(100, 1.0, 2.0), ConfigError);
}

TEST_CASE("membership for q = 10") {
  const auto p = params_for(10);
  CHECK(is_member(8, p));
  CHECK_FALSE(is_member(9, p));
  CHECK(is_member(6, p));
  CHECK_THROWS_AS(is_member(10, p), DomainError);
  CHECK_THROWS_AS(is_member(1, p), DomainError);
  const auto s = build(p);
  CHECK(s.members == std::vector<u64>{2, 3, 4, 5, 6, 7, 8});
  CHECK(s.complement_size == 1);
}

TEST_CASE("small exponent cap bites") {
  // 2^7 = 128 exceeds floor(f) = 6 at q = 1000.
  const auto p = params_for(1000);
  CHECK_FALSE(is_member(128, p));
  CHECK(is_member(64, p));
  CHECK_FALSE(is_member(49, p));
}

TEST_CASE("sieve agrees with membership test") {
  for (u64 q : {3ULL, 17ULL, 1000ULL, 5000ULL}) {
    for (double c1 : {1.0, 2.5}) {
      const auto p = params_for(q, c1, 3.0);
      const auto s = build(p);
      for (u64 n = 2; n < q; ++n) REQUIRE(s.contains(n) == is_member(n, p));
    }
  }
}

TEST_CASE("complement bound") {
  const auto p = params_for(10000);
  CHECK(static_cast<double>(build(p).complement_size) <= theoretical_complement_bound(p));
}

TEST_CASE("bitmap round trip") {
  const auto s = build(params_for(1001));
  std::stringstream buf;
  write_bitmap(buf, s);
  CHECK(buf.str().size() == 126);
  // n = 2, 3 are members: byte 0 has bits 2 and 3 set.
  CHECK((static_cast<unsigned char>(buf.str()[0]) & 0x0c) == 0x0c);
  CHECK(read_bitmap(buf, 1001) == s.membership);
  std::stringstream short_buf("ab");
  CHECK_THROWS_AS(read_bitmap(short_buf, 1001), DomainError);
}
