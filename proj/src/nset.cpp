#include "xpowx/nset.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "xpowx/error.hpp"

namespace xpowx {

NSetParams params_for(u64 q, double c1, double c2) {
  if (q < 3) throw DomainError("params_for: q must be >= 3");
  if (!(c1 > 0)) throw DomainError("params_for: c1 must be positive");
  if (!(c2 > 2.0 / std::log(2.0))) {
    throw ConfigError("params_for: c2 = " + std::to_string(c2) + " must exceed 2/ln 2 = " +
                      std::to_string(2.0 / std::log(2.0)));
  }
  NSetParams p;
  p.q = q;
  p.c1 = c1;
  p.c2 = c2;
  p.B = c1 * log_iter(2, static_cast<double>(q));
  p.f = c2 * log_iter(3, static_cast<double>(q));
  return p;
}

bool is_member(u64 n, const NSetParams& params) {
  if (n < 2 || n >= params.q) {
    throw DomainError("is_member: n = " + std::to_string(n) + " outside [2, q-1]");
  }
  const u32 small_cap = params.max_small_exponent();
  for (const auto& f : factorize(n).factors) {
    // p == B goes with the small primes.
    const bool small = static_cast<double>(f.prime) <= params.B;
    if (f.exponent > (small ? small_cap : 1u)) return false;
  }
  return true;
}

NSet build(const NSetParams& params) {
  const u64 q = params.q;
  NSet set;
  set.params = params;
  set.membership.assign(q, true);
  set.membership[0] = false;
  if (q > 1) set.membership[1] = false;

  const u32 small_cap = params.max_small_exponent();
  auto strike_multiples = [&](u64 step) {
    for (u64 m = step; m < q; m += step) set.membership[m] = false;
  };
  for (u64 p : primes_up_to(std::max<u64>(q, 2)).primes) {
    if (static_cast<double>(p) <= params.B) {
      // p^(cap+1) < q, otherwise nothing to strike.
      u64 pk = 1;
      bool fits = true;
      for (u32 e = 0; e <= small_cap && fits; ++e) {
        if (pk > (q - 1) / p) fits = false;
        else pk *= p;
      }
      if (fits) strike_multiples(pk);
    } else {
      if (p > (q - 1) / p) break;
      strike_multiples(p * p);
    }
  }

  for (u64 n = 2; n < q; ++n) {
    if (set.membership[n]) set.members.push_back(n);
  }
  set.complement_size = (q - 2) - set.members.size();
  return set;
}

double theoretical_complement_bound(const NSetParams& params) {
  const double q = static_cast<double>(params.q);
  const double B = params.B;
  const double pi_b = B >= 2 ? static_cast<double>(primes_up_to(static_cast<u64>(B)).count()) : 0.0;
  return q * pi_b / std::exp2(params.f) + 3.0 * q / (B * clamped_log(B));
}

void write_bitmap(std::ostream& out, const NSet& set) {
  const u64 q = set.params.q;
  std::string bytes((q + 7) / 8, '\0');
  for (u64 n = 0; n < q; ++n) {
    if (set.membership[n]) bytes[n / 8] = static_cast<char>(bytes[n / 8] | (1u << (n % 8)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<bool> read_bitmap(std::istream& in, u64 q) {
  std::string bytes((q + 7) / 8, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<u64>(in.gcount()) != bytes.size()) {
    throw DomainError("read_bitmap: expected " + std::to_string(bytes.size()) + " bytes");
  }
  std::vector<bool> bits(q);
  for (u64 n = 0; n < q; ++n) bits[n] = (static_cast<unsigned char>(bytes[n / 8]) >> (n % 8)) & 1u;
  return bits;
}

}  // namespace xpowx
