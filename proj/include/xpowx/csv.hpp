#pragma once

// Minimal locale-independent CSV helpers shared by the modules that read or
// write tabular results.

#include <charconv>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace xpowx::csv {

/// Shortest representation that round-trips; always '.' as decimal point.
std::string format(double v);
/// Fixed number of decimals, locale-independent.
std::string format_fixed(double v, int decimals);

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Header-indexed reader. Throws DomainError naming the missing column or the
/// offending line.
class Reader {
 public:
  explicit Reader(std::istream& in);

  bool next();
  std::string_view field(std::string_view column) const;
  double number(std::string_view column) const;
  std::uint64_t integer(std::string_view column) const;
  std::size_t line_number() const noexcept { return line_no_; }
  const std::vector<std::string>& header() const noexcept { return header_; }

 private:
  std::size_t index_of(std::string_view column) const;

  std::istream& in_;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
  std::size_t line_no_ = 0;
};

}  // namespace xpowx::csv
