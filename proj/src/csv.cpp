#include "xpowx/csv.hpp"

#include <algorithm>
#include <array>
#include <istream>

#include "xpowx/error.hpp"

namespace xpowx::csv {

std::string format(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::string format_fixed(double v, int decimals) {
  std::array<char, 128> buf{};
  auto [end, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  return std::string(buf.data(), end);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace {

bool read_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

}  // namespace

Reader::Reader(std::istream& in) : in_(in) {
  std::string line;
  if (!read_line(in_, line)) throw DomainError("csv: missing header row");
  ++line_no_;
  header_ = split(line);
}

bool Reader::next() {
  std::string line;
  if (!read_line(in_, line)) return false;
  ++line_no_;
  fields_ = split(line);
  if (fields_.size() != header_.size()) {
    throw DomainError("csv: line " + std::to_string(line_no_) + " has " +
                      std::to_string(fields_.size()) + " fields, header has " +
                      std::to_string(header_.size()));
  }
  return true;
}

std::size_t Reader::index_of(std::string_view column) const {
  auto it = std::find(header_.begin(), header_.end(), column);
  if (it == header_.end()) throw DomainError("csv: missing column '" + std::string(column) + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

std::string_view Reader::field(std::string_view column) const { return fields_[index_of(column)]; }

double Reader::number(std::string_view column) const {
  const auto f = field(column);
  double v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw DomainError("csv: line " + std::to_string(line_no_) + ": bad number in column '" +
                      std::string(column) + "'");
  }
  return v;
}

std::uint64_t Reader::integer(std::string_view column) const {
  const auto f = field(column);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw DomainError("csv: line " + std::to_string(line_no_) + ": bad integer in column '" +
                      std::string(column) + "'");
  }
  return v;
}

}  // namespace xpowx::csv
