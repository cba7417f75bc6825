#include "xpowx/fhstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "xpowx/csv.hpp"
#include "xpowx/error.hpp"

namespace xpowx {

double ModelMoments::mu_value() const { return static_cast<double>(mu); }
double ModelMoments::sigma2_value() const { return static_cast<double>(sigma2); }

ModelMoments moments(u64 p) {
  if (!is_prime(p)) throw DomainError("moments: " + std::to_string(p) + " is not prime");
  ModelMoments m;
  m.p = p;
  m.mu = 0;
  m.sigma2 = 0;
  const Factorization pm1 = factorize(p - 1);
  for (u64 d : divisors(pm1)) {
    const Rational phi(euler_phi(d));
    m.mu += phi / d;
    m.sigma2 += phi * Rational(d - 1) / (Rational(d) * d);
  }
  return m;
}

double z_score(u64 F, const ModelMoments& m) {
  if (m.sigma2 == 0) {
    throw DomainError("z_score: model variance is zero for p = " + std::to_string(m.p));
  }
  const double diff = static_cast<double>(Rational(F) - m.mu);
  return diff / std::sqrt(m.sigma2_value());
}

std::vector<double> filliben_positions(std::size_t n) {
  if (n == 0) throw DomainError("filliben_positions: n must be >= 1");
  const double nn = static_cast<double>(n);
  std::vector<double> out;
  out.reserve(n);
  const double top = std::pow(0.5, 1.0 / nn);
  for (std::size_t i = n; i >= 1; --i) {
    if (i == n) {
      out.push_back(top);
    } else if (i == 1) {
      out.push_back(1.0 - top);
    } else {
      out.push_back((static_cast<double>(i) - 0.3175) / (nn + 0.365));
    }
  }
  return out;
}

namespace {

// Acklam's coefficients.
constexpr double kA[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                         1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                         6.680131188771972e+01, -1.328068155288572e+01};
constexpr double kC[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                         -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                         3.754408661907416e+00};
constexpr double kLow = 0.02425;

// Lower half only, u in (0, 0.5].
double quantile_lower_half(double u) {
  double x;
  if (u < kLow) {
    const double q = std::sqrt(-2 * std::log(u));
    x = (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
        ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1);
  } else {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
        (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1);
  }
  // Halley refinement.
  const double e = normal_cdf(x) - u;
  const double step = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  return x - step / (1 + x * step / 2);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-z * z / 2) / (sd * std::sqrt(2 * std::numbers::pi));
}

double normal_quantile(double u) {
  if (!(u > 0 && u < 1)) throw DomainError("normal_quantile: u must lie in (0, 1)");
  if (u == 0.5) return 0.0;
  // 1 - u is exact for u >= 0.5, which makes the function exactly odd.
  return u < 0.5 ? quantile_lower_half(u) : -quantile_lower_half(1 - u);
}

double r_squared(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw DomainError("r_squared: length mismatch");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw DomainError("r_squared: constant sequence, correlation undefined");
  return std::min(1.0, sxy * sxy / (sxx * syy));
}

QQSeries qq_series(std::span<const double> observed) {
  if (observed.size() < 3) throw DomainError("qq_series: need at least 3 observations");
  QQSeries s;
  s.n = observed.size();
  s.observed.assign(observed.begin(), observed.end());
  std::sort(s.observed.begin(), s.observed.end(), std::greater<>());
  for (double u : filliben_positions(s.n)) s.theoretical.push_back(normal_quantile(u));
  s.r2 = r_squared(s.theoretical, s.observed);
  return s;
}

Histogram histogram(std::span<const double> scores, double bin_width, double lo, double hi) {
  if (scores.empty()) throw DomainError("histogram: no scores");
  if (!(bin_width > 0)) throw DomainError("histogram: bin width must be positive");
  if (!(hi > lo)) throw DomainError("histogram: empty range");
  Histogram h;
  const std::size_t nbins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));
  for (std::size_t i = 0; i < nbins; ++i) {
    h.bins.push_back({lo + static_cast<double>(i) * bin_width,
                      lo + static_cast<double>(i + 1) * bin_width, 0, 0});
  }
  double sum = 0;
  for (double z : scores) {
    sum += z;
    if (z < lo || z >= hi) continue;
    auto idx = static_cast<std::size_t>((z - lo) / bin_width);
    idx = std::min(idx, nbins - 1);
    ++h.bins[idx].count;
    ++h.in_range;
  }
  const double n = static_cast<double>(scores.size());
  h.mean = sum / n;
  double ss = 0;
  for (double z : scores) ss += (z - h.mean) * (z - h.mean);
  h.sd = scores.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  for (auto& b : h.bins) b.overlay = h.sd > 0 ? normal_pdf((b.lo + b.hi) / 2, h.mean, h.sd) : 0.0;
  return h;
}

OmegaGroup omega_group(u32 omega_pm1) {
  if (omega_pm1 <= 2) return OmegaGroup::low;
  if (omega_pm1 == 3) return OmegaGroup::three;
  if (omega_pm1 == 4) return OmegaGroup::four;
  return OmegaGroup::five_plus;
}

std::string group_label(OmegaGroup g) {
  switch (g) {
    case OmegaGroup::low: return "omega<=2";
    case OmegaGroup::three: return "omega=3";
    case OmegaGroup::four: return "omega=4";
    case OmegaGroup::five_plus: return "omega>=5";
  }
  return {};
}

bool outlier_prone(OmegaGroup g) { return g == OmegaGroup::low; }

std::vector<ScoredRow> score_rows(std::span<const ScanRow> rows) {
  std::vector<ScoredRow> out;
  out.reserve(rows.size());
  for (const ScanRow& r : rows) {
    if (r.p < 3) continue;
    out.push_back({r, z_score(r.F, moments(r.p))});
  }
  return out;
}

GroupSummary summarize(std::span<const double> z, std::string group, u64 p_lo, u64 p_hi,
                       bool flagged) {
  GroupSummary s;
  s.p_lo = p_lo;
  s.p_hi = p_hi;
  s.group = std::move(group);
  s.n = z.size();
  s.outlier_prone = flagged;
  s.r2 = std::numeric_limits<double>::quiet_NaN();
  if (z.empty()) {
    s.mean_z = s.sd_z = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0;
  for (double v : z) sum += v;
  s.mean_z = sum / static_cast<double>(z.size());
  double ss = 0;
  for (double v : z) ss += (v - s.mean_z) * (v - s.mean_z);
  s.sd_z = z.size() > 1 ? std::sqrt(ss / static_cast<double>(z.size() - 1)) : 0.0;
  if (z.size() >= 3 && s.sd_z > 0) s.r2 = qq_series(z).r2;
  return s;
}

void write_qq_csv(std::ostream& out, const QQSeries& qq) {
  out << "theoretical,observed\n";
  for (std::size_t i = 0; i < qq.n; ++i) {
    out << csv::format(qq.theoretical[i]) << ',' << csv::format(qq.observed[i]) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count,overlay\n";
  for (const auto& b : h.bins) {
    out << csv::format(b.lo) << ',' << csv::format(b.hi) << ',' << b.count << ','
        << csv::format(b.overlay) << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const GroupSummary> rows) {
  out << "p_lo,p_hi,group,n,mean_z,sd_z,r2,outlier_prone\n";
  for (const auto& s : rows) {
    out << s.p_lo << ',' << s.p_hi << ',' << s.group << ',' << s.n << ',' << csv::format(s.mean_z)
        << ',' << csv::format(s.sd_z) << ',' << csv::format(s.r2) << ','
        << (s.outlier_prone ? 1 : 0) << '\n';
  }
}

}  // namespace xpowx
