#pragma once

// Binomial model for F(p): F(p) ~ sum_{d | p-1} Bin(phi(d), 1/d). Exact
// moments, normalized scores and the normal probability-plot machinery used
// to compare scan data with N(0, 1).

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "xpowx/modmath.hpp"
#include "xpowx/psimap.hpp"

namespace xpowx {

using Rational = boost::multiprecision::cpp_rational;

struct ModelMoments {
  u64 p = 0;
  Rational mu;      ///< sum_{d | p-1} phi(d)/d
  Rational sigma2;  ///< sum_{d | p-1} phi(d)(d-1)/d^2

  double mu_value() const;
  double sigma2_value() const;
};

ModelMoments moments(u64 p);

/// (F - mu) / sigma. Throws DomainError when sigma2 == 0 (p = 2).
double z_score(u64 F, const ModelMoments& m);

/// Filliben plotting positions, listed for i = n, n-1, ..., 1:
/// 0.5^(1/n) for i = n, (i - 0.3175)/(n + 0.365) in between, 1 - 0.5^(1/n)
/// for i = 1.
std::vector<double> filliben_positions(std::size_t n);

/// Standard normal quantile for u in (0, 1): Acklam's rational approximation
/// followed by one Halley step against std::erfc. Exactly odd about 1/2.
double normal_quantile(double u);
double normal_cdf(double x);
double normal_pdf(double x, double mean = 0, double sd = 1);

struct QQSeries {
  std::size_t n = 0;
  std::vector<double> theoretical;  ///< descending
  std::vector<double> observed;     ///< descending
  double r2 = 0;
};

/// Requires n >= 3 and a non-constant sample (DomainError otherwise).
QQSeries qq_series(std::span<const double> observed);

/// Squared Pearson correlation. Throws DomainError if either side is constant.
double r_squared(std::span<const double> x, std::span<const double> y);

struct HistogramBin {
  double lo = 0;
  double hi = 0;
  u64 count = 0;
  double overlay = 0;  ///< N(sample mean, sample sd) density at the bin center
};

struct Histogram {
  std::vector<HistogramBin> bins;
  double mean = 0;
  double sd = 0;
  u64 in_range = 0;
};

/// Left-closed, right-open bins of width `bin_width` covering [lo, hi).
/// Mean and sd (n - 1 denominator) come from every score, in range or not;
/// the overlay is zero when sd is zero.
Histogram histogram(std::span<const double> scores, double bin_width, double lo, double hi);

/// omega(p-1) groups. omega <= 2 is reported but flagged as outlier-prone.
enum class OmegaGroup { low, three, four, five_plus };

OmegaGroup omega_group(u32 omega_pm1);
std::string group_label(OmegaGroup g);
bool outlier_prone(OmegaGroup g);

struct ScoredRow {
  ScanRow row;
  double z = 0;
};

/// z-scores for every row with p >= 3.
std::vector<ScoredRow> score_rows(std::span<const ScanRow> rows);

struct GroupSummary {
  u64 p_lo = 0;
  u64 p_hi = 0;
  std::string group;
  std::size_t n = 0;
  double mean_z = 0;
  double sd_z = 0;
  double r2 = 0;  ///< NaN when n < 3 or the scores are constant
  bool outlier_prone = false;
};

GroupSummary summarize(std::span<const double> z, std::string group, u64 p_lo, u64 p_hi,
                       bool flagged);

/// Columns: theoretical,observed
void write_qq_csv(std::ostream& out, const QQSeries& qq);
/// Columns: bin_lo,bin_hi,count,overlay
void write_histogram_csv(std::ostream& out, const Histogram& h);
/// Columns: p_lo,p_hi,group,n,mean_z,sd_z,r2,outlier_prone
void write_summary_csv(std::ostream& out, std::span<const GroupSummary> rows);

}  // namespace xpowx
