#pragma once

// Small statistics toolbox: normal distribution, one-sample KS against
// Uniform(0,1), Wilcoxon signed-rank, and normal-approximation summaries.

#include <cstddef>
#include <span>

namespace uamdp {

inline constexpr double kZ95 = 1.959963984540054;

double normal_pdf(double x);
double normal_cdf(double x);
// Inverse standard normal CDF for p in (0,1).
double normal_quantile(double p);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // n-1 denominator; 0 when n < 2
  double se = 0.0;
  double ci_lo = 0.0;  // mean -/+ 1.96 se
  double ci_hi = 0.0;
};

Summary summarize(std::span<const double> x);

// P(K > lambda) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// D_n = sup |F_n(u) - u| and the asymptotic p-value of sqrt(n) D_n.
KsResult ks_uniform(std::span<const double> u);

struct WilcoxonResult {
  std::size_t n = 0;  // non-zero differences
  double w_plus = 0.0;
  double p_value = 1.0;
  bool exact = false;
};

// One-sided signed-rank test of H1: differences tend to be positive. Zero
// differences are dropped. Exact null distribution when there are no ties
// and n <= 60, otherwise the tie-corrected normal approximation with
// continuity correction.
WilcoxonResult wilcoxon_signed_rank_greater(std::span<const double> diffs);

}  // namespace uamdp
