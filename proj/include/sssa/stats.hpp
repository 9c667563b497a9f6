#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sssa/errors.hpp"

namespace sssa {

namespace detail {

// Continued fraction for the regularized incomplete beta function,
// evaluated with the modified Lentz method.
inline double ibeta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 1000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) {
    d = kTiny;
  }
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double numerator = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + numerator * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + numerator / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    h *= d * c;
    numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + numerator * d;
    if (std::abs(d) < kTiny) {
      d = kTiny;
    }
    c = 1.0 + numerator / c;
    if (std::abs(c) < kTiny) {
      c = kTiny;
    }
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return h;
    }
  }
  throw Error("incomplete beta continued fraction did not converge (a=" +
              std::to_string(a) + ", b=" + std::to_string(b) + ")");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) {
    throw InvalidConfig("regularized_incomplete_beta: a, b must be > 0");
  }
  if (x <= 0.0) {
    return 0.0;
  }
  if (x >= 1.0) {
    return 1.0;
  }
  const double log_prefactor = std::lgamma(a + b) - std::lgamma(a) -
                               std::lgamma(b) + a * std::log(x) +
                               b * std::log1p(-x);
  const double prefactor = std::exp(log_prefactor);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return prefactor * detail::ibeta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - prefactor * detail::ibeta_continued_fraction(b, a, 1.0 - x) / b;
}

// Two-sided tail probability of Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (df <= 0.0) {
    throw InvalidConfig("student_t_two_sided_p: df must be > 0");
  }
  if (std::isinf(t)) {
    return 0.0;
  }
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
};

// Paired t-test on the differences u - v: t = mean(w) / (std(w) / sqrt(K))
// with the K-1 sample standard deviation.
inline TTestResult paired_t_test(const std::vector<double>& u,
                                 const std::vector<double>& v) {
  if (u.size() != v.size()) {
    throw LengthMismatch("paired_t_test: samples have different lengths");
  }
  const std::size_t k = u.size();
  if (k < 2) {
    throw TooFewSamples("paired_t_test: needs at least 2 pairs");
  }

  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mean += u[i] - v[i];
  }
  mean /= static_cast<double>(k);

  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double centered = (u[i] - v[i]) - mean;
    ss += centered * centered;
  }
  const double stddev = std::sqrt(ss / static_cast<double>(k - 1));

  if (stddev == 0.0) {
    if (mean == 0.0) {
      return TTestResult{0.0, 1.0};
    }
    const double sign = mean > 0.0 ? 1.0 : -1.0;
    return TTestResult{sign * std::numeric_limits<double>::infinity(), 0.0};
  }

  const double t = mean / (stddev / std::sqrt(static_cast<double>(k)));
  const double p = student_t_two_sided_p(t, static_cast<double>(k - 1));
  return TTestResult{t, p};
}

}  // namespace sssa
