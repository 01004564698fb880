#pragma once

// Distribution tail probabilities and rank correlation.
//
// The special functions are written out from series and continued-fraction
// expansions so results do not depend on a platform math library beyond
// std::lgamma / std::erfc.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wayfind::stats {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Distribution { normal, student_t, chi_square, fisher_f };

struct TestResult {
  double statistic = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;  // only used by F
  double p_value = 1.0;
};

namespace detail {

inline constexpr int kMaxIter = 200000;
inline constexpr double kEps = 1e-16;
inline constexpr double kTiny = 1e-300;

// P(a, x) by series; valid for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  double ap = a;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by modified Lentz continued fraction; valid for x >= a + 1.
inline double gamma_q_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double beta_cf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw StatsError("gamma_p: requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_cf(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw StatsError("gamma_q: requires a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

/// Regularized incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw StatsError("beta_inc: requires a, b > 0");
  if (x < 0.0 || x > 1.0) throw StatsError("beta_inc: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
  return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Two-sided normal p-value for |z|.
inline double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

/// Two-sided Student-t p-value.
inline double student_t_two_sided(double t, double df) {
  if (!(df > 0.0)) throw StatsError("student_t: df must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return beta_inc(0.5 * df, 0.5, x);
}

/// Upper-tail chi-square probability.
inline double chi_square_upper(double x, double df) {
  if (!(df > 0.0)) throw StatsError("chi_square: df must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

/// Upper-tail F probability.
inline double f_upper(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw StatsError("fisher_f: df must be positive");
  if (f <= 0.0) return 1.0;
  return beta_inc(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
}

/// Upper-tail (chi-square, F) or two-sided (normal, t) probability of a statistic.
inline double tail_probability(Distribution dist, double statistic, double df1 = 0.0,
                               double df2 = 0.0) {
  if (std::isnan(statistic)) throw StatsError("tail_probability: statistic is NaN");
  switch (dist) {
    case Distribution::normal:
      return normal_two_sided(statistic);
    case Distribution::student_t:
      return student_t_two_sided(statistic, df1);
    case Distribution::chi_square:
      return chi_square_upper(statistic, df1);
    case Distribution::fisher_f:
      return f_upper(statistic, df1, df2);
  }
  throw StatsError("tail_probability: unknown distribution");
}

/// Inverse of the two-sided normal p-value: returns z with P(|Z| > z) = alpha.
inline double normal_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw StatsError("normal_critical: alpha outside (0, 1)");
  double lo = 0.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_two_sided(mid) > alpha) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Average (mid) ranks, 1-based.
inline std::vector<double> mid_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("pearson: length mismatch");
  if (x.size() < 2) throw StatsError("pearson: need at least two observations");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw StatsError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman's rho: Pearson correlation of mid-ranks.
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StatsError("spearman_rho: length mismatch");
  if (x.size() < 2) throw StatsError("spearman_rho: need at least two observations");
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  try {
    return pearson(rx, ry);
  } catch (const StatsError&) {
    throw StatsError("spearman_rho: zero rank variance");
  }
}

struct NamedColumn {
  std::string name;
  std::vector<double> values;
};

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rho;
  double highlight_threshold = 0.4;

  [[nodiscard]] bool highlighted(std::size_t i, std::size_t j) const {
    return i != j && std::abs(rho[i][j]) > highlight_threshold;
  }
};

/// Pairwise Spearman matrix; cells with |rho| above the threshold are flagged.
inline CorrelationMatrix correlation_matrix(std::span<const NamedColumn> columns,
                                            double highlight_threshold = 0.4) {
  if (columns.size() < 2) throw StatsError("correlation_matrix: need at least two columns");
  const std::size_t n = columns.front().values.size();
  for (const auto& c : columns)
    if (c.values.size() != n) throw StatsError("correlation_matrix: column '" + c.name + "' length mismatch");

  CorrelationMatrix m;
  m.highlight_threshold = highlight_threshold;
  m.rho.assign(columns.size(), std::vector<double>(columns.size(), 1.0));
  for (const auto& c : columns) m.names.push_back(c.name);
  for (std::size_t i = 0; i < columns.size(); ++i)
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      const double r = spearman_rho(columns[i].values, columns[j].values);
      m.rho[i][j] = r;
      m.rho[j][i] = r;
    }
  return m;
}

}  // namespace wayfind::stats
