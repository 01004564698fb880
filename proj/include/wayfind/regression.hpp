#pragma once

// Multiple linear regression by orthogonal decomposition, backward stepwise
// elimination with single-coefficient F tests, and the three-variant models
// (infrastructure, personal, combined) fitted per behavioral outcome.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wayfind/features.hpp"
#include "wayfind/linalg.hpp"
#include "wayfind/stats.hpp"

namespace wayfind::regression {

class RegressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankDeficientError : public RegressionError {
 public:
  RankDeficientError(const std::string& msg, std::vector<std::string> columns)
      : RegressionError(msg), columns_(std::move(columns)) {}
  [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }

 private:
  std::vector<std::string> columns_;
};

inline const std::string kConstant = "Constant";

struct DesignMatrix {
  std::string response;
  std::vector<std::string> names;
  Eigen::MatrixXd x;  // rows = records, no intercept column
  Eigen::VectorXd y;

  void validate() const {
    if (x.rows() != y.size()) throw RegressionError("design matrix and response differ in length");
    if (static_cast<std::size_t>(x.cols()) != names.size()) throw RegressionError("column names do not match matrix");
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j]) throw RegressionError("duplicate column '" + names[i] + "'");
    if (!x.allFinite() || !y.allFinite()) throw RegressionError("design matrix has missing or non-finite cells");
    if (x.rows() <= x.cols() + 1)
      throw RegressionError("not estimable: " + std::to_string(x.rows()) + " records for " +
                            std::to_string(x.cols() + 1) + " coefficients");
  }

  [[nodiscard]] DesignMatrix select(const std::vector<std::size_t>& columns) const {
    DesignMatrix d;
    d.response = response;
    d.y = y;
    d.x.resize(x.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      d.x.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(columns[j]));
      d.names.push_back(names[columns[j]]);
    }
    return d;
  }
};

struct Coefficient {
  std::string name;
  double beta = 0.0;
  double std_err = 0.0;
  double t = 0.0;
  double p = 1.0;
};

struct RegressionResult {
  std::string response;
  Coefficient intercept;
  std::vector<Coefficient> coefficients;  // one per design column
  Eigen::VectorXd residuals;
  double r2 = 0.0;
  double r2_adj = 0.0;
  double f_stat = std::numeric_limits<double>::quiet_NaN();  // undefined for intercept-only fits
  double f_p = std::numeric_limits<double>::quiet_NaN();
  double sigma = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;  // regressors excluding the intercept

  [[nodiscard]] const Coefficient* find(const std::string& name) const {
    if (name == kConstant) return &intercept;
    for (const auto& c : coefficients)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Least squares with an intercept via column-pivoted Householder QR.
inline RegressionResult ols_fit(const DesignMatrix& d) {
  d.validate();
  const auto n = d.x.rows();
  const auto k = d.x.cols();
  Eigen::MatrixXd a(n, k + 1);
  a.col(0).setOnes();
  a.rightCols(k) = d.x;

  std::vector<std::string> all_names{kConstant};
  all_names.insert(all_names.end(), d.names.begin(), d.names.end());
  if (const auto dep = linalg::dependent_columns(a); !dep.empty()) {
    std::vector<std::string> cols;
    for (int j : dep) cols.push_back(all_names[static_cast<std::size_t>(j)]);
    throw RankDeficientError("rank-deficient design: columns " + linalg::join_names(dep, all_names) +
                                 " are linearly dependent",
                             cols);
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd beta = qr.solve(d.y);
  RegressionResult r;
  r.response = d.response;
  r.n = static_cast<std::size_t>(n);
  r.k = static_cast<std::size_t>(k);
  r.residuals = d.y - a * beta;

  const double df_resid = static_cast<double>(n - k - 1);
  const double sse = r.residuals.squaredNorm();
  const double sst = (d.y.array() - d.y.mean()).square().sum();
  if (!(sst > 0.0)) throw RegressionError("response '" + d.response + "' has zero variance");
  r.sigma = std::sqrt(sse / df_resid);
  r.r2 = 1.0 - sse / sst;
  r.r2_adj = 1.0 - (1.0 - r.r2) * static_cast<double>(n - 1) / df_resid;
  if (k > 0) {
    r.f_stat = (r.r2 / static_cast<double>(k)) / ((1.0 - r.r2) / df_resid);
    r.f_p = stats::f_upper(r.f_stat, static_cast<double>(k), df_resid);
  }

  // cov(beta) = sigma^2 P (R'R)^-1 P'
  const Eigen::MatrixXd rr = qr.matrixR().topLeftCorner(k + 1, k + 1).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      rr.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k + 1, k + 1));
  const Eigen::MatrixXd cov_perm = rinv * rinv.transpose();
  const Eigen::MatrixXd cov = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();

  auto coefficient = [&](Eigen::Index j) {
    Coefficient c;
    c.name = all_names[static_cast<std::size_t>(j)];
    c.beta = beta(j);
    c.std_err = r.sigma * std::sqrt(cov(j, j));
    c.t = c.beta / c.std_err;
    c.p = stats::student_t_two_sided(c.t, df_resid);
    return c;
  };
  r.intercept = coefficient(0);
  for (Eigen::Index j = 1; j <= k; ++j) r.coefficients.push_back(coefficient(j));
  return r;
}

/// Partial F statistic for dropping one coefficient; equals t squared.
inline stats::TestResult f_to_remove(const RegressionResult& r, std::size_t column) {
  const auto& c = r.coefficients.at(column);
  const double df2 = static_cast<double>(r.n - r.k - 1);
  const double f = c.t * c.t;
  return {f, 1.0, df2, stats::f_upper(f, 1.0, df2)};
}

struct RemovalStep {
  std::string name;
  double f = 0.0;
  double p = 1.0;
};

struct StepwiseResult {
  RegressionResult model;
  std::vector<RemovalStep> removals;
  std::vector<std::string> excluded;  // dropped before fitting as linearly dependent
};

/// Drops, in declaration order, every column that is linearly dependent on
/// the intercept and the columns kept so far (dummy-variable traps, constant
/// columns). Returns kept column indices.
inline std::vector<std::size_t> independent_columns(const DesignMatrix& d, std::vector<std::string>* excluded) {
  std::vector<std::size_t> kept;
  Eigen::MatrixXd a(d.x.rows(), 1);
  a.col(0).setOnes();
  for (Eigen::Index j = 0; j < d.x.cols(); ++j) {
    Eigen::MatrixXd trial(a.rows(), a.cols() + 1);
    trial << a, d.x.col(j);
    if (linalg::dependent_columns(trial).empty()) {
      a = std::move(trial);
      kept.push_back(static_cast<std::size_t>(j));
    } else if (excluded) {
      excluded->push_back(d.names[static_cast<std::size_t>(j)]);
    }
  }
  return kept;
}

/// Backward elimination: repeatedly removes the coefficient with the largest
/// removal p-value while it exceeds alpha. Ties remove the later column.
inline StepwiseResult backward_stepwise(const DesignMatrix& d, double alpha_remove = 0.05,
                                        bool drop_dependent = false) {
  StepwiseResult out;
  std::vector<std::size_t> cols;
  if (drop_dependent) {
    cols = independent_columns(d, &out.excluded);
  } else {
    for (std::size_t j = 0; j < d.names.size(); ++j) cols.push_back(j);
  }
  while (true) {
    auto fit = ols_fit(d.select(cols));
    std::size_t worst = cols.size();
    double worst_p = -1.0;
    for (std::size_t j = 0; j < fit.coefficients.size(); ++j) {
      const double p = fit.coefficients[j].p;
      if (p >= worst_p) {
        worst_p = p;
        worst = j;
      }
    }
    if (worst == cols.size() || worst_p <= alpha_remove) {
      out.model = std::move(fit);
      return out;
    }
    const auto test = f_to_remove(fit, worst);
    out.removals.push_back({fit.coefficients[worst].name, test.statistic, test.p_value});
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

// ---------------------------------------------------------------------------
// Behavioral models

/// One (participant, task) record with the walked route's variables, the
/// participant's characteristics and the three measured behaviors.
struct BehaviorRecord {
  std::string participant;
  int task = 1;
  FeatureVector route;
  ParticipantProfile profile;
  double avg_speed = 0.0;         // m/s
  double hesitation_count = 0.0;  // pauses per task
  double head_rotation = 0.0;     // deg/s
};

inline const std::array<std::string, 3>& behavior_names() {
  static const std::array<std::string, 3> n = {"avg_speed", "hesitation_count", "head_rotation"};
  return n;
}

inline double behavior_value(const BehaviorRecord& r, const std::string& name) {
  if (name == "avg_speed") return r.avg_speed;
  if (name == "hesitation_count") return r.hesitation_count;
  if (name == "head_rotation") return r.head_rotation;
  throw RegressionError("unknown behavior '" + name + "'");
}

enum class Variant { infra, personal, combined };

inline std::string_view variant_label(Variant v) {
  switch (v) {
    case Variant::infra: return "MLR infra";
    case Variant::personal: return "MLR personal char";
    case Variant::combined: return "MLR infra + personal char";
  }
  return "";
}

/// Column sets: all route and task variables for infra, all participant
/// variables for personal, both for combined.
inline DesignMatrix behavior_design(const std::vector<BehaviorRecord>& records, const std::string& response,
                                    Variant v) {
  if (records.empty()) throw RegressionError("no behavior records");
  DesignMatrix d;
  d.response = response;
  const bool infra = v != Variant::personal;
  const bool personal = v != Variant::infra;
  if (infra) d.names = FeatureVector::names();
  if (personal)
    d.names.insert(d.names.end(), ParticipantProfile::names().begin(), ParticipantProfile::names().end());
  const auto n = static_cast<Eigen::Index>(records.size());
  d.x.resize(n, static_cast<Eigen::Index>(d.names.size()));
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    std::vector<double> row;
    if (infra) row = r.route.values();
    if (personal) {
      const auto pv = r.profile.values();
      row.insert(row.end(), pv.begin(), pv.end());
    }
    for (std::size_t j = 0; j < row.size(); ++j) d.x(i, static_cast<Eigen::Index>(j)) = row[j];
    d.y(i) = behavior_value(r, response);
  }
  return d;
}

struct BehaviorModels {
  std::string response;
  std::array<StepwiseResult, 3> variants;  // infra, personal, combined
};

/// Three backward-stepwise fits per behavior.
inline std::array<BehaviorModels, 3> run_three_models(const std::vector<BehaviorRecord>& records,
                                                      double alpha_remove = 0.05) {
  std::array<BehaviorModels, 3> out;
  for (std::size_t b = 0; b < 3; ++b) {
    out[b].response = behavior_names()[b];
    for (const auto v : {Variant::infra, Variant::personal, Variant::combined})
      out[b].variants[static_cast<std::size_t>(v)] =
          backward_stepwise(behavior_design(records, out[b].response, v), alpha_remove, true);
  }
  return out;
}

inline std::string format_p(double p) {
  if (std::isnan(p)) return "n/a";
  if (p < 0.001) return "<0.001";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(3);
  s << p;
  return s.str();
}

inline std::string format_fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

/// Markdown table with one Beta/Std/p-value column group per variant.
inline std::string to_markdown(const BehaviorModels& m) {
  std::vector<std::string> rows{kConstant};
  for (const auto& v : m.variants)
    for (const auto& c : v.model.coefficients)
      if (std::find(rows.begin(), rows.end(), c.name) == rows.end()) rows.push_back(c.name);

  std::ostringstream s;
  s << "| " << m.response << " |";
  for (const auto v : {Variant::infra, Variant::personal, Variant::combined})
    s << ' ' << variant_label(v) << " | | |";
  s << "\n|---|";
  for (int i = 0; i < 9; ++i) s << "---|";
  s << "\n| |";
  for (int i = 0; i < 3; ++i) s << " Beta | Std | p-value |";
  s << '\n';
  for (const auto& name : rows) {
    s << "| " << name << " |";
    for (const auto& v : m.variants) {
      if (const auto* c = v.model.find(name))
        s << ' ' << format_fixed(c->beta, 4) << " | " << format_fixed(c->std_err, 4) << " | " << format_p(c->p)
          << " |";
      else
        s << " | | |";
    }
    s << '\n';
  }
  auto summary = [&](const char* label, auto value) {
    s << "| " << label << " |";
    for (const auto& v : m.variants) s << " | " << value(v.model) << " | |";
    s << '\n';
  };
  summary("Adj. R square", [](const RegressionResult& r) { return format_fixed(r.r2_adj, 3); });
  summary("F stat", [](const RegressionResult& r) { return format_fixed(r.f_stat, 3); });
  summary("Significance", [](const RegressionResult& r) { return format_p(r.f_p); });
  return s.str();
}

}  // namespace wayfind::regression
