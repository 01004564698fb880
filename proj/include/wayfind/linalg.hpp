#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace wayfind::linalg {

/// Identifies a linearly dependent column group of X, or returns an empty
/// vector when X has full column rank. Columns are scaled to unit norm first
/// so the rank threshold is unit-free. The returned indices are sorted.
inline std::vector<int> dependent_columns(const Eigen::MatrixXd& x, double rel_tol = 1e-9) {
  const auto p = x.cols();
  Eigen::MatrixXd z = x;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = z.col(j).norm();
    if (norm == 0.0) return {static_cast<int>(j)};
    z.col(j) /= norm;
  }
  // Sequential projection in declaration order: the first column that is
  // explained by earlier columns defines the dependent group.
  for (Eigen::Index j = 1; j < p; ++j) {
    const Eigen::MatrixXd prev = z.leftCols(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(prev);
    const Eigen::VectorXd coef = qr.solve(z.col(j));
    const double resid = (z.col(j) - prev * coef).norm();
    if (resid < std::sqrt(rel_tol)) {
      // Minimal support: drop predecessors whose removal keeps the fit exact.
      std::vector<int> support;
      for (Eigen::Index i = 0; i < j; ++i) support.push_back(static_cast<int>(i));
      for (auto it = support.begin(); it != support.end();) {
        std::vector<int> trial(support.begin(), support.end());
        trial.erase(trial.begin() + (it - support.begin()));
        if (trial.empty()) { ++it; continue; }
        Eigen::MatrixXd sub(z.rows(), static_cast<Eigen::Index>(trial.size()));
        for (std::size_t k = 0; k < trial.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = z.col(trial[k]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> q2(sub);
        const double r2 = (z.col(j) - sub * q2.solve(z.col(j))).norm();
        if (r2 < std::sqrt(rel_tol)) it = support.erase(it); else ++it;
      }
      support.push_back(static_cast<int>(j));
      return support;
    }
  }
  return {};
}

inline std::string join_names(const std::vector<int>& idx, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out += ", ";
    out += "'" + names[static_cast<std::size_t>(idx[i])] + "'";
  }
  return out;
}

}  // namespace wayfind::linalg
