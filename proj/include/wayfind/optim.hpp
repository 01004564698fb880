#pragma once

// Unconstrained minimizers used for maximum likelihood: BFGS with a
// backtracking Armijo line search, and damped Newton for callers that can
// supply an exact Hessian.

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace wayfind::optim {

enum class Method { bfgs, newton };

struct Options {
  int max_iter = 200;
  double grad_tol = 1e-6;  // on the gradient max-norm
  Method method = Method::bfgs;
};

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

namespace detail {

// Objective values carry rounding noise of order eps * |f|; accepting steps
// within that band keeps the search moving near the optimum.
inline double noise_floor(double f) { return 1e-12 * (1.0 + std::abs(f)); }

template <class Objective>
bool armijo(Objective& fg, const Eigen::VectorXd& x, double f, const Eigen::VectorXd& g, const Eigen::VectorXd& dir,
            Eigen::VectorXd& x_new, double& f_new, Eigen::VectorXd& g_new) {
  constexpr double c1 = 1e-4;
  const double slope = g.dot(dir);
  double step = 1.0;
  for (int i = 0; i < 60; ++i) {
    x_new = x + step * dir;
    f_new = fg(x_new, g_new);
    if (std::isfinite(f_new) && f_new <= f + c1 * step * slope + noise_floor(f)) return true;
    step *= 0.5;
  }
  return false;
}

}  // namespace detail

/// Minimizes fg, where fg(x, grad) returns f(x) and writes the gradient.
template <class Objective>
Result minimize_bfgs(Objective&& fg, Eigen::VectorXd x0, const Options& opt = {}) {
  const auto n = x0.size();
  Result r;
  r.x = std::move(x0);
  r.gradient.resize(n);
  r.value = fg(r.x, r.gradient);
  if (!std::isfinite(r.value)) {
    r.message = "objective not finite at start";
    return r;
  }
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  Eigen::VectorXd x_new(n), g_new(n);
  for (r.iterations = 0; r.iterations < opt.max_iter; ++r.iterations) {
    if (r.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      r.converged = true;
      r.message = "gradient tolerance reached";
      return r;
    }
    Eigen::VectorXd dir = -h_inv * r.gradient;
    if (r.gradient.dot(dir) >= 0.0) {  // lost descent; restart from steepest descent
      h_inv.setIdentity();
      dir = -r.gradient;
    }
    double f_new = 0.0;
    if (!detail::armijo(fg, r.x, r.value, r.gradient, dir, x_new, f_new, g_new)) {
      r.message = "line search failed";
      r.converged = r.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol;
      return r;
    }
    const Eigen::VectorXd s = x_new - r.x;
    const Eigen::VectorXd y = g_new - r.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        h_inv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }
    r.x = x_new;
    r.value = f_new;
    r.gradient = g_new;
  }
  r.converged = r.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol;
  r.message = r.converged ? "gradient tolerance reached" : "iteration limit reached";
  return r;
}

/// Damped Newton; hess(x) must return the Hessian of f (positive definite
/// near the minimum).
template <class Objective, class Hessian>
Result minimize_newton(Objective&& fg, Hessian&& hess, Eigen::VectorXd x0, const Options& opt = {}) {
  const auto n = x0.size();
  Result r;
  r.x = std::move(x0);
  r.gradient.resize(n);
  r.value = fg(r.x, r.gradient);
  Eigen::VectorXd x_new(n), g_new(n);
  for (r.iterations = 0; r.iterations < opt.max_iter; ++r.iterations) {
    if (r.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      r.converged = true;
      r.message = "gradient tolerance reached";
      return r;
    }
    const Eigen::MatrixXd h = hess(r.x);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd dir;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) {
      dir = -ldlt.solve(r.gradient);
    } else {
      dir = -r.gradient;
    }
    double f_new = 0.0;
    if (!detail::armijo(fg, r.x, r.value, r.gradient, dir, x_new, f_new, g_new)) {
      r.message = "line search failed";
      r.converged = r.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol;
      return r;
    }
    r.x = x_new;
    r.value = f_new;
    r.gradient = g_new;
  }
  r.converged = r.gradient.lpNorm<Eigen::Infinity>() < opt.grad_tol;
  r.message = r.converged ? "gradient tolerance reached" : "iteration limit reached";
  return r;
}

}  // namespace wayfind::optim
