#pragma once

// Multinomial logit and path-size logit route choice models: utilities,
// choice probabilities, log-likelihood with analytic derivatives, maximum
// likelihood estimation and the fit statistics used to compare models.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wayfind/features.hpp"
#include "wayfind/linalg.hpp"
#include "wayfind/optim.hpp"
#include "wayfind/parallel.hpp"
#include "wayfind/stats.hpp"

namespace wayfind::choice {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the information matrix is singular; names the dependent terms.
class SingularHessianError : public ModelError {
 public:
  SingularHessianError(const std::string& msg, std::vector<std::string> terms)
      : ModelError(msg), terms_(std::move(terms)) {}
  [[nodiscard]] const std::vector<std::string>& terms() const { return terms_; }

 private:
  std::vector<std::string> terms_;
};

enum class Family { mnl, psl };

inline std::string_view to_string(Family f) { return f == Family::mnl ? "MNL" : "PSL"; }

inline Family parse_family(std::string_view s) {
  if (s == "mnl" || s == "MNL") return Family::mnl;
  if (s == "psl" || s == "PSL") return Family::psl;
  throw ModelError("unknown model family '" + std::string(s) + "'");
}

/// A route variable, optionally interacted with a participant variable.
struct Term {
  std::string route_var;
  std::string person_var;  // empty for a main effect

  [[nodiscard]] bool is_interaction() const { return !person_var.empty(); }
  [[nodiscard]] std::string name() const { return is_interaction() ? route_var + " x " + person_var : route_var; }
  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

/// Parses "distot" or "distot x age_young".
inline Term parse_term(std::string_view s) {
  const auto pos = s.find(" x ");
  if (pos == std::string_view::npos) return {std::string(s), {}};
  return {std::string(s.substr(0, pos)), std::string(s.substr(pos + 3))};
}

inline constexpr std::string_view kPathSizeTerm = "log_path_size";

struct ModelSpec {
  Family family = Family::mnl;
  std::vector<Term> terms;

  /// Parameter names in estimation order; PSL appends the path-size term.
  [[nodiscard]] std::vector<std::string> parameter_names() const {
    std::vector<std::string> n;
    for (const auto& t : terms) n.push_back(t.name());
    if (family == Family::psl) n.emplace_back(kPathSizeTerm);
    return n;
  }
  [[nodiscard]] std::size_t size() const { return terms.size() + (family == Family::psl ? 1 : 0); }

  void validate() const {
    std::set<Term> seen;
    for (const auto& t : terms) {
      if (t.route_var.empty()) throw ModelError("term with empty route variable");
      if (!seen.insert(t).second) throw ModelError("duplicate term '" + t.name() + "'");
      if (t.is_interaction() && !ParticipantProfile{}.get(t.person_var))
        throw ModelError("interaction term '" + t.name() + "' references unknown participant variable");
    }
  }
};

/// Internal rescaling of a route variable: distances (cm) become units of 10 m.
inline double internal_scale(std::string_view route_var) { return route_var.starts_with("dist") ? 1e-3 : 1.0; }

struct Alternative {
  std::vector<std::string> link_ids;
  FeatureVector features;
  std::map<std::string, double> extra;  // additional named route variables
  double path_size = 1.0;

  [[nodiscard]] std::optional<double> get(std::string_view name) const {
    if (auto v = features.get(name)) return v;
    auto it = extra.find(std::string(name));
    if (it != extra.end()) return it->second;
    return std::nullopt;
  }
};

struct ChoiceObservation {
  std::string participant;
  int task = 1;
  std::vector<Alternative> alternatives;
  std::size_t chosen_index = 0;
  ParticipantProfile profile;

  void validate() const {
    if (alternatives.empty()) throw ModelError("observation has no alternatives");
    if (chosen_index >= alternatives.size()) throw ModelError("chosen index out of bounds");
    for (const auto& a : alternatives)
      if (!(a.path_size > 0.0 && a.path_size <= 1.0 + 1e-12))
        throw ModelError("path size outside (0, 1] in observation of participant '" + participant + "'");
  }
};

/// Value of a term for one alternative, on the internal scale.
inline double term_value(const Term& t, const Alternative& alt, const ParticipantProfile& profile) {
  const auto x = alt.get(t.route_var);
  if (!x) throw ModelError("route variable '" + t.route_var + "' not present in features");
  double v = *x * internal_scale(t.route_var);
  if (t.is_interaction()) {
    const auto p = profile.get(t.person_var);
    if (!p) throw ModelError("participant variable '" + t.person_var + "' unknown");
    v *= *p;
  }
  return v;
}

/// Attribute row of one alternative: term values followed by log(PS) for PSL.
inline Eigen::VectorXd design_row(const ModelSpec& spec, const Alternative& alt, const ParticipantProfile& profile) {
  Eigen::VectorXd row(static_cast<Eigen::Index>(spec.size()));
  Eigen::Index j = 0;
  for (const auto& t : spec.terms) row[j++] = term_value(t, alt, profile);
  if (spec.family == Family::psl) {
    if (!(alt.path_size > 0.0)) throw ModelError("path size must be positive for a PSL model");
    row[j] = std::log(alt.path_size);
  }
  return row;
}

/// Systematic utility of one alternative (coefficients on the internal scale).
inline double utility(const ModelSpec& spec, const Eigen::VectorXd& beta, const Alternative& alt,
                      const ParticipantProfile& profile) {
  if (static_cast<std::size_t>(beta.size()) != spec.size()) throw ModelError("beta dimension does not match spec");
  return design_row(spec, alt, profile).dot(beta);
}

/// Observation attribute matrix, one row per alternative.
struct CompiledObservation {
  Eigen::MatrixXd x;
  Eigen::Index chosen = 0;
};

inline std::vector<CompiledObservation> compile(const ModelSpec& spec, std::span<const ChoiceObservation> data) {
  spec.validate();
  std::vector<CompiledObservation> out;
  out.reserve(data.size());
  for (const auto& obs : data) {
    obs.validate();
    CompiledObservation c;
    c.x.resize(static_cast<Eigen::Index>(obs.alternatives.size()), static_cast<Eigen::Index>(spec.size()));
    for (std::size_t r = 0; r < obs.alternatives.size(); ++r)
      c.x.row(static_cast<Eigen::Index>(r)) = design_row(spec, obs.alternatives[r], obs.profile).transpose();
    c.chosen = static_cast<Eigen::Index>(obs.chosen_index);
    out.push_back(std::move(c));
  }
  return out;
}

/// Softmax of utilities with the maximum subtracted first.
inline Eigen::VectorXd softmax(const Eigen::VectorXd& u) {
  if (!u.allFinite()) throw ModelError("non-finite utility");
  Eigen::VectorXd e = (u.array() - u.maxCoeff()).exp();
  return e / e.sum();
}

inline Eigen::VectorXd choice_probabilities(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                            const ChoiceObservation& obs) {
  obs.validate();
  if (static_cast<std::size_t>(beta.size()) != spec.size()) throw ModelError("beta dimension does not match spec");
  Eigen::VectorXd u(static_cast<Eigen::Index>(obs.alternatives.size()));
  for (std::size_t r = 0; r < obs.alternatives.size(); ++r)
    u[static_cast<Eigen::Index>(r)] = utility(spec, beta, obs.alternatives[r], obs.profile);
  return softmax(u);
}

struct LikelihoodValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

namespace detail {

struct ObsTerms {
  double ll = 0.0;
  Eigen::VectorXd grad;
};

inline ObsTerms observation_terms(const CompiledObservation& c, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd u = c.x * beta;
  if (!u.allFinite()) throw ModelError("non-finite utility");
  const double m = u.maxCoeff();
  const double log_denominator = m + std::log((u.array() - m).exp().sum());
  const Eigen::VectorXd p = (u.array() - log_denominator).exp();
  ObsTerms t;
  t.ll = u[c.chosen] - log_denominator;
  t.grad = c.x.row(c.chosen).transpose() - c.x.transpose() * p;
  return t;
}

}  // namespace detail

/// Log-likelihood and gradient over compiled data. Per-observation terms are
/// summed in observation order, so the result does not depend on `jobs`.
inline LikelihoodValue log_likelihood(std::span<const CompiledObservation> data, const Eigen::VectorXd& beta,
                                      unsigned jobs = 1) {
  if (data.empty()) throw ModelError("log-likelihood of empty data");
  std::vector<detail::ObsTerms> terms(data.size());
  parallel_for(data.size(), jobs, [&](std::size_t n) { terms[n] = detail::observation_terms(data[n], beta); });
  LikelihoodValue out;
  out.gradient = Eigen::VectorXd::Zero(beta.size());
  for (const auto& t : terms) {
    out.value += t.ll;
    out.gradient += t.grad;
  }
  if (!std::isfinite(out.value)) throw ModelError("chosen alternative has zero probability");
  return out;
}

inline LikelihoodValue log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                      std::span<const ChoiceObservation> data, unsigned jobs = 1) {
  if (static_cast<std::size_t>(beta.size()) != spec.size()) throw ModelError("beta dimension does not match spec");
  const auto compiled = compile(spec, data);
  return log_likelihood(compiled, beta, jobs);
}

/// Hessian of the log-likelihood: -sum_n sum_r P_nr (x_nr - xbar_n)(x_nr - xbar_n)'.
inline Eigen::MatrixXd log_likelihood_hessian(std::span<const CompiledObservation> data, const Eigen::VectorXd& beta,
                                              unsigned jobs = 1) {
  std::vector<Eigen::MatrixXd> parts(data.size());
  parallel_for(data.size(), jobs, [&](std::size_t n) {
    const auto& c = data[n];
    const Eigen::VectorXd p = softmax(c.x * beta);
    const Eigen::RowVectorXd mean = p.transpose() * c.x;
    const Eigen::MatrixXd centered = c.x.rowwise() - mean;
    parts[n] = -(centered.transpose() * p.asDiagonal() * centered);
  });
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(beta.size(), beta.size());
  for (const auto& m : parts) h += m;
  return h;
}

struct EstimationOptions {
  int max_iter = 200;
  double tol = 1e-6;
  optim::Method method = optim::Method::bfgs;
  std::optional<Eigen::VectorXd> start;
  unsigned jobs = 1;
  double alpha_t = 0.05;
};

struct EstimationResult {
  Family family = Family::mnl;
  std::vector<std::string> names;
  std::vector<double> beta;      // internal scale
  std::vector<double> std_err;   // internal scale
  std::vector<double> beta_raw;  // per raw unit (cm for distances)
  std::vector<double> std_err_raw;
  std::vector<double> t_stat;
  std::vector<double> p_value;
  double log_likelihood = 0.0;
  double null_log_likelihood = 0.0;
  double rho2 = 0.0;
  double rho2_adj = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int n_obs = 0;
  int k = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    return std::nullopt;
  }
};

struct FitStatistics {
  double rho2 = 0.0;
  double rho2_adj = 0.0;
  double aic = 0.0;
  double bic = 0.0;
};

/// rho2 = 1 - LL/LL0, adjusted rho2 = 1 - (LL - k)/LL0, AIC = 2k - 2LL,
/// BIC = k ln(n) - 2LL.
inline FitStatistics information_criteria(double ll, double ll0, int k, int n_obs) {
  FitStatistics s;
  s.rho2 = ll0 != 0.0 ? 1.0 - ll / ll0 : 0.0;
  s.rho2_adj = ll0 != 0.0 ? 1.0 - (ll - k) / ll0 : 0.0;
  s.aic = 2.0 * k - 2.0 * ll;
  s.bic = k * std::log(static_cast<double>(n_obs)) - 2.0 * ll;
  return s;
}

inline FitStatistics information_criteria(const EstimationResult& r) {
  return information_criteria(r.log_likelihood, r.null_log_likelihood, r.k, r.n_obs);
}

/// Null log-likelihood: every alternative equally likely.
inline double null_log_likelihood(std::span<const CompiledObservation> data) {
  double ll0 = 0.0;
  for (const auto& c : data) ll0 -= std::log(static_cast<double>(c.x.rows()));
  return ll0;
}

namespace detail {

// Within-choice-set deviations stacked over observations. Their column rank
// equals the rank of the information matrix at any beta.
inline Eigen::MatrixXd deviation_matrix(std::span<const CompiledObservation> data, Eigen::Index k) {
  Eigen::Index rows = 0;
  for (const auto& c : data) rows += c.x.rows();
  Eigen::MatrixXd d(rows, k);
  Eigen::Index at = 0;
  for (const auto& c : data) {
    const Eigen::RowVectorXd mean = c.x.colwise().mean();
    d.middleRows(at, c.x.rows()) = c.x.rowwise() - mean;
    at += c.x.rows();
  }
  return d;
}

}  // namespace detail

/// Throws SingularHessianError when the parameters are not identified.
inline void check_identified(const ModelSpec& spec, std::span<const CompiledObservation> data) {
  const auto names = spec.parameter_names();
  const auto dep = linalg::dependent_columns(detail::deviation_matrix(data, static_cast<Eigen::Index>(spec.size())));
  if (dep.empty()) return;
  std::vector<std::string> terms;
  for (const auto i : dep) terms.push_back(names[static_cast<std::size_t>(i)]);
  throw SingularHessianError("singular Hessian: terms " + linalg::join_names(dep, names) +
                                 (dep.size() == 1 ? " do not vary within choice sets" : " are collinear"),
                             terms);
}

/// Maximum likelihood estimation. Non-convergence (iteration limit, failed
/// line search, or divergence under perfect separation) is reported through
/// `converged = false` with the partial result; unidentified terms throw.
inline EstimationResult estimate(const ModelSpec& spec, std::span<const ChoiceObservation> data,
                                 const EstimationOptions& opt = {}) {
  if (data.empty()) throw ModelError("estimation requires data");
  const auto compiled = compile(spec, data);
  const auto k = static_cast<Eigen::Index>(spec.size());
  if (k == 0) throw ModelError("model has no parameters");
  check_identified(spec, compiled);

  Eigen::VectorXd start = Eigen::VectorXd::Zero(k);
  if (opt.start) {
    if (opt.start->size() != k) throw ModelError("start vector dimension does not match spec");
    start = *opt.start;
  }

  auto negll = [&](const Eigen::VectorXd& b, Eigen::VectorXd& g) {
    try {
      auto v = log_likelihood(compiled, b, opt.jobs);
      g = -v.gradient;
      return -v.value;
    } catch (const ModelError&) {
      g = Eigen::VectorXd::Constant(b.size(), std::numeric_limits<double>::quiet_NaN());
      return std::numeric_limits<double>::infinity();
    }
  };
  optim::Options oo{opt.max_iter, opt.tol, opt.method};
  optim::Result fit;
  if (opt.method == optim::Method::newton) {
    fit = optim::minimize_newton(negll, [&](const Eigen::VectorXd& b) { return Eigen::MatrixXd(-log_likelihood_hessian(compiled, b, opt.jobs)); },
                                 start, oo);
  } else {
    fit = optim::minimize_bfgs(negll, start, oo);
  }

  EstimationResult r;
  r.family = spec.family;
  r.names = spec.parameter_names();
  r.n_obs = static_cast<int>(data.size());
  r.k = static_cast<int>(k);
  r.iterations = fit.iterations;
  r.log_likelihood = -fit.value;
  r.null_log_likelihood = null_log_likelihood(compiled);
  r.converged = fit.converged;
  r.message = fit.message;

  // Perfect separation: the likelihood approaches its supremum of 0 only as
  // the coefficients diverge, so a vanishing gradient is not an optimum.
  constexpr double kSeparationLL = 1e-6;
  constexpr double kDivergentBeta = 1e3;
  if (r.log_likelihood > -kSeparationLL * r.n_obs || fit.x.lpNorm<Eigen::Infinity>() > kDivergentBeta) {
    r.converged = false;
    r.message = "perfect separation: coefficients diverge";
  }

  const Eigen::MatrixXd info = -log_likelihood_hessian(compiled, fit.x, opt.jobs);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
  if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all())
    cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  else if (r.converged) {
    r.converged = false;
    r.message = "information matrix not positive definite at the estimate";
  }

  std::vector<double> scales;
  for (const auto& t : spec.terms) scales.push_back(internal_scale(t.route_var));
  if (spec.family == Family::psl) scales.push_back(1.0);

  for (Eigen::Index j = 0; j < k; ++j) {
    const double b = fit.x[j];
    const double se = std::sqrt(cov(j, j));
    r.beta.push_back(b);
    r.std_err.push_back(se);
    r.beta_raw.push_back(b * scales[static_cast<std::size_t>(j)]);
    r.std_err_raw.push_back(se * scales[static_cast<std::size_t>(j)]);
    const double t = b / se;
    r.t_stat.push_back(t);
    r.p_value.push_back(std::isfinite(t) ? stats::normal_two_sided(t) : std::numeric_limits<double>::quiet_NaN());
  }
  const auto fs = information_criteria(r);
  r.rho2 = fs.rho2;
  r.rho2_adj = fs.rho2_adj;
  r.aic = fs.aic;
  r.bic = fs.bic;
  return r;
}

/// chi2 = 2 (LL_full - LL_restricted) on `df` degrees of freedom.
inline stats::TestResult lr_test(double ll_restricted, double ll_full, int df) {
  stats::TestResult t;
  t.statistic = std::max(0.0, 2.0 * (ll_full - ll_restricted));
  t.df1 = df;
  t.p_value = df > 0 ? stats::chi_square_upper(t.statistic, df) : 1.0;
  return t;
}

/// Likelihood-ratio test of a restricted model against a model nesting it.
inline stats::TestResult lr_test(const EstimationResult& restricted, const EstimationResult& full) {
  if (restricted.family != full.family) throw ModelError("lr_test: models belong to different families");
  if (restricted.n_obs != full.n_obs || std::abs(restricted.null_log_likelihood - full.null_log_likelihood) > 1e-9)
    throw ModelError("lr_test: models were not estimated on the same data");
  for (const auto& n : restricted.names)
    if (!full.index_of(n)) throw ModelError("lr_test: models are not nested ('" + n + "' missing from full model)");
  if (full.k < restricted.k) throw ModelError("lr_test: models are not nested");
  return lr_test(restricted.log_likelihood, full.log_likelihood, full.k - restricted.k);
}

/// Whether every parameter (optionally excluding the structural path-size
/// term) is significant at level alpha.
inline bool all_significant(const EstimationResult& r, double alpha, bool include_path_size = false) {
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    if (!include_path_size && r.names[i] == kPathSizeTerm) continue;
    if (!(r.p_value[i] < alpha)) return false;
  }
  return true;
}

}  // namespace wayfind::choice
