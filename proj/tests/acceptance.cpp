// Acceptance run: one PASS/FAIL line per criterion. Seeds are fixed here and
// never tuned against the outcome.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "test_networks.hpp"
#include "wayfind/cli.hpp"
#include "wayfind/features.hpp"
#include "wayfind/modelsearch.hpp"
#include "wayfind/regression.hpp"
#include "wayfind/replica.hpp"
#include "wayfind/routeset.hpp"
#include "wayfind/synth.hpp"

using namespace wayfind;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates sub-checks; the first failures are kept in the detail text.
struct Checks {
  Outcome out;
  std::vector<std::string> notes;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      out.pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
  Outcome done() {
    for (std::size_t i = 0; i < notes.size() && i < 6; ++i) out.detail += (i ? "; " : "") + notes[i];
    return out;
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

Route synthetic_route(std::vector<std::pair<std::string, double>> links) {
  Route r;
  r.origin = "O";
  r.destination = "D";
  for (auto& [id, len] : links) {
    r.link_ids.push_back(id);
    r.link_lengths_cm.push_back(len);
    r.total_length_cm += len;
  }
  return r;
}

// ---------------------------------------------------------------------------

Outcome fit_statistics() {
  Checks c;
  const double ll0 = 280.0 * std::log(1.0 / 30.0);
  const auto psl = choice::information_criteria(-330.48, ll0, 7, 280);
  const auto mnl = choice::information_criteria(-386.38, ll0, 4, 280);
  c.require(near(psl.aic, 674.96, 0.1), "AIC " + fmt(psl.aic, 6));
  c.require(near(psl.bic, 700.40, 0.1), "BIC " + fmt(psl.bic, 6));
  c.require(near(mnl.aic, 780.8, 0.1), "AIC " + fmt(mnl.aic, 6));
  c.require(near(mnl.bic, 795.3, 0.1), "BIC " + fmt(mnl.bic, 6));
  c.require(near(mnl.rho2, 0.594, 0.001), "rho2 " + fmt(mnl.rho2));
  c.note("AIC " + fmt(psl.aic, 6) + "/" + fmt(mnl.aic, 6) + ", BIC " + fmt(psl.bic, 6) + "/" + fmt(mnl.bic, 6) +
         ", rho2 " + fmt(mnl.rho2, 4));
  return c.done();
}

Outcome lr_tests() {
  Checks c;
  const auto a = choice::lr_test(-386.38, -376.10, 3);
  const auto b = choice::lr_test(-330.48, -325.89, 2);
  c.require(near(a.statistic, 20.56, 0.05) && a.df1 == 3, "chi2 " + fmt(a.statistic));
  c.require(a.p_value < 0.01, "p " + fmt(a.p_value));
  c.require(near(b.statistic, 9.18, 1e-9) && b.df1 == 2, "chi2 " + fmt(b.statistic));
  // 9.18 on 2 df sits just above the 1% line; the expected value is the
  // computed p of about 0.0101, so the check is against that.
  c.require(near(b.p_value, 0.0101, 1e-4), "p " + fmt(b.p_value));
  c.note("chi2 " + fmt(a.statistic) + " (p " + fmt(a.p_value, 3) + "), chi2 " + fmt(b.statistic) + " (p " +
         fmt(b.p_value, 4) + ", not strictly below 0.01)");
  return c.done();
}

Outcome figure_features() {
  Checks c;
  const auto net = wayfind::testing::figure_route_network();
  const auto route = net.make_route({"f0", "f1", "f2", "f3", "f4", "f5", "f6"});
  const auto f = route_features(route, net, 1);
  const auto t = count_turns(route, net);
  c.require(f.distot == 7400.0, "distot " + fmt(f.distot));
  c.require(f.dist_firstturn == 500.0, "dist_firstturn " + fmt(f.dist_firstturn));
  c.require(f.dist_longeststretch == 2500.0, "dist_longeststretch " + fmt(f.dist_longeststretch));
  c.require(near(f.dist_avg_straight / 100.0, 10.571, 0.02), "dist_avg_straight " + fmt(f.dist_avg_straight));
  c.require(t.turns_tot == 6 && t.turns_left == 3 && t.turns_right == 3, "turn counts");
  c.require(near(t.rot_abs, 540.0, 1e-9), "rot_abs " + fmt(t.rot_abs));

  auto stair = [](std::string id, std::string a, std::string b) {
    Link l = wayfind::testing::horizontal(std::move(id), std::move(a), std::move(b), 500);
    l.is_stair = true;
    return l;
  };
  const auto floors =
      build_network({{"a", 0, 0, 3}, {"b", 0, 0, 2}, {"c", 0, 0, 1}, {"d", 10, 0, 1}, {"e", 10, 0, 2}},
                    {stair("ab", "a", "b"), stair("bc", "b", "c"),
                     wayfind::testing::horizontal("cd", "c", "d", 1000), stair("de", "d", "e")});
  const auto levels = route_features(floors.make_route({"ab", "bc", "cd", "de"}), floors, 1).level_no;
  c.require(levels == 4.0, "level_no " + fmt(levels));
  c.note("74 m, first turn 5 m, longest 25 m, avg straight " + fmt(f.dist_avg_straight / 100.0, 5) + " m, " +
         std::to_string(t.turns_tot) + " turns, " + fmt(t.rot_abs) + " deg, level_no " + fmt(levels));
  return c.done();
}

Outcome path_size_oracle() {
  Checks c;
  const RouteSet unique({synthetic_route({{"a", 10}, {"b", 20}}), synthetic_route({{"c", 5}})});
  c.require(path_size(unique[0], unique) == 1.0, "unique route");
  const std::vector<Route> twins{synthetic_route({{"l", 10}}), synthetic_route({{"l", 10}})};
  const auto pair = path_size_factors(twins);
  c.require(pair[0] == 0.5 && pair[1] == 0.5, "duplicated pair");
  const RouteSet overlap({synthetic_route({{"l1", 10}, {"l2", 10}}), synthetic_route({{"l1", 10}, {"l3", 10}})});
  c.require(path_size(overlap[0], overlap) == 0.75 && path_size(overlap[1], overlap) == 0.75, "0.75 case");

  rng::CounterRng gen(rng::derive(4, "acceptance-path-size"));
  std::size_t checked = 0, bad = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const auto n_links = 1 + gen.below(10);
    std::vector<double> len(n_links);
    for (auto& l : len) l = 1.0 + 999.0 * gen.uniform();
    std::vector<Route> routes;
    std::set<std::vector<std::string>> seen;
    const auto n_routes = std::min<std::size_t>(1 + gen.below(12), (std::size_t{1} << n_links) - 1);
    while (routes.size() < n_routes) {
      std::vector<std::pair<std::string, double>> links;
      for (std::size_t l = 0; l < n_links; ++l)
        if (gen.uniform() < 0.5) links.emplace_back("l" + std::to_string(l), len[l]);
      if (links.empty()) continue;
      auto r = synthetic_route(links);
      if (seen.insert(r.link_ids).second) routes.push_back(r);
    }
    for (const double ps : path_sizes(RouteSet(routes))) {
      ++checked;
      bad += !(ps > 0.0 && ps <= 1.0);
    }
  }
  c.require(bad == 0, std::to_string(bad) + " factors outside (0, 1]");
  c.note("hand cases exact; " + std::to_string(checked) + " factors from 10000 fuzzed sets in (0, 1]");
  return c.done();
}

Outcome recovery() {
  Checks c;
  const auto net = synth::desk_network();
  const choice::ModelSpec spec{choice::Family::psl, {{"distot", {}}, {"window", {}}, {"floorsigns", {}}}};
  synth::GenerativeConfig cfg;
  cfg.tasks = synth::desk_tasks();
  cfg.n_participants = 125;  // 500 observations
  cfg.true_beta = {{"distot", -0.6}, {"window", 1.5}, {"floorsigns", 0.4}, {"log_path_size", 0.8}};
  const auto truth = synth::detail::beta_vector(spec, cfg.true_beta);
  int covered = 0, converged = 0;
  for (int rep = 0; rep < 100; ++rep) {
    cfg.seed = rng::derive(static_cast<std::uint64_t>(rep), "acceptance-recovery");
    const auto data = synth::simulate_choices(net, spec, cfg);
    const auto r = choice::estimate(spec, data);
    converged += r.converged;
    bool all = r.converged;
    for (std::size_t j = 0; j < r.beta.size(); ++j)
      all = all && std::abs(r.beta[j] - truth[static_cast<Eigen::Index>(j)]) <= 3.0 * r.std_err[j];
    covered += all;
  }
  c.require(covered >= 95, "coverage " + std::to_string(covered) + "/100");
  c.note(std::to_string(covered) + "/100 replications cover every beta within 3 SE (" + std::to_string(converged) +
         " converged)");
  return c.done();
}

choice::ChoiceObservation random_observation(rng::CounterRng& gen, std::size_t n_alt) {
  choice::ChoiceObservation o;
  o.participant = "P";
  o.profile = make_profile(30, true, Education::master, true, false, VrExperience::never, true, 175);
  for (std::size_t r = 0; r < n_alt; ++r) {
    choice::Alternative a;
    a.extra["x1"] = gen.normal();
    a.extra["x2"] = gen.normal();
    a.features.distot = 5000.0 + 10000.0 * gen.uniform();
    a.features.window = gen.uniform();
    a.path_size = 0.05 + 0.95 * gen.uniform();
    o.alternatives.push_back(a);
  }
  o.chosen_index = gen.below(n_alt);
  return o;
}

Outcome oracle_equivalence() {
  Checks c;
  rng::CounterRng gen(rng::derive(6, "acceptance-oracle"));
  const choice::ModelSpec spec{choice::Family::psl,
                               {{"x1", {}}, {"x2", {}}, {"distot", {}}, {"window", "gender"}}};
  double worst_p = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto o = random_observation(gen, 2 + gen.below(40));
    Eigen::VectorXd beta(5);
    for (Eigen::Index j = 0; j < 5; ++j) beta[j] = 2.0 * gen.normal();
    const auto p = choice::choice_probabilities(spec, beta, o);
    const auto q = synth::brute_force_probs(spec, beta, o);
    for (Eigen::Index r = 0; r < p.size(); ++r)
      worst_p = std::max(worst_p, std::abs(p[r] - q[static_cast<std::size_t>(r)]));
  }
  c.require(worst_p <= 1e-12, "probability gap " + fmt(worst_p));

  std::vector<choice::ChoiceObservation> data;
  for (int i = 0; i < 80; ++i) data.push_back(random_observation(gen, 10));
  const auto compiled = choice::compile(spec, data);
  double worst_g = 0.0;
  for (int point = 0; point < 20; ++point) {
    Eigen::VectorXd beta(5);
    for (Eigen::Index j = 0; j < 5; ++j) beta[j] = gen.normal();
    const auto v = choice::log_likelihood(compiled, beta);
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(beta[j]));
      Eigen::VectorXd up = beta, dn = beta;
      up[j] += h;
      dn[j] -= h;
      const double fd =
          (choice::log_likelihood(compiled, up).value - choice::log_likelihood(compiled, dn).value) / (2.0 * h);
      worst_g = std::max(worst_g, std::abs(v.gradient[j] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  c.require(worst_g <= 1e-5, "gradient relative gap " + fmt(worst_g));
  c.note("max probability gap " + fmt(worst_p, 3) + " over 1000 cases; max gradient relative gap " + fmt(worst_g, 3) +
         " over 20 points");
  return c.done();
}

Outcome stepwise_search() {
  Checks c;
  const auto net = synth::desk_network();
  search::SearchConfig scfg;
  scfg.candidates = {"distot", "window", "floorsigns", "turns_tot", "ratio_wide", "firedoor"};
  synth::GenerativeConfig cfg;
  cfg.tasks = synth::desk_tasks();
  cfg.n_participants = 250;
  const choice::ModelSpec planted{choice::Family::mnl, {{"distot", {}}, {"window", {}}}};
  cfg.true_beta = {{"distot", -0.6}, {"window", 1.5}};
  int exact = 0;
  for (int rep = 0; rep < 50; ++rep) {
    cfg.seed = rng::derive(static_cast<std::uint64_t>(rep), "acceptance-search");
    const auto trace = search::stepwise_search(scfg, synth::simulate_choices(net, planted, cfg), choice::Family::mnl);
    if (!trace.best) continue;
    std::set<std::string> names;
    for (const auto& t : trace.entries[*trace.best].spec.terms) names.insert(t.name());
    exact += names == std::set<std::string>{"distot", "window"};
  }
  c.require(exact >= 45, "planted pair " + std::to_string(exact) + "/50");

  const choice::ModelSpec null_spec{choice::Family::mnl, {{"distot", {}}}};
  cfg.true_beta = {{"distot", 0.0}};
  int empty = 0;
  for (int rep = 0; rep < 50; ++rep) {
    cfg.seed = rng::derive(static_cast<std::uint64_t>(rep), "acceptance-search-null");
    auto one_stage = scfg;
    one_stage.max_stage = 1;
    const auto trace =
        search::stepwise_search(one_stage, synth::simulate_choices(net, null_spec, cfg), choice::Family::mnl);
    bool any = false;
    for (const auto& e : trace.entries) any = any || (e.stage == 1 && e.survived);
    empty += !any;
  }
  c.require(empty >= 30, "null empty " + std::to_string(empty) + "/50");
  c.note("planted pair selected in " + std::to_string(exact) + "/50; empty stage 1 on null data in " +
         std::to_string(empty) + "/50");
  return c.done();
}

std::vector<double> normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto p = static_cast<std::size_t>(x.cols()) + 1;
  std::vector<std::vector<double>> m(p, std::vector<double>(p + 1, 0.0));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::vector<double> row{1.0};
    for (Eigen::Index j = 0; j < x.cols(); ++j) row.push_back(x(i, j));
    for (std::size_t r = 0; r < p; ++r) {
      for (std::size_t k = 0; k < p; ++k) m[r][k] += row[r] * row[k];
      m[r][p] += row[r] * y[i];
    }
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (std::size_t k = col; k <= p; ++k) m[r][k] -= f * m[col][k];
    }
  }
  std::vector<double> b(p);
  for (std::size_t r = 0; r < p; ++r) b[r] = m[r][p] / m[r][r];
  return b;
}

// Two planted regressors and one pure-noise column.
regression::DesignMatrix mlr_design(std::uint64_t seed, int n) {
  rng::CounterRng gen(seed);
  regression::DesignMatrix d;
  d.response = "y";
  d.names = {"active1", "active2", "noise"};
  d.x.resize(n, 3);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) d.x(i, j) = gen.normal();
    d.y[i] = 1.0 + 0.5 * d.x(i, 0) - 0.4 * d.x(i, 1) + gen.normal();
  }
  return d;
}

Outcome mlr_suite() {
  Checks c;
  double worst_beta = 0.0, worst_f = 0.0;
  int ok = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto d = mlr_design(rng::derive(static_cast<std::uint64_t>(rep), "acceptance-mlr"), 300);
    const auto full = regression::ols_fit(d);
    const auto b = normal_equations(d.x, d.y);
    worst_beta = std::max(worst_beta, std::abs(full.intercept.beta - b[0]));
    for (std::size_t j = 0; j < full.coefficients.size(); ++j) {
      worst_beta = std::max(worst_beta, std::abs(full.coefficients[j].beta - b[j + 1]));
      const auto f = regression::f_to_remove(full, j);
      worst_f = std::max(worst_f, std::abs(f.statistic - full.coefficients[j].t * full.coefficients[j].t));
    }
    const auto s = regression::backward_stepwise(d, 0.05);
    ok += s.model.find("active1") && s.model.find("active2") && !s.model.find("noise");
  }
  c.require(worst_beta <= 1e-8, "OLS gap " + fmt(worst_beta));
  c.require(worst_f <= 1e-8, "F vs t^2 gap " + fmt(worst_f));
  c.require(ok >= 95, "selection " + std::to_string(ok) + "/100");
  c.note("OLS gap " + fmt(worst_beta, 3) + ", F - t^2 gap " + fmt(worst_f, 3) + ", planted kept and noise dropped in " +
         std::to_string(ok) + "/100");
  return c.done();
}

Outcome trajectory_metrics() {
  Checks c;
  const auto net = wayfind::testing::figure_route_network();
  const auto route = net.make_route({"f0", "f1", "f2", "f3", "f4", "f5", "f6"});
  synth::TrajectoryPlan plan;
  plan.pause_durations_s = {4.0, 5.0};
  const auto paused = synth::simulate_trajectory(route, net, 1.4, plan, 0.0, 1);
  c.require(detect_hesitations(paused) == 2, "hesitations " + std::to_string(detect_hesitations(paused)));
  plan.pause_durations_s = {2.0};
  const auto short_pause = synth::simulate_trajectory(route, net, 1.4, plan, 0.0, 1);
  c.require(detect_hesitations(short_pause) == 0, "2 s pause counted");

  const auto steady = synth::simulate_trajectory(route, net, 1.4, {}, 0.0, 1);
  const double speed = wayfinding_performance(steady).avg_speed_mps;
  c.require(near(speed, 1.4, 0.01), "speed " + fmt(speed));

  const auto line = wayfind::testing::single_path();
  const auto straight = synth::simulate_trajectory(line.make_route({"AB", "BC"}), line, 1.4, {}, 0.0, 1);
  c.require(head_rotation(straight) == 0.0, "straight head rotation " + fmt(head_rotation(straight)));

  Trajectory wrap;
  wrap.samples = {{0.0, 0.0, 0.0, 1, 359.0}, {1.0, 0.0, 0.0, 1, 1.0}};
  c.require(near(head_rotation(wrap), 2.0, 1e-12), "wrap " + fmt(head_rotation(wrap)));
  c.note("hesitations " + std::to_string(detect_hesitations(paused)) + ", speed " + fmt(speed, 5) +
         " m/s, straight rotation " + fmt(head_rotation(straight)) + ", wrap " + fmt(head_rotation(wrap)) + " deg/s");
  return c.done();
}

Outcome bfs_le_routes() {
  Checks c;
  const auto net = replica::building();
  std::string counts;
  for (const auto& task : replica::tasks()) {
    const auto set = bfs_le(net, task.origin, task.destination, 2);
    counts += (counts.empty() ? "" : "/") + std::to_string(set.size());
    c.require(set.size() >= 30 && set.size() <= 300, "task " + std::to_string(task.id) + " has " +
                                                         std::to_string(set.size()) + " routes");
    std::set<std::vector<std::string>> distinct;
    for (const auto& r : set.routes()) {
      distinct.insert(r.link_ids);
      bool valid = r.origin == task.origin && r.destination == task.destination;
      try {
        valid = valid && net.make_route(r.link_ids).link_ids == r.link_ids;
      } catch (const std::exception&) {
        valid = false;
      }
      c.require(valid, "invalid route in task " + std::to_string(task.id));
    }
    c.require(distinct.size() == set.size(), "duplicate routes");
  }

  int graphs = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto g = wayfind::testing::random_network(seed, 6, 2);
    if (g.links().size() > synth::kEnumerationLinkLimit) continue;
    ++graphs;
    const auto& o = g.nodes().front().id;
    const auto& d = g.nodes().back().id;
    const auto all = synth::enumerate_all_simple_paths(g, o, d);
    const auto set = bfs_le(g, o, d, 2);
    for (const auto& r : set.routes()) c.require(all.find(r).has_value(), "route outside enumeration");
  }
  c.require(graphs >= 20, "too few small graphs");
  c.note("replica routes per task " + counts + "; subset of exhaustive enumeration on " + std::to_string(graphs) +
         " small graphs");
  return c.done();
}

std::map<std::string, std::string> tree_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).generic_string();
    if (rel.find("manifest.json") != std::string::npos) continue;
    out[rel] = io::read_text(e.path());
  }
  return out;
}

// Output digests recorded by every manifest, keyed by path relative to `dir`.
std::map<std::string, std::string> manifest_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().filename().string().find("manifest.json") == std::string::npos) continue;
    const auto m = io::json::parse(io::read_text(e.path()));
    for (const auto& o : m["outputs"])
      out[fs::relative(o["path"].get<std::string>(), dir).generic_string()] = o["sha256"].get<std::string>();
  }
  return out;
}

Outcome determinism() {
  Checks c;
  const auto root = fs::temp_directory_path() / "wayfind_acceptance_determinism";
  fs::remove_all(root);
  const auto config = (fs::path(WAYFIND_SOURCE_DIR) / "samples" / "desk_simulation.json").string();
  const auto spec = (fs::path(WAYFIND_SOURCE_DIR) / "samples" / "desk_psl_spec.json").string();
  auto pipeline = [&](const std::string& name, const std::string& jobs) {
    const auto dir = root / name;
    std::ostringstream sink;
    auto call = [&](std::vector<std::string> args) {
      args.insert(args.end(), {"--jobs", jobs});
      const int code = cli::dispatch(args, sink, sink);
      c.require(code == 0, args.front() + " exit " + std::to_string(code));
    };
    call({"simulate", "--spec", config, "--seed", "2024", "--out", (dir / "sim").string()});
    call({"estimate-choice", "--data", (dir / "sim" / "observations.json").string(), "--spec", spec, "--out",
          (dir / "result.json").string()});
    call({"report", "--data", (dir / "result.json").string(), "--out", (dir / "report.json").string()});
    call({"report", "--data", (dir / "result.json").string(), "--format", "md", "--out", (dir / "report.md").string()});
    return dir;
  };
  const auto a = pipeline("first", "1");
  const auto b = pipeline("second", "1");
  const auto p = pipeline("parallel", "4");
  const auto ta = tree_bytes(a);
  c.require(ta.size() > 100, "only " + std::to_string(ta.size()) + " artifacts");
  c.require(ta == tree_bytes(b), "rerun differs");
  c.require(ta == tree_bytes(p), "--jobs 4 differs");
  const auto ma = manifest_outputs(a);
  c.require(!ma.empty() && ma == manifest_outputs(b) && ma == manifest_outputs(p), "manifest output digests differ");
  const auto report = io::json::parse(ta.at("report.json"));
  c.require(report["converged"].get<bool>(), "report not converged");
  c.note(std::to_string(ta.size()) + " artifacts byte-identical across reruns and --jobs 1 vs 4");
  fs::remove_all(root);
  return c.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fit-statistic arithmetic", fit_statistics},
      {"likelihood-ratio tests", lr_tests},
      {"figure route features", figure_features},
      {"path-size oracle", path_size_oracle},
      {"PSL parameter recovery", recovery},
      {"probability and gradient oracles", oracle_equivalence},
      {"stepwise combinatory search", stepwise_search},
      {"MLR and backward elimination", mlr_suite},
      {"trajectory metrics", trajectory_metrics},
      {"BFS-LE route sets", bfs_le_routes},
      {"pipeline determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s  %2zu  %-34s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
