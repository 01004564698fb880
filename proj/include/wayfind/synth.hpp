#pragma once

// Synthetic data with known generating parameters, plus brute-force oracles
// for choice probabilities and route enumeration on small graphs.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "wayfind/discrete_choice.hpp"
#include "wayfind/features.hpp"
#include "wayfind/netgraph.hpp"
#include "wayfind/parallel.hpp"
#include "wayfind/rng.hpp"
#include "wayfind/routeset.hpp"

namespace wayfind::synth {

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaskOd {
  int task = 1;
  std::string origin;
  std::string destination;
};

struct GenerativeConfig {
  std::map<std::string, double> true_beta;  // parameter name -> value (internal scale)
  int n_participants = 100;
  std::vector<TaskOd> tasks;
  int tree_depth = 2;
  std::size_t sample_size = 30;

  double speed_mps = 1.4;
  std::map<std::string, double> speed_effects;  // variable -> m/s per raw unit
  double pause_rate = 0.0;                      // expected injected pauses per trajectory
  double pause_min_s = 3.5;
  double pause_max_s = 8.0;
  double yaw_noise_deg = 0.0;

  std::uint64_t seed = 1;
  unsigned jobs = 1;

  void validate() const {
    if (!(speed_mps > 0.0)) throw SynthError("speed_mps must be positive");
    if (n_participants < 1) throw SynthError("n_participants must be positive");
    if (tasks.empty()) throw SynthError("no tasks configured");
    if (sample_size < 1) throw SynthError("sample_size must be positive");
  }
};

// ---------------------------------------------------------------------------
// Oracles

/// Choice probabilities by direct long-double exponentiation and summation in
/// index order, with no shift by the maximum utility. Valid for |U| <= 500.
inline std::vector<double> brute_force_probs(const choice::ModelSpec& spec, const Eigen::VectorXd& beta,
                                             const choice::ChoiceObservation& obs) {
  std::vector<long double> e;
  long double total = 0.0L;
  for (const auto& alt : obs.alternatives) {
    long double u = 0.0L;
    std::size_t j = 0;
    for (const auto& t : spec.terms) u += static_cast<long double>(beta[static_cast<Eigen::Index>(j++)]) *
                                          static_cast<long double>(choice::term_value(t, alt, obs.profile));
    if (spec.family == choice::Family::psl)
      u += static_cast<long double>(beta[static_cast<Eigen::Index>(j)]) * std::log(static_cast<long double>(alt.path_size));
    if (std::abs(u) > 500.0L) throw SynthError("brute_force_probs: |U| exceeds 500");
    e.push_back(std::exp(u));
    total += e.back();
  }
  std::vector<double> p;
  p.reserve(e.size());
  for (const auto v : e) p.push_back(static_cast<double>(v / total));
  return p;
}

inline constexpr std::size_t kEnumerationLinkLimit = 14;

/// Every loop-free path from origin to destination with at most max_links
/// links, by depth-first search. Restricted to tiny graphs.
inline RouteSet enumerate_all_simple_paths(const Network& net, const std::string& origin,
                                           const std::string& destination, std::size_t max_links = kEnumerationLinkLimit) {
  if (net.links().size() > kEnumerationLinkLimit)
    throw SynthError("enumerate_all_simple_paths: network exceeds " + std::to_string(kEnumerationLinkLimit) + " links");
  const auto o = net.require_node(origin);
  const auto d = net.require_node(destination);
  std::vector<std::vector<std::string>> found;
  std::vector<std::string> path;
  std::vector<bool> on_path(net.nodes().size(), false);
  auto dfs = [&](auto&& self, std::size_t u) -> void {
    if (u == d) {
      found.push_back(path);
      return;
    }
    if (path.size() >= max_links) return;
    on_path[u] = true;
    for (const auto l : net.out_links(u)) {
      const auto v = net.to_index(l);
      if (on_path[v]) continue;
      path.push_back(net.links()[l].id);
      self(self, v);
      path.pop_back();
    }
    on_path[u] = false;
  };
  dfs(dfs, o);
  if (found.empty()) throw SynthError("enumerate_all_simple_paths: no path");
  std::sort(found.begin(), found.end());
  std::vector<Route> routes;
  for (const auto& ids : found) routes.push_back(net.make_route(ids));
  return RouteSet(std::move(routes));
}

// ---------------------------------------------------------------------------
// Networks and participants

/// Small two-floor grid used for simulation studies. Each floor is a 4 x 3
/// lattice with 10 m spacing; two staircases join the floors. Attributes
/// vary by position so that route variables are not collinear.
inline Network desk_network() {
  std::vector<Node> nodes;
  std::vector<Link> links;
  auto id = [](int f, int i, int j) { return "N" + std::to_string(f) + std::to_string(i) + std::to_string(j); };
  for (int f = 1; f <= 2; ++f)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) nodes.push_back({id(f, i, j), 10.0 * i, 10.0 * j + (f == 2 ? 0.5 : 0.0), f});

  auto add = [&](const std::string& a, const std::string& b, Link proto) {
    proto.from = a;
    proto.to = b;
    proto.id = a + ">" + b;
    links.push_back(proto);
    std::swap(proto.from, proto.to);
    proto.id = b + ">" + a;
    links.push_back(proto);
  };
  for (int f = 1; f <= 2; ++f)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i + 1 < 4) {
          Link l{};
          l.length_cm = 1000.0 + 150.0 * ((i + 2 * j + f) % 3);
          l.is_wide = j != 1;
          l.has_window = j == 0 && i != 1;
          l.floorsign_count = (i + j + f) % 3 == 0 ? 1 : 0;
          l.firedoor_count = (i == 1 && j == 2) ? 1 : 0;
          add(id(f, i, j), id(f, i + 1, j), l);
        }
        if (j + 1 < 3) {
          Link l{};
          l.length_cm = 1000.0 + 100.0 * ((i + j) % 2);
          l.is_wide = false;
          l.has_window = false;
          l.floorsign_count = (i == 0 || i == 3) ? 1 : 0;
          add(id(f, i, j), id(f, i, j + 1), l);
        }
      }
  for (const auto& [i, j] : {std::pair{0, 1}, std::pair{3, 1}}) {
    Link s{};
    s.is_stair = true;
    s.length_cm = 600.0;
    add(id(2, i, j), id(1, i, j), s);
  }
  return build_network(std::move(nodes), std::move(links));
}

inline std::vector<TaskOd> desk_tasks() {
  return {{1, "N100", "N132"}, {2, "N132", "N100"}, {3, "N202", "N130"}, {4, "N230", "N102"}};
}

/// Draws a participant with plausible indicator frequencies.
inline ParticipantProfile random_profile(rng::CounterRng& gen) {
  const double age = 18.0 + static_cast<double>(gen.below(47));
  const bool male = gen.uniform() < 0.6;
  const auto edu = static_cast<Education>(gen.below(4));
  const bool familiar = gen.uniform() < 0.5;
  const bool gaming = gen.uniform() < 0.3;
  const auto vr = static_cast<VrExperience>(gen.below(3));
  const bool orient = gen.uniform() < 0.5;
  const double height = std::clamp(175.0 + 9.0 * gen.normal(), 151.0, 196.0);
  return make_profile(age, male, edu, familiar, gaming, vr, orient, std::round(height));
}

// ---------------------------------------------------------------------------
// Choices

/// One simulated (participant, task) record.
struct SimulatedTrip {
  std::string participant;
  int task = 1;
  Route chosen;
  ParticipantProfile profile;
};

struct SimulatedChoices {
  std::vector<choice::ChoiceObservation> observations;
  std::vector<SimulatedTrip> trips;
};

namespace detail {

inline Eigen::VectorXd beta_vector(const choice::ModelSpec& spec, const std::map<std::string, double>& named) {
  const auto names = spec.parameter_names();
  Eigen::VectorXd b(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = named.find(names[i]);
    if (it == named.end()) throw SynthError("true_beta missing parameter '" + names[i] + "'");
    b[static_cast<Eigen::Index>(i)] = it->second;
  }
  return b;
}

inline std::string participant_id(int p) {
  std::string s = std::to_string(p);
  return "P" + std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

}  // namespace detail

/// Simulates route choices: per (participant, task) a BFS-LE route set is
/// sampled, utilities under the true parameters are evaluated, and the chosen
/// route is drawn by inverse CDF over the exact logit probabilities.
inline SimulatedChoices simulate_choices_with_trips(const Network& net, const choice::ModelSpec& spec,
                                                    const GenerativeConfig& config) {
  config.validate();
  spec.validate();
  const Eigen::VectorXd beta = detail::beta_vector(spec, config.true_beta);

  std::vector<RouteSet> full_sets;
  for (const auto& t : config.tasks) full_sets.push_back(bfs_le(net, t.origin, t.destination, config.tree_depth));

  const auto n_tasks = config.tasks.size();
  const auto total = static_cast<std::size_t>(config.n_participants) * n_tasks;
  std::vector<choice::ChoiceObservation> obs(total);
  std::vector<SimulatedTrip> trips(total);

  parallel_for(static_cast<std::size_t>(config.n_participants), config.jobs, [&](std::size_t p) {
    const auto pid = detail::participant_id(static_cast<int>(p));
    rng::CounterRng profile_gen(rng::derive(rng::derive(config.seed, "profile"), pid));
    const auto profile = random_profile(profile_gen);
    for (std::size_t k = 0; k < n_tasks; ++k) {
      const auto& task = config.tasks[k];
      const std::string tag = "task=" + std::to_string(task.task) + ";participant=" + pid;
      const auto set = sample_routes(full_sets[k], config.sample_size, config.seed, tag);
      const auto ps = path_sizes(set);

      choice::ChoiceObservation o;
      o.participant = pid;
      o.task = task.task;
      o.profile = profile;
      for (std::size_t r = 0; r < set.size(); ++r) {
        choice::Alternative a;
        a.link_ids = set[r].link_ids;
        a.features = route_features(set[r], net, task.task);
        a.path_size = ps[r];
        o.alternatives.push_back(std::move(a));
      }
      const auto probs = brute_force_probs(spec, beta, o);
      rng::CounterRng draw(rng::derive(rng::derive(config.seed, "choice"), tag));
      const double u = draw.uniform();
      double cum = 0.0;
      std::size_t chosen = probs.size() - 1;
      for (std::size_t r = 0; r < probs.size(); ++r) {
        cum += probs[r];
        if (u < cum) {
          chosen = r;
          break;
        }
      }
      o.chosen_index = chosen;
      const auto slot = p * n_tasks + k;
      trips[slot] = {pid, task.task, set[chosen], profile};
      obs[slot] = std::move(o);
    }
  });
  return {std::move(obs), std::move(trips)};
}

inline std::vector<choice::ChoiceObservation> simulate_choices(const Network& net, const choice::ModelSpec& spec,
                                                               const GenerativeConfig& config) {
  return simulate_choices_with_trips(net, spec, config).observations;
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectoryPlan {
  std::vector<double> pause_durations_s;  // injected holds, in order along the route
  std::uint64_t stream = 0;               // extra key material for per-trip streams
};

inline double compass(double dx, double dy) {
  double a = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

/// Walks a route at constant speed, sampled at 10 Hz. Positions are
/// interpolated in plan between link endpoints (so stair flights advance by
/// their plan extent only). Pauses are zero-velocity holds at seeded points;
/// yaw follows the link heading plus independent Gaussian noise.
inline Trajectory simulate_trajectory(const Route& route, const Network& net, double speed_mps,
                                      const TrajectoryPlan& plan, double yaw_noise_deg, std::uint64_t seed) {
  if (!(speed_mps > 0.0)) throw SynthError("speed must be positive");
  rng::CounterRng gen(rng::derive(rng::derive(seed, "trajectory"), plan.stream));

  struct Leg {
    double t0, duration;
    double x0, y0, x1, y1;
    int floor0, floor1;
    double yaw;
  };
  std::vector<Leg> legs;
  double walk_time = 0.0;
  double last_yaw = 0.0;
  for (std::size_t i = 0; i < route.link_ids.size(); ++i) {
    const auto& l = net.link(route.link_ids[i]);
    const auto& a = net.node(l.from);
    const auto& b = net.node(l.to);
    const double dur = l.length_cm / 100.0 / speed_mps;
    const double dx = b.x - a.x, dy = b.y - a.y;
    if (std::hypot(dx, dy) > 1e-12) last_yaw = compass(dx, dy);
    else if (i == 0) last_yaw = 0.0;
    legs.push_back({walk_time, dur, a.x, a.y, b.x, b.y, a.floor, b.floor, last_yaw});
    walk_time += dur;
  }

  // Pause start points in walk time, seeded, ordered.
  std::vector<double> pause_at;
  for (std::size_t k = 0; k < plan.pause_durations_s.size(); ++k)
    pause_at.push_back(walk_time * (0.1 + 0.8 * gen.uniform()));
  std::sort(pause_at.begin(), pause_at.end());
  double pause_total = 0.0;
  for (const auto d : plan.pause_durations_s) pause_total += d;
  const double total = walk_time + pause_total;

  auto state_at_walk = [&](double w, double& x, double& y, int& floor, double& yaw) {
    auto it = std::upper_bound(legs.begin(), legs.end(), w, [](double v, const Leg& g) { return v < g.t0; });
    const Leg& g = it == legs.begin() ? legs.front() : *std::prev(it);
    const double frac = std::clamp((w - g.t0) / g.duration, 0.0, 1.0);
    x = g.x0 + frac * (g.x1 - g.x0);
    y = g.y0 + frac * (g.y1 - g.y0);
    floor = frac < 0.5 ? g.floor0 : g.floor1;
    yaw = g.yaw;
  };
  // Maps clock time to walk time by removing elapsed pause time.
  auto walk_of = [&](double t) {
    double offset = 0.0;
    for (std::size_t k = 0; k < pause_at.size(); ++k) {
      const double start_clock = pause_at[k] + offset;
      if (t <= start_clock) return t - offset;
      if (t <= start_clock + plan.pause_durations_s[k]) return pause_at[k];
      offset += plan.pause_durations_s[k];
    }
    return std::min(t - offset, walk_time);
  };

  Trajectory traj;
  const auto steps = static_cast<std::size_t>(std::floor(total * 10.0 + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / 10.0;
    TrajectorySample s;
    s.t = t;
    state_at_walk(walk_of(t), s.x, s.y, s.floor, s.yaw);
    traj.samples.push_back(s);
  }
  if (total - traj.samples.back().t > 1e-9) {
    TrajectorySample s;
    s.t = total;
    state_at_walk(walk_time, s.x, s.y, s.floor, s.yaw);
    traj.samples.push_back(s);
  }
  if (yaw_noise_deg > 0.0)
    for (auto& s : traj.samples) {
      double y = std::fmod(s.yaw + yaw_noise_deg * gen.normal(), 360.0);
      if (y < 0.0) y += 360.0;
      if (y >= 360.0) y -= 360.0;
      s.yaw = y;
    }
  return traj;
}

/// Trajectory for a simulated trip under the generative configuration:
/// speed adjusted by speed_effects, pause count and durations seeded.
inline Trajectory simulate_trip_trajectory(const SimulatedTrip& trip, const Network& net,
                                           const GenerativeConfig& config) {
  const auto f = route_features(trip.chosen, net, trip.task);
  double speed = config.speed_mps;
  for (const auto& [name, effect] : config.speed_effects) {
    auto v = f.get(name);
    if (!v) v = trip.profile.get(name);
    if (!v) throw SynthError("speed effect on unknown variable '" + name + "'");
    speed += effect * *v;
  }
  speed = std::max(speed, 0.2);
  const std::string tag = "task=" + std::to_string(trip.task) + ";participant=" + trip.participant;
  rng::CounterRng gen(rng::derive(rng::derive(config.seed, "pauses"), tag));
  TrajectoryPlan plan;
  plan.stream = rng::fnv1a(tag);
  // Pause count: Bernoulli thinning of four slots keeps the mean at pause_rate.
  const double per_slot = std::clamp(config.pause_rate / 4.0, 0.0, 1.0);
  for (int s = 0; s < 4; ++s)
    if (gen.uniform() < per_slot)
      plan.pause_durations_s.push_back(config.pause_min_s + (config.pause_max_s - config.pause_min_s) * gen.uniform());
  return simulate_trajectory(trip.chosen, net, speed, plan, config.yaw_noise_deg, config.seed);
}

}  // namespace wayfind::synth
