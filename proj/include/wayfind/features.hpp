#pragma once

// Route, infrastructure and task variables of a route, participant
// indicators, and the behavioral metrics derived from 10 Hz trajectories.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wayfind/netgraph.hpp"

namespace wayfind {

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Route, infrastructure and task variables. Distances are in centimeters.
struct FeatureVector {
  double distot = 0.0;
  double dist_firstturn = 0.0;
  double dist_avg_straight = 0.0;
  double dist_longeststretch = 0.0;
  double turns_tot = 0.0;
  double turns_left = 0.0;
  double turns_right = 0.0;
  double rot_abs = 0.0;  // degrees
  double ratio_wide = 0.0;
  double window = 0.0;
  double firedoor = 0.0;
  double floorsigns = 0.0;
  double level_no = 0.0;
  double stairs_no = 0.0;
  std::array<double, 4> task{};  // task_1 .. task_4

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "distot",     "dist_firstturn", "dist_avg_straight", "dist_longeststretch", "turns_tot",
        "turns_left", "turns_right",    "rot_abs",           "ratio_wide",          "window",
        "firedoor",   "floorsigns",     "level_no",          "stairs_no",           "task_1",
        "task_2",     "task_3",         "task_4"};
    return n;
  }

  [[nodiscard]] std::vector<double> values() const {
    return {distot,   dist_firstturn, dist_avg_straight, dist_longeststretch, turns_tot, turns_left, turns_right,
            rot_abs,  ratio_wide,     window,            firedoor,            floorsigns, level_no,  stairs_no,
            task[0],  task[1],        task[2],           task[3]};
  }

  [[nodiscard]] std::optional<double> get(std::string_view name) const {
    const auto& n = names();
    const auto v = values();
    for (std::size_t i = 0; i < n.size(); ++i)
      if (n[i] == name) return v[i];
    return std::nullopt;
  }
};

enum class Education { secondary, bachelor, master, doctorate };
enum class VrExperience { often, sometimes, never };

/// Participant characteristics with the binary indicators used in modeling.
struct ParticipantProfile {
  double age = 0.0;
  double age_young = 0.0;
  double age_old = 0.0;
  double gender = 0.0;  // male = 1
  double education_Sec = 0.0;
  double education_BSc = 0.0;
  double education_MSc = 0.0;
  double education_Doc = 0.0;
  double familiar = 0.0;
  double familiar_not = 0.0;
  double gaming_often = 0.0;
  double gaming_not = 0.0;
  double VR_often = 0.0;
  double VR_sometimes = 0.0;
  double VR_never = 0.0;
  double orientation_good = 0.0;
  double orientation_bad = 0.0;
  double height = 0.0;  // cm

  static const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {
        "age",           "age_young",     "age_old",    "gender",       "education_Sec",   "education_BSc",
        "education_MSc", "education_Doc", "familiar",   "familiar_not", "gaming_often",    "gaming_not",
        "VR_often",      "VR_sometimes",  "VR_never",   "orientation_good", "orientation_bad", "height"};
    return n;
  }

  [[nodiscard]] std::vector<double> values() const {
    return {age,           age_young,     age_old,  gender,       education_Sec, education_BSc,
            education_MSc, education_Doc, familiar, familiar_not, gaming_often,  gaming_not,
            VR_often,      VR_sometimes,  VR_never, orientation_good, orientation_bad, height};
  }

  [[nodiscard]] std::optional<double> get(std::string_view name) const {
    const auto& n = names();
    const auto v = values();
    for (std::size_t i = 0; i < n.size(); ++i)
      if (n[i] == name) return v[i];
    return std::nullopt;
  }

  void set(std::string_view name, double value) {
    double* fields[] = {&age,           &age_young,     &age_old,  &gender,       &education_Sec, &education_BSc,
                        &education_MSc, &education_Doc, &familiar, &familiar_not, &gaming_often,  &gaming_not,
                        &VR_often,      &VR_sometimes,  &VR_never, &orientation_good, &orientation_bad, &height};
    const auto& n = names();
    for (std::size_t i = 0; i < n.size(); ++i)
      if (n[i] == name) {
        *fields[i] = value;
        return;
      }
    throw FeatureError("unknown participant variable '" + std::string(name) + "'");
  }

  /// Throws if mutually exclusive indicators overlap or a flag is not 0/1.
  void validate() const {
    const auto v = values();
    const auto& n = names();
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (n[i] == "age" || n[i] == "height") continue;
      if (v[i] != 0.0 && v[i] != 1.0) throw FeatureError("indicator '" + n[i] + "' must be 0 or 1");
    }
    if (age_young + age_old > 1.0) throw FeatureError("age_young and age_old both set");
    if (education_Sec + education_BSc + education_MSc + education_Doc > 1.0)
      throw FeatureError("education indicators are not mutually exclusive");
    if (VR_often + VR_sometimes + VR_never > 1.0) throw FeatureError("VR indicators are not mutually exclusive");
  }
};

/// Builds a profile and derives the indicator variables from raw answers.
inline ParticipantProfile make_profile(double age, bool male, Education edu, bool familiar, bool gaming_often,
                                       VrExperience vr, bool orientation_good, double height_cm) {
  ParticipantProfile p;
  p.age = age;
  p.age_young = age < 25.0 ? 1.0 : 0.0;
  p.age_old = age > 50.0 ? 1.0 : 0.0;
  p.gender = male ? 1.0 : 0.0;
  p.education_Sec = edu == Education::secondary;
  p.education_BSc = edu == Education::bachelor;
  p.education_MSc = edu == Education::master;
  p.education_Doc = edu == Education::doctorate;
  p.familiar = familiar;
  p.familiar_not = !familiar;
  p.gaming_often = gaming_often;
  p.gaming_not = !gaming_often;
  p.VR_often = vr == VrExperience::often;
  p.VR_sometimes = vr == VrExperience::sometimes;
  p.VR_never = vr == VrExperience::never;
  p.orientation_good = orientation_good;
  p.orientation_bad = !orientation_good;
  p.height = height_cm;
  return p;
}

/// Wraps an angle in degrees to (-180, 180].
inline double wrap_degrees(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

struct TurnCounts {
  int turns_tot = 0;
  int turns_left = 0;
  int turns_right = 0;
  double rot_abs = 0.0;
};

namespace detail {

inline constexpr double kTurnThresholdDeg = 90.0;
inline constexpr double kAngleEps = 1e-9;

// Plan heading of a link in degrees, or nullopt when the link has no
// horizontal extent.
inline std::optional<double> heading(const Network& net, const Link& l) {
  const auto& a = net.node(l.from);
  const auto& b = net.node(l.to);
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (std::hypot(dx, dy) < 1e-12) return std::nullopt;
  return std::atan2(dy, dx) * 180.0 / std::numbers::pi;
}

// Per-link walk shared by count_turns and route_features. `on_turn(i, angle)`
// fires when a counted turn occurs on entering link i.
template <class OnTurn>
void walk_turns(const Network& net, const Route& route, OnTurn&& on_turn) {
  double prev = 0.0;
  bool has_prev = false;
  for (std::size_t i = 0; i < route.link_ids.size(); ++i) {
    const auto& l = net.link(route.link_ids[i]);
    if (l.is_stair) {
      has_prev = false;  // rotations during level changes are excluded
      continue;
    }
    const auto h = heading(net, l);
    if (!h) continue;
    if (has_prev) {
      const double delta = wrap_degrees(*h - prev);
      if (std::abs(delta) >= kTurnThresholdDeg - kAngleEps) on_turn(i, delta);
    }
    prev = *h;
    has_prev = true;
  }
}

}  // namespace detail

/// Counts turns of at least 90 degrees between consecutive horizontal links.
/// Positive (counter-clockwise) heading changes are left turns; an exact
/// reversal counts toward the total only.
inline TurnCounts count_turns(const Route& route, const Network& net) {
  TurnCounts c;
  detail::walk_turns(net, route, [&](std::size_t, double delta) {
    ++c.turns_tot;
    const double mag = std::abs(delta);
    c.rot_abs += mag;
    if (mag < 180.0 - detail::kAngleEps) {
      if (delta > 0.0) ++c.turns_left; else ++c.turns_right;
    }
  });
  return c;
}

/// All route, infrastructure and task variables of a route.
/// Straight stretches are delimited by counted turns and level changes; a
/// run of consecutive stair links forms its own stretch.
inline FeatureVector route_features(const Route& route, const Network& net, int task) {
  if (route.link_ids.empty()) throw FeatureError("route has no links");
  if (task < 1 || task > 4) throw FeatureError("task must be in 1..4");
  for (const auto& id : route.link_ids)
    if (!net.link_index(id)) throw FeatureError("route traverses link '" + id + "' absent from network");

  FeatureVector f;
  const auto turns = count_turns(route, net);
  f.turns_tot = turns.turns_tot;
  f.turns_left = turns.turns_left;
  f.turns_right = turns.turns_right;
  f.rot_abs = turns.rot_abs;

  std::vector<bool> turn_before(route.link_ids.size(), false);
  detail::walk_turns(net, route, [&](std::size_t i, double) { turn_before[i] = true; });

  std::vector<double> stretches;
  double current = 0.0;
  bool current_is_stair = false;
  bool first_turn_seen = false;
  double wide = 0.0, window = 0.0;
  for (std::size_t i = 0; i < route.link_ids.size(); ++i) {
    const auto& l = net.link(route.link_ids[i]);
    const bool boundary = i > 0 && (turn_before[i] || l.is_stair != current_is_stair);
    if (boundary) {
      stretches.push_back(current);
      current = 0.0;
    }
    if (turn_before[i] && !first_turn_seen) {
      f.dist_firstturn = f.distot;
      first_turn_seen = true;
    }
    current_is_stair = l.is_stair;
    current += l.length_cm;
    f.distot += l.length_cm;
    if (l.is_wide) wide += l.length_cm;
    if (l.has_window) window += l.length_cm;
    f.firedoor += l.firedoor_count;
    f.floorsigns += l.floorsign_count;
    if (l.is_stair) f.stairs_no += 1.0;
  }
  stretches.push_back(current);
  if (!first_turn_seen) f.dist_firstturn = f.distot;

  f.dist_longeststretch = *std::max_element(stretches.begin(), stretches.end());
  f.dist_avg_straight = f.distot / static_cast<double>(stretches.size());
  f.ratio_wide = wide / f.distot;
  f.window = window / f.distot;

  // Floors entered along the route, revisits counted again.
  int floors = 1;
  int floor = net.node(route.origin).floor;
  for (const auto& id : route.link_ids) {
    const int next = net.node(net.link(id).to).floor;
    if (next != floor) ++floors;
    floor = next;
  }
  f.level_no = floors;
  f.task[static_cast<std::size_t>(task - 1)] = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectorySample {
  double t = 0.0;    // s
  double x = 0.0;    // m
  double y = 0.0;    // m
  int floor = 0;
  double yaw = 0.0;  // degrees, [0, 360)
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  /// Throws unless timestamps strictly increase and yaw lies in [0, 360).
  void validate(std::size_t min_samples = 2) const {
    if (samples.size() < min_samples)
      throw FeatureError("trajectory needs at least " + std::to_string(min_samples) + " samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!(samples[i].yaw >= 0.0 && samples[i].yaw < 360.0))
        throw FeatureError("yaw outside [0, 360) at sample " + std::to_string(i));
      if (i > 0 && !(samples[i].t > samples[i - 1].t))
        throw FeatureError("non-monotone timestamp at sample " + std::to_string(i));
    }
  }
};

struct HesitationParams {
  double pause_speed_mps = 0.1;
  double min_duration_s = 3.0;
};

/// Counts maximal below-threshold-speed intervals lasting strictly longer than
/// the minimum duration.
inline int detect_hesitations(const Trajectory& traj, HesitationParams params = {}) {
  traj.validate();
  const auto& s = traj.samples;
  int count = 0;
  double run_start = 0.0;
  bool in_run = false;
  auto close_run = [&](double end) {
    if (in_run && end - run_start > params.min_duration_s) ++count;
    in_run = false;
  };
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double dt = s[i].t - s[i - 1].t;
    const double d = std::hypot(s[i].x - s[i - 1].x, s[i].y - s[i - 1].y);
    const bool slow = s[i].floor == s[i - 1].floor && d / dt < params.pause_speed_mps;
    if (slow) {
      if (!in_run) {
        run_start = s[i - 1].t;
        in_run = true;
      }
    } else {
      close_run(s[i - 1].t);
    }
  }
  close_run(s.back().t);
  return count;
}

/// Mean absolute yaw rate in degrees per second.
inline double head_rotation(const Trajectory& traj) {
  traj.validate();
  const auto& s = traj.samples;
  double sum = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    sum += std::abs(wrap_degrees(s[i].yaw - s[i - 1].yaw)) / (s[i].t - s[i - 1].t);
  return sum / static_cast<double>(s.size() - 1);
}

struct Performance {
  double total_time_s = 0.0;
  double total_distance_m = 0.0;
  double avg_speed_mps = 0.0;
};

inline Performance wayfinding_performance(const Trajectory& traj) {
  traj.validate();
  const auto& s = traj.samples;
  Performance p;
  p.total_time_s = s.back().t - s.front().t;
  if (!(p.total_time_s > 0.0)) throw FeatureError("trajectory has zero duration");
  for (std::size_t i = 1; i < s.size(); ++i) p.total_distance_m += std::hypot(s[i].x - s[i - 1].x, s[i].y - s[i - 1].y);
  p.avg_speed_mps = p.total_distance_m / p.total_time_s;
  return p;
}

}  // namespace wayfind
