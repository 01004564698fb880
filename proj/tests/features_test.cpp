#include <gtest/gtest.h>

#include <cmath>

#include "test_networks.hpp"
#include "wayfind/features.hpp"
#include "wayfind/replica.hpp"
#include "wayfind/routeset.hpp"

using namespace wayfind;
using wayfind::testing::horizontal;

namespace {

Route figure_route(const Network& net) { return net.make_route({"f0", "f1", "f2", "f3", "f4", "f5", "f6"}); }

Trajectory samples_from(const std::vector<std::array<double, 3>>& txy, int floor = 1) {
  Trajectory t;
  for (const auto& [time, x, y] : txy) t.samples.push_back({time, x, y, floor, 0.0});
  return t;
}

// Walks 1 m/s east, pauses for `pause` seconds, walks again.
Trajectory walk_pause_walk(double pause, double dt = 0.1) {
  Trajectory t;
  double time = 0.0, x = 0.0;
  for (int i = 0; i < 50; ++i, time += dt, x += dt) t.samples.push_back({time, x, 0.0, 1, 90.0});
  const double resume = time + pause;
  for (; time < resume - 1e-9; time += dt) t.samples.push_back({time, x, 0.0, 1, 90.0});
  for (int i = 0; i < 50; ++i, time += dt, x += dt) t.samples.push_back({time, x, 0.0, 1, 90.0});
  return t;
}

}  // namespace

TEST(Turns, FigureRouteCounts) {
  const auto net = wayfind::testing::figure_route_network();
  const auto c = count_turns(figure_route(net), net);
  EXPECT_EQ(c.turns_tot, 6);
  EXPECT_EQ(c.turns_left, 3);
  EXPECT_EQ(c.turns_right, 3);
  EXPECT_NEAR(c.rot_abs, 540.0, 1e-9);
}

TEST(RouteFeatures, FigureRouteDistances) {
  const auto net = wayfind::testing::figure_route_network();
  const auto f = route_features(figure_route(net), net, 2);
  EXPECT_DOUBLE_EQ(f.distot, 7400.0);
  EXPECT_NEAR(f.dist_avg_straight, 7400.0 / 7.0, 1e-9);
  EXPECT_NEAR(f.dist_avg_straight, 1057.1, 0.05);
  EXPECT_DOUBLE_EQ(f.dist_longeststretch, 2500.0);
  EXPECT_DOUBLE_EQ(f.dist_firstturn, 500.0);
  EXPECT_DOUBLE_EQ(f.level_no, 1.0);
  EXPECT_DOUBLE_EQ(f.stairs_no, 0.0);
  EXPECT_EQ(f.task, (std::array<double, 4>{0, 1, 0, 0}));
}

TEST(Turns, ThresholdAndDirection) {
  // A -> B east, then B -> C at the given angle (counter-clockwise positive)
  auto run = [](double deg) {
    const double r = deg * std::numbers::pi / 180.0;
    auto net = build_network({{"A", 0, 0, 0}, {"B", 10, 0, 0}, {"C", 10 + 10 * std::cos(r), 10 * std::sin(r), 0}},
                             {horizontal("AB", "A", "B", 1000), horizontal("BC", "B", "C", 1000)});
    return count_turns(net.make_route({"AB", "BC"}), net);
  };
  EXPECT_EQ(run(89.0).turns_tot, 0);
  EXPECT_EQ(run(90.0).turns_tot, 1);
  EXPECT_EQ(run(90.0).turns_left, 1);
  EXPECT_EQ(run(-90.0).turns_right, 1);
  EXPECT_EQ(run(-135.0).turns_right, 1);
  EXPECT_NEAR(run(-135.0).rot_abs, 135.0, 1e-9);
  const auto u = run(180.0);
  EXPECT_EQ(u.turns_tot, 1);
  EXPECT_EQ(u.turns_left + u.turns_right, 0);
}

TEST(Turns, StairsResetHeading) {
  // east on floor 2, stair down, then north on floor 1: not a counted turn
  Link s = horizontal("S", "B", "C", 600);
  s.is_stair = true;
  auto net = build_network({{"A", 0, 0, 2}, {"B", 10, 0, 2}, {"C", 10, 0, 1}, {"D", 10, 10, 1}},
                           {horizontal("AB", "A", "B", 1000), s, horizontal("CD", "C", "D", 1000)});
  const auto route = net.make_route({"AB", "S", "CD"});
  EXPECT_EQ(count_turns(route, net).turns_tot, 0);
  const auto f = route_features(route, net, 4);
  EXPECT_DOUBLE_EQ(f.stairs_no, 1.0);
  EXPECT_DOUBLE_EQ(f.level_no, 2.0);
  // stretches: 1000 | 600 | 1000
  EXPECT_NEAR(f.dist_avg_straight, 2600.0 / 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(f.dist_firstturn, 2600.0);
}

TEST(RouteFeatures, InfrastructureFractions) {
  Link a = horizontal("AB", "A", "B", 300);
  a.is_wide = true;
  a.has_window = true;
  a.firedoor_count = 2;
  Link b = horizontal("BC", "B", "C", 100);
  b.floorsign_count = 1;
  auto net = build_network({{"A", 0, 0, 0}, {"B", 3, 0, 0}, {"C", 4, 0, 0}}, {a, b});
  const auto f = route_features(net.make_route({"AB", "BC"}), net, 1);
  EXPECT_DOUBLE_EQ(f.ratio_wide, 0.75);
  EXPECT_DOUBLE_EQ(f.window, 0.75);
  EXPECT_DOUBLE_EQ(f.firedoor, 2.0);
  EXPECT_DOUBLE_EQ(f.floorsigns, 1.0);
  EXPECT_DOUBLE_EQ(f.dist_longeststretch, 400.0);
  EXPECT_THROW(route_features(net.make_route({"AB"}), net, 5), FeatureError);
}

TEST(RouteFeatures, LevelCountOnDescendThenReclimb) {
  auto stair = [](std::string id, std::string a, std::string b) {
    Link l = horizontal(std::move(id), std::move(a), std::move(b), 500);
    l.is_stair = true;
    return l;
  };
  auto net = build_network({{"a", 0, 0, 3}, {"b", 0, 0, 2}, {"c", 0, 0, 1}, {"d", 10, 0, 1}, {"e", 10, 0, 2}},
                           {stair("ab", "a", "b"), stair("bc", "b", "c"), horizontal("cd", "c", "d", 1000),
                            stair("de", "d", "e")});
  const auto f = route_features(net.make_route({"ab", "bc", "cd", "de"}), net, 3);
  EXPECT_DOUBLE_EQ(f.level_no, 4.0);
  EXPECT_DOUBLE_EQ(f.stairs_no, 3.0);
}

TEST(RouteFeatures, ReplicaTaskRoutesAreSane) {
  const auto net = replica::building();
  for (const auto& task : replica::tasks()) {
    const auto set = bfs_le(net, task.origin, task.destination, 1);
    for (const auto& r : set.routes()) {
      const auto f = route_features(r, net, task.id);
      EXPECT_GT(f.distot, 0.0);
      EXPECT_LE(f.dist_firstturn, f.distot);
      EXPECT_LE(f.dist_longeststretch, f.distot);
      EXPECT_LE(f.dist_avg_straight, f.dist_longeststretch + 1e-9);
      EXPECT_EQ(f.turns_left + f.turns_right <= f.turns_tot, true);
      EXPECT_GE(f.ratio_wide, 0.0);
      EXPECT_LE(f.ratio_wide, 1.0);
      EXPECT_GE(f.level_no, 1.0);
    }
  }
}

TEST(Profile, IndicatorsDerivedFromAnswers) {
  const auto p = make_profile(22, true, Education::master, false, true, VrExperience::sometimes, false, 181);
  EXPECT_EQ(p.age_young, 1.0);
  EXPECT_EQ(p.age_old, 0.0);
  EXPECT_EQ(p.education_MSc, 1.0);
  EXPECT_EQ(p.familiar_not, 1.0);
  EXPECT_EQ(p.VR_sometimes, 1.0);
  EXPECT_EQ(p.orientation_bad, 1.0);
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(make_profile(51, false, Education::doctorate, true, false, VrExperience::never, true, 170).age_old, 1.0);
  auto bad = p;
  bad.set("education_Doc", 1.0);
  EXPECT_THROW(bad.validate(), FeatureError);
  EXPECT_THROW(bad.set("nope", 1.0), FeatureError);
}

TEST(Hesitations, SingleLongPause) { EXPECT_EQ(detect_hesitations(walk_pause_walk(4.0)), 1); }

TEST(Hesitations, ShortPauseIgnored) { EXPECT_EQ(detect_hesitations(walk_pause_walk(2.9)), 0); }

TEST(Hesitations, ExactlyThreeSecondsNotCounted) {
  // the stop lasts exactly 3 s from first to last stationary sample
  const auto t = samples_from({{0, 0, 0}, {1, 1, 0}, {2, 1, 0}, {3, 1, 0}, {4, 1, 0}, {5, 2, 0}});
  EXPECT_EQ(detect_hesitations(t), 0);
  const auto longer = samples_from({{0, 0, 0}, {1, 1, 0}, {2, 1, 0}, {3, 1, 0}, {4.01, 1, 0}, {5, 2, 0}});
  EXPECT_EQ(detect_hesitations(longer), 1);
}

TEST(Hesitations, PauseAtEndCounts) {
  const auto t = samples_from({{0, 0, 0}, {1, 1, 0}, {2, 1, 0}, {3, 1, 0}, {4, 1, 0}, {5, 1, 0}});
  EXPECT_EQ(detect_hesitations(t), 1);
}

TEST(Hesitations, FloorChangeBreaksRun) {
  auto t = samples_from({{0, 0, 0}, {2, 0, 0}, {4, 0, 0}, {6, 0, 0}, {8, 0, 0}});
  EXPECT_EQ(detect_hesitations(t), 1);
  t.samples[2].floor = 2;
  t.samples[3].floor = 2;
  t.samples[4].floor = 2;
  EXPECT_EQ(detect_hesitations(t), 1);  // 4 s on floor 2 still counts
  t.samples[4].floor = 3;
  EXPECT_EQ(detect_hesitations(t), 0);
}

TEST(HeadRotation, ConstantYawIsZero) {
  EXPECT_DOUBLE_EQ(head_rotation(walk_pause_walk(1.0)), 0.0);
}

TEST(HeadRotation, WrapsAcrossNorth) {
  Trajectory t;
  t.samples = {{0, 0, 0, 1, 350.0}, {1, 0, 0, 1, 10.0}, {2, 0, 0, 1, 350.0}};
  EXPECT_DOUBLE_EQ(head_rotation(t), 20.0);
}

TEST(HeadRotation, ConstantSweep) {
  Trajectory t;
  for (int i = 0; i <= 100; ++i) t.samples.push_back({0.1 * i, 0, 0, 1, std::fmod(3.0 * i, 360.0)});
  EXPECT_NEAR(head_rotation(t), 30.0, 1e-9);
}

TEST(Trajectory, RejectsMalformedInput) {
  EXPECT_THROW(detect_hesitations(samples_from({{0, 0, 0}, {0, 1, 0}})), FeatureError);
  Trajectory t;
  t.samples = {{0, 0, 0, 1, 360.0}, {1, 0, 0, 1, 0.0}};
  EXPECT_THROW(head_rotation(t), FeatureError);
  EXPECT_THROW(wayfinding_performance(samples_from({{0, 0, 0}})), FeatureError);
}

TEST(Performance, ConstantSpeedWalk) {
  Trajectory t;
  for (int i = 0; i <= 100; ++i) t.samples.push_back({0.5 * i, 0.7 * i, 0.0, 1, 90.0});
  const auto p = wayfinding_performance(t);
  EXPECT_DOUBLE_EQ(p.total_time_s, 50.0);
  EXPECT_NEAR(p.total_distance_m, 70.0, 1e-9);
  EXPECT_NEAR(p.avg_speed_mps, 1.4, 1e-12);
}

TEST(WrapDegrees, Range) {
  EXPECT_DOUBLE_EQ(wrap_degrees(190.0), -170.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(-180.0), 180.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(180.0), 180.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(720.0 + 45.0), 45.0);
}
