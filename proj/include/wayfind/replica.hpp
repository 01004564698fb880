#pragma once

// Replica of the four-story test building: three office floors above an exit
// floor, each with two long parallel corridors joined by five staircase
// halls. Exact dimensions of the original building are not published; this
// layout is a reconstruction from its abstract plan and is labeled as such.
//
// Plan coordinates (m): corridor A is centred on y = 0 and corridor B on
// y = 20, both 120 m long. Each corridor is modeled as two walking lanes,
// one per side, 2 m apart, with nodes every 5 m and a crossing between the
// lanes at every node. Staircase halls sit at x = 0, 30, 60, 90, 120 between
// the corridors; hall nodes alternate between y = 9 and y = 11 on successive
// floors so each flight has a plan extent. Elevators are not modeled.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wayfind/netgraph.hpp"

namespace wayfind::replica {

struct Task {
  int id;
  std::string origin;
  std::string destination;
  std::string description;
};

inline constexpr int kLowestFloor = 1;
inline constexpr int kHighestFloor = 4;
inline constexpr int kCorridorNodes = 25;  // x = 0 .. 120 step 5
inline constexpr double kNodeSpacingM = 5.0;
inline constexpr int kHallEvery = 6;       // one staircase hall per 30 m
inline constexpr double kStairFlightCm = 800.0;

/// Lane ids: "As"/"An" are the south/north sides of corridor A, "Bs"/"Bn" of
/// corridor B. The south side of corridor A is the facade with windows.
inline std::string lane_node(const std::string& lane, int floor, int i) {
  return lane + std::to_string(floor) + "_" + std::to_string(i);
}
inline std::string hall_node(int floor, int j) { return "H" + std::to_string(floor) + "_" + std::to_string(j); }

inline std::vector<Task> tasks() {
  return {
      {1, "R4.02", "R4.99", "room 4.02 to room 4.99"},
      {2, "R4.99", "R4.02", "room 4.99 to room 4.02"},
      {3, "R4.02", "R4.64", "room 4.02 to room 4.64"},
      {4, "R4.64", "EXIT_A1", "evacuation from room 4.64 to exit A1"},
  };
}

inline Network building() {
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::map<std::string, std::size_t> at;

  auto add_node = [&](std::string id, double x, double y, int floor) {
    at[id] = nodes.size();
    nodes.push_back({std::move(id), x, y, floor});
  };
  auto plan_cm = [&](const std::string& a, const std::string& b) {
    const auto& p = nodes[at.at(a)];
    const auto& q = nodes[at.at(b)];
    return std::round(std::hypot(q.x - p.x, q.y - p.y) * 100.0);
  };
  // Adds both directions of a link.
  auto both = [&](const std::string& a, const std::string& b, Link proto) {
    proto.length_cm = proto.is_stair ? kStairFlightCm : plan_cm(a, b);
    proto.from = a;
    proto.to = b;
    proto.id = a + ">" + b;
    links.push_back(proto);
    std::swap(proto.from, proto.to);
    proto.id = b + ">" + a;
    links.push_back(proto);
  };

  const struct {
    const char* name;
    double y;
  } lanes[] = {{"As", -1.0}, {"An", 1.0}, {"Bs", 19.0}, {"Bn", 21.0}};

  for (int f = kLowestFloor; f <= kHighestFloor; ++f) {
    for (int i = 0; i < kCorridorNodes; ++i)
      for (const auto& lane : lanes) add_node(lane_node(lane.name, f, i), kNodeSpacingM * i, lane.y, f);
    for (int j = 0; j < 5; ++j) add_node(hall_node(f, j), 30.0 * j, f % 2 == 0 ? 9.0 : 11.0, f);
  }
  add_node("R4.02", 15.0, -5.0, 4);
  add_node("R4.99", 105.0, 25.0, 4);
  add_node("R4.64", 75.0, 25.0, 4);
  const struct {
    const char* id;
    double x, y;
    const char* lane;
    int at;
  } exits[] = {{"EXIT_A1", -5, -1, "As", 0},  {"EXIT_A2", 125, -1, "As", 24}, {"EXIT_B1", -5, 21, "Bn", 0},
               {"EXIT_B2", 125, 21, "Bn", 24}, {"EXIT_C1", 45, -5, "As", 9},   {"EXIT_C2", 75, 25, "Bn", 15},
               {"EXIT_D1", 105, -5, "As", 21}, {"EXIT_D2", 15, 25, "Bn", 3}};
  for (const auto& e : exits) add_node(e.id, e.x, e.y, 1);

  for (int f = kLowestFloor; f <= kHighestFloor; ++f) {
    for (int i = 0; i + 1 < kCorridorNodes; ++i) {
      for (const auto& lane : lanes) {
        Link l{};
        l.is_wide = true;
        l.has_window = lane.name == std::string("As");
        l.firedoor_count = (i == 5 || i == 18) ? 1 : 0;  // fire doors span both lanes
        both(lane_node(lane.name, f, i), lane_node(lane.name, f, i + 1), l);
      }
    }
    for (int i = 0; i < kCorridorNodes; ++i) {
      Link cross{};
      cross.is_wide = true;
      both(lane_node("As", f, i), lane_node("An", f, i), cross);
      both(lane_node("Bs", f, i), lane_node("Bn", f, i), cross);
    }
    for (int j = 0; j < 5; ++j) {
      Link c{};
      c.floorsign_count = 1;  // floor sign at each staircase landing
      both(hall_node(f, j), lane_node("An", f, kHallEvery * j), c);
      both(hall_node(f, j), lane_node("Bs", f, kHallEvery * j), c);
      if (f > kLowestFloor) {
        Link s{};
        s.is_stair = true;
        both(hall_node(f, j), hall_node(f - 1, j), s);
      }
    }
  }
  both("R4.02", lane_node("As", 4, 3), Link{});
  both("R4.99", lane_node("Bn", 4, 21), Link{});
  both("R4.64", lane_node("Bn", 4, 15), Link{});
  for (const auto& e : exits) both(e.id, lane_node(e.lane, 1, e.at), Link{});

  return build_network(std::move(nodes), std::move(links), FloorRange{kLowestFloor, kHighestFloor});
}

}  // namespace wayfind::replica
