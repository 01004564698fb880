#pragma once

// Directed building network and shortest-path queries.
//
// Undirected corridors are stored as two opposite links. Lengths are in
// centimeters; node positions in meters. Vertical links (stairs) carry an
// explicit traversal length and connect adjacent floors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wayfind {

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnreachableError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

struct Node {
  std::string id;
  double x = 0.0;  // m
  double y = 0.0;  // m
  int floor = 0;
};

struct Link {
  std::string id;
  std::string from;
  std::string to;
  double length_cm = 0.0;
  bool is_stair = false;
  bool is_wide = false;
  bool has_window = false;
  int firedoor_count = 0;
  int floorsign_count = 0;
};

struct FloorRange {
  int lowest = std::numeric_limits<int>::min();
  int highest = std::numeric_limits<int>::max();
};

/// A loop-free link sequence between two nodes.
struct Route {
  std::string origin;
  std::string destination;
  std::vector<std::string> link_ids;
  std::vector<double> link_lengths_cm;
  double total_length_cm = 0.0;

  [[nodiscard]] std::size_t size() const { return link_ids.size(); }
  friend bool operator==(const Route& a, const Route& b) {
    return a.origin == b.origin && a.destination == b.destination && a.link_ids == b.link_ids;
  }
};

class Network {
 public:
  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<Link>& links() const { return links_; }
  [[nodiscard]] const FloorRange& floor_range() const { return floors_; }

  [[nodiscard]] std::optional<std::size_t> node_index(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] std::optional<std::size_t> link_index(const std::string& id) const {
    auto it = link_index_.find(id);
    if (it == link_index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] const Node& node(const std::string& id) const { return nodes_.at(require_node(id)); }
  [[nodiscard]] const Link& link(const std::string& id) const {
    auto idx = link_index(id);
    if (!idx) throw NetworkError("unknown link '" + id + "'");
    return links_[*idx];
  }
  [[nodiscard]] std::size_t require_node(const std::string& id) const {
    auto idx = node_index(id);
    if (!idx) throw NetworkError("unknown node '" + id + "'");
    return *idx;
  }

  /// Outgoing link indices of a node, sorted by link id.
  [[nodiscard]] const std::vector<std::size_t>& out_links(std::size_t node) const { return out_[node]; }
  [[nodiscard]] const std::vector<std::size_t>& in_links(std::size_t node) const { return in_[node]; }
  [[nodiscard]] std::size_t from_index(std::size_t link) const { return link_from_[link]; }
  [[nodiscard]] std::size_t to_index(std::size_t link) const { return link_to_[link]; }

  /// Builds a Route from link ids, checking connectivity and loop-freeness.
  [[nodiscard]] Route make_route(const std::vector<std::string>& link_ids) const;

 private:
  friend Network build_network(std::vector<Node>, std::vector<Link>, std::optional<FloorRange>);

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  FloorRange floors_;
  std::unordered_map<std::string, std::size_t> node_index_;
  std::unordered_map<std::string, std::size_t> link_index_;
  std::vector<std::size_t> link_from_;
  std::vector<std::size_t> link_to_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

/// Validates nodes and links and builds the adjacency index.
/// When no floor range is given it is taken from the nodes themselves.
inline Network build_network(std::vector<Node> nodes, std::vector<Link> links,
                             std::optional<FloorRange> floors = std::nullopt) {
  if (nodes.empty()) throw NetworkError("network has no nodes");
  if (links.empty()) throw NetworkError("network has no links");

  Network net;
  if (floors) {
    if (floors->lowest > floors->highest) throw NetworkError("floor range is empty");
    net.floors_ = *floors;
  } else {
    auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end(),
                                        [](const Node& a, const Node& b) { return a.floor < b.floor; });
    net.floors_ = {lo->floor, hi->floor};
  }

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id.empty()) throw NetworkError("node with empty id");
    if (!net.node_index_.emplace(n.id, i).second) throw NetworkError("duplicate node id '" + n.id + "'");
    if (n.floor < net.floors_.lowest || n.floor > net.floors_.highest)
      throw NetworkError("node '" + n.id + "' floor " + std::to_string(n.floor) + " outside declared range");
    if (!std::isfinite(n.x) || !std::isfinite(n.y)) throw NetworkError("node '" + n.id + "' has non-finite position");
  }

  net.out_.resize(nodes.size());
  net.in_.resize(nodes.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    if (l.id.empty()) throw NetworkError("link with empty id");
    if (!net.link_index_.emplace(l.id, i).second) throw NetworkError("duplicate link id '" + l.id + "'");
    auto from = net.node_index_.find(l.from);
    auto to = net.node_index_.find(l.to);
    if (from == net.node_index_.end())
      throw NetworkError("link '" + l.id + "' has dangling endpoint '" + l.from + "'");
    if (to == net.node_index_.end())
      throw NetworkError("link '" + l.id + "' has dangling endpoint '" + l.to + "'");
    if (from->second == to->second) throw NetworkError("link '" + l.id + "' is a self-loop");
    if (!(l.length_cm > 0.0) || !std::isfinite(l.length_cm))
      throw NetworkError("link '" + l.id + "' must have positive length");
    if (l.firedoor_count < 0 || l.floorsign_count < 0)
      throw NetworkError("link '" + l.id + "' has negative attribute count");
    const int df = std::abs(nodes[from->second].floor - nodes[to->second].floor);
    if (l.is_stair && df != 1)
      throw NetworkError("stair link '" + l.id + "' must connect adjacent floors");
    if (!l.is_stair && df != 0)
      throw NetworkError("link '" + l.id + "' connects different floors but is not a stair");
    net.link_from_.push_back(from->second);
    net.link_to_.push_back(to->second);
    net.out_[from->second].push_back(i);
    net.in_[to->second].push_back(i);
  }
  auto by_id = [&](std::size_t a, std::size_t b) { return links[a].id < links[b].id; };
  for (auto& v : net.out_) std::sort(v.begin(), v.end(), by_id);
  for (auto& v : net.in_) std::sort(v.begin(), v.end(), by_id);

  net.nodes_ = std::move(nodes);
  net.links_ = std::move(links);
  return net;
}

inline Route Network::make_route(const std::vector<std::string>& link_ids) const {
  if (link_ids.empty()) throw NetworkError("route has no links");
  Route r;
  std::vector<std::size_t> visited;
  for (std::size_t i = 0; i < link_ids.size(); ++i) {
    auto idx = link_index(link_ids[i]);
    if (!idx) throw NetworkError("route uses unknown link '" + link_ids[i] + "'");
    if (i == 0) {
      visited.push_back(link_from_[*idx]);
    } else if (link_from_[*idx] != visited.back()) {
      throw NetworkError("route links '" + link_ids[i - 1] + "' and '" + link_ids[i] + "' are not consecutive");
    }
    const auto next = link_to_[*idx];
    if (std::find(visited.begin(), visited.end(), next) != visited.end())
      throw NetworkError("route revisits node '" + nodes_[next].id + "'");
    visited.push_back(next);
    r.link_ids.push_back(link_ids[i]);
    r.link_lengths_cm.push_back(links_[*idx].length_cm);
    r.total_length_cm += links_[*idx].length_cm;
  }
  r.origin = nodes_[visited.front()].id;
  r.destination = nodes_[visited.back()].id;
  return r;
}

/// Per-link exclusion mask (true = removed) used for link elimination.
using LinkMask = std::vector<bool>;

namespace detail {

inline bool tight(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

// Distance of every node to `target` over non-excluded links.
inline std::vector<double> distances_to(const Network& net, std::size_t target, const LinkMask* excluded) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(net.nodes().size(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[target] = 0.0;
  heap.emplace(0.0, target);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto l : net.in_links(v)) {
      if (excluded && (*excluded)[l]) continue;
      const auto u = net.from_index(l);
      const double nd = d + net.links()[l].length_cm;
      if (nd < dist[u]) {
        dist[u] = nd;
        heap.emplace(nd, u);
      }
    }
  }
  return dist;
}

}  // namespace detail

/// Shortest route by total length. Among equal-length routes the one with the
/// lexicographically smallest link-id sequence is returned.
inline Route shortest_path(const Network& net, const std::string& origin, const std::string& destination,
                           const LinkMask* excluded = nullptr) {
  const auto o = net.require_node(origin);
  const auto d = net.require_node(destination);
  if (o == d) throw NetworkError("origin equals destination '" + origin + "'");
  if (excluded && excluded->size() != net.links().size()) throw NetworkError("link mask size mismatch");

  const auto dist = detail::distances_to(net, d, excluded);
  if (!std::isfinite(dist[o])) throw UnreachableError("destination '" + destination + "' unreachable from '" + origin + "'");

  // Walk the shortest-path DAG greedily; out_links are sorted by id, so the
  // first tight link yields the lexicographically smallest sequence.
  std::vector<std::string> ids;
  std::size_t u = o;
  while (u != d) {
    bool advanced = false;
    for (const auto l : net.out_links(u)) {
      if (excluded && (*excluded)[l]) continue;
      const auto v = net.to_index(l);
      if (!std::isfinite(dist[v])) continue;
      if (detail::tight(dist[u], net.links()[l].length_cm + dist[v])) {
        ids.push_back(net.links()[l].id);
        u = v;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw NetworkError("shortest-path reconstruction failed at '" + net.nodes()[u].id + "'");
  }
  return net.make_route(ids);
}

}  // namespace wayfind
