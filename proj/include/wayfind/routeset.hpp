#pragma once

// Route choice sets: breadth-first link elimination, seeded sampling,
// chosen-route correction and the path-size overlap factor.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wayfind/netgraph.hpp"
#include "wayfind/rng.hpp"

namespace wayfind {

class RouteSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RouteSet {
 public:
  RouteSet() = default;

  /// Validates that all routes share one od pair and are pairwise distinct.
  explicit RouteSet(std::vector<Route> routes) : routes_(std::move(routes)) {
    if (routes_.empty()) throw RouteSetError("route set is empty");
    origin_ = routes_.front().origin;
    destination_ = routes_.front().destination;
    std::set<std::vector<std::string>> seen;
    for (const auto& r : routes_) {
      if (r.origin != origin_ || r.destination != destination_)
        throw RouteSetError("route " + r.origin + "->" + r.destination + " does not match set od " + origin_ + "->" +
                            destination_);
      if (r.link_ids.size() != r.link_lengths_cm.size()) throw RouteSetError("route link lengths missing");
      if (!seen.insert(r.link_ids).second) throw RouteSetError("duplicate route in set");
      for (const auto& id : r.link_ids) ++incidence_[id];
    }
  }

  [[nodiscard]] const std::vector<Route>& routes() const { return routes_; }
  [[nodiscard]] std::size_t size() const { return routes_.size(); }
  [[nodiscard]] const Route& operator[](std::size_t i) const { return routes_[i]; }
  [[nodiscard]] const std::string& origin() const { return origin_; }
  [[nodiscard]] const std::string& destination() const { return destination_; }

  /// Number of routes in the set that use a link.
  [[nodiscard]] int incidence(const std::string& link_id) const {
    auto it = incidence_.find(link_id);
    return it == incidence_.end() ? 0 : it->second;
  }

  [[nodiscard]] std::optional<std::size_t> find(const Route& r) const {
    for (std::size_t i = 0; i < routes_.size(); ++i)
      if (routes_[i] == r) return i;
    return std::nullopt;
  }

 private:
  std::vector<Route> routes_;
  std::string origin_;
  std::string destination_;
  std::map<std::string, int> incidence_;
};

/// Breadth-first search on link elimination. The root is the shortest path;
/// every tree node below `tree_depth` spawns one child per link of its route,
/// with that link removed on top of the parent's removals. Each distinct
/// shortest path found is added once, in generation order.
inline RouteSet bfs_le(const Network& net, const std::string& origin, const std::string& destination,
                       int tree_depth = 2) {
  if (tree_depth < 0) throw RouteSetError("tree depth must be non-negative");

  struct TreeNode {
    Route route;
    std::vector<std::size_t> removed;  // sorted link indices
    int depth;
  };

  std::vector<Route> found;
  std::set<std::vector<std::string>> seen_routes;
  std::set<std::vector<std::size_t>> seen_removals;

  Route root = shortest_path(net, origin, destination);
  seen_routes.insert(root.link_ids);
  found.push_back(root);

  std::deque<TreeNode> queue;
  queue.push_back({std::move(root), {}, 0});
  seen_removals.insert({});

  LinkMask mask(net.links().size(), false);
  while (!queue.empty()) {
    TreeNode node = std::move(queue.front());
    queue.pop_front();
    if (node.depth >= tree_depth) continue;
    for (const auto& id : node.route.link_ids) {
      const auto l = *net.link_index(id);
      auto removed = node.removed;
      removed.insert(std::upper_bound(removed.begin(), removed.end(), l), l);
      if (!seen_removals.insert(removed).second) continue;

      std::fill(mask.begin(), mask.end(), false);
      for (const auto r : removed) mask[r] = true;
      Route child;
      try {
        child = shortest_path(net, origin, destination, &mask);
      } catch (const UnreachableError&) {
        continue;
      }
      if (seen_routes.insert(child.link_ids).second) found.push_back(child);
      queue.push_back({std::move(child), std::move(removed), node.depth + 1});
    }
  }
  return RouteSet(std::move(found));
}

/// Draws k routes uniformly without replacement. The stream is keyed on the
/// seed, the od pair and a caller-supplied tag (task, participant), so the
/// result is reproducible per key. Sets of size <= k are returned unchanged.
inline RouteSet sample_routes(const RouteSet& set, std::size_t k, std::uint64_t seed, std::string_view tag = {}) {
  if (k < 1) throw RouteSetError("sample size must be at least 1");
  if (set.size() <= k) return set;

  auto key = rng::derive(rng::derive(rng::derive(seed, set.origin()), set.destination()), tag);
  rng::CounterRng gen(key);
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates; the drawn order is kept.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + gen.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<Route> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < k; ++i) picked.push_back(set[idx[i]]);
  return RouteSet(std::move(picked));
}

/// Guarantees the chosen route is in the set: if absent, it replaces the last route.
inline RouteSet ensure_chosen(const RouteSet& set, const Route& chosen) {
  if (chosen.origin != set.origin() || chosen.destination != set.destination())
    throw RouteSetError("chosen route od " + chosen.origin + "->" + chosen.destination + " does not match set od " +
                        set.origin() + "->" + set.destination());
  if (set.find(chosen)) return set;
  auto routes = set.routes();
  routes.back() = chosen;
  return RouteSet(std::move(routes));
}

/// Path-size factor: sum over the route's links of (link length / route
/// length) divided by the number of routes in the set using that link.
inline double path_size(const Route& route, const RouteSet& set) {
  if (!set.find(route)) throw RouteSetError("route is not a member of the set");
  double shared = 0.0, total = 0.0;
  for (std::size_t i = 0; i < route.link_ids.size(); ++i) {
    shared += route.link_lengths_cm[i] / set.incidence(route.link_ids[i]);
    total += route.link_lengths_cm[i];
  }
  // one division keeps a fully distinct route at exactly 1
  return shared / total;
}

/// Path-size factors of an arbitrary route collection, which may contain
/// repeated routes (each copy counts in the link incidence).
inline std::vector<double> path_size_factors(std::span<const Route> routes) {
  std::map<std::string, int> incidence;
  for (const auto& r : routes)
    for (const auto& id : r.link_ids) ++incidence[id];
  std::vector<double> out;
  out.reserve(routes.size());
  for (const auto& r : routes) {
    double shared = 0.0, total = 0.0;
    for (std::size_t i = 0; i < r.link_ids.size(); ++i) {
      shared += r.link_lengths_cm[i] / incidence[r.link_ids[i]];
      total += r.link_lengths_cm[i];
    }
    out.push_back(shared / total);
  }
  return out;
}

inline std::vector<double> path_sizes(const RouteSet& set) {
  std::vector<double> out;
  out.reserve(set.size());
  for (const auto& r : set.routes()) out.push_back(path_size(r, set));
  return out;
}

}  // namespace wayfind
