#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "traffic_eq/errors.hpp"
#include "traffic_eq/link_vector.hpp"

namespace traffic_eq {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct Link {
  NodeId tail = 0;
  NodeId head = 0;
  double free_flow_time = 0.0;  // hours
  double capacity = 0.0;        // vehicles per hour
};

/// Directed road graph. The order of `links()` is the canonical index order of
/// every LinkTimes / LinkFlows vector.
///
/// Nodes with id below `first_thru_node` are centroids: paths may start or end
/// there but never pass through them. The default of 0 disables the rule.
class Network {
 public:
  Network(std::size_t node_count, std::vector<Link> links, std::size_t first_thru_node = 0)
      : node_count_(node_count), first_thru_node_(first_thru_node), links_(std::move(links)) {
    if (node_count_ == 0) throw ValidationError("network must have at least one node");
    if (node_count_ > std::numeric_limits<NodeId>::max() ||
        links_.size() > std::numeric_limits<LinkId>::max())
      throw ValidationError("network too large");
    out_offsets_.assign(node_count_ + 1, 0);
    for (std::size_t e = 0; e < links_.size(); ++e) {
      const Link& l = links_[e];
      const std::string where = "link " + std::to_string(e) + ": ";
      if (l.tail >= node_count_ || l.head >= node_count_)
        throw ValidationError(where + "node id out of range");
      if (l.tail == l.head) throw ValidationError(where + "self-loop");
      if (!(l.free_flow_time > 0.0) || !std::isfinite(l.free_flow_time))
        throw ValidationError(where + "free-flow time must be positive");
      if (!(l.capacity > 0.0) || !std::isfinite(l.capacity))
        throw ValidationError(where + "capacity must be positive");
      ++out_offsets_[l.tail + 1];
    }
    for (std::size_t v = 0; v < node_count_; ++v) out_offsets_[v + 1] += out_offsets_[v];
    out_links_.resize(links_.size());
    std::vector<std::size_t> cursor(out_offsets_.begin(), out_offsets_.end() - 1);
    for (std::size_t e = 0; e < links_.size(); ++e)
      out_links_[cursor[links_[e].tail]++] = static_cast<LinkId>(e);
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t link_count() const noexcept { return links_.size(); }
  std::size_t first_thru_node() const noexcept { return first_thru_node_; }

  const std::vector<Link>& links() const noexcept { return links_; }
  const Link& link(LinkId e) const { return links_[e]; }

  /// Outgoing link ids of `v`, ascending.
  std::span<const LinkId> out_links(NodeId v) const {
    return std::span<const LinkId>(out_links_).subspan(out_offsets_[v],
                                                       out_offsets_[v + 1] - out_offsets_[v]);
  }

  /// Whether shortest paths from `origin` may continue through `v`.
  bool can_pass_through(NodeId v, NodeId origin) const noexcept {
    return v == origin || v >= first_thru_node_;
  }

  LinkTimes free_flow_times() const {
    LinkTimes t(links_.size());
    for (std::size_t e = 0; e < links_.size(); ++e) t[e] = links_[e].free_flow_time;
    return t;
  }

  LinkFlows capacities() const {
    LinkFlows c(links_.size());
    for (std::size_t e = 0; e < links_.size(); ++e) c[e] = links_[e].capacity;
    return c;
  }

 private:
  std::size_t node_count_;
  std::size_t first_thru_node_;
  std::vector<Link> links_;
  std::vector<std::size_t> out_offsets_;
  std::vector<LinkId> out_links_;
};

struct OdDemand {
  NodeId origin = 0;
  NodeId destination = 0;
  double rate = 0.0;  // vehicles per hour
};

/// Trip rates per origin-destination pair, grouped by origin.
class Demands {
 public:
  struct Destination {
    NodeId node;
    double rate;
  };

  Demands() = default;

  explicit Demands(std::vector<OdDemand> entries) : entries_(std::move(entries)) {
    std::map<NodeId, std::vector<Destination>> grouped;
    for (const OdDemand& w : entries_) {
      if (w.origin == w.destination)
        throw ValidationError("demand from node " + std::to_string(w.origin) + " to itself");
      if (!(w.rate > 0.0) || !std::isfinite(w.rate))
        throw ValidationError("demand rate must be positive");
      grouped[w.origin].push_back({w.destination, w.rate});
      total_ += w.rate;
    }
    for (auto& [origin, dests] : grouped) {
      std::sort(dests.begin(), dests.end(),
                [](const Destination& a, const Destination& b) { return a.node < b.node; });
      for (std::size_t i = 1; i < dests.size(); ++i)
        if (dests[i].node == dests[i - 1].node)
          throw ValidationError("duplicate demand pair (" + std::to_string(origin) + ", " +
                                std::to_string(dests[i].node) + ")");
      origins_.push_back(origin);
      destinations_.push_back(std::move(dests));
    }
  }

  const std::vector<OdDemand>& entries() const noexcept { return entries_; }
  double total() const noexcept { return total_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Distinct origins in ascending order.
  const std::vector<NodeId>& origins() const noexcept { return origins_; }
  /// Destinations of `origins()[i]`, ascending by node id.
  const std::vector<Destination>& destinations_of(std::size_t i) const { return destinations_[i]; }

  void check_against(const Network& network) const {
    for (const OdDemand& w : entries_)
      if (w.origin >= network.node_count() || w.destination >= network.node_count())
        throw ValidationError("demand endpoint outside the network");
  }

 private:
  std::vector<OdDemand> entries_;
  double total_ = 0.0;
  std::vector<NodeId> origins_;
  std::vector<std::vector<Destination>> destinations_;
};

struct ShortestPathTree {
  NodeId origin = 0;
  std::vector<std::optional<LinkId>> parent_link;
  std::vector<NodeId> parent;  // meaningful only where parent_link is set
  std::vector<double> dist;
};

namespace detail {

/// Reusable buffers for repeated searches.
struct DijkstraScratch {
  std::vector<char> settled;
  std::vector<char> is_target;
  std::vector<std::pair<double, NodeId>> heap;
  std::vector<NodeId> order;
};

/// Dijkstra from `origin` with lazy deletion. Among equal-cost predecessors the
/// lowest link index wins. Returns the settle order (nondecreasing distance),
/// stored in `scratch`.
/// When `targets` is non-empty the search stops once all of them are settled;
/// distances of unsettled nodes are then only upper bounds.
inline const std::vector<NodeId>& dijkstra(const Network& network, std::span<const double> times,
                                           NodeId origin, ShortestPathTree& tree,
                                           std::span<const NodeId> targets,
                                           DijkstraScratch& scratch) {
  const std::size_t n = network.node_count();
  tree.origin = origin;
  tree.dist.assign(n, kUnreachable);
  tree.parent_link.assign(n, std::nullopt);
  tree.parent.assign(n, origin);
  auto& settled = scratch.settled;
  auto& is_target = scratch.is_target;
  settled.assign(n, 0);
  is_target.clear();
  std::size_t remaining = targets.size();
  if (!targets.empty()) {
    is_target.assign(n, 0);
    for (NodeId v : targets) is_target[v] = 1;
  }

  auto& heap = scratch.heap;
  auto& order = scratch.order;
  heap.clear();
  order.clear();
  const auto push = [&heap](double d, NodeId v) {
    heap.emplace_back(d, v);
    std::push_heap(heap.begin(), heap.end(), std::greater<>{});
  };
  tree.dist[origin] = 0.0;
  push(0.0, origin);
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), std::greater<>{});
    const auto [d, u] = heap.back();
    heap.pop_back();
    if (settled[u] || d > tree.dist[u]) continue;
    settled[u] = 1;
    order.push_back(u);
    if (!is_target.empty() && is_target[u] && --remaining == 0) break;
    if (!network.can_pass_through(u, origin)) continue;
    for (LinkId e : network.out_links(u)) {
      const NodeId v = network.link(e).head;
      if (settled[v]) continue;
      const double candidate = d + times[e];
      if (candidate < tree.dist[v]) {
        tree.dist[v] = candidate;
        tree.parent_link[v] = e;
        tree.parent[v] = u;
        push(candidate, v);
      } else if (candidate == tree.dist[v] && e < *tree.parent_link[v]) {
        tree.parent_link[v] = e;
        tree.parent[v] = u;
      }
    }
  }
  return order;
}

inline std::vector<NodeId> dijkstra(const Network& network, std::span<const double> times,
                                    NodeId origin, ShortestPathTree& tree,
                                    std::span<const NodeId> targets = {}) {
  DijkstraScratch scratch;
  return dijkstra(network, times, origin, tree, targets, scratch);
}

}  // namespace detail

/// Shortest-path tree from `origin` under link weights `times`. Unreachable
/// nodes keep an infinite distance and no parent.
inline ShortestPathTree shortest_path_tree(const Network& network, const LinkTimes& times,
                                           NodeId origin) {
  if (origin >= network.node_count()) throw ValidationError("origin out of range");
  if (times.size() != network.link_count()) throw ValidationError("times size mismatch");
  ShortestPathTree tree;
  detail::dijkstra(network, times.span(), origin, tree);
  return tree;
}

/// Reachable nodes of `tree` ordered so that every node precedes its parent
/// (furthest to closest, the root last).
inline std::vector<NodeId> topological_order(const ShortestPathTree& tree) {
  const std::size_t n = tree.dist.size();
  std::vector<std::size_t> child_count(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (tree.parent_link[v]) ++child_count[tree.parent[v] + 1];
  for (std::size_t v = 0; v < n; ++v) child_count[v + 1] += child_count[v];
  std::vector<NodeId> children(child_count[n]);
  std::vector<std::size_t> cursor(child_count.begin(), child_count.end() - 1);
  for (std::size_t v = 0; v < n; ++v)
    if (tree.parent_link[v]) children[cursor[tree.parent[v]]++] = static_cast<NodeId>(v);

  std::vector<NodeId> order{tree.origin};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NodeId u = order[i];
    for (std::size_t c = child_count[u]; c < child_count[u + 1]; ++c) order.push_back(children[c]);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

/// Largest minimum hop count over demanded OD pairs.
inline std::size_t hop_diameter(const Network& network, const Demands& demands) {
  demands.check_against(network);
  std::size_t diameter = 0;
  std::vector<std::size_t> hops(network.node_count());
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < demands.origins().size(); ++i) {
    const NodeId origin = demands.origins()[i];
    std::fill(hops.begin(), hops.end(), kNone);
    hops[origin] = 0;
    std::deque<NodeId> queue{origin};
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      if (!network.can_pass_through(u, origin)) continue;
      for (LinkId e : network.out_links(u)) {
        const NodeId v = network.link(e).head;
        if (hops[v] == kNone) {
          hops[v] = hops[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (const auto& dest : demands.destinations_of(i)) {
      if (hops[dest.node] == kNone) throw UnreachableDemand(origin, dest.node);
      diameter = std::max(diameter, hops[dest.node]);
    }
  }
  return diameter;
}

}  // namespace traffic_eq
