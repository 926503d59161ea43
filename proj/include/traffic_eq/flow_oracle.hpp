#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <utility>
#include <vector>

#include "traffic_eq/network.hpp"

namespace traffic_eq {

/// Output of one flow reconstruction: the all-or-nothing flows on shortest
/// paths (minus a subgradient of Phi at t) and Phi(t) = -sum_w d_w T_w(t).
struct OracleResult {
  LinkFlows flows;
  double phi = 0.0;
};

/// Shortest-path flow reconstruction over all origins.
///
/// Origins may be processed by several worker threads. Each origin yields a
/// sparse list of tree-link loads and these are summed in origin order, so the
/// result is bitwise identical for any thread count.
class FlowOracle {
 public:
  FlowOracle(const Network& network, const Demands& demands, unsigned threads = 1)
      : network_(&network), demands_(&demands), threads_(std::max(1u, threads)) {
    demands.check_against(network);
    targets_.resize(demands.origins().size());
    for (std::size_t i = 0; i < targets_.size(); ++i)
      for (const auto& dest : demands.destinations_of(i)) targets_[i].push_back(dest.node);
  }

  const Network& network() const noexcept { return *network_; }
  const Demands& demands() const noexcept { return *demands_; }
  unsigned threads() const noexcept { return threads_; }

  OracleResult operator()(const LinkTimes& times) const {
    if (times.size() != network_->link_count()) throw ValidationError("times size mismatch");
    const std::size_t origin_count = demands_->origins().size();
    thread_local std::vector<OriginLoad> buffer;
    std::vector<OriginLoad>& loads = buffer;  // workers must see the caller's buffer
    loads.resize(origin_count);

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(threads_, origin_count));
    if (workers <= 1) {
      for (std::size_t i = 0; i < origin_count; ++i) load_origin(times, i, loads[i]);
    } else {
      std::atomic<std::size_t> next{0};
      auto work = [&] {
        for (std::size_t i = next++; i < origin_count; i = next++) load_origin(times, i, loads[i]);
      };
      std::vector<std::jthread> pool;
      pool.reserve(workers - 1);
      for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
      work();
    }

    OracleResult result{LinkFlows(network_->link_count()), 0.0};
    for (std::size_t i = 0; i < origin_count; ++i) {
      if (loads[i].unreachable) throw UnreachableDemand(demands_->origins()[i], loads[i].missing);
      for (const auto& [e, amount] : loads[i].links) result.flows[e] += amount;
      result.phi -= loads[i].cost;
    }
    return result;
  }

 private:
  struct OriginLoad {
    std::vector<std::pair<LinkId, double>> links;
    double cost = 0.0;  // sum_d d_w T_w(t) for this origin
    bool unreachable = false;
    NodeId missing = 0;
  };

  void load_origin(const LinkTimes& times, std::size_t i, OriginLoad& load) const {
    load.links.clear();
    load.cost = 0.0;
    load.unreachable = false;
    const NodeId origin = demands_->origins()[i];
    thread_local ShortestPathTree tree;
    thread_local detail::DijkstraScratch scratch;
    thread_local std::vector<double> outflow;
    const std::vector<NodeId>& settled =
        detail::dijkstra(*network_, times.span(), origin, tree, targets_[i], scratch);

    outflow.assign(network_->node_count(), 0.0);
    for (const auto& dest : demands_->destinations_of(i)) {
      if (tree.dist[dest.node] == kUnreachable) {
        load.unreachable = true;
        load.missing = dest.node;
        return;
      }
      outflow[dest.node] = dest.rate;
      load.cost += dest.rate * tree.dist[dest.node];
    }
    // A destination can be unsettled only if the heap ran dry first, which
    // leaves its distance infinite; so all destinations are in `settled`.
    for (auto it = settled.rbegin(); it != settled.rend(); ++it) {
      const NodeId v = *it;
      if (v == origin || outflow[v] == 0.0) continue;
      const LinkId e = *tree.parent_link[v];
      load.links.emplace_back(e, outflow[v]);
      outflow[tree.parent[v]] += outflow[v];
    }
  }

  const Network* network_;
  const Demands* demands_;
  unsigned threads_;
  std::vector<std::vector<NodeId>> targets_;
};

/// One-shot flow reconstruction at `times`.
inline OracleResult reconstruct_flows(const Network& network, const LinkTimes& times,
                                      const Demands& demands, unsigned threads = 1) {
  return FlowOracle(network, demands, threads)(times);
}

}  // namespace traffic_eq
