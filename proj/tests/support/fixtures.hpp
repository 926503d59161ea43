#pragma once

#include <vector>

#include "traffic_eq/network.hpp"

namespace traffic_eq::testing {

/// Two parallel routes from node 0 to node 1:
/// link 0 (upper) t_free = 0.5 h, capacity 2000; link 1 (lower) t_free = 1 h, capacity 3000.
inline Network two_route_network() {
  return Network(2, {{0, 1, 0.5, 2000.0}, {0, 1, 1.0, 3000.0}});
}

inline Demands single_demand(double rate) { return Demands({{0, 1, rate}}); }

/// 4-node path 0 -> 1 -> 2 -> 3 with unit times.
inline Network line_network() {
  return Network(4, {{0, 1, 1.0, 1000.0}, {1, 2, 1.0, 1000.0}, {2, 3, 1.0, 1000.0}});
}

/// rows x cols grid with links in both directions between neighbours.
/// Free-flow times and capacities vary deterministically per link.
inline Network grid_network(std::size_t rows, std::size_t cols) {
  std::vector<Link> links;
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
  std::size_t k = 0;
  auto add = [&](NodeId a, NodeId b) {
    const double time = 0.1 + 0.05 * static_cast<double>((k * 7) % 5);
    const double capacity = 1000.0 + 500.0 * static_cast<double>((k * 3) % 4);
    links.push_back({a, b, time, capacity});
    links.push_back({b, a, time, capacity});
    ++k;
  };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) add(id(r, c), id(r, c + 1));
      if (r + 1 < rows) add(id(r, c), id(r + 1, c));
    }
  return Network(rows * cols, std::move(links));
}

/// Eight OD pairs across a 4x4 grid.
inline Demands grid_demands() {
  return Demands({{0, 15, 1500.0},
                  {15, 0, 1200.0},
                  {3, 12, 1400.0},
                  {12, 3, 1000.0},
                  {1, 14, 900.0},
                  {4, 11, 1100.0},
                  {8, 7, 800.0},
                  {2, 13, 1000.0}});
}

}  // namespace traffic_eq::testing
