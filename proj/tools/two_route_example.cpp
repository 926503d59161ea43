// Two parallel routes, 3000 veh/h: Beckmann and stable dynamics equilibria.

#include <cstdio>

#include "traffic_eq/traffic_eq.hpp"

using namespace traffic_eq;

int main() {
  const Network network(2, {{0, 1, 0.5, 2000.0}, {0, 1, 1.0, 3000.0}});
  const Demands demands({{0, 1, 3000.0}});

  for (ModelKind kind : {ModelKind::beckmann, ModelKind::stable_dynamics}) {
    const EquilibriumProblem problem(network, demands, ModelSpec{kind});
    SolverConfig config;
    config.method = Method::umst;
    config.epsilon_relative = 1e-6;
    const SolveResult r = solve(problem, config);
    std::printf("%-8s flows (%.1f, %.1f)  times (%.4f, %.4f)  gap %.3g  %zu oracle calls\n",
                to_string(kind).c_str(), r.flows[0], r.flows[1], r.times[0], r.times[1],
                r.certificate.gap, r.oracle_calls);
  }
}
