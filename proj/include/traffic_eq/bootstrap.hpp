#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "traffic_eq/detail/ugm_core.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/solver_types.hpp"

namespace traffic_eq {
namespace detail {

/// Line-search slack for bootstrap runs: the free-flow total travel cost.
/// A coarse slack keeps the steps long, so the averaged flow leaves the
/// all-or-nothing start within the stage budget.
inline double bootstrap_epsilon(double phi_at_free_times) {
  return std::max(std::abs(phi_at_free_times), 1e-12);
}

/// Runs UGM on the SD problem with capacities (1 - 2^-j) * capacity for
/// j = 1, 2, ... and accepts the averaged flow of stage j once it lies within
/// (1 - 2^-(j+1)) * capacity on every link.
template <class Call>
Anchor find_anchor(const EquilibriumProblem& problem, const BootstrapConfig& config,
                   const OracleResult& at_free_times, double eps, Call&& call) {
  const LinkFlows& capacity = problem.capacities();
  Anchor anchor;
  if (problem.demands().empty()) {
    anchor.flows = LinkFlows(capacity.size(), 0.0);
    anchor.xi = 1.0;
    return anchor;
  }
  const double m = lipschitz_M(problem.network(), problem.demands());
  for (std::size_t stage = 1; stage <= config.max_stages; ++stage) {
    const double shrink = 1.0 - std::ldexp(1.0, -static_cast<int>(stage));
    const double accept = 1.0 - std::ldexp(1.0, -static_cast<int>(stage) - 1);
    LinkFlows reduced(capacity.size());
    for (std::size_t e = 0; e < reduced.size(); ++e) reduced[e] = shrink * capacity[e];
    const EquilibriumProblem staged = problem.with_capacities(std::move(reduced));

    UgmState state(staged.free_times(), at_free_times, initial_lipschitz(std::nullopt, m, eps, 1.0));
    for (std::size_t k = 0; k < config.stage_budget; ++k) ugm_step(staged, state, eps, call);

    const LinkFlows g = mean_flows(state.flow_sum, state.weight);
    double ratio = 0.0;
    bool ok = true;
    for (std::size_t e = 0; e < g.size(); ++e) {
      ratio = std::max(ratio, g[e] / capacity[e]);
      if (g[e] > accept * capacity[e]) ok = false;
    }
    anchor.stages = stage;
    if (ok) {
      anchor.flows = g;
      anchor.xi = 1.0 - ratio;
      return anchor;
    }
  }
  throw AnchorSearchFailed("no strictly feasible flow found after " +
                           std::to_string(config.max_stages) +
                           " bootstrap stages; demand likely exceeds network capacity");
}

}  // namespace detail

/// Finds a strictly capacity-feasible flow for the stable dynamics model by
/// solving it approximately with progressively larger fractions of the
/// capacities.
inline Anchor bootstrap_anchor(const EquilibriumProblem& problem, const SolverConfig& config) {
  if (problem.kind() != ModelKind::stable_dynamics)
    throw ModelMismatch("anchor bootstrap applies to the stable dynamics model only");
  std::size_t calls = 0;
  auto call = [&](const LinkTimes& t) {
    if (calls >= config.max_oracle_calls)
      throw AnchorSearchFailed("oracle budget exhausted during bootstrap");
    ++calls;
    return problem.flows_at(t);
  };
  const OracleResult start = call(problem.free_times());
  Anchor anchor = detail::find_anchor(problem, config.bootstrap, start,
                                      detail::bootstrap_epsilon(start.phi), call);
  anchor.oracle_calls = calls;
  return anchor;
}

}  // namespace traffic_eq
