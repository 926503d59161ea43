#pragma once

#include "traffic_eq/detail/session.hpp"
#include "traffic_eq/detail/ugm_core.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/solver_types.hpp"

namespace traffic_eq {

/// Universal gradient method on the dual. The primal estimate averages the
/// oracle flows f(t^k) with weights 1/L_{k+1}; the dual estimate averages the
/// iterates t^{k+1} with the same weights. Certifying the averaged pair costs
/// one extra oracle call per iteration.
inline SolveResult solve_ugm(const EquilibriumProblem& problem, const SolverConfig& config) {
  return detail::run_session(problem, config, [&](detail::Session& session) {
    const double eps = session.epsilon();
    const double m = lipschitz_M(problem.network(), problem.demands());
    detail::UgmState state(problem.free_times(), session.at_free_times(),
                           detail::initial_lipschitz(config.initial_lipschitz, m, eps, 1.0));
    auto call = [&](const LinkTimes& t) { return session.call(t); };
    for (std::size_t k = 1;; ++k) {
      detail::ugm_step(problem, state, eps, call);
      const LinkTimes t_hat =
          detail::mean_times(state.time_sum, state.weight, problem.free_times());
      const double phi_hat = session.call(t_hat).phi;
      if (session.certify(k, state.inner, state.lipschitz, state.weight, t_hat, phi_hat,
                          detail::mean_flows(state.flow_sum, state.weight)))
        return true;
    }
  });
}

}  // namespace traffic_eq
