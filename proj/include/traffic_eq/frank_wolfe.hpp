#pragma once

#include "traffic_eq/detail/session.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/solver_types.hpp"

namespace traffic_eq {

/// Frank-Wolfe with the 2/(k+2) step on the Beckmann potential. Each iteration
/// makes one oracle call at t = tau(f^k), which yields both the all-or-nothing
/// direction and Phi(t) for the gap certificate at (tau(f^k), f^k).
inline SolveResult solve_fw(const EquilibriumProblem& problem, const SolverConfig& config) {
  if (problem.kind() != ModelKind::beckmann)
    throw ModelMismatch("Frank-Wolfe does not apply to the stable dynamics model");
  SolverConfig tagged = config;
  tagged.method = Method::frank_wolfe;
  return detail::run_session(problem, tagged, [&](detail::Session& session) {
    LinkFlows f = session.at_free_times().flows;
    for (std::size_t k = 0;; ++k) {
      const LinkTimes t = problem.bpr_times(f);
      const OracleResult aon = session.call(t);
      const double gamma = 2.0 / (static_cast<double>(k) + 2.0);
      if (session.certify(k + 1, k + 1, gamma, 0.0, t, aon.phi, f)) return true;
      for (std::size_t e = 0; e < f.size(); ++e)
        f[e] = (1.0 - gamma) * f[e] + gamma * aon.flows[e];
    }
  });
}

}  // namespace traffic_eq
