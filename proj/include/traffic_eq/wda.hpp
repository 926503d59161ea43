#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "traffic_eq/detail/session.hpp"
#include "traffic_eq/detail/ugm_core.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/solver_types.hpp"

namespace traffic_eq {

/// Method of weighted dual averages.
///
/// Non-composite: the subgradient includes grad h and the step is a plain
/// projection onto t >= t_free. Composite: only grad Phi enters the average
/// and h is kept in the subproblem with weight sum_i 1/|g^i|.
///
/// The primal estimate is the average of f(t^k) weighted by 1/|g^k|, and the
/// dual estimate the matching average of t^k.
inline SolveResult solve_wda(const EquilibriumProblem& problem, const SolverConfig& config,
                             bool composite) {
  SolverConfig tagged = config;
  tagged.method = composite ? Method::wda_composite : Method::wda;
  return detail::run_session(problem, tagged, [&](detail::Session& session) {
    const LinkTimes& t0 = problem.free_times();
    const std::size_t n = problem.link_count();
    std::vector<double> s(n, 0.0);
    std::vector<double> flow_sum(n, 0.0);
    std::vector<double> time_sum(n, 0.0);
    double weight = 0.0;
    double beta_hat = 1.0;          // beta_hat_k
    double beta_recip_sum = 0.0;    // sum_{i<=k} 1/beta_hat_i
    LinkTimes t = t0;
    OracleResult at_t = session.at_free_times();

    for (std::size_t k = 0;; ++k) {
      if (k > 0) at_t = session.call(t);
      std::vector<double> g = detail::negated(at_t.flows);
      if (!composite) {
        const std::vector<double> gh = problem.h_gradient(t);
        for (std::size_t e = 0; e < n; ++e) g[e] += gh[e];
      }
      const double norm = vec::norm2(g);
      if (norm == 0.0) {
        // zero subgradient: t is a dual minimizer
        return session.certify(k + 1, k + 1, 0.0, weight, t, at_t.phi, at_t.flows);
      }
      const double w = 1.0 / norm;
      vec::axpy(w, g, s);
      vec::axpy(w, at_t.flows.span(), flow_sum);
      vec::axpy(w, t.span(), time_sum);
      weight += w;

      beta_recip_sum += 1.0 / beta_hat;
      beta_hat = beta_recip_sum;
      const double beta = beta_hat / config.chi;

      LinkTimes next(n);
      if (composite) {
        next = problem.prox(s, weight, t0, beta);
      } else {
        for (std::size_t e = 0; e < n; ++e) next[e] = std::max(t0[e], t0[e] - s[e] / beta);
      }

      const LinkTimes t_hat = detail::mean_times(time_sum, weight, t0);
      const double phi_hat = session.call(t_hat).phi;
      if (session.certify(k + 1, k + 1, beta, weight, t_hat, phi_hat,
                          detail::mean_flows(flow_sum, weight)))
        return true;
      t = std::move(next);
    }
  });
}

/// beta_hat_0, ..., beta_hat_{count-1} of the WDA step rule:
/// beta_hat_0 = 1, beta_hat_{k+1} = sum_{i<=k} 1/beta_hat_i.
inline std::vector<double> wda_beta_sequence(std::size_t count) {
  std::vector<double> out;
  double beta_hat = 1.0;
  double recip_sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(beta_hat);
    recip_sum += 1.0 / beta_hat;
    beta_hat = recip_sum;
  }
  return out;
}

}  // namespace traffic_eq
