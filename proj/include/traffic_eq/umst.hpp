#pragma once

#include <cmath>
#include <vector>

#include "traffic_eq/detail/session.hpp"
#include "traffic_eq/detail/ugm_core.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/solver_types.hpp"

namespace traffic_eq {

/// Universal method of similar triangles on the dual.
///
/// Keeps three sequences: the extrapolation point y, the model minimizer u and
/// the iterate t. Each line-search trial evaluates the oracle at y (flows and
/// Phi) and at the candidate t (Phi for the descent test), so one inner
/// iteration costs two oracle calls. The certificate pairs t^N with
/// f_hat = (1/A_N) sum_k alpha_k f(y^k) and reuses Phi(t^N).
inline SolveResult solve_umst(const EquilibriumProblem& problem, const SolverConfig& config) {
  return detail::run_session(problem, config, [&](detail::Session& session) {
    const double eps = session.epsilon();
    const double m = lipschitz_M(problem.network(), problem.demands());
    const LinkTimes& t0 = problem.free_times();
    const std::size_t n = problem.link_count();

    double lipschitz = detail::initial_lipschitz(config.initial_lipschitz, m, eps, 4.0);
    double a_sum = 0.0;  // A_k
    LinkTimes t = t0;
    LinkTimes u = t0;
    std::vector<double> gradient_sum(n, 0.0);  // sum_k alpha_k grad Phi(y^k)
    std::vector<double> flow_sum(n, 0.0);      // sum_k alpha_k f(y^k)
    std::size_t inner = 0;

    auto mix = [&](const LinkTimes& first, double w_first, const LinkTimes& second,
                   double w_second, double total) {
      LinkTimes out(n);
      for (std::size_t e = 0; e < n; ++e)
        out[e] = std::max(t0[e], (w_first * first[e] + w_second * second[e]) / total);
      return out;
    };

    for (std::size_t k = 1;; ++k) {
      double trial_l = lipschitz / 2.0;
      while (true) {
        ++inner;
        const double alpha =
            1.0 / (2.0 * trial_l) + std::sqrt(1.0 / (4.0 * trial_l * trial_l) + a_sum / trial_l);
        const double a_next = a_sum + alpha;
        const LinkTimes y = mix(u, alpha, t, a_sum, a_next);
        OracleResult at_y = session.call(y);

        std::vector<double> trial_gradient_sum = gradient_sum;
        vec::axpy(-alpha, at_y.flows.span(), trial_gradient_sum);
        LinkTimes u_next = problem.prox(trial_gradient_sum, a_next, t0, 1.0);
        LinkTimes t_next = mix(u_next, alpha, t, a_sum, a_next);
        const double phi_next = session.call(t_next).phi;

        double linear = 0.0;
        double dist2 = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
          const double d = t_next[e] - y[e];
          linear -= at_y.flows[e] * d;
          dist2 += d * d;
        }
        if (phi_next <= at_y.phi + linear + 0.5 * trial_l * dist2 + alpha / (2.0 * a_next) * eps) {
          vec::axpy(alpha, at_y.flows.span(), flow_sum);
          gradient_sum = std::move(trial_gradient_sum);
          a_sum = a_next;
          u = std::move(u_next);
          t = std::move(t_next);
          lipschitz = trial_l;
          if (session.certify(k, inner, lipschitz, a_sum, t, phi_next,
                              detail::mean_flows(flow_sum, a_sum)))
            return true;
          break;
        }
        trial_l *= 2.0;
      }
    }
  });
}

}  // namespace traffic_eq
