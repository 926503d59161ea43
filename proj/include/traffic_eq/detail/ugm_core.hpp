#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "traffic_eq/link_vector.hpp"
#include "traffic_eq/model.hpp"

namespace traffic_eq::detail {

/// Thrown by a budgeted oracle when the call budget is used up.
struct OutOfBudget {};

/// L_0 used when the caller does not give one: M^2 / (1024 eps), at least 1,
/// never above cap_factor * M^2 / eps.
inline double initial_lipschitz(std::optional<double> requested, double m, double eps,
                                double cap_factor) {
  const double cap = cap_factor * m * m / eps;
  const double wanted = requested ? *requested : std::max(1.0, m * m / (eps * 1024.0));
  return cap > 0.0 ? std::min(wanted, cap) : wanted;
}

inline std::vector<double> negated(const LinkFlows& f) {
  std::vector<double> g(f.size());
  for (std::size_t e = 0; e < f.size(); ++e) g[e] = -f[e];
  return g;
}

/// Weighted mean of link times, kept on the feasible side of t_free.
inline LinkTimes mean_times(const std::vector<double>& sum, double weight,
                            const LinkTimes& free_times) {
  LinkTimes t(sum.size());
  for (std::size_t e = 0; e < sum.size(); ++e) t[e] = std::max(free_times[e], sum[e] / weight);
  return t;
}

inline LinkFlows mean_flows(const std::vector<double>& sum, double weight) {
  LinkFlows f(sum.size());
  for (std::size_t e = 0; e < sum.size(); ++e) f[e] = sum[e] / weight;
  return f;
}

/// Universal gradient method on the composite dual, with the running sums
/// behind the averaged primal and dual estimates:
///   flow_sum = sum_k f(t^k) / L_{k+1},  time_sum = sum_k t^{k+1} / L_{k+1},
///   weight = S_N = sum_k 1 / L_{k+1}.
struct UgmState {
  LinkTimes t;
  OracleResult at_t;
  double lipschitz = 1.0;
  std::vector<double> flow_sum;
  std::vector<double> time_sum;
  double weight = 0.0;
  std::size_t inner = 0;

  UgmState(const LinkTimes& start, OracleResult at_start, double l0)
      : t(start),
        at_t(std::move(at_start)),
        lipschitz(l0),
        flow_sum(start.size(), 0.0),
        time_sum(start.size(), 0.0) {}
};

/// One outer UGM iteration: halve L, then double it until the inexact
/// descent test holds. `call` evaluates the oracle.
template <class Call>
void ugm_step(const EquilibriumProblem& problem, UgmState& s, double eps, Call&& call) {
  const std::vector<double> gradient = negated(s.at_t.flows);
  double lipschitz = s.lipschitz / 2.0;
  while (true) {
    ++s.inner;
    LinkTimes next = problem.prox(gradient, 1.0, s.t, lipschitz);
    OracleResult at_next = call(next);
    double linear = 0.0;
    double dist2 = 0.0;
    for (std::size_t e = 0; e < next.size(); ++e) {
      const double d = next[e] - s.t[e];
      linear += gradient[e] * d;
      dist2 += d * d;
    }
    if (at_next.phi <= s.at_t.phi + linear + 0.5 * lipschitz * dist2 + 0.5 * eps) {
      const double w = 1.0 / lipschitz;
      vec::axpy(w, s.at_t.flows.span(), s.flow_sum);
      vec::axpy(w, next.span(), s.time_sum);
      s.weight += w;
      s.t = std::move(next);
      s.at_t = std::move(at_next);
      s.lipschitz = lipschitz;
      return;
    }
    lipschitz *= 2.0;
  }
}

}  // namespace traffic_eq::detail
