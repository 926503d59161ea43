#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "traffic_eq/bpr.hpp"
#include "traffic_eq/errors.hpp"
#include "traffic_eq/flow_oracle.hpp"
#include "traffic_eq/network.hpp"

namespace traffic_eq {

enum class ModelKind { beckmann, stable_dynamics };

inline std::string to_string(ModelKind kind) {
  return kind == ModelKind::beckmann ? "beckmann" : "sd";
}

struct ModelSpec {
  ModelKind kind = ModelKind::beckmann;
  BprParams bpr{};              // Beckmann only
  double capacity_scale = 1.0;  // multiplies every link capacity

  void validate() const {
    if (!(capacity_scale > 0.0) || !std::isfinite(capacity_scale))
      throw ValidationError("capacity scale must be positive");
    if (kind == ModelKind::beckmann) bpr.validate();
  }
};

/// Relative slack allowed on capacity constraints.
inline constexpr double kCapacityTolerance = 1e-12;

struct PrimalValue {
  double value = 0.0;
  bool feasible = true;
};

/// Q, Psi and the duality gap Q + Psi for a primal-dual pair.
struct GapCertificate {
  double q_value = 0.0;
  double psi_value = 0.0;
  double gap = 0.0;
  bool feasible_primal = true;
};

/// A network, its demands and a model, with capacities already scaled.
///
/// The dual objective is Q(t) = Phi(t) + h(t) over t >= t_free where
/// Phi(t) = -sum_w d_w T_w(t) comes from the flow oracle and h is
///   SD:       <t - t_free, capacity>
///   Beckmann: sum_e sigma_conj_e(t_e).
class EquilibriumProblem {
 public:
  EquilibriumProblem(const Network& network, const Demands& demands, ModelSpec spec,
                     unsigned threads = 1)
      : network_(&network),
        spec_(spec),
        free_times_(network.free_flow_times()),
        capacities_(network.capacities()),
        oracle_(network, demands, threads) {
    spec_.validate();
    for (double& c : capacities_) c *= spec_.capacity_scale;
  }

  /// Same problem with explicit (already scaled) capacities.
  EquilibriumProblem with_capacities(LinkFlows capacities) const {
    EquilibriumProblem copy = *this;
    if (capacities.size() != capacities_.size()) throw ValidationError("capacity size mismatch");
    copy.capacities_ = std::move(capacities);
    return copy;
  }

  const Network& network() const noexcept { return *network_; }
  const Demands& demands() const noexcept { return oracle_.demands(); }
  const ModelSpec& spec() const noexcept { return spec_; }
  ModelKind kind() const noexcept { return spec_.kind; }
  const BprParams& bpr() const noexcept { return spec_.bpr; }
  const LinkTimes& free_times() const noexcept { return free_times_; }
  const LinkFlows& capacities() const noexcept { return capacities_; }
  std::size_t link_count() const noexcept { return free_times_.size(); }
  const FlowOracle& oracle() const noexcept { return oracle_; }

  OracleResult flows_at(const LinkTimes& t) const { return oracle_(t); }

  void require_dual_feasible(const LinkTimes& t) const {
    if (t.size() != link_count()) throw ValidationError("times size mismatch");
    for (std::size_t e = 0; e < t.size(); ++e)
      if (!(t[e] >= free_times_[e]) || !std::isfinite(t[e]))
        throw DomainError("link " + std::to_string(e) + ": time below free-flow time");
  }

  double h(const LinkTimes& t) const {
    double s = 0.0;
    for (std::size_t e = 0; e < t.size(); ++e) {
      if (kind() == ModelKind::stable_dynamics)
        s += (t[e] - free_times_[e]) * capacities_[e];
      else
        s += sigma_conj(free_times_[e], capacities_[e], t[e], bpr());
    }
    return s;
  }

  std::vector<double> h_gradient(const LinkTimes& t) const {
    std::vector<double> g(t.size());
    for (std::size_t e = 0; e < t.size(); ++e)
      g[e] = kind() == ModelKind::stable_dynamics
                 ? capacities_[e]
                 : sigma_conj_derivative(free_times_[e], capacities_[e], t[e], bpr());
    return g;
  }

  /// Beckmann link times tau(f).
  LinkTimes bpr_times(const LinkFlows& f) const {
    LinkTimes t(f.size());
    for (std::size_t e = 0; e < f.size(); ++e)
      t[e] = link_time(free_times_[e], capacities_[e], f[e], bpr());
    return t;
  }

  PrimalValue primal(const LinkFlows& f) const {
    PrimalValue out;
    for (std::size_t e = 0; e < f.size(); ++e) {
      if (kind() == ModelKind::stable_dynamics) {
        out.value += f[e] * free_times_[e];
        if (f[e] > capacities_[e] * (1.0 + kCapacityTolerance)) out.feasible = false;
      } else {
        out.value += sigma(free_times_[e], capacities_[e], f[e], bpr());
      }
    }
    return out;
  }

  /// Q(t) given Phi(t) from the oracle.
  double dual(const LinkTimes& t, double phi) const { return phi + h(t); }

  /// Exact minimizer over t >= t_free of
  ///   <linear, t> + weight * h(t) + stiffness/2 * |t - center|^2,
  /// solved coordinate-wise.
  LinkTimes prox(std::span<const double> linear, double weight, const LinkTimes& center,
                 double stiffness) const {
    LinkTimes t(center.size());
    for (std::size_t e = 0; e < t.size(); ++e)
      t[e] = prox_coordinate(e, linear[e], weight, center[e], stiffness);
    return t;
  }

 private:
  double prox_coordinate(std::size_t e, double linear, double weight, double center,
                         double stiffness) const {
    const double t0 = free_times_[e];
    if (kind() == ModelKind::stable_dynamics)
      return std::max(t0, center - (linear + weight * capacities_[e]) / stiffness);

    // Stationarity F(s) = linear + weight*h'(t0 + s) + stiffness*(t0 + s - center),
    // increasing and concave in s = t - t0 >= 0.
    const double scale = t0 * bpr().rho;
    const double mu = bpr().mu;
    const double cap = weight * capacities_[e];
    auto F = [&](double s) {
      return linear + cap * std::pow(s / scale, mu) + stiffness * (t0 + s - center);
    };
    const double upper = center - t0 - linear / stiffness;
    if (!(upper > 0.0)) return t0;  // F(0) >= 0
    if (cap == 0.0 || mu == 1.0) {
      // F is affine
      const double s = (center - t0 - linear / stiffness) / (1.0 + cap / (stiffness * scale));
      return t0 + std::max(0.0, s);
    }
    double lo = 0.0;
    double hi = upper;
    double s = hi;
    for (int iter = 0; iter < 200; ++iter) {
      const double value = F(s);
      if (value == 0.0) break;
      if (value > 0.0)
        hi = s;
      else
        lo = s;
      const double slope = cap * mu * std::pow(s / scale, mu - 1.0) / scale + stiffness;
      double next = s - value / slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - s) <= 1e-15 * s || hi - lo <= 1e-15 * hi) {
        s = next;
        break;
      }
      s = next;
    }
    return t0 + s;
  }

  const Network* network_;
  ModelSpec spec_;
  LinkTimes free_times_;
  LinkFlows capacities_;
  FlowOracle oracle_;
};

inline PrimalValue primal_value(const EquilibriumProblem& problem, const LinkFlows& f) {
  if (f.size() != problem.link_count()) throw ValidationError("flows size mismatch");
  return problem.primal(f);
}

inline double dual_value(const EquilibriumProblem& problem, const LinkTimes& t, double phi) {
  problem.require_dual_feasible(t);
  return problem.dual(t, phi);
}

namespace detail {

/// Throws InfeasiblePrimal unless f is nonnegative and conserves the demand at
/// every node (the flow could then be decomposed over origin-destination paths).
inline void check_routes_demand(const EquilibriumProblem& problem, const LinkFlows& f) {
  const Network& network = problem.network();
  const double tol = 1e-9 * std::max(1.0, problem.demands().total());
  std::vector<double> balance(network.node_count(), 0.0);
  for (const OdDemand& w : problem.demands().entries()) {
    balance[w.origin] += w.rate;
    balance[w.destination] -= w.rate;
  }
  for (std::size_t e = 0; e < f.size(); ++e) {
    if (!(f[e] >= -tol)) throw InfeasiblePrimal("negative flow on link " + std::to_string(e));
    balance[network.link(static_cast<LinkId>(e)).tail] -= f[e];
    balance[network.link(static_cast<LinkId>(e)).head] += f[e];
  }
  for (std::size_t v = 0; v < balance.size(); ++v)
    if (std::abs(balance[v]) > tol)
      throw InfeasiblePrimal("flow does not route the demand at node " + std::to_string(v));
}

}  // namespace detail

/// Duality gap with a precomputed Phi(t).
inline GapCertificate duality_gap(const EquilibriumProblem& problem, const LinkTimes& t,
                                  const LinkFlows& f, double phi) {
  problem.require_dual_feasible(t);
  if (f.size() != problem.link_count()) throw ValidationError("flows size mismatch");
  detail::check_routes_demand(problem, f);
  const PrimalValue psi = problem.primal(f);
  if (!psi.feasible) throw InfeasiblePrimal("flow exceeds link capacity");
  GapCertificate c;
  c.q_value = problem.dual(t, phi);
  c.psi_value = psi.value;
  c.gap = c.q_value + c.psi_value;
  c.feasible_primal = true;
  return c;
}

/// Duality gap Q(t) + Psi(f); costs one oracle call.
inline GapCertificate duality_gap(const EquilibriumProblem& problem, const LinkTimes& t,
                                  const LinkFlows& f) {
  problem.require_dual_feasible(t);
  return duality_gap(problem, t, f, problem.flows_at(t).phi);
}

/// Bound on the variation of the oracle's flows: sqrt(2 H) * total demand.
inline double lipschitz_M(const Network& network, const Demands& demands) {
  if (demands.empty()) return 0.0;
  const auto hops = static_cast<double>(hop_diameter(network, demands));
  return std::sqrt(2.0 * hops) * demands.total();
}

/// Pulls a feasible flow f inside the capacities by mixing it with a strictly
/// capacity-feasible anchor g.
inline LinkFlows project_admissible(const LinkFlows& f, const LinkFlows& g,
                                    const LinkFlows& capacities) {
  if (f.size() != capacities.size() || g.size() != capacities.size())
    throw ValidationError("flows size mismatch");
  double g_ratio = 0.0;
  double f_ratio = 0.0;
  for (std::size_t e = 0; e < capacities.size(); ++e) {
    g_ratio = std::max(g_ratio, g[e] / capacities[e]);
    f_ratio = std::max(f_ratio, f[e] / capacities[e]);
  }
  const double xi = 1.0 - g_ratio;
  if (!(xi > 0.0)) throw AnchorNotStrictlyFeasible("anchor flow reaches a link capacity");
  const double eta = f_ratio - 1.0;
  if (eta <= 0.0) return f;
  LinkFlows out(f.size());
  for (std::size_t e = 0; e < f.size(); ++e)
    out[e] = std::min(capacities[e], (xi * f[e] + eta * g[e]) / (xi + eta));
  return out;
}

/// Prox step of the composite dual: argmin over t >= t_free of
/// <gradient, t - center> + h(t) + L/2 |t - center|^2.
inline LinkTimes prox_step(const EquilibriumProblem& problem, std::span<const double> gradient,
                           const LinkTimes& center, double lipschitz) {
  if (!(lipschitz > 0.0)) throw ValidationError("prox step needs L > 0");
  return problem.prox(gradient, 1.0, center, lipschitz);
}

}  // namespace traffic_eq
