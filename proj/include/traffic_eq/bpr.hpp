#pragma once

#include <cmath>
#include <string>

#include "traffic_eq/errors.hpp"
#include "traffic_eq/network.hpp"

namespace traffic_eq {

/// BPR cost shape tau(f) = t_free * (1 + rho * (f / capacity)^(1/mu)).
struct BprParams {
  double rho = 0.15;
  double mu = 0.25;

  void validate() const {
    if (!(rho > 0.0)) throw ValidationError("BPR rho must be positive");
    if (!(mu > 0.0 && mu <= 1.0)) throw ValidationError("BPR mu must lie in (0, 1]");
  }
};

inline double link_time(double free_flow_time, double capacity, double flow,
                        const BprParams& bpr) {
  return free_flow_time * (1.0 + bpr.rho * std::pow(flow / capacity, 1.0 / bpr.mu));
}

inline double link_time(const Link& link, double flow, const BprParams& bpr) {
  return link_time(link.free_flow_time, link.capacity, flow, bpr);
}

/// Integral of the BPR cost from 0 to `flow`.
inline double sigma(double free_flow_time, double capacity, double flow, const BprParams& bpr) {
  const double ratio = bpr.rho * bpr.mu / (1.0 + bpr.mu);
  return free_flow_time * flow * (1.0 + ratio * std::pow(flow / capacity, 1.0 / bpr.mu));
}

inline double sigma(const Link& link, double flow, const BprParams& bpr) {
  return sigma(link.free_flow_time, link.capacity, flow, bpr);
}

/// Convex conjugate of `sigma` over f >= 0; finite only for time >= free_flow_time.
inline double sigma_conj(double free_flow_time, double capacity, double time,
                         const BprParams& bpr) {
  if (!(time >= free_flow_time))
    throw DomainError("link time " + std::to_string(time) + " below free-flow time " +
                      std::to_string(free_flow_time));
  const double excess = time - free_flow_time;
  return capacity * std::pow(excess / (free_flow_time * bpr.rho), bpr.mu) * excess /
         (1.0 + bpr.mu);
}

inline double sigma_conj(const Link& link, double time, const BprParams& bpr) {
  return sigma_conj(link.free_flow_time, link.capacity, time, bpr);
}

/// d sigma_conj / d time, i.e. the flow whose BPR time equals `time`.
/// Zero at time == free_flow_time (one-sided limit).
inline double sigma_conj_derivative(double free_flow_time, double capacity, double time,
                                    const BprParams& bpr) {
  if (!(time >= free_flow_time))
    throw DomainError("link time " + std::to_string(time) + " below free-flow time " +
                      std::to_string(free_flow_time));
  const double excess = time - free_flow_time;
  if (excess == 0.0) return 0.0;
  return capacity * std::pow(excess / (free_flow_time * bpr.rho), bpr.mu);
}

inline double sigma_conj_derivative(const Link& link, double time, const BprParams& bpr) {
  return sigma_conj_derivative(link.free_flow_time, link.capacity, time, bpr);
}

}  // namespace traffic_eq
