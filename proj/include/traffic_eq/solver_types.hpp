#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traffic_eq/errors.hpp"
#include "traffic_eq/link_vector.hpp"
#include "traffic_eq/model.hpp"

namespace traffic_eq {

enum class Method { ugm, umst, wda, wda_composite, frank_wolfe };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::ugm: return "ugm";
    case Method::umst: return "umst";
    case Method::wda: return "wda";
    case Method::wda_composite: return "wda-composite";
    case Method::frank_wolfe: return "fw";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::ugm, Method::umst, Method::wda, Method::wda_composite,
                   Method::frank_wolfe})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

struct BootstrapConfig {
  std::size_t stage_budget = 100;  // UGM iterations per stage
  std::size_t max_stages = 8;
};

/// Snapshot handed to an observer after every certified iteration.
struct IterationView {
  std::size_t iteration;
  std::size_t oracle_calls;
  double epsilon;
  double step_parameter;  // L_k (UGM/UMST), beta_k (WDA), gamma_k (FW)
  double weight_sum;      // S_N (UGM), A_N (UMST), sum of 1/|g| (WDA), 0 (FW)
  const LinkTimes& times;        // dual estimate
  const LinkFlows& mean_flows;   // primal estimate before projection
  const LinkFlows& flows;        // certified primal flow (projected for SD)
  const GapCertificate& certificate;
};

using IterationObserver = std::function<void(const IterationView&)>;

struct SolverConfig {
  Method method = Method::umst;
  double epsilon = 0.0;                     // absolute gap target; 0 = use epsilon_relative
  std::optional<double> epsilon_relative;   // fraction of the initial gap
  std::optional<double> initial_lipschitz;  // L_0 for UGM / UMST
  double chi = 1.0;                         // WDA scale
  std::size_t max_oracle_calls = 100000;
  BootstrapConfig bootstrap{};
  std::optional<LinkFlows> anchor;  // strictly admissible SD flow; found by bootstrap if unset
  IterationObserver observer;

  void validate() const {
    const bool has_abs = epsilon > 0.0;
    const bool has_rel = epsilon_relative.has_value();
    if (has_abs == has_rel)
      throw ValidationError("exactly one of epsilon and epsilon_relative must be set");
    if (has_rel && !(*epsilon_relative > 0.0))
      throw ValidationError("relative epsilon must be positive");
    if (initial_lipschitz && !(*initial_lipschitz > 0.0))
      throw ValidationError("L0 must be positive");
    if (!(chi > 0.0)) throw ValidationError("chi must be positive");
    if (max_oracle_calls == 0) throw ValidationError("oracle budget must be positive");
    if (bootstrap.stage_budget == 0 || bootstrap.max_stages == 0)
      throw ValidationError("bootstrap budgets must be positive");
  }
};

struct TraceRecord {
  std::size_t iteration = 0;
  std::size_t inner_iteration = 0;  // cumulative line-search iterations
  std::size_t oracle_calls = 0;
  double q_value = 0.0;
  double psi_value = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  double step_parameter = 0.0;
  double elapsed_seconds = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SolverTrace {
  std::string method;
  double initial_gap = 0.0;
  double epsilon = 0.0;
  std::vector<TraceRecord> records;

  friend bool operator==(const SolverTrace&, const SolverTrace&) = default;
};

struct SolveResult {
  LinkFlows flows;  // admissible for SD
  LinkTimes times;
  GapCertificate certificate;
  SolverTrace trace;
  bool converged = false;
  std::size_t oracle_calls = 0;
  std::size_t iterations = 0;
  double epsilon = 0.0;
  std::size_t bootstrap_stages = 0;
  std::size_t bootstrap_oracle_calls = 0;
};

/// Strictly capacity-feasible SD flow used by the admissible projection.
struct Anchor {
  LinkFlows flows;
  double xi = 1.0;  // 1 - max_e g_e / capacity_e
  std::size_t stages = 0;
  std::size_t oracle_calls = 0;
};

}  // namespace traffic_eq
