#pragma once

#include "traffic_eq/frank_wolfe.hpp"
#include "traffic_eq/solver_types.hpp"
#include "traffic_eq/ugm.hpp"
#include "traffic_eq/umst.hpp"
#include "traffic_eq/wda.hpp"

namespace traffic_eq {

/// Dispatches on `config.method`.
inline SolveResult solve(const EquilibriumProblem& problem, const SolverConfig& config) {
  switch (config.method) {
    case Method::ugm: return solve_ugm(problem, config);
    case Method::umst: return solve_umst(problem, config);
    case Method::wda: return solve_wda(problem, config, false);
    case Method::wda_composite: return solve_wda(problem, config, true);
    case Method::frank_wolfe: return solve_fw(problem, config);
  }
  throw ValidationError("unknown method");
}

}  // namespace traffic_eq
