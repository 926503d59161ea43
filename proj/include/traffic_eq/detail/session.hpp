#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "traffic_eq/bootstrap.hpp"
#include "traffic_eq/detail/ugm_core.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/solver_types.hpp"

namespace traffic_eq::detail {

/// Bookkeeping shared by every method: the budgeted oracle, the initial gap
/// and epsilon, the SD anchor, certificates, the trace and the best pair.
class Session {
 public:
  Session(const EquilibriumProblem& problem, const SolverConfig& config)
      : problem_(problem), config_(config), clock_start_(std::chrono::steady_clock::now()) {
    config.validate();
    trace_.method = to_string(config.method);
  }

  const EquilibriumProblem& problem() const noexcept { return problem_; }
  const SolverConfig& config() const noexcept { return config_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t calls() const noexcept { return calls_; }
  const OracleResult& at_free_times() const { return *at_free_times_; }

  OracleResult call(const LinkTimes& t) {
    if (calls_ >= config_.max_oracle_calls) throw OutOfBudget{};
    ++calls_;
    return problem_.flows_at(t);
  }

  /// Evaluates the oracle at t_free, finds the SD anchor if one is needed and
  /// fixes epsilon. Returns true when the starting point already satisfies
  /// the stopping rule.
  bool start() {
    const LinkTimes& t0 = problem_.free_times();
    at_free_times_ = call(t0);
    const OracleResult& r = *at_free_times_;
    LinkFlows f0 = r.flows;
    if (problem_.kind() == ModelKind::stable_dynamics && !problem_.primal(f0).feasible) {
      obtain_anchor();
      f0 = project_admissible(f0, anchor_->flows, problem_.capacities());
    }
    GapCertificate c = certificate(t0, r.phi, f0);
    trace_.initial_gap = c.gap;
    epsilon_ = config_.epsilon > 0.0 ? config_.epsilon : *config_.epsilon_relative * c.gap;
    trace_.epsilon = epsilon_;
    const double scale = std::abs(c.q_value) + std::abs(c.psi_value);
    const bool done = problem_.demands().empty() || c.gap <= epsilon_ || c.gap <= 1e-12 * scale;
    record(0, 0, 0.0, 0.0, t0, r.flows, f0, c, /*force_store=*/true);
    return done;
  }

  /// The gap at (t, f) given Phi(t); SD flows must already be admissible.
  GapCertificate certificate(const LinkTimes& t, double phi, const LinkFlows& f) const {
    GapCertificate c;
    c.q_value = problem_.dual(t, phi);
    const PrimalValue psi = problem_.primal(f);
    c.psi_value = psi.value;
    c.feasible_primal = psi.feasible;
    c.gap = c.feasible_primal ? c.q_value + c.psi_value : std::numeric_limits<double>::infinity();
    return c;
  }

  /// Projects SD flows onto the capacities; Beckmann flows pass through.
  LinkFlows admissible(const LinkFlows& f) {
    if (problem_.kind() != ModelKind::stable_dynamics) return f;
    if (problem_.primal(f).feasible) return f;
    obtain_anchor();
    return project_admissible(f, anchor_->flows, problem_.capacities());
  }

  /// Certifies (t, mean_flows), appends a trace record and notifies the
  /// observer. Returns true when the gap reaches epsilon.
  bool certify(std::size_t iteration, std::size_t inner, double step, double weight,
               const LinkTimes& t, double phi, const LinkFlows& mean) {
    const LinkFlows f = admissible(mean);
    const GapCertificate c = certificate(t, phi, f);
    return record(iteration, inner, step, weight, t, mean, f, c, false);
  }

  SolveResult finish(bool converged) {
    SolveResult result;
    result.converged = converged;
    if (!have_best_) {
      // ran out of budget before a certified pair existed
      best_.gap = std::numeric_limits<double>::infinity();
      best_.feasible_primal = false;
      best_times_ = problem_.free_times();
      best_flows_ = at_free_times_ ? at_free_times_->flows : LinkFlows(problem_.link_count());
    }
    result.flows = best_flows_;
    result.times = best_times_;
    result.certificate = best_;
    result.trace = std::move(trace_);
    result.oracle_calls = calls_;
    result.iterations = iterations_;
    result.epsilon = epsilon_;
    if (anchor_) {
      result.bootstrap_stages = anchor_->stages;
      result.bootstrap_oracle_calls = anchor_->oracle_calls;
    }
    return result;
  }

 private:
  void obtain_anchor() {
    if (anchor_) return;
    if (config_.anchor) {
      const LinkFlows& g = *config_.anchor;
      double ratio = 0.0;
      for (std::size_t e = 0; e < g.size(); ++e)
        ratio = std::max(ratio, g[e] / problem_.capacities()[e]);
      anchor_ = Anchor{g, 1.0 - ratio, 0, 0};
      if (!(anchor_->xi > 0.0))
        throw AnchorNotStrictlyFeasible("supplied anchor reaches a link capacity");
      return;
    }
    const std::size_t before = calls_;
    auto budgeted = [this](const LinkTimes& t) { return call(t); };
    Anchor a = find_anchor(problem_, config_.bootstrap, *at_free_times_,
                           bootstrap_epsilon(at_free_times_->phi), budgeted);
    a.oracle_calls = calls_ - before;
    anchor_ = std::move(a);
  }

  bool record(std::size_t iteration, std::size_t inner, double step, double weight,
              const LinkTimes& t, const LinkFlows& mean, const LinkFlows& f,
              const GapCertificate& c, bool force_store) {
    iterations_ = iteration;
    TraceRecord rec;
    rec.iteration = iteration;
    rec.inner_iteration = inner;
    rec.oracle_calls = calls_;
    rec.q_value = c.q_value;
    rec.psi_value = c.psi_value;
    rec.gap = c.gap;
    rec.relative_gap = trace_.initial_gap > 0.0 ? c.gap / trace_.initial_gap : 0.0;
    rec.step_parameter = step;
    rec.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start_).count();
    trace_.records.push_back(rec);
    if (force_store || c.gap < best_.gap || !have_best_) {
      best_ = c;
      best_flows_ = f;
      best_times_ = t;
      have_best_ = true;
    }
    if (config_.observer)
      config_.observer(IterationView{iteration, calls_, epsilon_, step, weight, t, mean, f, c});
    return c.gap <= epsilon_;
  }

  const EquilibriumProblem& problem_;
  const SolverConfig& config_;
  std::chrono::steady_clock::time_point clock_start_;
  std::size_t calls_ = 0;
  std::size_t iterations_ = 0;
  double epsilon_ = 0.0;
  std::optional<OracleResult> at_free_times_;
  std::optional<Anchor> anchor_;
  SolverTrace trace_;
  GapCertificate best_{};
  LinkFlows best_flows_;
  LinkTimes best_times_;
  bool have_best_ = false;
};

/// Runs `body` inside a session, turning budget exhaustion into a
/// non-converged result that carries the best certificate seen.
template <class Body>
SolveResult run_session(const EquilibriumProblem& problem, const SolverConfig& config,
                        Body&& body) {
  Session session(problem, config);
  try {
    if (session.start()) return session.finish(true);
    return session.finish(body(session));
  } catch (const OutOfBudget&) {
    return session.finish(false);
  }
}

}  // namespace traffic_eq::detail
