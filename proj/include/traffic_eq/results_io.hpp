#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "traffic_eq/detail/text.hpp"
#include "traffic_eq/errors.hpp"
#include "traffic_eq/model.hpp"
#include "traffic_eq/solver_types.hpp"

namespace traffic_eq {

using Json = nlohmann::ordered_json;

namespace detail {

/// JSON number, or null for values JSON cannot hold.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

/// One row per link: link_id,tail,head,flow,time,capacity,saturation.
/// Capacities are the scaled ones the problem was solved with.
inline std::string write_results_csv(const SolveResult& result, const EquilibriumProblem& problem) {
  using detail::format_double;
  std::string out = "link_id,tail,head,flow,time,capacity,saturation\n";
  const Network& network = problem.network();
  for (std::size_t e = 0; e < problem.link_count(); ++e) {
    const Link& l = network.link(static_cast<LinkId>(e));
    const double flow = e < result.flows.size() ? result.flows[e] : 0.0;
    const double time = e < result.times.size() ? result.times[e] : problem.free_times()[e];
    const double cap = problem.capacities()[e];
    out += std::to_string(e) + ',' + std::to_string(l.tail) + ',' + std::to_string(l.head) + ',' +
           format_double(flow) + ',' + format_double(time) + ',' + format_double(cap) + ',' +
           format_double(flow / cap) + '\n';
  }
  return out;
}

inline Json to_json(const ModelSpec& spec) {
  Json j;
  j["model"] = to_string(spec.kind);
  j["capacity_scale"] = spec.capacity_scale;
  if (spec.kind == ModelKind::beckmann) j["bpr"] = {{"rho", spec.bpr.rho}, {"mu", spec.bpr.mu}};
  return j;
}

inline Json to_json(const SolverConfig& config) {
  Json j;
  j["method"] = to_string(config.method);
  if (config.epsilon_relative)
    j["epsilon_relative"] = *config.epsilon_relative;
  else
    j["epsilon"] = config.epsilon;
  j["initial_lipschitz"] = config.initial_lipschitz ? Json(*config.initial_lipschitz) : Json(nullptr);
  j["chi"] = config.chi;
  j["max_oracle_calls"] = config.max_oracle_calls;
  j["bootstrap"] = {{"stage_budget", config.bootstrap.stage_budget},
                    {"max_stages", config.bootstrap.max_stages}};
  return j;
}

inline Json to_json(const GapCertificate& c) {
  return Json{{"q", detail::number(c.q_value)},
              {"psi", detail::number(c.psi_value)},
              {"gap", detail::number(c.gap)},
              {"feasible_primal", c.feasible_primal}};
}

/// Trace without wall-clock times, so identical runs give identical JSON.
inline Json to_json(const SolverTrace& trace) {
  Json records = Json::array();
  for (const TraceRecord& r : trace.records)
    records.push_back({{"iteration", r.iteration},
                       {"inner_iteration", r.inner_iteration},
                       {"oracle_calls", r.oracle_calls},
                       {"q", detail::number(r.q_value)},
                       {"psi", detail::number(r.psi_value)},
                       {"gap", detail::number(r.gap)},
                       {"relative_gap", detail::number(r.relative_gap)},
                       {"step", detail::number(r.step_parameter)}});
  return Json{{"method", trace.method},
              {"initial_gap", detail::number(trace.initial_gap)},
              {"epsilon", detail::number(trace.epsilon)},
              {"records", std::move(records)}};
}

/// Result document: summary, certificate, link vectors, `config` as given and the trace.
inline Json results_json(const SolveResult& result, const Json& config) {
  Json j;
  j["method"] = result.trace.method;
  j["converged"] = result.converged;
  j["oracle_calls"] = result.oracle_calls;
  j["iterations"] = result.iterations;
  j["epsilon"] = detail::number(result.epsilon);
  j["bootstrap"] = {{"stages", result.bootstrap_stages},
                    {"oracle_calls", result.bootstrap_oracle_calls}};
  j["certificate"] = to_json(result.certificate);
  j["flows"] = result.flows.values();
  j["times"] = result.times.values();
  j["config"] = config;
  j["trace"] = to_json(result.trace);
  return j;
}

inline std::string write_results_json(const SolveResult& result, const Json& config) {
  return results_json(result, config).dump(2) + "\n";
}

inline constexpr std::string_view kTraceHeader =
    "iteration,inner_iteration,oracle_calls,q,psi,gap,relative_gap,step,elapsed_seconds";

inline std::string write_trace_csv(const SolverTrace& trace) {
  using detail::format_double;
  std::string out(kTraceHeader);
  out += '\n';
  for (const TraceRecord& r : trace.records)
    out += std::to_string(r.iteration) + ',' + std::to_string(r.inner_iteration) + ',' +
           std::to_string(r.oracle_calls) + ',' + format_double(r.q_value) + ',' +
           format_double(r.psi_value) + ',' + format_double(r.gap) + ',' +
           format_double(r.relative_gap) + ',' + format_double(r.step_parameter) + ',' +
           format_double(r.elapsed_seconds) + '\n';
  return out;
}

inline std::vector<TraceRecord> parse_trace_csv(std::string_view text) {
  const auto rows = detail::lines(text);
  if (rows.empty() || detail::trim(rows.front()) != kTraceHeader)
    throw ParseError(1, "unexpected trace header");
  std::vector<TraceRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (detail::trim(rows[i]).empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = rows[i].find(',', start);
      cells.push_back(rows[i].substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 9) throw ParseError(i + 1, "expected 9 trace columns");
    auto count = [&](std::size_t k) {
      const auto v = detail::parse_integer(cells[k]);
      if (!v || *v < 0) throw ParseError(i + 1, "bad count");
      return static_cast<std::size_t>(*v);
    };
    auto real = [&](std::size_t k) {
      const auto v = detail::parse_double(cells[k]);
      if (!v) throw ParseError(i + 1, "bad number");
      return *v;
    };
    out.push_back({count(0), count(1), count(2), real(3), real(4), real(5), real(6), real(7),
                   real(8)});
  }
  return out;
}

}  // namespace traffic_eq
