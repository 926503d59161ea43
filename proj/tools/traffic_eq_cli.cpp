// traffic_eq: solve traffic equilibria from TNTP files.
//
//   traffic_eq solve --net net.tntp --trips trips.tntp --model sd --capacity-scale 2.5
//                    --method umst --eps-rel 1e-3 --out results

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "traffic_eq/results_io.hpp"
#include "traffic_eq/tntp.hpp"
#include "traffic_eq/traffic_eq.hpp"

namespace fs = std::filesystem;
using namespace traffic_eq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitInput = 2;

struct RunConfig {
  std::string net_path;
  std::string trips_path;
  std::string model = "beckmann";
  std::vector<std::string> methods{"umst"};
  std::optional<double> eps;
  std::optional<double> eps_rel;
  double capacity_scale = 1.0;
  std::optional<double> l0;
  double chi = 1.0;
  std::size_t max_oracle_calls = 100000;
  std::size_t bootstrap_stage_budget = 100;
  std::size_t bootstrap_max_stages = 8;
  std::string out_dir = "results";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;  // reserved, the solvers are deterministic
  std::optional<double> min_free_flow_time;
  bool use_file_bpr = false;
  bool allow_total_mismatch = false;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(std::string("cannot open ") + what + " file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

Json config_echo(const RunConfig& c) {
  Json j;
  j["net"] = c.net_path;
  j["trips"] = c.trips_path;
  j["model"] = c.model;
  j["methods"] = c.methods;
  if (c.eps) j["eps"] = *c.eps;
  if (c.eps_rel) j["eps_rel"] = *c.eps_rel;
  j["capacity_scale"] = c.capacity_scale;
  j["L0"] = c.l0 ? Json(*c.l0) : Json(nullptr);
  j["chi"] = c.chi;
  j["max_oracle_calls"] = c.max_oracle_calls;
  j["bootstrap_stage_budget"] = c.bootstrap_stage_budget;
  j["bootstrap_max_stages"] = c.bootstrap_max_stages;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  j["min_free_flow_time"] = c.min_free_flow_time ? Json(*c.min_free_flow_time) : Json(nullptr);
  j["use_file_bpr"] = c.use_file_bpr;
  j["allow_total_mismatch"] = c.allow_total_mismatch;
  return j;
}

/// Oracle calls at the first trace record whose relative gap is within `target`.
std::optional<std::size_t> calls_to_reach(const SolverTrace& trace, double target) {
  for (const TraceRecord& r : trace.records)
    if (r.relative_gap <= target) return r.oracle_calls;
  return std::nullopt;
}

int run(const RunConfig& c) {
  const std::string net_text = read_file(c.net_path, "network");
  const std::string trips_text = read_file(c.trips_path, "trips");

  const TntpNetworkFile net_file = parse_network_file(net_text);
  const Network network = to_network(net_file, NetworkOptions{c.min_free_flow_time});
  const TntpTripsFile trips_file = parse_trips_file(trips_text);
  TripsOptions trips_options;
  if (c.allow_total_mismatch) {
    trips_options.on_mismatch = TotalCheck::ignore;
    const double dev = total_deviation(trips_file);
    if (dev > trips_options.total_tolerance)
      std::cerr << "warning: trip entries differ from <TOTAL OD FLOW> by " << dev << " (relative)\n";
  }
  const Demands demands = to_demands(trips_file, trips_options);
  demands.check_against(network);

  ModelSpec spec;
  if (c.model == "sd") {
    spec.kind = ModelKind::stable_dynamics;
  } else if (c.model == "beckmann") {
    spec.kind = ModelKind::beckmann;
    if (c.use_file_bpr) spec.bpr = file_bpr(net_file);
  } else {
    throw InputError("unknown model '" + c.model + "' (expected sd or beckmann)");
  }
  spec.capacity_scale = c.capacity_scale;

  std::vector<Method> methods;
  for (const std::string& name : c.methods) {
    const auto m = parse_method(name);
    if (!m) throw InputError("unknown method '" + name + "'");
    methods.push_back(*m);
  }

  SolverConfig base;
  if (c.eps && c.eps_rel) throw InputError("give only one of --eps and --eps-rel");
  if (c.eps)
    base.epsilon = *c.eps;
  else
    base.epsilon_relative = c.eps_rel.value_or(1e-3);
  base.initial_lipschitz = c.l0;
  base.chi = c.chi;
  base.max_oracle_calls = c.max_oracle_calls;
  base.bootstrap = {c.bootstrap_stage_budget, c.bootstrap_max_stages};
  base.validate();
  for (Method m : methods)
    if (m == Method::frank_wolfe && spec.kind == ModelKind::stable_dynamics)
      throw ModelMismatch("fw does not apply to the stable dynamics model");

  const EquilibriumProblem problem(network, demands, spec, c.threads);

  fs::create_directories(c.out_dir);
  const fs::path out(c.out_dir);
  const Json echo = config_echo(c);
  write_file(out / "config.json", echo.dump(2) + "\n");

  const std::vector<double> targets{1e-1, 1e-2, 1e-3, 1e-4};
  std::string comparison = "method,converged,oracle_calls,gap";
  for (double t : targets) comparison += ",calls_to_" + detail::format_double(t);
  comparison += '\n';

  bool all_converged = true;
  for (Method m : methods) {
    SolverConfig config = base;
    config.method = m;
    const auto start = std::chrono::steady_clock::now();
    const SolveResult result = solve(problem, config);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string name = to_string(m);

    Json method_config = echo;
    method_config["solver"] = to_json(config);
    method_config["problem"] = to_json(spec);
    write_file(out / (name + "_flows.csv"), write_results_csv(result, problem));
    write_file(out / (name + "_result.json"), write_results_json(result, method_config));
    write_file(out / (name + "_trace.csv"), write_trace_csv(result.trace));

    comparison += name + ',' + (result.converged ? "1" : "0") + ',' +
                  std::to_string(result.oracle_calls) + ',' +
                  detail::format_double(result.certificate.gap);
    for (double t : targets) {
      const auto calls = calls_to_reach(result.trace, t);
      comparison += ',' + (calls ? std::to_string(*calls) : std::string());
    }
    comparison += '\n';

    std::cerr << name << ": " << (result.converged ? "converged" : "NOT converged")
              << ", gap " << result.certificate.gap << " (eps " << result.epsilon << "), "
              << result.oracle_calls << " oracle calls, " << seconds << " s\n";
    all_converged = all_converged && result.converged;
  }
  write_file(out / "comparison.csv", comparison);
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic equilibria in the Beckmann and stable dynamics models"};
  app.require_subcommand(1);
  RunConfig c;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one model with one or more methods");
  solve_cmd->add_option("--net", c.net_path, "TNTP network file")->required();
  solve_cmd->add_option("--trips", c.trips_path, "TNTP trips file")->required();
  solve_cmd->add_option("--model", c.model, "sd or beckmann")->check(CLI::IsMember({"sd", "beckmann"}));
  solve_cmd->add_option("--method", c.methods, "fw, ugm, umst, wda, wda-composite (comma separated)")
      ->delimiter(',');
  solve_cmd->add_option("--eps", c.eps, "absolute duality gap target");
  solve_cmd->add_option("--eps-rel", c.eps_rel, "gap target relative to the initial gap (default 1e-3)");
  solve_cmd->add_option("--capacity-scale", c.capacity_scale, "multiplies every capacity");
  solve_cmd->add_option("--L0", c.l0, "initial Lipschitz estimate for ugm and umst");
  solve_cmd->add_option("--chi", c.chi, "wda scale parameter");
  solve_cmd->add_option("--max-oracle-calls", c.max_oracle_calls, "oracle call budget per method");
  solve_cmd->add_option("--bootstrap-stage-budget", c.bootstrap_stage_budget,
                        "iterations per bootstrap stage (sd)");
  solve_cmd->add_option("--bootstrap-max-stages", c.bootstrap_max_stages, "bootstrap stages (sd)");
  solve_cmd->add_option("--out", c.out_dir, "output directory");
  solve_cmd->add_option("--threads", c.threads, "oracle threads")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--seed", c.seed, "reserved; results do not depend on it");
  solve_cmd->add_option("--min-free-flow-time", c.min_free_flow_time,
                        "clamp free-flow times up to this value instead of rejecting zeros");
  solve_cmd->add_flag("--use-file-bpr", c.use_file_bpr, "take BPR b and power from the net file");
  solve_cmd->add_flag("--allow-total-mismatch", c.allow_total_mismatch,
                      "warn instead of failing when trips do not sum to the declared total");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    return run(c);
  } catch (const InputError& e) {
    std::cerr << "error: input: " << e.what() << '\n';
  } catch (const ParseError& e) {
    std::cerr << "error: parse: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << e.what() << '\n';
  } catch (const UnreachableDemand& e) {
    std::cerr << "error: unreachable demand: " << e.what() << '\n';
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitInput;
}
