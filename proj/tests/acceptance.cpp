// Acceptance checks. Prints one PASS / FAIL / SKIP line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/brute_force.hpp"
#include "support/fixtures.hpp"
#include "traffic_eq/tntp.hpp"
#include "traffic_eq/traffic_eq.hpp"

using namespace traffic_eq;
namespace tt = traffic_eq::testing;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
  Outcome outcome = Outcome::pass;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    outcome = Outcome::fail;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

SolverConfig config_for(Method m, double eps_rel, std::size_t budget = 100000) {
  SolverConfig c;
  c.method = m;
  c.epsilon_relative = eps_rel;
  c.max_oracle_calls = budget;
  return c;
}

constexpr Method kAllMethods[] = {Method::frank_wolfe, Method::ugm, Method::umst, Method::wda,
                                  Method::wda_composite};
constexpr Method kDualMethods[] = {Method::ugm, Method::umst, Method::wda, Method::wda_composite};

double route_time(const LinkTimes& t) { return std::min(t[0], t[1]); }

// ---------------------------------------------------------------------------

Verdict two_route_beckmann() {
  Verdict v;
  const Network net = tt::two_route_network();
  const double expected[] = {0.5 * (1.0 + 0.15 * std::pow(0.5, 4.0)), 0.5 * 1.15,
                             0.5 * (1.0 + 0.15 * std::pow(1.5, 4.0))};
  const double demand[] = {1000.0, 2000.0, 3000.0};
  double slowest = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Demands dem = tt::single_demand(demand[i]);
    const EquilibriumProblem p(net, dem, ModelSpec{ModelKind::beckmann});
    for (Method m : kAllMethods) {
      SolverConfig c = config_for(m, 1e-6);
      if (m == Method::wda) c.chi = 0.1;
      if (m == Method::wda_composite) c.chi = 100.0;
      const Stopwatch clock;
      const SolveResult r = solve(p, c);
      const double sec = clock.seconds();
      slowest = std::max(slowest, sec);
      const std::string tag = fmt("d=%g %s", demand[i], to_string(m).c_str());
      v.require(r.converged, tag + " did not converge");
      // the equilibrium time on route A is tau_A(f_A)
      const double t_a = link_time(net.link(0), r.flows[0], p.spec().bpr);
      v.require(std::abs(t_a - expected[i]) < 1e-3, tag + fmt(" time %.6f", t_a));
      v.require(std::abs(r.flows[1]) < 1e-3 * demand[i], tag + fmt(" route B flow %.4g", r.flows[1]));
      v.require(sec < 1.0, tag + fmt(" took %.2fs", sec));
    }
  }
  if (v.outcome == Outcome::pass)
    v.detail = fmt("15 solves, times %.5f/%.4f/%.4f h, slowest %.3fs", expected[0], expected[1],
                   expected[2], slowest);
  return v;
}

Verdict two_route_sd() {
  Verdict v;
  const Network net = tt::two_route_network();
  const Stopwatch clock;
  struct Case {
    double demand;
    double flow_a, flow_b;
  };
  std::string summary;
  for (const Case& k : {Case{3000.0, 2000.0, 1000.0}, Case{1000.0, 1000.0, 0.0},
                        Case{2000.0, 2000.0, 0.0}}) {
    const Demands dem = tt::single_demand(k.demand);
    const EquilibriumProblem p(net, dem, ModelSpec{ModelKind::stable_dynamics});
    const SolveResult r = solve(p, config_for(Method::umst, 1e-6));
    const std::string tag = fmt("d=%g", k.demand);
    v.require(r.converged, tag + " did not converge");
    const double tol = 1e-3 * k.demand;
    v.require(std::abs(r.flows[0] - k.flow_a) <= tol && std::abs(r.flows[1] - k.flow_b) <= tol,
              tag + fmt(" flows (%.3f, %.3f)", r.flows[0], r.flows[1]));
    const double t = route_time(r.times);
    if (k.demand == 3000.0) v.require(std::abs(t - 1.0) <= 1e-3, tag + fmt(" time %.6f", t));
    if (k.demand == 1000.0) v.require(std::abs(t - 0.5) <= 1e-3, tag + fmt(" time %.6f", t));
    if (k.demand == 2000.0) {
      v.require(t >= 0.5 && t <= 1.0, tag + fmt(" time %.6f", t));
      v.require(r.certificate.gap <= r.epsilon, tag + " gap above epsilon");
    }
    summary += fmt("%s(%.1f,%.1f)@%.4f ", tag.c_str(), r.flows[0], r.flows[1], t);
  }
  const double sec = clock.seconds();
  v.require(sec < 2.0, fmt("took %.2fs", sec));
  if (v.outcome == Outcome::pass) v.detail = summary + fmt("in %.3fs", sec);
  return v;
}

// ---------------------------------------------------------------------------

/// Beckmann equilibrium by path enumeration: repeatedly shifts flow from the
/// most to the least expensive used path of each OD pair, solving the 1-D
/// equalisation by bisection.
LinkFlows path_equilibrium(const Network& net, const Demands& dem, const BprParams& bpr) {
  struct Od {
    std::vector<tt::Path> paths;
    std::vector<double> flow;
  };
  std::vector<Od> ods;
  LinkFlows f(net.link_count());
  for (const OdDemand& w : dem.entries()) {
    Od od{tt::simple_paths(net, w.origin, w.destination), {}};
    od.flow.assign(od.paths.size(), 0.0);
    od.flow[0] = w.rate;
    for (LinkId e : od.paths[0]) f[e] += w.rate;
    ods.push_back(std::move(od));
  }
  auto cost = [&](const tt::Path& path, const LinkFlows& flows) {
    double c = 0.0;
    for (LinkId e : path) c += link_time(net.link(e), flows[e], bpr);
    return c;
  };
  auto shifted = [&](const tt::Path& from, const tt::Path& to, double amount) {
    LinkFlows g = f;
    for (LinkId e : from) g[e] -= amount;
    for (LinkId e : to) g[e] += amount;
    return g;
  };
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double worst = 0.0;
    for (Od& od : ods) {
      std::size_t cheap = 0, dear = 0;
      double c_min = INFINITY, c_max = -INFINITY;
      for (std::size_t k = 0; k < od.paths.size(); ++k) {
        const double c = cost(od.paths[k], f);
        if (c < c_min) c_min = c, cheap = k;
        if (od.flow[k] > 0.0 && c > c_max) c_max = c, dear = k;
      }
      worst = std::max(worst, (c_max - c_min) / c_min);
      if (cheap == dear || c_max - c_min <= 1e-14 * c_min) continue;
      auto excess = [&](double amount) {
        const LinkFlows g = shifted(od.paths[dear], od.paths[cheap], amount);
        return cost(od.paths[dear], g) - cost(od.paths[cheap], g);
      };
      double lo = 0.0, hi = od.flow[dear];
      if (excess(hi) >= 0.0) {
        lo = hi;
      } else {
        for (int it = 0; it < 200 && hi - lo > 1e-15 * od.flow[dear]; ++it) {
          const double mid = 0.5 * (lo + hi);
          (excess(mid) > 0.0 ? lo : hi) = mid;
        }
      }
      f = shifted(od.paths[dear], od.paths[cheap], lo);
      od.flow[dear] -= lo;
      od.flow[cheap] += lo;
      if (od.flow[dear] < 1e-12 * lo) od.flow[dear] = 0.0;
    }
    if (worst < 1e-12) break;
  }
  for (double& x : f) x = std::max(0.0, x);
  return f;
}

Verdict oracle_equivalence() {
  Verdict v;
  const Stopwatch clock;
  std::mt19937 rng(20240611u);
  double worst = 0.0;
  double worst_fw = 0.0;
  int split = 0;
  const int instances = 25;
  auto relative_error = [](const LinkFlows& reference, const LinkFlows& f) {
    double scale = 0.0, diff = 0.0;
    for (std::size_t e = 0; e < reference.size(); ++e) {
      scale = std::max(scale, std::abs(reference[e]));
      diff = std::max(diff, std::abs(reference[e] - f[e]));
    }
    return diff / scale;
  };
  for (int i = 0; i < instances; ++i) {
    const Network net = tt::random_small_network(rng, 5);
    const Demands dem = tt::random_demands(rng, net.node_count(), 3);
    const EquilibriumProblem p(net, dem, ModelSpec{ModelKind::beckmann});
    const LinkFlows reference = path_equilibrium(net, dem, p.spec().bpr);
    const SolveResult r = solve(p, config_for(Method::umst, 1e-6));
    const double rel = relative_error(reference, r.flows);
    worst = std::max(worst, rel);
    v.require(r.converged, fmt("instance %d: umst stopped at relative gap %.2g", i,
                               r.certificate.gap / r.trace.initial_gap));
    v.require(rel <= 1e-3, fmt("instance %d: relative error %.3g", i, rel));

    // cross-check of the reference itself
    const SolveResult fw = solve(p, config_for(Method::frank_wolfe, 1e-9, 1000000));
    worst_fw = std::max(worst_fw, relative_error(reference, fw.flows));
    if (fw.oracle_calls > 2) ++split;
  }
  const double sec = clock.seconds();
  v.require(sec < 30.0, fmt("took %.1fs", sec));
  const std::string summary =
      fmt("%d instances, %d with split routes, umst worst relative error %.2g, "
          "fw at 1e-9 worst %.2g, %.1fs",
          instances, split, worst, worst_fw, sec);
  v.detail = v.outcome == Outcome::pass ? summary : v.detail + " [" + summary + "]";
  return v;
}

// ---------------------------------------------------------------------------

double positive_excess_norm(const LinkFlows& f, const LinkFlows& capacity) {
  double s = 0.0;
  for (std::size_t e = 0; e < f.size(); ++e) {
    const double x = std::max(0.0, f[e] - capacity[e]);
    s += x * x;
  }
  return std::sqrt(s);
}

double distance(const LinkTimes& a, const LinkTimes& b) {
  double s = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) s += (a[e] - b[e]) * (a[e] - b[e]);
  return std::sqrt(s);
}

struct BoundStats {
  std::size_t iterations = 0;
  std::size_t violations = 0;
  std::string first;

  void check(bool ok, const std::string& what) {
    ++iterations;
    if (ok) return;
    if (violations++ == 0) first = what;
  }
};

Verdict certified_bounds() {
  Verdict v;
  const Stopwatch clock;
  const Network two = tt::two_route_network();
  const Network grid = tt::grid_network(4, 4);
  const Demands two_dem = tt::single_demand(3000.0);
  const Demands grid_dem = tt::grid_demands();
  BoundStats gap_sign, beckmann_bound, excess_bound, lipschitz, weight;

  struct Instance {
    const Network* net;
    const Demands* dem;
    ModelKind kind;
    double capacity_scale;
    std::size_t budget;
    const char* name;
  };
  const Instance instances[] = {
      {&two, &two_dem, ModelKind::beckmann, 1.0, 100000, "two-route beckmann"},
      {&grid, &grid_dem, ModelKind::beckmann, 1.0, 100000, "grid beckmann"},
      {&two, &two_dem, ModelKind::stable_dynamics, 1.0, 20000, "two-route sd"},
      {&grid, &grid_dem, ModelKind::stable_dynamics, 2.0, 20000, "grid sd"},
  };

  for (const Instance& in : instances) {
    ModelSpec spec{in.kind};
    spec.capacity_scale = in.capacity_scale;
    const EquilibriumProblem p(*in.net, *in.dem, spec);
    const double m = lipschitz_M(*in.net, *in.dem);
    for (Method method : kAllMethods) {
      if (method == Method::frank_wolfe && in.kind != ModelKind::beckmann) continue;
      SolverConfig c = config_for(method, 1e-3, in.budget);
      struct Seen {
        std::size_t iteration;
        double violation;
        double weight;
        double eps;
      };
      std::vector<Seen> seen;
      const std::string tag = fmt("%s %s", in.name, to_string(method).c_str());
      c.observer = [&](const IterationView& view) {
        const GapCertificate& cert = view.certificate;
        const double scale = std::max(1.0, std::abs(cert.q_value) + std::abs(cert.psi_value));
        gap_sign.check(cert.gap >= -1e-9 * scale,
                       tag + fmt(" gap %.3g at iteration %zu", cert.gap, view.iteration));
        if (view.iteration == 0) return;
        if (in.kind == ModelKind::beckmann && method == Method::ugm) {
          double dist2 = 0.0;
          for (std::size_t e = 0; e < view.mean_flows.size(); ++e) {
            const double d = link_time(p.free_times()[e], p.capacities()[e], view.mean_flows[e],
                                       spec.bpr) - p.free_times()[e];
            dist2 += d * d;
          }
          const double bound = dist2 / view.weight_sum + view.epsilon / 2.0;
          beckmann_bound.check(cert.gap <= bound + 1e-9 * scale,
                               tag + fmt(" gap %.4g above %.4g", cert.gap, bound));
        }
        if (in.kind == ModelKind::stable_dynamics &&
            (method == Method::ugm || method == Method::umst))
          seen.push_back({view.iteration, positive_excess_norm(view.mean_flows, p.capacities()),
                          view.weight_sum, view.epsilon});
        if (method == Method::ugm)
          lipschitz.check(view.step_parameter <= m * m / view.epsilon,
                          tag + fmt(" L=%.4g above M^2/eps=%.4g", view.step_parameter,
                                    m * m / view.epsilon));
        if (method == Method::umst) {
          const double floor = view.epsilon * static_cast<double>(view.iteration) / (2.0 * m * m);
          weight.check(view.weight_sum >= floor,
                       tag + fmt(" A_N=%.4g below %.4g", view.weight_sum, floor));
        }
      };
      const SolveResult r = solve(p, c);
      // distance to a solution, estimated after the fact from the final dual point
      const double r_hat = distance(r.times, p.free_times());
      for (const Seen& s : seen) {
        const double bound = 4.0 * r_hat / s.weight + std::sqrt(2.0 * s.eps / s.weight);
        excess_bound.check(s.violation <= bound * (1.0 + 1e-9),
                       tag + fmt(" excess %.4g above %.4g at iteration %zu", s.violation, bound,
                                 s.iteration));
      }
    }
  }
  const double sec = clock.seconds();
  auto report = [&](const BoundStats& s, const char* name) {
    v.require(s.violations == 0,
              fmt("%s: %zu of %zu iterations violate, first: ", name, s.violations, s.iterations) +
                  s.first);
  };
  report(gap_sign, "gap >= 0");
  report(beckmann_bound, "beckmann gap bound");
  report(excess_bound, "sd capacity excess bound");
  report(lipschitz, "L_k <= M^2/eps");
  report(weight, "A_N >= eps N/(2M^2)");
  v.require(sec < 60.0, fmt("took %.1fs", sec));
  if (v.outcome == Outcome::pass)
    v.detail = fmt("checked %zu/%zu/%zu/%zu/%zu iterations in %.1fs", gap_sign.iterations,
                   beckmann_bound.iterations, excess_bound.iterations, lipschitz.iterations,
                   weight.iterations, sec);
  return v;
}

// ---------------------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Verdict complexity_scaling() {
  Verdict v;
  const Stopwatch clock;
  const Network net = tt::two_route_network();
  const Demands dem = tt::single_demand(3000.0);
  const EquilibriumProblem p(net, dem, ModelSpec{ModelKind::beckmann});
  const std::vector<double> tolerances = {1e-1, 1e-2, 1e-3, 1e-4};
  std::string summary;
  for (Method m : {Method::ugm, Method::umst, Method::frank_wolfe}) {
    std::vector<double> inverse_eps, calls;
    for (double eps : tolerances) {
      const SolveResult r = solve(p, config_for(m, eps, 10000000));
      v.require(r.converged, fmt("%s did not converge at %g", to_string(m).c_str(), eps));
      inverse_eps.push_back(1.0 / r.epsilon);
      calls.push_back(static_cast<double>(r.oracle_calls));
    }
    const double slope = loglog_slope(inverse_eps, calls);
    const double limit = m == Method::frank_wolfe ? 1.3 : 2.3;
    v.require(slope <= limit, fmt("%s slope %.3f above %.1f", to_string(m).c_str(), slope, limit));
    summary += fmt("%s slope %.2f (%g..%g calls) ", to_string(m).c_str(), slope, calls.front(),
                   calls.back());
  }
  const double sec = clock.seconds();
  v.require(sec < 120.0, fmt("took %.1fs", sec));
  if (v.outcome == Outcome::pass) v.detail = summary + fmt("in %.1fs", sec);
  return v;
}

// ---------------------------------------------------------------------------

Verdict method_ranking() {
  Verdict v;
  const Stopwatch clock;
  const Network net = tt::grid_network(4, 4);
  const Demands dem = tt::grid_demands();

  // an unconverged run counts as needing more calls than its budget
  auto cost = [](const SolveResult& r) {
    return r.converged ? static_cast<double>(r.oracle_calls) : INFINITY;
  };

  const EquilibriumProblem beckmann(net, dem, ModelSpec{ModelKind::beckmann});
  std::string summary = "beckmann:";
  double calls[5];
  for (int i = 0; i < 5; ++i) {
    const Method m = kAllMethods[i];
    const SolveResult r = solve(beckmann, config_for(m, 1e-3, 1000000));
    calls[i] = cost(r);
    summary += fmt(" %s=%g", to_string(m).c_str(), calls[i]);
  }
  // kAllMethods order: fw, ugm, umst, wda, wda-composite
  v.require(calls[0] < *std::min_element(calls + 1, calls + 5), "beckmann: fw not fewest");
  v.require(calls[2] < std::min({calls[1], calls[3], calls[4]}),
            "beckmann: umst not fewest among dual methods");

  ModelSpec sd_spec{ModelKind::stable_dynamics};
  sd_spec.capacity_scale = 2.0;
  const EquilibriumProblem sd(net, dem, sd_spec);
  summary += "; sd x2:";
  double sd_calls[4];
  for (int i = 0; i < 4; ++i) {
    const Method m = kDualMethods[i];
    const SolveResult r = solve(sd, config_for(m, 1e-3, 10000000));
    sd_calls[i] = cost(r);
    summary += r.converged ? fmt(" %s=%g", to_string(m).c_str(), sd_calls[i])
                           : fmt(" %s>%zu", to_string(m).c_str(), r.oracle_calls);
  }
  // kDualMethods order: ugm, umst, wda, wda-composite
  v.require(std::isfinite(sd_calls[1]), "sd: umst did not converge");
  v.require(sd_calls[1] <= sd_calls[0], "sd: umst above ugm");
  v.require(sd_calls[0] < std::min(sd_calls[2], sd_calls[3]), "sd: ugm not below both wda");

  const double sec = clock.seconds();
  v.require(sec < 300.0, fmt("took %.1fs", sec));
  v.detail = v.outcome == Outcome::pass ? summary + fmt(", %.0fs", sec)
                                         : v.detail + " [" + summary + "]";
  return v;
}

// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict anaheim() {
  Verdict v;
  const char* dir = std::getenv("TRAFFIC_EQ_ANAHEIM_DIR");
  const std::filesystem::path root = dir ? dir : "";
  const auto net_file = root / "Anaheim_net.tntp";
  const auto trips_file = root / "Anaheim_trips.tntp";
  if (!dir || !std::filesystem::exists(net_file) || !std::filesystem::exists(trips_file)) {
    v.outcome = Outcome::skip;
    v.detail = "set TRAFFIC_EQ_ANAHEIM_DIR to a directory with Anaheim_net.tntp and Anaheim_trips.tntp";
    return v;
  }
  const Stopwatch clock;
  const TntpNetworkFile file = parse_network_file(slurp(net_file));
  const Network net = to_network(file);
  TripsOptions lenient;
  lenient.on_mismatch = TotalCheck::ignore;
  const Demands dem = parse_trips(slurp(trips_file), lenient);
  v.require(net.node_count() == 416, fmt("%zu nodes", net.node_count()));
  v.require(net.link_count() == 916, fmt("%zu links", net.link_count()));
  v.require(file.zones == 38, fmt("%zu zones", file.zones));

  std::string summary;
  const EquilibriumProblem beckmann(net, dem, ModelSpec{ModelKind::beckmann});
  for (Method m : {Method::frank_wolfe, Method::umst}) {
    const SolveResult r = solve(beckmann, config_for(m, 1e-3, 1000000));
    v.require(r.converged, "beckmann " + to_string(m) + " did not converge");
    summary += fmt("beckmann %s %zu calls; ", to_string(m).c_str(), r.oracle_calls);
  }
  ModelSpec sd_spec{ModelKind::stable_dynamics};
  sd_spec.capacity_scale = 2.5;
  const EquilibriumProblem sd(net, dem, sd_spec);
  const SolveResult r = solve(sd, config_for(Method::umst, 1e-3, 1000000));
  v.require(r.converged, "sd umst did not converge");
  v.require(r.bootstrap_stages <= 3, fmt("%zu bootstrap stages", r.bootstrap_stages));
  summary += fmt("sd x2.5 umst %zu calls, %zu stages", r.oracle_calls, r.bootstrap_stages);
  const double sec = clock.seconds();
  v.require(sec < 600.0, fmt("took %.0fs", sec));
  if (v.outcome == Outcome::pass) v.detail = summary + fmt(", %.0fs", sec);
  return v;
}

// ---------------------------------------------------------------------------

Verdict numerical_identities() {
  Verdict v;
  const Stopwatch clock;
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> time(0.1, 2.0), capacity(100.0, 5000.0),
      mu(0.1, 1.0), rho(0.05, 0.5), unit(0.0, 1.0);
  const int samples = 2000;
  double worst[4] = {0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < samples; ++i) {
    const double t_free = time(rng), cap = capacity(rng);
    const BprParams bpr{rho(rng), mu(rng)};
    const double f = 3.0 * cap * unit(rng);
    const double tau = link_time(t_free, cap, f, bpr);

    // Fenchel-Young equality at the BPR time
    const double lhs = sigma(t_free, cap, f, bpr) + sigma_conj(t_free, cap, tau, bpr);
    worst[0] = std::max(worst[0], std::abs(lhs - f * tau) / std::max(f * tau, 1e-300));

    // d sigma / df = tau, central difference
    const double h = 1e-6 * cap;
    const double lo = std::max(0.0, f - h), hi = f + h;
    const double dsigma = (sigma(t_free, cap, hi, bpr) - sigma(t_free, cap, lo, bpr)) / (hi - lo);
    worst[1] = std::max(worst[1], std::abs(dsigma - tau) / tau);

    // d sigma_conj / dt by finite difference, away from the kink at t_free
    const double t = t_free * (1.01 + 2.0 * unit(rng));
    const double k = 1e-5 * (t - t_free);
    const double dconj = (sigma_conj(t_free, cap, t + k, bpr) - sigma_conj(t_free, cap, t - k, bpr)) /
                         (2.0 * k);
    const double conj_exact = sigma_conj_derivative(t_free, cap, t, bpr);
    worst[2] = std::max(worst[2], std::abs(dconj - conj_exact) / conj_exact);
  }

  // Phi(t) = -<t, f(t)> for random networks and times
  std::mt19937 net_rng(11u);
  for (int i = 0; i < samples; ++i) {
    const Network net = tt::random_small_network(net_rng, 8);
    const Demands dem = tt::random_demands(net_rng, net.node_count(), 4);
    LinkTimes t = net.free_flow_times();
    for (double& x : t) x *= 1.0 + 2.0 * unit(net_rng);
    const OracleResult r = reconstruct_flows(net, t, dem);
    double dot = 0.0;
    for (std::size_t e = 0; e < t.size(); ++e) dot += t[e] * r.flows[e];
    worst[3] = std::max(worst[3], std::abs(r.phi + dot) / std::abs(r.phi));
  }
  const char* names[] = {"fenchel-young", "dsigma/df", "dsigma*/dt", "phi=-<t,f>"};
  for (int j = 0; j < 4; ++j)
    v.require(worst[j] < 1e-6, fmt("%s worst relative error %.3g", names[j], worst[j]));
  const double sec = clock.seconds();
  v.require(sec < 10.0, fmt("took %.1fs", sec));
  if (v.outcome == Outcome::pass)
    v.detail = fmt("%d samples each, worst %.1e/%.1e/%.1e/%.1e, %.2fs", samples, worst[0],
                   worst[1], worst[2], worst[3], sec);
  return v;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"1 two-route beckmann", two_route_beckmann},
      {"2 two-route stable dynamics", two_route_sd},
      {"3 oracle equivalence", oracle_equivalence},
      {"4 certified bounds", certified_bounds},
      {"5 complexity scaling", complexity_scaling},
      {"6 method ranking", method_ranking},
      {"7 anaheim", anaheim},
      {"8 numerical identities", numerical_identities},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.outcome = Outcome::fail;
      v.detail = std::string("exception: ") + e.what();
    }
    const char* word = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
    std::printf("%s %s: %s\n", word, name, v.detail.c_str());
    if (v.outcome == Outcome::fail) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
