#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cqlqg/io.hpp"

namespace {

using namespace cqlqg;

// Config resolution order: built-in defaults, then the file named by
// CQLQG_CONFIG (if set), then --config, then explicit flags.
struct ConfigFlags {
  std::string config_path;
  double h_max = 0, f = 0, sigma = 0, epsilon = 0;
  long max_iters = 0;
  std::uint64_t seed = 0;
  CLI::Option *o_config = nullptr, *o_h_max = nullptr, *o_f = nullptr,
              *o_sigma = nullptr, *o_epsilon = nullptr, *o_max_iters = nullptr,
              *o_seed = nullptr;

  void attach(CLI::App* cmd) {
    o_config = cmd->add_option("--config", config_path,
                               "Solver config file (overrides CQLQG_CONFIG)");
    o_h_max = cmd->add_option("--h-max", h_max, "Search-horizon cap");
    o_f = cmd->add_option("--f", f, "Stepsize ladder ratio in (0,1)");
    o_sigma = cmd->add_option("--sigma", sigma,
                              "Sufficient-decrease parameter in (0,1)");
    o_epsilon = cmd->add_option("--epsilon", epsilon,
                                "Relative termination threshold (0 disables)");
    o_max_iters = cmd->add_option("--max-iters", max_iters, "Iteration cap");
    o_seed = cmd->add_option("--seed", seed, "RNG seed");
  }

  SolverConfig resolve() const {
    SolverConfig cfg;
    if (const char* env = std::getenv("CQLQG_CONFIG"); env && *env)
      cfg = io::load_config(env, cfg);
    if (o_config->count()) cfg = io::load_config(config_path, cfg);
    if (o_h_max->count()) cfg.h_max = h_max;
    if (o_f->count()) cfg.f = f;
    if (o_sigma->count()) cfg.sigma = sigma;
    if (o_epsilon->count()) cfg.epsilon = epsilon;
    if (o_max_iters->count()) cfg.max_iters = max_iters;
    if (o_seed->count()) cfg.rng_seed = seed;
    cfg.validate();
    return cfg;
  }
};

void print_pr_table(const PrReport& rep) {
  std::printf("  %-24s %-13s %-13s %s\n", "identity", "residual", "scale",
              "pass");
  for (const auto& [name, chk] : rep.checks)
    std::printf("  %-24s %-13.4e %-13.4e %s\n", name.c_str(), chk.residual,
                chk.scale, chk.pass ? "yes" : "NO");
  std::printf("  overall: %s (tol %g)\n", rep.pass ? "PASS" : "FAIL", rep.tol);
}

void print_eigenvalues(const Mat& A) {
  Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
  std::vector<std::pair<double, double>> eigs;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    eigs.emplace_back(es.eigenvalues()(i).real(), es.eigenvalues()(i).imag());
  std::sort(eigs.begin(), eigs.end());
  std::printf("closed-loop eigenvalues:\n");
  for (const auto& [re, im] : eigs)
    std::printf("  %+.6f %+.6fi\n", re, im);
}

int cmd_check(const std::string& plant_path, double tol) {
  const auto plant = io::load_plant(plant_path);
  const auto rep = check_plant_pr(plant, tol);
  std::printf("check %s\n", plant_path.c_str());
  print_pr_table(rep);
  return rep.pass ? 0 : 1;
}

int cmd_cost(const std::string& plant_path, const std::string& ctrl_path,
             double pr_tol) {
  const auto plant = io::load_plant(plant_path);
  const auto u = io::load_controller(ctrl_path);
  const auto cost = lqg_cost(plant, u);
  if (!cost.stabilizing) {
    std::printf("cost: inf (not stabilizing)\n");
    print_eigenvalues(assemble(plant, realize_controller(plant, u)).A);
    return 0;
  }
  std::printf("cost: %.10f\n", cost.value);
  const auto [g, ws] = gradient(plant, u);
  std::printf("gradient norm: %.6e\n", g.norm());
  print_eigenvalues(ws.sys.A);
  std::printf("controller PR residuals:\n");
  print_pr_table(check_controller_pr(plant, ws.realization, pr_tol));
  const auto pos = covariance_positivity(ws.gramians, ws.sys.Theta);
  std::printf("covariance min eigenvalue: %+.6e (%s)\n", pos.min_eig,
              pos.pass ? "pass" : "FAIL");
  return 0;
}

int cmd_synthesize(const std::string& plant_path, const ConfigFlags& flags,
                   const std::string& init_path, int starts, double scale,
                   long max_tries, const std::string& out_path,
                   const std::string& trace_path) {
  const auto plant = io::load_plant(plant_path);
  const SolverConfig cfg = flags.resolve();

  const RunResult* best = nullptr;
  RunResult single;
  MultiStartResult msr;
  if (!init_path.empty()) {
    single = descend(plant, io::load_controller(init_path), cfg);
    std::printf("init %s: cost %.10f after %ld iterations (%s)\n",
                init_path.c_str(), single.final_cost, single.iterations,
                to_string(single.terminated).c_str());
    best = &single;
  } else {
    msr = multi_start(plant, cfg, starts, scale, max_tries);
    for (const auto& so : msr.runs)
      std::printf(
          "start seed %llu: %ld draws, cost %.10f after %ld iterations (%s)\n",
          static_cast<unsigned long long>(so.seed), so.tries_used,
          so.run.final_cost, so.run.iterations,
          to_string(so.run.terminated).c_str());
    for (const auto seed : msr.failed_seeds)
      std::printf("start seed %llu: no stabilizing draw\n",
                  static_cast<unsigned long long>(seed));
    best = &msr.best();
  }

  io::save_controller(out_path, plant, best->final_u, 1e-3);
  io::save_trace(trace_path, best->trace);
  std::printf("best cost: %.10f after %ld iterations (%s)\n", best->final_cost,
              best->iterations, to_string(best->terminated).c_str());
  std::printf("controller written to %s, trace to %s\n", out_path.c_str(),
              trace_path.c_str());
  return 0;
}

int cmd_flow(const std::string& plant_path, const std::string& ctrl_path,
             const std::string& mode, double dtau, long steps,
             const std::string& out_path) {
  const auto plant = io::load_plant(plant_path);
  const auto u0 = io::load_controller(ctrl_path);
  const FlowMode fm = mode == "balanced" ? FlowMode::balanced : FlowMode::plain;
  try {
    const auto res = integrate_flow(plant, u0, fm, dtau, steps);
    io::save_flow_trace(out_path, res.records);
    const auto& first = res.records.front();
    const auto& last = res.records.back();
    std::printf("flow %s: %ld steps, dtau %g\n", mode.c_str(), steps, dtau);
    std::printf("  cost %0.10f -> %0.10f\n", first.cost, last.cost);
    std::printf("  |u| drift %.3e, balance-residual drift %.3e\n",
                std::abs(last.u_norm - first.u_norm),
                std::abs(last.balance_residual - first.balance_residual));
    std::printf("trace written to %s\n", out_path.c_str());
    return 0;
  } catch (const FlowEscapeError& e) {
    io::save_flow_trace(out_path, e.partial);
    std::fprintf(stderr, "error: flow-escape: %s (partial trace in %s)\n",
                 e.what(), out_path.c_str());
    return 1;
  }
}

int cmd_rate(const std::string& plant_path, const std::string& ctrl_path,
             double f, double sigma, double grad_warn) {
  const auto plant = io::load_plant(plant_path);
  const auto u = io::load_controller(ctrl_path);
  SolverConfig cfg;
  cfg.f = f;
  cfg.sigma = sigma;
  const auto est = estimate_rate(plant, u, cfg);
  if (est.grad_norm > grad_warn * (1.0 + u.norm()))
    std::fprintf(stderr,
                 "warning: controller is far from stationarity "
                 "(gradient norm %.3e)\n",
                 est.grad_norm);
  if (!est.local_minimum)
    std::fprintf(stderr,
                 "warning: negative curvature in the normal subspace "
                 "(min eigenvalue %.3e); not a local minimum\n",
                 est.ell);
  std::printf("gradient norm: %.6e\n", est.grad_norm);
  std::printf("tangent dimension: %d\n", est.tangent_dim);
  std::printf("normal-subspace Hessian spectrum: %zu eigenvalues in "
              "[%.6e, %.6e]\n",
              est.hessian_spectrum_normal.size(), est.ell, est.L);
  std::printf("ell = %.6e\nL = %.6e\nr = %.10f  (f = %g, sigma = %g)\n",
              est.ell, est.L, est.r, f, sigma);
  return 0;
}

int cmd_plot(const std::string& trace_path, double emin,
             const std::string& out_path) {
  const auto trace = io::load_trace(trace_path);
  io::write_svg_plot(out_path, trace, emin);
  std::printf("plot written to %s (%zu rows, emin %.10g)\n", out_path.c_str(),
              trace.size(), emin);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent quantum LQG controller synthesis by gradient descent"};
  app.require_subcommand(1);

  // check
  auto* check = app.add_subcommand("check", "Physical-realizability report for a plant file");
  std::string check_plant;
  double check_tol = 1e-3;
  check->add_option("plant", check_plant, "Plant file")->required();
  check->add_option("--tol", check_tol,
                    "Relative PR tolerance (rounded tables need ~1e-3)");

  // cost
  auto* costc = app.add_subcommand("cost", "Evaluate a controller on a plant");
  std::string cost_plant, cost_ctrl;
  double cost_tol = 1e-3;
  costc->add_option("plant", cost_plant, "Plant file")->required();
  costc->add_option("controller", cost_ctrl, "Controller file")->required();
  costc->add_option("--tol", cost_tol, "PR report tolerance");

  // synthesize
  auto* synth = app.add_subcommand("synthesize",
                                   "Gradient-descent synthesis from random "
                                   "stabilizing starts (or --init)");
  std::string synth_plant, synth_init, synth_out = "synthesized.controller",
                            synth_trace = "synthesized.trace.csv";
  int synth_starts = 10;
  double synth_scale = 1.0;
  long synth_tries = 200000;
  ConfigFlags synth_flags;
  synth->add_option("plant", synth_plant, "Plant file")->required();
  synth_flags.attach(synth);
  synth->add_option("--init", synth_init,
                    "Descend from this controller instead of random starts");
  synth->add_option("--starts", synth_starts, "Number of random starts");
  synth->add_option("--scale", synth_scale, "Random-draw scale");
  synth->add_option("--max-tries", synth_tries,
                    "Stabilization draw budget per start");
  synth->add_option("--out", synth_out, "Output controller file");
  synth->add_option("--trace", synth_trace, "Output trace file");

  // flow
  auto* flow = app.add_subcommand("flow", "Explicit-Euler gradient-flow diagnostics");
  std::string flow_plant, flow_ctrl, flow_mode = "plain",
                          flow_out = "flow.trace.csv";
  double flow_dtau = 1e-3;
  long flow_steps = 100;
  flow->add_option("plant", flow_plant, "Plant file")->required();
  flow->add_option("controller", flow_ctrl, "Controller file")->required();
  flow->add_option("--mode", flow_mode, "plain | balanced")
      ->check(CLI::IsMember({"plain", "balanced"}));
  flow->add_option("--dtau", flow_dtau, "Time step");
  flow->add_option("--steps", flow_steps, "Step count");
  flow->add_option("--out", flow_out, "Output trace file");

  // rate
  auto* rate = app.add_subcommand("rate", "Convergence-rate estimate near a minimum");
  std::string rate_plant, rate_ctrl;
  double rate_f = 0.5, rate_sigma = 0.9, rate_warn = 1e-3;
  rate->add_option("plant", rate_plant, "Plant file")->required();
  rate->add_option("controller", rate_ctrl, "Controller file")->required();
  rate->add_option("--f", rate_f, "Stepsize ladder ratio used in r");
  rate->add_option("--sigma", rate_sigma, "Sufficient-decrease parameter used in r");
  rate->add_option("--grad-warn", rate_warn,
                   "Relative gradient-norm warning threshold");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a trace as a log-scale SVG");
  std::string plot_trace, plot_out = "trace.svg";
  double plot_emin = 0.0;
  plot->add_option("trace", plot_trace, "Trace file")->required();
  plot->add_option("--emin", plot_emin, "Reference minimum cost")->required();
  plot->add_option("--out", plot_out, "Output SVG file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(check_plant, check_tol);
    if (costc->parsed()) return cmd_cost(cost_plant, cost_ctrl, cost_tol);
    if (synth->parsed())
      return cmd_synthesize(synth_plant, synth_flags, synth_init, synth_starts,
                            synth_scale, synth_tries, synth_out, synth_trace);
    if (flow->parsed())
      return cmd_flow(flow_plant, flow_ctrl, flow_mode, flow_dtau, flow_steps,
                      flow_out);
    if (rate->parsed())
      return cmd_rate(rate_plant, rate_ctrl, rate_f, rate_sigma, rate_warn);
    if (plot->parsed()) return cmd_plot(plot_trace, plot_emin, plot_out);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: parse: %s\n", e.what());
    return 2;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "error: dimension: %s\n", e.what());
    return 2;
  } catch (const StabilizationError& e) {
    std::fprintf(stderr, "error: stabilization: %s\n", e.what());
    return 1;
  } catch (const UnstableError& e) {
    std::fprintf(stderr, "error: unstable: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
