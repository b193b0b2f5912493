#include "cqlqg/optimizer.hpp"

#include <algorithm>
#include <limits>

namespace cqlqg {

namespace {

// Below this magnitude the curvature is treated as vanishing and the horizon
// cap takes over.
constexpr double kCurvatureFloor = 1e-300;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double fd_curvature(const PlantModel& plant, const ControllerParams& u,
                    const GradientTriple& g, double cost_u,
                    const SolverConfig& cfg) {
  const double h = 1e-5 * (1.0 + u.norm()) / (1.0 + g.norm());
  const auto up = lqg_cost(plant, u + h * g, cfg.hurwitz_margin);
  const auto dn = lqg_cost(plant, u - h * g, cfg.hurwitz_margin);
  if (!up.stabilizing || !dn.stabilizing) return 0.0;  // horizon cap applies
  return (up.value + dn.value - 2.0 * cost_u) / (h * h);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(h_max > 0.0)) throw PreconditionError("SolverConfig: h_max must be > 0");
  if (!(f > 0.0 && f < 1.0))
    throw PreconditionError("SolverConfig: f must lie in (0,1)");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw PreconditionError("SolverConfig: sigma must lie in (0,1)");
  if (!(epsilon >= 0.0))
    throw PreconditionError("SolverConfig: epsilon must be >= 0");
  if (max_iters < 1)
    throw PreconditionError("SolverConfig: max_iters must be >= 1");
  if (armijo_max_mu < 1)
    throw PreconditionError("SolverConfig: armijo_max_mu must be >= 1");
  if (hurwitz_margin < 0.0)
    throw PreconditionError("SolverConfig: hurwitz_margin must be >= 0");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::gradient_small: return "gradient_small";
    case Termination::max_iters: return "max_iters";
    case Termination::armijo_exhausted: return "armijo_exhausted";
  }
  return "unknown";
}

double search_horizon(double g_norm_sq, double d2, double h_max) {
  if (g_norm_sq < 0.0)
    throw PreconditionError("search_horizon: g_norm_sq must be >= 0");
  const double mag = std::abs(d2);
  if (mag < kCurvatureFloor) return h_max;
  return std::min(h_max, g_norm_sq / mag);
}

ArmijoResult armijo_step(const PlantModel& plant, const ControllerParams& u,
                         const GradientTriple& g, double cost_u, double h_k,
                         const SolverConfig& cfg) {
  return armijo_search(
      [&](const ControllerParams& cand) {
        return lqg_cost(plant, cand, cfg.hurwitz_margin).value;
      },
      u, g, cost_u, h_k, cfg.f, cfg.sigma, cfg.armijo_max_mu);
}

RunResult descend(const PlantModel& plant, const ControllerParams& u0,
                  const SolverConfig& cfg) {
  cfg.validate();
  const auto c0 = lqg_cost(plant, u0, cfg.hurwitz_margin);
  if (!c0.stabilizing)
    throw PreconditionError("descend: u0 is not stabilizing");

  RunResult out;
  out.final_u = u0;
  out.final_cost = c0.value;
  out.terminated = Termination::max_iters;
  out.trace.reserve(256);

  ControllerParams u = u0;
  double cost_u = c0.value;
  for (long k = 0; k < cfg.max_iters; ++k) {
    const auto [g, ws] = gradient(plant, u, cfg.hurwitz_margin);
    const double gn2 = g.squared_norm();
    const double gn = std::sqrt(gn2);
    const double d2 = cfg.fd_second_derivative
                          ? fd_curvature(plant, u, g, cost_u, cfg)
                          : directional_second_derivative(plant, ws, g);
    const double h = search_horizon(gn2, d2, cfg.h_max);

    ArmijoResult step;
    try {
      step = armijo_step(plant, u, g, cost_u, h, cfg);
    } catch (const ArmijoExhaustedError&) {
      out.terminated = Termination::armijo_exhausted;
      break;
    }

    out.trace.push_back({k, cost_u, gn, h, step.s, step.j, u.norm()});
    u = {sym(u.R - step.s * g.R), u.b - step.s * g.b, u.e - step.s * g.e};
    cost_u = step.cost_new;

    if (step.s * gn <= cfg.epsilon * u.norm()) {
      out.terminated = Termination::gradient_small;
      break;
    }
  }

  out.final_u = std::move(u);
  out.final_cost = cost_u;
  out.iterations = static_cast<long>(out.trace.size());
  return out;
}

FlowResult integrate_flow(const PlantModel& plant, const ControllerParams& u0,
                          FlowMode mode, double dtau, long steps,
                          double margin) {
  if (!(dtau > 0.0))
    throw PreconditionError("integrate_flow: dtau must be > 0");
  if (steps < 0)
    throw PreconditionError("integrate_flow: steps must be >= 0");

  std::vector<FlowRecord> rows;
  rows.reserve(static_cast<std::size_t>(steps) + 1);
  ControllerParams u = u0;

  // The cost of the current (known-stabilizing) state is a Gramian
  // byproduct; the direction comes from the same evaluation.
  for (long k = 0; k <= steps; ++k) {
    ParamTriple d;
    double cost_k = 0.0;
    try {
      if (mode == FlowMode::plain) {
        const auto [g, ws] = gradient(plant, u, margin);
        d = -g;
        cost_k = 0.5 * (ws.sys.C * ws.gramians.P * ws.sys.C.transpose()).trace();
      } else {
        const auto md = modified_direction(plant, u, margin);
        d = md.dir;
        cost_k = lqg_cost(plant, u, margin).value;
      }
    } catch (const UnstableError& err) {
      throw FlowEscapeError("integrate_flow: left the stabilizing set at step " +
                                std::to_string(k) + " (" + err.what() + ")",
                            std::move(rows));
    }
    rows.push_back({k, cost_k, u.norm(),
                    balance_residual(u, plant.Theta2).norm(), u.dot(d)});
    if (k == steps) break;
    u = {sym(u.R + dtau * d.R), u.b + dtau * d.b, u.e + dtau * d.e};
  }
  return {std::move(rows), std::move(u)};
}

RateEstimate estimate_rate(const PlantModel& plant,
                           const ControllerParams& u_star,
                           const SolverConfig& cfg) {
  cfg.validate();
  const auto [g, ws] = gradient(plant, u_star, cfg.hurwitz_margin);

  const auto basis = parameter_basis(plant.dims);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Mat Hm(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i; j < dim; ++j) {
      const double hij = hessian_quadratic_form(plant, ws, basis[i], basis[j]);
      Hm(i, j) = hij;
      Hm(j, i) = hij;
    }

  // Orbit tangent space in basis coordinates (the basis is orthonormal, so
  // coordinates are plain inner products).
  const auto phis = symmetric_basis(plant.dims.n);
  Mat T(dim, static_cast<Eigen::Index>(phis.size()));
  for (std::size_t a = 0; a < phis.size(); ++a) {
    const auto lift = tangent_lift(u_star, phis[a], plant.Theta2);
    for (Eigen::Index i = 0; i < dim; ++i) T(i, a) = lift.dot(basis[i]);
  }
  Eigen::JacobiSVD<Mat> svd(T, Eigen::ComputeFullU);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-12 * smax) ++rank;

  const Mat N = svd.matrixU().rightCols(dim - rank);
  const Mat Hn = sym(N.transpose() * Hm * N);
  Eigen::SelfAdjointEigenSolver<Mat> es(Hn, Eigen::EigenvaluesOnly);

  RateEstimate est;
  est.grad_norm = g.norm();
  est.tangent_dim = static_cast<int>(rank);
  est.hessian_spectrum_normal.assign(es.eigenvalues().data(),
                                     es.eigenvalues().data() +
                                         es.eigenvalues().size());
  est.ell = es.eigenvalues().minCoeff();
  est.L = es.eigenvalues().maxCoeff();
  est.r = 1.0 - 4.0 * cfg.f * cfg.sigma * (1.0 - cfg.sigma) * est.ell / est.L;
  const double span = std::max(std::abs(est.ell), std::abs(est.L));
  est.local_minimum = est.ell >= -1e-7 * span;
  return est;
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t root, int count) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(std::max(count, 0)));
  std::uint64_t state = root;
  for (int i = 0; i < count; ++i) seeds.push_back(splitmix64(state));
  return seeds;
}

MultiStartResult multi_start(const PlantModel& plant, const SolverConfig& cfg,
                             const std::vector<std::uint64_t>& seeds,
                             double scale, long max_tries) {
  cfg.validate();
  if (seeds.empty())
    throw PreconditionError("multi_start: need at least one seed");

  MultiStartResult out;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const std::uint64_t seed : seeds) {
    StabilizingDraw draw;
    try {
      draw = random_stabilizing(plant, seed, scale, max_tries,
                                cfg.hurwitz_margin);
    } catch (const StabilizationError&) {
      out.failed_seeds.push_back(seed);
      continue;
    }
    StartOutcome outcome;
    outcome.seed = seed;
    outcome.tries_used = draw.tries_used;
    outcome.run = descend(plant, draw.u, cfg);
    if (outcome.run.final_cost < best_cost) {
      best_cost = outcome.run.final_cost;
      out.best_index = out.runs.size();
    }
    out.runs.push_back(std::move(outcome));
  }
  if (out.runs.empty())
    throw StabilizationError(
        "multi_start: no stabilizing draw for any of the " +
            std::to_string(seeds.size()) + " starts",
        static_cast<long>(seeds.size()) * max_tries);
  return out;
}

MultiStartResult multi_start(const PlantModel& plant, const SolverConfig& cfg,
                             int n_starts, double scale, long max_tries) {
  if (n_starts < 1)
    throw PreconditionError("multi_start: n_starts must be >= 1");
  return multi_start(plant, cfg, derive_seeds(cfg.rng_seed, n_starts), scale,
                     max_tries);
}

}  // namespace cqlqg
