#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cqlqg/calculus.hpp"

namespace cqlqg {

struct SolverConfig {
  double h_max = 1.0;      // search-horizon cap
  double f = 0.5;          // stepsize ladder ratio, in (0,1)
  double sigma = 0.9;      // sufficient-decrease parameter, in (0,1)
  double epsilon = 1e-6;   // relative termination threshold; 0 disables
  long max_iters = 50000;
  int armijo_max_mu = 60;  // ladder cap; with f=0.5 spans ~18 decades
  double hurwitz_margin = kHurwitzMargin;
  std::uint64_t rng_seed = 0;
  // Horizon curvature via a central difference instead of the analytic
  // second derivative; cross-validation aid.
  bool fd_second_derivative = false;

  void validate() const;  // throws PreconditionError on out-of-range fields
};

struct IterateRecord {
  long k = 0;          // step index, from 0
  double cost = 0.0;   // cost at the pre-step iterate u_k
  double grad_norm = 0.0;
  double horizon = 0.0;
  double stepsize = 0.0;
  int armijo_j = 0;
  double u_norm = 0.0;
};

enum class Termination { gradient_small, max_iters, armijo_exhausted };

std::string to_string(Termination t);

struct RunResult {
  ControllerParams final_u;
  double final_cost = 0.0;
  long iterations = 0;  // accepted steps = trace rows
  Termination terminated = Termination::max_iters;
  std::vector<IterateRecord> trace;
};

// The stepsize ladder ran off its cap without satisfying the acceptance
// test; theory rules this out exactly, so it only signals numerics at the
// noise floor.  descend converts it into a labeled termination.
struct ArmijoExhaustedError : Error {
  ArmijoExhaustedError(const std::string& what, int j_reached)
      : Error(what), j(j_reached) {}
  int j;
};

// h = min(h_max, |g|^2 / |d2|); d2 (numerically) zero selects h_max.
double search_horizon(double g_norm_sq, double d2, double h_max);

struct ArmijoResult {
  double s = 0.0;     // accepted stepsize h * f^j
  int j = 0;          // first ladder index passing the test
  double cost_new = 0.0;
};

// Backtracking core over an arbitrary cost functional: accepts the first
// s = h*f^j with cost(u) - cost(u - s g) >= sigma * s * |g|^2.  Candidates
// with non-finite cost fail the test and the ladder advances.  The R slot of
// each candidate is re-symmetrized.
template <class CostFn>
ArmijoResult armijo_search(CostFn&& cost_fn, const ControllerParams& u,
                           const GradientTriple& g, double cost_u, double h,
                           double f, double sigma, int max_mu) {
  const double gn2 = g.squared_norm();
  for (int j = 0; j <= max_mu; ++j) {
    const double s = h * std::pow(f, j);
    const ControllerParams cand{sym(u.R - s * g.R), u.b - s * g.b,
                                u.e - s * g.e};
    const double cost_new = cost_fn(cand);
    if (std::isfinite(cost_new) && cost_u - cost_new >= sigma * s * gn2)
      return {s, j, cost_new};
  }
  throw ArmijoExhaustedError(
      "armijo_search: no acceptable stepsize within " +
          std::to_string(max_mu) + " ladder levels",
      max_mu);
}

ArmijoResult armijo_step(const PlantModel& plant, const ControllerParams& u,
                         const GradientTriple& g, double cost_u, double h_k,
                         const SolverConfig& cfg);

// Gradient descent u_{k+1} = u_k - s_k g(u_k) with the adaptive horizon and
// backtracking stepsize; stops when s_k |g| <= epsilon |u_{k+1}| or on
// max_iters / ladder exhaustion.  u0 must be stabilizing.
RunResult descend(const PlantModel& plant, const ControllerParams& u0,
                  const SolverConfig& cfg);

enum class FlowMode { plain, balanced };

struct FlowRecord {
  long k = 0;
  double cost = 0.0;
  double u_norm = 0.0;
  double balance_residual = 0.0;  // Frobenius norm of the conserved matrix
  double dir_dot_u = 0.0;         // <u, du/dtau> at this state
};

struct FlowResult {
  std::vector<FlowRecord> records;  // rows 0..steps (state before/after each step)
  ControllerParams final_u;
};

// An explicit-Euler iterate left the stabilizing set; carries the rows
// recorded before the escape.
struct FlowEscapeError : Error {
  FlowEscapeError(const std::string& what, std::vector<FlowRecord> rows)
      : Error(what), partial(std::move(rows)) {}
  std::vector<FlowRecord> partial;
};

// First-order time stepping of du/dtau = -g(u) (plain) or of the
// norm-preserving modified flow (balanced).
FlowResult integrate_flow(const PlantModel& plant, const ControllerParams& u0,
                          FlowMode mode, double dtau, long steps,
                          double margin = kHurwitzMargin);

struct RateEstimate {
  double ell = 0.0;  // smallest normal-subspace Hessian eigenvalue
  double L = 0.0;    // largest
  double r = 0.0;    // 1 - 4 f sigma (1-sigma) ell / L
  std::vector<double> hessian_spectrum_normal;  // ascending
  int tangent_dim = 0;
  bool local_minimum = true;  // false when ell is negative beyond tolerance
  double grad_norm = 0.0;     // diagnostic at u_star
};

// Dense Hessian over the orthonormal parameter basis by polarization,
// projected onto the orthogonal complement of the orbit tangent space at
// u_star; ell/L are the extreme eigenvalues there.  r uses cfg.f, cfg.sigma.
RateEstimate estimate_rate(const PlantModel& plant,
                           const ControllerParams& u_star,
                           const SolverConfig& cfg);

// Independent per-start seeds derived from root by a fixed 64-bit mix.
std::vector<std::uint64_t> derive_seeds(std::uint64_t root, int count);

struct StartOutcome {
  std::uint64_t seed = 0;
  long tries_used = 0;  // stabilization draws consumed
  RunResult run;
};

struct MultiStartResult {
  std::size_t best_index = 0;  // into runs (first minimum on ties)
  std::vector<StartOutcome> runs;
  std::vector<std::uint64_t> failed_seeds;  // starts with no stabilizing draw

  const RunResult& best() const { return runs[best_index].run; }
};

// random_stabilizing + descend per seed; results ordered by seed, so the
// outcome is deterministic for a fixed cfg.  Throws StabilizationError only
// when every start fails.
MultiStartResult multi_start(const PlantModel& plant, const SolverConfig& cfg,
                             int n_starts, double scale,
                             long max_tries = 200000);

MultiStartResult multi_start(const PlantModel& plant, const SolverConfig& cfg,
                             const std::vector<std::uint64_t>& seeds,
                             double scale, long max_tries = 200000);

}  // namespace cqlqg
