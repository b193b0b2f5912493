#pragma once

#include <limits>

#include "cqlqg/model.hpp"

namespace cqlqg {

// Plant/controller interconnection in stacked coordinates (plant state on
// top).  A is 2n x 2n, B is 2n x (m1+m2), C is r x 2n; Theta and J carry the
// joint commutation structure blockwise.
struct ClosedLoopSystem {
  Mat A;      // [[A, E c], [e C, a]]
  Mat B;      // [[B, E d], [e D, b]]
  Mat C;      // [F, G c]
  Mat Theta;  // blkdiag(Theta1, Theta2)
  Mat J;      // blkdiag(J1, J2)
  bool hurwitz = false;
  double spectral_abscissa = 0.0;
  int n = 0;  // order of each half
};

ClosedLoopSystem assemble(const PlantModel& plant,
                          const ControllerRealization& real,
                          double margin = kHurwitzMargin);

struct MatBlocks {
  Mat b11, b12, b21, b22;
};

// n x n quadrants of a 2n x 2n matrix.
MatBlocks quad_blocks(const Mat& X, int n);

struct GramianSet {
  Mat P;  // controllability Gramian: A P + P A' + B B' = 0
  Mat Q;  // observability Gramian:  A' Q + Q A + C' C = 0
  Mat H;  // Hankelian Q P, kept unsymmetrized (its raw blocks feed the gradient)
  int n = 0;

  MatBlocks blocks(const Mat& X) const { return quad_blocks(X, n); }
};

// Solves the two Lyapunov equations; throws UnstableError when sys is not
// Hurwitz and Error when the back-substituted relative residual exceeds tol.
GramianSet gramians(const ClosedLoopSystem& sys, double tol = 1e-8);

struct CostValue {
  double value = std::numeric_limits<double>::infinity();
  bool stabilizing = false;  // value is finite iff stabilizing
};

// (1/2) tr(C P C'); +infinity (never NaN) for non-stabilizing u, so line
// searches can compare candidates safely.
CostValue lqg_cost(const PlantModel& plant, const ControllerParams& u,
                   double margin = kHurwitzMargin);

// Same value through the vectorized identity
// -(1/2) vec(C'C)' (A (+) A)^{-1} vec(BB'); cross-check path.  Unlike
// lqg_cost, a non-stabilizing u is an error here.
CostValue lqg_cost_vectorized(const PlantModel& plant,
                              const ControllerParams& u,
                              double margin = kHurwitzMargin);

// || A Theta + Theta A' + B J B' ||_F: zero exactly when the closed loop
// preserves the joint commutation relations.
double ccr_preservation_residual(const ClosedLoopSystem& sys);

struct PositivityReport {
  double min_eig = 0.0;  // smallest eigenvalue of the Hermitian P + i*Theta
  bool pass = false;
};

// Quantum-covariance positivity P + i*Theta >= 0.  tol < 0 selects the
// default 1e-9 * (1 + ||P||).
PositivityReport covariance_positivity(const GramianSet& gram, const Mat& Theta,
                                       double tol = -1.0);

}  // namespace cqlqg
