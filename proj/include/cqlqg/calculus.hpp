#pragma once

#include <memory>
#include <vector>

#include "cqlqg/closed_loop.hpp"

namespace cqlqg {

// Byproducts of a gradient evaluation that second-order and diagnostic paths
// reuse: the realization, the assembled closed loop, Gramians/Hankelian, the
// psi/chi auxiliaries, and the LU-factorized Lyapunov operators for the
// closed-loop matrix and its transpose.  Immutable after construction.
struct GradientWorkspace {
  ControllerRealization realization;
  ClosedLoopSystem sys;
  GramianSet gramians;
  Mat psi;  // n x n, antisymmetric
  Mat chi;  // n x p2
  std::shared_ptr<const LyapunovOperator> op;    // solves A X + X A' + W = 0
  std::shared_ptr<const LyapunovOperator> op_t;  // same for A'
};

struct GradientResult {
  GradientTriple g;
  GradientWorkspace ws;
};

// First derivative of the cost in the (R, b, e) coordinates:
//   dR = -2 sym(Theta2 H22)
//   db = Q21 E d + Q22 b - psi b J2 - chi d J2
//   de = H21 C' + Q21 B D' + Q22 e - psi e D J1 D'
// with psi = asym(H22 Theta2^{-1}) and
// chi = Theta2^{-1} (H12' E + P21 F' G + P22 c' G' G).
GradientResult gradient(const PlantModel& plant, const ControllerParams& u,
                        double margin = kHurwitzMargin);

// || sym(Theta2 (2 R dR - db b' - de e')) ||_F; identically zero when
// (dR, db, de) is the exact cost gradient at u.
double orthogonality_residual(const ControllerParams& u,
                              const GradientTriple& g, const Mat& Theta2);

// Tangent direction of the symplectic orbit through u generated by phi:
// (-2 sym(R Theta2 phi), Theta2 phi b, Theta2 phi e).  phi must be symmetric.
TangentVector tangent_lift(const ControllerParams& u, const Mat& phi,
                           const Mat& Theta2);

struct TangentSplit {
  TangentVector tangential;  // orthogonal projection of v onto the orbit tangent
  ParamTriple normal;        // v - tangential
  Mat phi_star;              // minimizing generator of the tangential part
};

// Least-squares split of v against the lifted basis of symmetric generators;
// rank deficiency is handled by a pseudo-inverse with relative singular-value
// cutoff 1e-12.
TangentSplit project_tangent(const ControllerParams& u, const ParamTriple& v,
                             const Mat& Theta2);

// sym(Theta2 (2 R^2 - b b' - e e')): the conserved quantity of the plain
// gradient flow; u is norm-balanced iff it vanishes.
Mat balance_residual(const ControllerParams& u, const Mat& Theta2);

struct ModifiedDirection {
  ParamTriple dir;      // gamma - g, or -g when degenerate
  TangentVector gamma;  // tangential correction
  bool degenerate = false;
};

// Norm-preserving descent direction: gamma is the multiple of the tangential
// part of u that cancels <u, dir>.  Falls back to plain -g (degenerate flag)
// when ||Pi_u(u)|| <= 1e-8 ||u||, i.e. at norm-balanced u.
ModifiedDirection modified_direction(const PlantModel& plant,
                                     const ControllerParams& u,
                                     double margin = kHurwitzMargin);

// u |-> (Sigma^{-T} R Sigma^{-1}, Sigma b, Sigma e); the R part is
// re-symmetrized.  Throws PreconditionError unless Sigma Theta2 Sigma' =
// Theta2 to roundoff.
ControllerParams apply_symplectic(const ControllerParams& u, const Mat& Sigma,
                                  const Mat& Theta2);

// Second Gateaux derivative d^2/ds^2 E(u + s v) at s = 0, evaluated
// analytically: the direction-induced perturbations of the realization and
// closed-loop matrices feed two directional Lyapunov solves, and the
// perturbed gradient blocks are contracted against v.
double directional_second_derivative(const PlantModel& plant,
                                     const ControllerParams& u,
                                     const ParamTriple& v,
                                     double margin = kHurwitzMargin);

// Same, reusing a workspace built at u (saves the factorizations).
double directional_second_derivative(const PlantModel& plant,
                                     const GradientWorkspace& ws,
                                     const ParamTriple& v);

// <Hess(u) v, w> by polarization of the directional second derivative.
double hessian_quadratic_form(const PlantModel& plant,
                              const ControllerParams& u, const ParamTriple& v,
                              const ParamTriple& w,
                              double margin = kHurwitzMargin);

double hessian_quadratic_form(const PlantModel& plant,
                              const GradientWorkspace& ws, const ParamTriple& v,
                              const ParamTriple& w);

// Orthonormal basis of the parameter space: the symmetric-matrix basis
// (diagonal cells, then scaled off-diagonal pairs) for the R slot, then
// elementary cells of b, then of e.  Size n(n+1)/2 + n(m2 + p1).
std::vector<ParamTriple> parameter_basis(const PlantDims& dims);

// Orthonormal basis of the symmetric n x n matrices, in the order used by
// parameter_basis.
std::vector<Mat> symmetric_basis(int n);

}  // namespace cqlqg
