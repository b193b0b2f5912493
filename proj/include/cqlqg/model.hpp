#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "cqlqg/linalg.hpp"

namespace cqlqg {

// Controller parameter triple u = (R, b, e): R is the n x n symmetric free-
// Hamiltonian matrix, b (n x m2) and e (n x p1) are the noise and observation
// gains.  The remaining state-space matrices (a, c) are recovered from u, so
// this triple is the optimization variable.  The same shape doubles as
// gradient / tangent-vector container under the direct-sum inner product
// <u,v> = tr(Ru' Rv) + tr(bu' bv) + tr(eu' ev).
struct ParamTriple {
  Mat R, b, e;

  static ParamTriple zero(int n, int m2, int p1);

  double dot(const ParamTriple& o) const;
  double squared_norm() const { return dot(*this); }
  double norm() const;

  ParamTriple operator+(const ParamTriple& o) const;
  ParamTriple operator-(const ParamTriple& o) const;
  ParamTriple operator*(double s) const;
  ParamTriple operator-() const;
};

inline ParamTriple operator*(double s, const ParamTriple& u) { return u * s; }

using ControllerParams = ParamTriple;
using GradientTriple = ParamTriple;
using TangentVector = ParamTriple;

struct PlantDims {
  int n;    // state dimension of plant and controller (even)
  int m1;   // plant noise channels (even)
  int m2;   // controller noise channels (even)
  int p1;   // plant outputs = controller inputs
  int p2;   // controller outputs = plant actuation inputs
  int r;    // cost output dimension
};

// Quantum plant data plus the derived commutation structure.  Theta1/Theta2
// are the plant/controller state CCR matrices, J1/J2 the noise-channel ones;
// all default to the standard ccr_block of matching order.
struct PlantModel {
  PlantDims dims;
  Mat A;  // n  x n   plant drift
  Mat B;  // n  x m1  plant noise gain
  Mat C;  // p1 x n   plant output
  Mat D;  // p1 x m1  plant output feedthrough
  Mat E;  // n  x p2  actuation gain
  Mat F;  // r  x n   cost output: plant part
  Mat G;  // r  x p2  cost output: actuation part
  Mat d;  // p2 x m2  controller output feedthrough
  Mat Theta1, Theta2, J1, J2;

  PlantModel(PlantDims dims, Mat A, Mat B, Mat C, Mat D, Mat E, Mat F, Mat G,
             Mat d, std::optional<Mat> theta1 = std::nullopt);
};

// Full controller state-space recovered from u: the state equation uses
// (a, b, e), the output equation (c, plant.d).
struct ControllerRealization {
  Mat a;  // n  x n
  Mat b;  // n  x m2
  Mat c;  // p2 x n
  Mat e;  // n  x p1
};

// a = 2*Theta2*R - (1/2)(e D J1 D' e' + b J2 b') * Theta2^{-1},
// c = -d J2 b' * Theta2^{-1}, with Theta2^{-1} = -Theta2 used exactly.
ControllerRealization realize_controller(const PlantModel& plant,
                                         const ControllerParams& u);

// Default tolerance of the physical-realizability checks for exact inputs;
// plants transcribed from rounded tables need a looser one (the CLI default).
inline constexpr double kPrTol = 1e-9;

struct PrCheck {
  double residual = 0.0;  // Frobenius norm of the identity's defect
  double scale = 1.0;     // 1 + sum of the identity's term norms
  bool pass = false;      // residual <= tol * scale
};

struct PrReport {
  std::map<std::string, PrCheck> checks;
  double tol = kPrTol;
  bool pass = false;  // conjunction over checks
};

// Plant-side identities: state_ccr (A Theta1 + Theta1 A' + B J1 B' +
// E d J2 d' E' = 0), output_commutation (Theta1 C' + B J1 D' = 0), and the
// feedthrough normalizations D D' = I, d d' = I.
PrReport check_plant_pr(const PlantModel& plant, double tol = kPrTol);

// Controller-side identities: state_ccr (a Theta2 + Theta2 a' + b J2 b' +
// e D J1 D' e' = 0), output_commutation (c Theta2 + d J2 b' = 0), and the
// plant/controller cross_commutation block, which the first two imply.
PrReport check_controller_pr(const PlantModel& plant,
                             const ControllerRealization& real,
                             double tol = kPrTol);

// Gaussian draw: R = sym(scale * Z), b and e entries i.i.d. N(0, scale^2).
// Deterministic for a fixed seed (the generator is pinned, not
// implementation-defined).
ControllerParams random_controller(const PlantModel& plant, std::uint64_t seed,
                                   double scale);

struct StabilizingDraw {
  ControllerParams u;
  long tries_used = 0;
};

// Redraws until the closed-loop state matrix is Hurwitz with the given
// margin.  Throws StabilizationError (carrying tries_used) on budget
// exhaustion.
StabilizingDraw random_stabilizing(const PlantModel& plant, std::uint64_t seed,
                                   double scale, long max_tries,
                                   double margin = kHurwitzMargin);

}  // namespace cqlqg
