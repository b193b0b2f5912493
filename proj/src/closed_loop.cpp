#include "cqlqg/closed_loop.hpp"

#include <complex>
#include <string>

namespace cqlqg {

ClosedLoopSystem assemble(const PlantModel& plant,
                          const ControllerRealization& real, double margin) {
  const auto& dm = plant.dims;
  const int n = dm.n;
  if (real.a.rows() != n || real.a.cols() != n || real.b.rows() != n ||
      real.b.cols() != dm.m2 || real.c.rows() != dm.p2 || real.c.cols() != n ||
      real.e.rows() != n || real.e.cols() != dm.p1)
    throw DimensionError("assemble: realization shape mismatch");

  ClosedLoopSystem sys;
  sys.n = n;

  sys.A.resize(2 * n, 2 * n);
  sys.A.topLeftCorner(n, n) = plant.A;
  sys.A.topRightCorner(n, n) = plant.E * real.c;
  sys.A.bottomLeftCorner(n, n) = real.e * plant.C;
  sys.A.bottomRightCorner(n, n) = real.a;

  sys.B.resize(2 * n, dm.m1 + dm.m2);
  sys.B.topLeftCorner(n, dm.m1) = plant.B;
  sys.B.topRightCorner(n, dm.m2) = plant.E * plant.d;
  sys.B.bottomLeftCorner(n, dm.m1) = real.e * plant.D;
  sys.B.bottomRightCorner(n, dm.m2) = real.b;

  sys.C.resize(dm.r, 2 * n);
  sys.C.leftCols(n) = plant.F;
  sys.C.rightCols(n) = plant.G * real.c;

  sys.Theta = Mat::Zero(2 * n, 2 * n);
  sys.Theta.topLeftCorner(n, n) = plant.Theta1;
  sys.Theta.bottomRightCorner(n, n) = plant.Theta2;

  sys.J = Mat::Zero(dm.m1 + dm.m2, dm.m1 + dm.m2);
  sys.J.topLeftCorner(dm.m1, dm.m1) = plant.J1;
  sys.J.bottomRightCorner(dm.m2, dm.m2) = plant.J2;

  const auto rep = is_hurwitz(sys.A, margin);
  sys.hurwitz = rep.hurwitz;
  sys.spectral_abscissa = rep.spectral_abscissa;
  return sys;
}

MatBlocks quad_blocks(const Mat& X, int n) {
  if (X.rows() != 2 * n || X.cols() != 2 * n)
    throw DimensionError("quad_blocks: matrix must be 2n x 2n");
  return {X.topLeftCorner(n, n), X.topRightCorner(n, n),
          X.bottomLeftCorner(n, n), X.bottomRightCorner(n, n)};
}

GramianSet gramians(const ClosedLoopSystem& sys, double tol) {
  if (!sys.hurwitz)
    throw UnstableError("gramians: closed loop is not Hurwitz (abscissa " +
                            std::to_string(sys.spectral_abscissa) + ")",
                        sys.spectral_abscissa);
  const Mat BBt = sys.B * sys.B.transpose();
  const Mat CtC = sys.C.transpose() * sys.C;
  const auto sp = solve_lyapunov(sys.A, BBt, /*check_stability=*/false);
  const auto sq = solve_lyapunov(sys.A.transpose(), CtC, /*check_stability=*/false);
  if (sp.residual_norm > tol * (1.0 + BBt.norm()) ||
      sq.residual_norm > tol * (1.0 + CtC.norm()))
    throw Error("gramians: Lyapunov residual exceeds tolerance (P: " +
                std::to_string(sp.residual_norm) + ", Q: " +
                std::to_string(sq.residual_norm) + ")");
  GramianSet g;
  g.P = sp.X;
  g.Q = sq.X;
  g.H = g.Q * g.P;
  g.n = sys.n;
  return g;
}

CostValue lqg_cost(const PlantModel& plant, const ControllerParams& u,
                   double margin) {
  const auto sys = assemble(plant, realize_controller(plant, u), margin);
  if (!sys.hurwitz) return {};
  const Mat P =
      solve_lyapunov(sys.A, sys.B * sys.B.transpose(), false).X;
  return {0.5 * (sys.C * P * sys.C.transpose()).trace(), true};
}

CostValue lqg_cost_vectorized(const PlantModel& plant,
                              const ControllerParams& u, double margin) {
  const auto sys = assemble(plant, realize_controller(plant, u), margin);
  if (!sys.hurwitz)
    throw UnstableError("lqg_cost_vectorized: closed loop is not Hurwitz",
                        sys.spectral_abscissa);
  Eigen::PartialPivLU<Mat> lu(kron_sum(sys.A));
  const Vec x = lu.solve(vec(sys.B * sys.B.transpose()));
  return {-0.5 * vec(sys.C.transpose() * sys.C).dot(x), true};
}

double ccr_preservation_residual(const ClosedLoopSystem& sys) {
  return (sys.A * sys.Theta + sys.Theta * sys.A.transpose() +
          sys.B * sys.J * sys.B.transpose())
      .norm();
}

PositivityReport covariance_positivity(const GramianSet& gram, const Mat& Theta,
                                       double tol) {
  if (Theta.rows() != gram.P.rows() || Theta.cols() != gram.P.cols())
    throw DimensionError("covariance_positivity: Theta shape mismatch");
  if (tol < 0.0) tol = 1e-9 * (1.0 + gram.P.norm());
  Eigen::MatrixXcd S = gram.P.cast<std::complex<double>>();
  S += std::complex<double>(0.0, 1.0) * Theta.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S,
                                                     Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  return {min_eig, min_eig >= -tol};
}

}  // namespace cqlqg
