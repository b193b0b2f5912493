#include "cqlqg/calculus.hpp"

#include <cmath>

namespace cqlqg {

namespace {

// Gramian residual guard shared by gradient() and gramians().
constexpr double kGramianTol = 1e-8;

struct GradBlocks {
  Mat dR, db, de;
};

}  // namespace

GradientResult gradient(const PlantModel& plant, const ControllerParams& u,
                        double margin) {
  const int n = plant.dims.n;
  GradientWorkspace ws;
  ws.realization = realize_controller(plant, u);
  ws.sys = assemble(plant, ws.realization, margin);
  if (!ws.sys.hurwitz)
    throw UnstableError("gradient: u is not stabilizing (abscissa " +
                            std::to_string(ws.sys.spectral_abscissa) + ")",
                        ws.sys.spectral_abscissa);

  ws.op = std::make_shared<LyapunovOperator>(ws.sys.A);
  ws.op_t = std::make_shared<LyapunovOperator>(Mat(ws.sys.A.transpose()));

  const Mat BBt = ws.sys.B * ws.sys.B.transpose();
  const Mat CtC = ws.sys.C.transpose() * ws.sys.C;
  ws.gramians.P = ws.op->solve(BBt);
  ws.gramians.Q = ws.op_t->solve(CtC);
  ws.gramians.H = ws.gramians.Q * ws.gramians.P;
  ws.gramians.n = n;

  const double res_p = (ws.sys.A * ws.gramians.P +
                        ws.gramians.P * ws.sys.A.transpose() + BBt)
                           .norm();
  const double res_q = (ws.sys.A.transpose() * ws.gramians.Q +
                        ws.gramians.Q * ws.sys.A + CtC)
                           .norm();
  if (res_p > kGramianTol * (1.0 + BBt.norm()) ||
      res_q > kGramianTol * (1.0 + CtC.norm()))
    throw Error("gradient: Lyapunov residual exceeds tolerance");

  const Mat Th2inv = -plant.Theta2;  // Theta2^{-1} exactly
  const auto Hb = ws.gramians.blocks(ws.gramians.H);
  const auto Qb = ws.gramians.blocks(ws.gramians.Q);
  const auto Pb = ws.gramians.blocks(ws.gramians.P);
  const Mat& cmat = ws.realization.c;

  ws.psi = asym(Hb.b22 * Th2inv);
  ws.chi = Th2inv * (Hb.b12.transpose() * plant.E +
                     Pb.b21 * plant.F.transpose() * plant.G +
                     Pb.b22 * cmat.transpose() * plant.G.transpose() * plant.G);

  const Mat DJD = plant.D * plant.J1 * plant.D.transpose();
  GradientTriple g;
  g.R = -2.0 * sym(plant.Theta2 * Hb.b22);
  g.b = Qb.b21 * plant.E * plant.d + Qb.b22 * u.b - ws.psi * u.b * plant.J2 -
        ws.chi * plant.d * plant.J2;
  g.e = Hb.b21 * plant.C.transpose() +
        Qb.b21 * plant.B * plant.D.transpose() + Qb.b22 * u.e -
        ws.psi * u.e * DJD;
  return {std::move(g), std::move(ws)};
}

double orthogonality_residual(const ControllerParams& u,
                              const GradientTriple& g, const Mat& Theta2) {
  return sym(Theta2 * (2.0 * u.R * g.R - g.b * u.b.transpose() -
                       g.e * u.e.transpose()))
      .norm();
}

TangentVector tangent_lift(const ControllerParams& u, const Mat& phi,
                           const Mat& Theta2) {
  if (phi.rows() != u.R.rows() || phi.cols() != u.R.cols())
    throw DimensionError("tangent_lift: phi order mismatch");
  if ((phi - phi.transpose()).norm() > 1e-12 * (1.0 + phi.norm()))
    throw PreconditionError("tangent_lift: phi must be symmetric");
  const Mat Tphi = Theta2 * phi;
  return {-2.0 * sym(u.R * Tphi), Tphi * u.b, Tphi * u.e};
}

std::vector<Mat> symmetric_basis(int n) {
  std::vector<Mat> basis;
  basis.reserve(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    Mat M = Mat::Zero(n, n);
    M(i, i) = 1.0;
    basis.push_back(std::move(M));
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat M = Mat::Zero(n, n);
      M(i, j) = M(j, i) = inv_sqrt2;
      basis.push_back(std::move(M));
    }
  return basis;
}

std::vector<ParamTriple> parameter_basis(const PlantDims& dims) {
  std::vector<ParamTriple> basis;
  basis.reserve(dims.n * (dims.n + 1) / 2 + dims.n * (dims.m2 + dims.p1));
  for (const Mat& S : symmetric_basis(dims.n)) {
    ParamTriple t = ParamTriple::zero(dims.n, dims.m2, dims.p1);
    t.R = S;
    basis.push_back(std::move(t));
  }
  for (int i = 0; i < dims.n; ++i)
    for (int j = 0; j < dims.m2; ++j) {
      ParamTriple t = ParamTriple::zero(dims.n, dims.m2, dims.p1);
      t.b(i, j) = 1.0;
      basis.push_back(std::move(t));
    }
  for (int i = 0; i < dims.n; ++i)
    for (int j = 0; j < dims.p1; ++j) {
      ParamTriple t = ParamTriple::zero(dims.n, dims.m2, dims.p1);
      t.e(i, j) = 1.0;
      basis.push_back(std::move(t));
    }
  return basis;
}

namespace {

Vec pack(const ParamTriple& t) {
  Vec v(t.R.size() + t.b.size() + t.e.size());
  v << vec(t.R), vec(t.b), vec(t.e);
  return v;
}

}  // namespace

TangentSplit project_tangent(const ControllerParams& u, const ParamTriple& v,
                             const Mat& Theta2) {
  const int n = static_cast<int>(u.R.rows());
  const auto phis = symmetric_basis(n);
  const Eigen::Index dim = u.R.size() + u.b.size() + u.e.size();
  Mat L(dim, static_cast<Eigen::Index>(phis.size()));
  for (std::size_t a = 0; a < phis.size(); ++a)
    L.col(static_cast<Eigen::Index>(a)) = pack(tangent_lift(u, phis[a], Theta2));

  Eigen::JacobiSVD<Mat> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  const Vec coeff = svd.solve(pack(v));

  Mat phi_star = Mat::Zero(n, n);
  for (std::size_t a = 0; a < phis.size(); ++a)
    phi_star += coeff(static_cast<Eigen::Index>(a)) * phis[a];

  TangentSplit split;
  split.tangential = tangent_lift(u, phi_star, Theta2);
  split.normal = v - split.tangential;
  split.phi_star = std::move(phi_star);
  return split;
}

Mat balance_residual(const ControllerParams& u, const Mat& Theta2) {
  return sym(Theta2 * (2.0 * u.R * u.R - u.b * u.b.transpose() -
                       u.e * u.e.transpose()));
}

ModifiedDirection modified_direction(const PlantModel& plant,
                                     const ControllerParams& u, double margin) {
  const auto [g, ws] = gradient(plant, u, margin);
  const auto split = project_tangent(u, u, plant.Theta2);
  const double tang_norm = split.tangential.norm();

  ModifiedDirection md;
  if (tang_norm <= 1e-8 * u.norm()) {
    // u is (numerically) norm-balanced: the correction direction vanishes.
    md.dir = -g;
    md.gamma = ParamTriple::zero(plant.dims.n, plant.dims.m2, plant.dims.p1);
    md.degenerate = true;
    return md;
  }
  const double coeff = split.normal.dot(g) / (tang_norm * tang_norm);
  md.gamma = split.tangential * coeff;
  md.dir = md.gamma - g;
  return md;
}

ControllerParams apply_symplectic(const ControllerParams& u, const Mat& Sigma,
                                  const Mat& Theta2) {
  if (Sigma.rows() != u.R.rows() || Sigma.cols() != u.R.rows())
    throw DimensionError("apply_symplectic: Sigma order mismatch");
  const double defect =
      (Sigma * Theta2 * Sigma.transpose() - Theta2).norm();
  if (defect > 1e-9 * (1.0 + Sigma.squaredNorm()))
    throw PreconditionError("apply_symplectic: Sigma is not symplectic");
  const Mat Sinv = Sigma.inverse();
  return {sym(Sinv.transpose() * u.R * Sinv), Sigma * u.b, Sigma * u.e};
}

double directional_second_derivative(const PlantModel& plant,
                                     const GradientWorkspace& ws,
                                     const ParamTriple& v) {
  const int n = plant.dims.n;
  const auto& dm = plant.dims;
  const Mat& Th2 = plant.Theta2;
  const Mat Th2inv = -Th2;
  const Mat DJD = plant.D * plant.J1 * plant.D.transpose();
  const Mat& bm = ws.realization.b;
  const Mat& em = ws.realization.e;
  const Mat& cm = ws.realization.c;

  // Direction-induced perturbations of the realization...
  const Mat Dc = -plant.d * plant.J2 * v.b.transpose() * Th2inv;
  const Mat Da = 2.0 * Th2 * v.R -
                 asym(v.e * DJD * em.transpose() +
                      v.b * plant.J2 * bm.transpose()) *
                     Th2inv;

  // ...and of the closed-loop matrices.
  Mat DA = Mat::Zero(2 * n, 2 * n);
  DA.topRightCorner(n, n) = plant.E * Dc;
  DA.bottomLeftCorner(n, n) = v.e * plant.C;
  DA.bottomRightCorner(n, n) = Da;
  Mat DB = Mat::Zero(2 * n, dm.m1 + dm.m2);
  DB.bottomLeftCorner(n, dm.m1) = v.e * plant.D;
  DB.bottomRightCorner(n, dm.m2) = v.b;
  Mat DC = Mat::Zero(dm.r, 2 * n);
  DC.rightCols(n) = plant.G * Dc;

  const Mat& P = ws.gramians.P;
  const Mat& Q = ws.gramians.Q;
  const Mat DP = ws.op->solve(2.0 * sym(DA * P + DB * ws.sys.B.transpose()));
  const Mat DQ =
      ws.op_t->solve(2.0 * sym(Q * DA + ws.sys.C.transpose() * DC));
  const Mat DH = DQ * P + Q * DP;

  const auto Hb = ws.gramians.blocks(ws.gramians.H);
  const auto Qb = ws.gramians.blocks(Q);
  const auto Pb = ws.gramians.blocks(P);
  const auto DHb = ws.gramians.blocks(DH);
  const auto DQb = ws.gramians.blocks(DQ);
  const auto DPb = ws.gramians.blocks(DP);

  const Mat psi = asym(Hb.b22 * Th2inv);
  const Mat Dpsi = asym(DHb.b22 * Th2inv);
  const Mat GtG = plant.G.transpose() * plant.G;
  const Mat Dchi =
      Th2inv * (DHb.b12.transpose() * plant.E +
                DPb.b21 * plant.F.transpose() * plant.G +
                DPb.b22 * cm.transpose() * GtG + Pb.b22 * Dc.transpose() * GtG);

  // Perturbed gradient blocks, contracted against the direction.
  const Mat DdR = -2.0 * sym(Th2 * DHb.b22);
  const Mat Ddb = DQb.b21 * plant.E * plant.d + DQb.b22 * bm + Qb.b22 * v.b -
                  (Dpsi * bm + psi * v.b) * plant.J2 -
                  Dchi * plant.d * plant.J2;
  const Mat Dde = DHb.b21 * plant.C.transpose() +
                  DQb.b21 * plant.B * plant.D.transpose() + DQb.b22 * em +
                  Qb.b22 * v.e - (Dpsi * em + psi * v.e) * DJD;

  return DdR.cwiseProduct(v.R).sum() + Ddb.cwiseProduct(v.b).sum() +
         Dde.cwiseProduct(v.e).sum();
}

double directional_second_derivative(const PlantModel& plant,
                                     const ControllerParams& u,
                                     const ParamTriple& v, double margin) {
  const auto res = gradient(plant, u, margin);
  return directional_second_derivative(plant, res.ws, v);
}

double hessian_quadratic_form(const PlantModel& plant,
                              const GradientWorkspace& ws, const ParamTriple& v,
                              const ParamTriple& w) {
  return (directional_second_derivative(plant, ws, v + w) -
          directional_second_derivative(plant, ws, v - w)) /
         4.0;
}

double hessian_quadratic_form(const PlantModel& plant,
                              const ControllerParams& u, const ParamTriple& v,
                              const ParamTriple& w, double margin) {
  const auto res = gradient(plant, u, margin);
  return hessian_quadratic_form(plant, res.ws, v, w);
}

}  // namespace cqlqg
