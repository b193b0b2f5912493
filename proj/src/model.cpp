#include "cqlqg/model.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace cqlqg {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

// Standard-normal stream with a pinned algorithm (mt19937_64 + Box-Muller),
// so fixed seeds reproduce bit-identical draws on every platform.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] keeps the log finite; u2 in [0,1).
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

void fill_rowwise(Mat& M, GaussianSampler& gauss, double scale) {
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) M(i, j) = scale * gauss();
}

// Draw order is part of the determinism contract: R (then symmetrized), b, e.
ControllerParams draw(const PlantModel& plant, GaussianSampler& gauss,
                      double scale) {
  const auto& dm = plant.dims;
  ControllerParams u = ParamTriple::zero(dm.n, dm.m2, dm.p1);
  fill_rowwise(u.R, gauss, scale);
  u.R = sym(u.R);
  fill_rowwise(u.b, gauss, scale);
  fill_rowwise(u.e, gauss, scale);
  return u;
}

PrCheck measure(const Mat& defect, double term_norm_sum, double tol) {
  PrCheck c;
  c.residual = defect.norm();
  c.scale = 1.0 + term_norm_sum;
  c.pass = c.residual <= tol * c.scale;
  return c;
}

PrReport finish(std::map<std::string, PrCheck> checks, double tol) {
  PrReport rep;
  rep.checks = std::move(checks);
  rep.tol = tol;
  rep.pass = true;
  for (const auto& [name, chk] : rep.checks) rep.pass = rep.pass && chk.pass;
  return rep;
}

}  // namespace

ParamTriple ParamTriple::zero(int n, int m2, int p1) {
  return {Mat::Zero(n, n), Mat::Zero(n, m2), Mat::Zero(n, p1)};
}

double ParamTriple::dot(const ParamTriple& o) const {
  require(R.rows() == o.R.rows() && b.cols() == o.b.cols() &&
              e.cols() == o.e.cols(),
          "ParamTriple::dot: shape mismatch");
  return R.cwiseProduct(o.R).sum() + b.cwiseProduct(o.b).sum() +
         e.cwiseProduct(o.e).sum();
}

double ParamTriple::norm() const { return std::sqrt(squared_norm()); }

ParamTriple ParamTriple::operator+(const ParamTriple& o) const {
  return {R + o.R, b + o.b, e + o.e};
}

ParamTriple ParamTriple::operator-(const ParamTriple& o) const {
  return {R - o.R, b - o.b, e - o.e};
}

ParamTriple ParamTriple::operator*(double s) const {
  return {s * R, s * b, s * e};
}

ParamTriple ParamTriple::operator-() const { return {-R, -b, -e}; }

PlantModel::PlantModel(PlantDims dims_, Mat A_, Mat B_, Mat C_, Mat D_, Mat E_,
                       Mat F_, Mat G_, Mat d_, std::optional<Mat> theta1)
    : dims(dims_),
      A(std::move(A_)),
      B(std::move(B_)),
      C(std::move(C_)),
      D(std::move(D_)),
      E(std::move(E_)),
      F(std::move(F_)),
      G(std::move(G_)),
      d(std::move(d_)) {
  const auto [n, m1, m2, p1, p2, r] = dims;
  require(n > 0 && n % 2 == 0, "PlantModel: n must be positive even");
  require(m1 > 0 && m1 % 2 == 0, "PlantModel: m1 must be positive even");
  require(m2 > 0 && m2 % 2 == 0, "PlantModel: m2 must be positive even");
  require(p1 > 0 && p2 > 0 && r > 0, "PlantModel: p1, p2, r must be positive");
  require(A.rows() == n && A.cols() == n, "PlantModel: A must be n x n");
  require(B.rows() == n && B.cols() == m1, "PlantModel: B must be n x m1");
  require(C.rows() == p1 && C.cols() == n, "PlantModel: C must be p1 x n");
  require(D.rows() == p1 && D.cols() == m1, "PlantModel: D must be p1 x m1");
  require(E.rows() == n && E.cols() == p2, "PlantModel: E must be n x p2");
  require(F.rows() == r && F.cols() == n, "PlantModel: F must be r x n");
  require(G.rows() == r && G.cols() == p2, "PlantModel: G must be r x p2");
  require(d.rows() == p2 && d.cols() == m2, "PlantModel: d must be p2 x m2");

  Theta2 = ccr_block(n);
  J1 = ccr_block(m1);
  J2 = ccr_block(m2);
  if (theta1.has_value()) {
    Theta1 = std::move(*theta1);
    require(Theta1.rows() == n && Theta1.cols() == n,
            "PlantModel: theta1 override must be n x n");
    if ((Theta1 + Theta1.transpose()).norm() > 1e-12 * (1.0 + Theta1.norm()))
      throw PreconditionError("PlantModel: theta1 override must be antisymmetric");
  } else {
    Theta1 = Theta2;
  }
}

ControllerRealization realize_controller(const PlantModel& plant,
                                         const ControllerParams& u) {
  const auto& dm = plant.dims;
  require(u.R.rows() == dm.n && u.R.cols() == dm.n,
          "realize_controller: R must be n x n");
  require(u.b.rows() == dm.n && u.b.cols() == dm.m2,
          "realize_controller: b must be n x m2");
  require(u.e.rows() == dm.n && u.e.cols() == dm.p1,
          "realize_controller: e must be n x p1");

  const Mat& Th2 = plant.Theta2;
  const Mat gamma = u.e * plant.D * plant.J1 * plant.D.transpose() *
                        u.e.transpose() +
                    u.b * plant.J2 * u.b.transpose();
  ControllerRealization real;
  // Theta2^{-1} = -Theta2 exactly, so the -(1/2) gamma Theta2^{-1} term
  // becomes +(1/2) gamma Theta2.
  real.a = 2.0 * Th2 * u.R + 0.5 * gamma * Th2;
  real.c = plant.d * plant.J2 * u.b.transpose() * Th2;
  real.b = u.b;
  real.e = u.e;
  return real;
}

PrReport check_plant_pr(const PlantModel& plant, double tol) {
  const Mat& Th1 = plant.Theta1;
  const Mat t1 = plant.A * Th1;
  const Mat t2 = Th1 * plant.A.transpose();
  const Mat t3 = plant.B * plant.J1 * plant.B.transpose();
  const Mat t4 = plant.E * plant.d * plant.J2 * plant.d.transpose() *
                 plant.E.transpose();
  const Mat o1 = Th1 * plant.C.transpose();
  const Mat o2 = plant.B * plant.J1 * plant.D.transpose();
  const Mat fD = plant.D * plant.D.transpose() -
                 Mat::Identity(plant.dims.p1, plant.dims.p1);
  const Mat fd = plant.d * plant.d.transpose() -
                 Mat::Identity(plant.dims.p2, plant.dims.p2);

  std::map<std::string, PrCheck> checks;
  checks["state_ccr"] =
      measure(t1 + t2 + t3 + t4, t1.norm() + t2.norm() + t3.norm() + t4.norm(), tol);
  checks["output_commutation"] = measure(o1 + o2, o1.norm() + o2.norm(), tol);
  checks["feedthrough_plant"] = measure(fD, 1.0, tol);
  checks["feedthrough_controller"] = measure(fd, 1.0, tol);
  return finish(std::move(checks), tol);
}

PrReport check_controller_pr(const PlantModel& plant,
                             const ControllerRealization& real, double tol) {
  const Mat& Th2 = plant.Theta2;
  const Mat DJD = plant.D * plant.J1 * plant.D.transpose();
  const Mat t1 = real.a * Th2;
  const Mat t2 = Th2 * real.a.transpose();
  const Mat t3 = real.b * plant.J2 * real.b.transpose();
  const Mat t4 = real.e * DJD * real.e.transpose();
  const Mat o1 = real.c * Th2;
  const Mat o2 = plant.d * plant.J2 * real.b.transpose();
  // Off-diagonal block of the joint CCR identity; implied by the plant and
  // controller output_commutation identities.
  const Mat x1 = plant.E * real.c * Th2;
  const Mat x2 = plant.Theta1 * plant.C.transpose() * real.e.transpose();
  const Mat x3 = plant.B * plant.J1 * plant.D.transpose() * real.e.transpose();
  const Mat x4 = plant.E * plant.d * plant.J2 * real.b.transpose();

  std::map<std::string, PrCheck> checks;
  checks["state_ccr"] =
      measure(t1 + t2 + t3 + t4, t1.norm() + t2.norm() + t3.norm() + t4.norm(), tol);
  checks["output_commutation"] = measure(o1 + o2, o1.norm() + o2.norm(), tol);
  checks["cross_commutation"] =
      measure(x1 + x2 + x3 + x4, x1.norm() + x2.norm() + x3.norm() + x4.norm(), tol);
  return finish(std::move(checks), tol);
}

ControllerParams random_controller(const PlantModel& plant, std::uint64_t seed,
                                   double scale) {
  if (scale < 0.0)
    throw PreconditionError("random_controller: scale must be nonnegative");
  GaussianSampler gauss(seed);
  return draw(plant, gauss, scale);
}

StabilizingDraw random_stabilizing(const PlantModel& plant, std::uint64_t seed,
                                   double scale, long max_tries,
                                   double margin) {
  if (max_tries < 1)
    throw PreconditionError("random_stabilizing: max_tries must be >= 1");
  GaussianSampler gauss(seed);
  const int n = plant.dims.n;
  Mat Acl(2 * n, 2 * n);
  for (long k = 1; k <= max_tries; ++k) {
    ControllerParams u = draw(plant, gauss, scale);
    const auto real = realize_controller(plant, u);
    Acl.topLeftCorner(n, n) = plant.A;
    Acl.topRightCorner(n, n) = plant.E * real.c;
    Acl.bottomLeftCorner(n, n) = real.e * plant.C;
    Acl.bottomRightCorner(n, n) = real.a;
    if (is_hurwitz(Acl, margin).hurwitz) return {std::move(u), k};
  }
  throw StabilizationError(
      "random_stabilizing: no stabilizing draw in " +
          std::to_string(max_tries) + " tries (scale " + std::to_string(scale) + ")",
      max_tries);
}

}  // namespace cqlqg
