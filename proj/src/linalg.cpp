#include "cqlqg/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

namespace cqlqg {

namespace {

bool nearly_symmetric(const Mat& M) {
  if (M.rows() != M.cols()) return false;
  return (M - M.transpose()).norm() <= 1e-12 * (1.0 + M.norm());
}

}  // namespace

Mat sym(const Mat& M) { return 0.5 * (M + M.transpose()); }

Mat asym(const Mat& M) { return 0.5 * (M - M.transpose()); }

std::pair<Mat, Mat> split_sym_asym(const Mat& M) {
  if (M.rows() != M.cols())
    throw DimensionError("split_sym_asym: matrix must be square");
  return {sym(M), asym(M)};
}

Mat ccr_block(int n) {
  if (n <= 0 || n % 2 != 0)
    throw DimensionError("ccr_block: order must be a positive even integer, got " +
                         std::to_string(n));
  Mat T = Mat::Zero(n, n);
  for (int i = 0; i < n; i += 2) {
    T(i, i + 1) = 1.0;
    T(i + 1, i) = -1.0;
  }
  return T;
}

HurwitzReport is_hurwitz(const Mat& M, double margin) {
  if (M.rows() != M.cols())
    throw DimensionError("is_hurwitz: matrix must be square");
  Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
  const double abscissa = es.eigenvalues().real().maxCoeff();
  return {abscissa < -margin, abscissa};
}

Vec vec(const Mat& M) {
  return Eigen::Map<const Vec>(M.data(), M.size());
}

Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols)
    throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat kron_sum(const Mat& M) {
  if (M.rows() != M.cols())
    throw DimensionError("kron_sum: matrix must be square");
  const Eigen::Index n = M.rows();
  Mat K = Mat::Zero(n * n, n * n);
  // I (x) M: block-diagonal copies of M.
  for (Eigen::Index j = 0; j < n; ++j)
    K.block(j * n, j * n, n, n) = M;
  // M (x) I: scalar M(i,j) times the identity in block (i,j).
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n).diagonal().array() += M(i, j);
  return K;
}

LyapunovSolution solve_lyapunov(const Mat& A, const Mat& W,
                                bool check_stability) {
  if (A.rows() != A.cols() || W.rows() != W.cols() || A.rows() != W.rows())
    throw DimensionError("solve_lyapunov: A and W must be square of equal order");
  if (check_stability) {
    const auto rep = is_hurwitz(A, 0.0);
    if (!rep.hurwitz)
      throw UnstableError(
          "solve_lyapunov: A is not Hurwitz (spectral abscissa " +
              std::to_string(rep.spectral_abscissa) + "); no unique solution",
          rep.spectral_abscissa);
  }
  LyapunovOperator op(A);
  Mat X = op.solve(W);
  const double res = (A * X + X * A.transpose() + W).norm();
  return {std::move(X), res};
}

LyapunovOperator::LyapunovOperator(const Mat& A)
    : n_(A.rows()), lu_(kron_sum(A)) {
  if (A.rows() != A.cols())
    throw DimensionError("LyapunovOperator: A must be square");
}

Mat LyapunovOperator::solve(const Mat& W) const {
  if (W.rows() != n_ || W.cols() != n_)
    throw DimensionError("LyapunovOperator::solve: W order mismatch");
  Mat X = unvec(lu_.solve(-vec(W)), n_, n_);
  if (nearly_symmetric(W)) X = sym(X);
  return X;
}

Mat symplectic_exp(const Mat& Theta2, const Mat& phi, double lambda) {
  if (Theta2.rows() != Theta2.cols() || phi.rows() != phi.cols() ||
      Theta2.rows() != phi.rows())
    throw DimensionError("symplectic_exp: Theta2 and phi must be square of equal order");
  if (!nearly_symmetric(phi))
    throw PreconditionError("symplectic_exp: phi must be symmetric");
  // Theta2*phi is Hamiltonian w.r.t. Theta2, so its exponential is symplectic.
  return Mat((lambda * Theta2 * phi).exp());
}

}  // namespace cqlqg
