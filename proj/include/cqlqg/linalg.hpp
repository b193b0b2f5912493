#pragma once

#include <Eigen/Dense>
#include <utility>

#include "cqlqg/errors.hpp"

namespace cqlqg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Stability margin: a matrix counts as Hurwitz when its spectral abscissa is
// below -margin.  Lyapunov conditioning degrades as the abscissa approaches 0,
// so the boundary layer [-margin, 0) is treated as unstable.
inline constexpr double kHurwitzMargin = 1e-9;

Mat sym(const Mat& M);
Mat asym(const Mat& M);

// M = S + K with S symmetric, K antisymmetric.
std::pair<Mat, Mat> split_sym_asym(const Mat& M);

// I_{n/2} (x) J with J = [[0,1],[-1,0]]; n must be even.  Squares to -I.
Mat ccr_block(int n);

struct HurwitzReport {
  bool hurwitz = false;
  double spectral_abscissa = 0.0;  // max_k Re(lambda_k)
};

HurwitzReport is_hurwitz(const Mat& M, double margin = kHurwitzMargin);

// Column-stacked vectorization and its inverse.
Vec vec(const Mat& M);
Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols);

// I (x) M + M (x) I: the matrix of X |-> M X + X M^T under vec().
Mat kron_sum(const Mat& M);

struct LyapunovSolution {
  Mat X;
  double residual_norm = 0.0;  // ||A X + X A^T + W||_F after the solve
};

// Unique X with A X + X A^T + W = 0, via the vectorized Kronecker-sum system.
// X is re-symmetrized when W is symmetric (the exact solution then is).
// check_stability=false skips the eigenvalue test for callers that already
// verified it.
LyapunovSolution solve_lyapunov(const Mat& A, const Mat& W,
                                bool check_stability = true);

// Cached LU of kron_sum(A) for repeated Lyapunov solves against one A
// (descent steps, Hessian assembly).  The caller guarantees A is Hurwitz.
class LyapunovOperator {
 public:
  explicit LyapunovOperator(const Mat& A);

  // X with A X + X A^T + W = 0; symmetrized when W is symmetric.
  Mat solve(const Mat& W) const;

 private:
  Eigen::Index n_;
  Eigen::PartialPivLU<Mat> lu_;
};

// exp(lambda * Theta2 * phi) for symmetric phi: an element of the symplectic
// group of Theta2.  Throws PreconditionError when phi is not symmetric.
Mat symplectic_exp(const Mat& Theta2, const Mat& phi, double lambda);

}  // namespace cqlqg
