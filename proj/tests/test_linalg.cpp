// Dense linear-algebra kernels: symmetric/antisymmetric splits, the CCR
// block matrix, stability reports, Lyapunov solvers, and the symplectic
// exponential.  Closed-form cases are checked against hand solutions; the
// general solver against its own defining equation and an independently
// assembled Kronecker system.
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "cqlqg/linalg.hpp"

using namespace cqlqg;

namespace {

Mat random_mat(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = gauss(eng);
  return M;
}

}  // namespace

TEST_CASE("split_sym_asym recovers the unique decomposition") {
  SUBCASE("identity is purely symmetric") {
    const auto [S, K] = split_sym_asym(Mat::Identity(2, 2));
    CHECK((S - Mat::Identity(2, 2)).norm() == 0.0);
    CHECK(K.norm() == 0.0);
  }
  SUBCASE("the 2x2 rotation generator is purely antisymmetric") {
    Mat J(2, 2);
    J << 0, 1, -1, 0;
    const auto [S, K] = split_sym_asym(J);
    CHECK(S.norm() == 0.0);
    CHECK((K - J).norm() == 0.0);
  }
  SUBCASE("generic matrix: hand-computed parts") {
    Mat M(2, 2);
    M << 1, 2, 3, 4;
    const auto [S, K] = split_sym_asym(M);
    Mat Sref(2, 2), Kref(2, 2);
    Sref << 1, 2.5, 2.5, 4;
    Kref << 0, -0.5, 0.5, 0;
    CHECK((S - Sref).norm() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK((K - Kref).norm() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK((S + K - M).norm() == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("recomposition and individual helpers agree on random input") {
    const Mat M = random_mat(5, 5, 11);
    const auto [S, K] = split_sym_asym(M);
    CHECK((S - sym(M)).norm() == 0.0);
    CHECK((K - asym(M)).norm() == 0.0);
    CHECK((S - S.transpose()).norm() <= 1e-15 * S.norm());
    CHECK((K + K.transpose()).norm() <= 1e-15 * (1.0 + K.norm()));
    CHECK((S + K - M).norm() <= 1e-15 * M.norm());
  }
  SUBCASE("non-square input is rejected") {
    CHECK_THROWS_AS(split_sym_asym(Mat::Zero(2, 3)), DimensionError);
    CHECK_THROWS_AS(split_sym_asym(Mat::Zero(3, 2)), DimensionError);
  }
}

TEST_CASE("ccr_block builds the canonical commutation matrix") {
  SUBCASE("order two") {
    Mat J(2, 2);
    J << 0, 1, -1, 0;
    CHECK((ccr_block(2) - J).norm() == 0.0);
  }
  SUBCASE("order four is the block diagonal of two 2x2 cells") {
    const Mat T = ccr_block(4);
    Mat ref = Mat::Zero(4, 4);
    ref(0, 1) = 1;
    ref(1, 0) = -1;
    ref(2, 3) = 1;
    ref(3, 2) = -1;
    CHECK((T - ref).norm() == 0.0);
  }
  SUBCASE("squares to minus the identity and is antisymmetric") {
    for (int n : {2, 4, 6, 8}) {
      const Mat T = ccr_block(n);
      CHECK((T * T + Mat::Identity(n, n)).norm() == 0.0);
      CHECK((T + T.transpose()).norm() == 0.0);
    }
  }
  SUBCASE("odd or non-positive order is rejected") {
    CHECK_THROWS_AS(ccr_block(3), DimensionError);
    CHECK_THROWS_AS(ccr_block(1), DimensionError);
    CHECK_THROWS_AS(ccr_block(0), DimensionError);
    CHECK_THROWS_AS(ccr_block(-2), DimensionError);
  }
}

TEST_CASE("is_hurwitz reports the spectral abscissa") {
  SUBCASE("strictly stable matrix") {
    const auto rep = is_hurwitz(-Mat::Identity(2, 2));
    CHECK(rep.hurwitz);
    CHECK(rep.spectral_abscissa == doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("matrix with eigenvalues in the right half plane") {
    Mat A(2, 2);
    A << 0.9534, -1.1165, 0.4193, 1.8821;
    const auto rep = is_hurwitz(A);
    CHECK_FALSE(rep.hurwitz);
    // tr^2 - 4 det < 0 here: a complex pair with common real part tr / 2
    CHECK(rep.spectral_abscissa ==
          doctest::Approx(A.trace() / 2).epsilon(1e-10));
  }
  SUBCASE("marginally stable rotation fails the margin test") {
    Mat A(2, 2);
    A << 0, 0.1, -0.1, 0;  // eigenvalues +-0.1i, abscissa 0
    const auto rep = is_hurwitz(A);
    CHECK_FALSE(rep.hurwitz);
    CHECK(rep.spectral_abscissa == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("margin shifts the accept boundary") {
    const Mat A = -0.5 * Mat::Identity(2, 2);
    CHECK(is_hurwitz(A, 0.1).hurwitz);
    CHECK_FALSE(is_hurwitz(A, 0.6).hurwitz);
  }
}

TEST_CASE("vec and unvec are mutually inverse in column-major order") {
  Mat M(2, 3);
  M << 1, 3, 5, 2, 4, 6;
  const Vec v = vec(M);
  for (int i = 0; i < 6; ++i) CHECK(v(i) == double(i + 1));
  CHECK((unvec(v, 2, 3) - M).norm() == 0.0);
  const Mat N = random_mat(4, 7, 5);
  CHECK((unvec(vec(N), 4, 7) - N).norm() == 0.0);
  CHECK_THROWS_AS(unvec(Vec::Zero(5), 2, 3), DimensionError);
}

TEST_CASE("kron_sum represents X -> M X + X M'") {
  SUBCASE("zero and identity") {
    CHECK(kron_sum(Mat::Zero(2, 2)).norm() == 0.0);
    CHECK((kron_sum(Mat::Identity(2, 2)) - 2.0 * Mat::Identity(4, 4)).norm() ==
          0.0);
  }
  SUBCASE("action matches the explicit map on random input") {
    const Mat M = random_mat(3, 3, 21);
    const Mat X = random_mat(3, 3, 22);
    const Vec lhs = kron_sum(M) * vec(X);
    const Mat rhs = M * X + X * M.transpose();
    CHECK((lhs - vec(rhs)).norm() <= 1e-12 * (1.0 + rhs.norm()));
  }
  SUBCASE("spectrum consists of pairwise eigenvalue sums") {
    Mat M(2, 2);
    M << -1, 0, 0, -3;
    const Eigen::VectorXcd eigs = kron_sum(M).eigenvalues();
    std::vector<double> got(4);
    for (int i = 0; i < 4; ++i) got[i] = eigs(i).real();
    std::sort(got.begin(), got.end());
    const std::vector<double> want = {-6, -4, -4, -2};
    for (int i = 0; i < 4; ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("solve_lyapunov solves A X + X A' + W = 0") {
  SUBCASE("scalar closed form: A = -I, W = I gives X = I/2") {
    const auto sol = solve_lyapunov(-Mat::Identity(2, 2), Mat::Identity(2, 2));
    CHECK((sol.X - 0.5 * Mat::Identity(2, 2)).norm() <= 1e-14);
    CHECK(sol.residual_norm <= 1e-14);
  }
  SUBCASE("diagonal closed form: X_ij = W_ij / (|a_i| + |a_j|)") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = -1;
    A(1, 1) = -2;
    const Mat W = Mat::Ones(2, 2);
    Mat ref(2, 2);
    ref << 0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25;
    const auto sol = solve_lyapunov(A, W);
    CHECK((sol.X - ref).norm() <= 1e-14);
  }
  SUBCASE("random stable system: defining equation and symmetry") {
    const Mat M = random_mat(4, 4, 31);
    const Mat A = M - (M.cwiseAbs().rowwise().sum().maxCoeff() + 1.0) *
                          Mat::Identity(4, 4);  // diagonally shifted: stable
    REQUIRE(is_hurwitz(A).hurwitz);
    const Mat Whalf = random_mat(4, 4, 32);
    const Mat W = Whalf * Whalf.transpose();
    const auto sol = solve_lyapunov(A, W);
    const double scale = A.norm() * sol.X.norm() + W.norm();
    CHECK((A * sol.X + sol.X * A.transpose() + W).norm() <= 1e-12 * scale);
    CHECK((sol.X - sol.X.transpose()).norm() == 0.0);  // re-symmetrized
    CHECK(sol.residual_norm <= 1e-12 * scale);
    const Eigen::SelfAdjointEigenSolver<Mat> es(sol.X);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12 * sol.X.norm());
  }
  SUBCASE("asymmetric W is solved without re-symmetrization") {
    Mat A = -Mat::Identity(2, 2);
    Mat W(2, 2);
    W << 0, 1, -1, 0;
    const auto sol = solve_lyapunov(A, W);
    // -X - X + W = 0  =>  X = W / 2, genuinely antisymmetric.
    CHECK((sol.X - 0.5 * W).norm() <= 1e-14);
  }
  SUBCASE("non-Hurwitz A is refused with the abscissa attached") {
    Mat A(2, 2);
    A << 0.9534, -1.1165, 0.4193, 1.8821;
    try {
      solve_lyapunov(A, Mat::Identity(2, 2));
      FAIL("expected UnstableError");
    } catch (const UnstableError& err) {
      CHECK(err.spectral_abscissa > 1.0);
    }
  }
}

TEST_CASE("LyapunovOperator matches solve_lyapunov across repeated W") {
  const Mat M = random_mat(4, 4, 41);
  const Mat A =
      M - (M.cwiseAbs().rowwise().sum().maxCoeff() + 1.0) * Mat::Identity(4, 4);
  REQUIRE(is_hurwitz(A).hurwitz);
  const LyapunovOperator op(A);
  for (std::uint64_t s : {51u, 52u, 53u}) {
    const Mat Whalf = random_mat(4, 4, s);
    const Mat W = Whalf * Whalf.transpose();
    const Mat X = op.solve(W);
    const Mat Xref = solve_lyapunov(A, W).X;
    CHECK((X - Xref).norm() <= 1e-12 * (1.0 + Xref.norm()));
    CHECK((X - X.transpose()).norm() == 0.0);
  }
}

TEST_CASE("symplectic_exp generates the symplectic group of Theta2") {
  const Mat Theta2 = ccr_block(2);
  SUBCASE("lambda = 0 is the identity") {
    const Mat S = symplectic_exp(Theta2, sym(random_mat(2, 2, 61)), 0.0);
    CHECK((S - Mat::Identity(2, 2)).norm() <= 1e-15);
  }
  SUBCASE("phi = I integrates to a rotation") {
    const Mat S = symplectic_exp(Theta2, Mat::Identity(2, 2), 1.0);
    Mat ref(2, 2);
    ref << std::cos(1.0), std::sin(1.0), -std::sin(1.0), std::cos(1.0);
    CHECK((S - ref).norm() <= 1e-12);
  }
  SUBCASE("group relation preserved for random symmetric generators") {
    for (int n : {2, 4}) {
      const Mat T = ccr_block(n);
      const Mat phi = sym(random_mat(n, n, 70 + n));
      const Mat S = symplectic_exp(T, phi, 0.7);
      CHECK((S * T * S.transpose() - T).norm() <= 1e-10 * (1.0 + S.squaredNorm()));
      CHECK(std::abs(S.determinant() - 1.0) <= 1e-10);
      // one-parameter group: S(a) S(b) = S(a + b)
      const Mat Sa = symplectic_exp(T, phi, 0.3);
      const Mat Sb = symplectic_exp(T, phi, 0.4);
      CHECK((Sa * Sb - S).norm() <= 1e-10 * (1.0 + S.norm()));
    }
  }
  SUBCASE("non-symmetric generator is rejected") {
    Mat phi(2, 2);
    phi << 0, 1, 0, 0;
    CHECK_THROWS_AS(symplectic_exp(Theta2, phi, 1.0), PreconditionError);
  }
}
