#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "magstrip/tridiagonal.hpp"

using namespace magstrip;

namespace {

SymTridiagonal<double> random_tridiagonal(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  SymTridiagonal<double> t{Eigen::VectorXd(n), Eigen::VectorXd(n - 1)};
  for (Eigen::Index i = 0; i < n; ++i) t.diag[i] = 3 * u(rng);
  for (Eigen::Index i = 0; i + 1 < n; ++i) t.off[i] = u(rng);
  return t;
}

Eigen::MatrixXd dense(const SymTridiagonal<double>& t) {
  const Eigen::Index n = t.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.diagonal() = t.diag;
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = t.off[i];
  return a;
}

}  // namespace

TEST_SUITE("tridiagonal") {
  TEST_CASE("Sturm counts agree with a dense eigensolver") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto t = random_tridiagonal(40, seed);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(t)).eigenvalues();
      for (double sigma : {-5.0, -1.0, 0.0, 0.3, 2.0, 7.0}) {
        const auto expected = (ev.array() < sigma).count();
        CHECK(count_below(t, sigma) == expected);
      }
      for (Eigen::Index k = 0; k < 40; k += 7) CHECK(kth_eigenvalue(t, k) == doctest::Approx(ev[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("generalized pencil with a diagonal mass") {
    const auto t = random_tridiagonal(30, 11);
    Eigen::VectorXd mass = Eigen::VectorXd::LinSpaced(30, 0.5, 2.0);
    const Eigen::VectorXd root = mass.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = root.asDiagonal() * dense(t) * root.asDiagonal();
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(scaled).eigenvalues();
    for (double sigma : {-3.0, 0.0, 1.5}) CHECK(count_below(t, mass, sigma) == (ev.array() < sigma).count());
    CHECK(kth_eigenvalue(t, mass, 4) == doctest::Approx(ev[4]).epsilon(1e-12));
  }

  TEST_CASE("inverse iteration returns a unit eigenvector") {
    const auto t = random_tridiagonal(60, 3);
    const double e = kth_eigenvalue(t, 2);
    const auto r = inverse_iteration(t, e, 1e-12);
    CHECK(r.converged);
    CHECK(r.vector.norm() == doctest::Approx(1.0));
    CHECK((apply(t, r.vector) - e * r.vector).norm() < 1e-10);
  }

  TEST_CASE("pivoted LU solves shifted systems") {
    const auto t = random_tridiagonal(25, 8);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(25, -1.0, 1.0);
    const ShiftedTridiagonalLU<double> lu(t, 0.37);
    const Eigen::VectorXd x = lu.solve(b);
    Eigen::MatrixXd a = dense(t);
    a.diagonal().array() -= 0.37;
    CHECK((a * x - b).norm() < 1e-10 * b.norm() * a.norm());
  }

  TEST_CASE("kernels are generic in the scalar type") {
    SymTridiagonal<float> t{Eigen::VectorXf::Constant(8, 2.0f), Eigen::VectorXf::Constant(7, -1.0f)};
    // Eigenvalues of the path Laplacian: 2 - 2 cos(j pi / 9).
    const float e0 = kth_eigenvalue(t, Eigen::Index{0});
    CHECK(e0 == doctest::Approx(2 - 2 * std::cos(3.14159265f / 9)).epsilon(1e-5));
    CHECK(count_below(t, 2.0f) == 4);
  }
}
