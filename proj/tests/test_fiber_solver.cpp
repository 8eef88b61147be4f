#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magstrip/fiber_solver.hpp"
#include "oracles.hpp"

using namespace magstrip;

namespace {

double exact_b0(int j, double L, double k) {
  const double q = j * std::numbers::pi / (2 * L);
  return q * q + k * k;
}

}  // namespace

TEST_SUITE("fiber_solver") {
  TEST_CASE("assembly on a three-point grid") {
    const auto t0 = assemble_fiber({0.0, 1.0, 0.0}, 3);
    for (int i = 0; i < 3; ++i) CHECK(t0.diag[i] == doctest::Approx(8.0));
    for (int i = 0; i < 2; ++i) CHECK(t0.off[i] == doctest::Approx(-4.0));

    const auto t1 = assemble_fiber({1.0, 1.0, 0.0}, 3);
    CHECK(t1.diag[0] == doctest::Approx(8.25));
    CHECK(t1.diag[1] == doctest::Approx(8.0));
    CHECK(t1.diag[2] == doctest::Approx(8.25));

    const auto t2 = assemble_fiber({1.0, 1.0, 2.0}, 3);
    CHECK(t2.diag[0] == doctest::Approx(14.25));
    CHECK(t2.diag[1] == doctest::Approx(12.0));
    CHECK(t2.diag[2] == doctest::Approx(10.25));
  }

  TEST_CASE("invalid specifications") {
    CHECK_THROWS_AS(assemble_fiber({1.0, 1.0, 0.0}, 2), Error);
    CHECK_THROWS_AS(assemble_fiber({1.0, 0.0, 0.0}, 10), Error);
    CHECK_THROWS_AS(assemble_fiber({-1.0, 1.0, 0.0}, 10), Error);
    CHECK_THROWS_AS(solve_fiber({1.0, 1.0, std::nan("")}, 1), Error);
  }

  TEST_CASE("free strip: exact levels shifted by k^2") {
    for (double k : {0.0, 1.5, -0.5}) {
      const auto sol = solve_fiber({0.0, 1.0, k}, 5);
      for (int j = 1; j <= 5; ++j) {
        const double e = exact_b0(j, 1.0, k);
        CHECK(std::abs(sol.pairs[j - 1].energy - e) <= 10 * 1e-9 * e);
      }
    }
    CHECK(solve_fiber({0.0, 1.0, 0.0}, 2).pairs[1].energy == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-9));
  }

  TEST_CASE("second-order convergence of the plain scheme") {
    const int n = 255;
    for (int j = 1; j <= 3; ++j) {
      const double e = exact_b0(j, 1.0, 0.3);
      const double coarse = eigen_lowest({0.0, 1.0, 0.3}, n, j, 1e-9, false).back().energy;
      const double fine = eigen_lowest({0.0, 1.0, 0.3}, 2 * n + 1, j, 1e-9, false).back().energy;
      const double ratio = (coarse - e) / (fine - e);
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
  }

  TEST_CASE("magnetic strip against Chebyshev collocation") {
    for (double k : {0.0, 0.7, -1.3}) {
      const auto cheb = oracle::chebyshev_eigenvalues([k](double x) { return (x - k) * (x - k); }, 1.0);
      const auto sol = solve_fiber({1.0, 1.0, k}, 4);
      for (int j = 0; j < 4; ++j) CHECK(sol.pairs[j].energy == doctest::Approx(cheb[j]).epsilon(1e-8));
    }
  }

  TEST_CASE("regression constant: lowest threshold at b = 1, L = 1") {
    const double cheb = oracle::chebyshev_eigenvalues([](double x) { return x * x; }, 1.0).front();
    CHECK(cheb == doctest::Approx(2.5969196640644).epsilon(1e-12));
    CHECK(solve_fiber({1.0, 1.0, 0.0}, 1).pairs[0].energy == doctest::Approx(2.5969196640644).epsilon(1e-9));
  }

  TEST_CASE("wide strip approaches the Landau levels") {
    const auto wide = solve_fiber({1.0, 8.0, 0.0}, 2);
    CHECK(std::abs(wide.pairs[0].energy - 1.0) <= 1e-6);
    CHECK(std::abs(wide.pairs[1].energy - 3.0) <= 1e-6);
    // Dirichlet truncation at L = 8 is already invisible at this tolerance.
    const auto wider = solve_fiber({1.0, 12.0, 0.0}, 2, {3072, 1e-9, true});
    CHECK(std::abs(wide.pairs[1].energy - wider.pairs[1].energy) <= 1e-6);
  }

  TEST_CASE("eigenfunction invariants") {
    const auto sol = solve_fiber({1.0, 1.0, 0.4}, 4, {1024, 1e-9, true});
    for (int i = 0; i < 4; ++i) {
      const auto& p = sol.pairs[i];
      CHECK(p.j == i + 1);
      CHECK(p.psi.values()[0] == 0.0);
      CHECK(p.psi.values()[p.psi.size() - 1] == 0.0);
      CHECK(p.psi.values()[1] > 0);
      CHECK(p.psi.nodes()[0] == doctest::Approx(-1.0));
      CHECK(std::abs(inner_product(p.psi, p.psi) - 1) <= 1e-10);
      for (int j = 0; j < i; ++j) CHECK(std::abs(inner_product(p.psi, sol.pairs[j].psi)) <= 1e-6);
      if (i > 0) CHECK(p.energy > sol.pairs[i - 1].energy);
    }
  }

  TEST_CASE("Feynman-Hellmann slope") {
    // b = 0: the slope is 2k exactly.
    for (double k : {0.0, 0.8, -2.0}) {
      const auto sol = solve_fiber({0.0, 1.5, k}, 3);
      for (double s : sol.slopes) CHECK(s == doctest::Approx(2 * k).epsilon(1e-9));
    }
    const auto at0 = solve_fiber({1.0, 1.0, 0.0}, 1);
    CHECK(std::abs(at0.slopes[0]) < 1e-9);

    const double h = 1e-3, k = 0.7;
    const double fd = (solve_fiber({1.0, 1.0, k + h}, 1).pairs[0].energy - solve_fiber({1.0, 1.0, k - h}, 1).pairs[0].energy) / (2 * h);
    CHECK(solve_fiber({1.0, 1.0, k}, 1).slopes[0] == doctest::Approx(fd).epsilon(1e-5));
  }
}
