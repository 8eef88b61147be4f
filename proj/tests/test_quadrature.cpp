#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magstrip/grid_function.hpp"
#include "magstrip/quadrature.hpp"

using namespace magstrip;

TEST_SUITE("quadrature") {
  TEST_CASE("smooth integrands") {
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(x); }, -1.0, 1.0).value ==
          doctest::Approx(std::exp(1.0) - std::exp(-1.0)).epsilon(1e-13));
  }

  TEST_CASE("semi-infinite and square-root endpoints") {
    CHECK(integrate_to_infinity([](double y) { return std::exp(-y); }, 0.0).value == doctest::Approx(1.0).epsilon(1e-11));
    const auto half_disc = integrate_sqrt_endpoints([](double y) { return std::sqrt(std::max(0.0, 1 - y * y)); }, -1.0, 1.0);
    CHECK(half_disc.value == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
  }

  TEST_CASE("integrable endpoint singularity") {
    // integral of x^-1/2 over (0, 1) is 2.
    const auto r = integrate([](double x) { return 1 / std::sqrt(x); }, 0.0, 1.0, 1e-10, 1e-10);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  }

  TEST_CASE("trapezoid rule on grid functions") {
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
    Eigen::VectorXd v = x.array().square();
    const GridFunction1D f(x, v);
    CHECK(trapezoid(f) == doctest::Approx(1.0 / 3 + 1.0 / (6 * 100 * 100)).epsilon(1e-12));
    CHECK_THROWS_AS(GridFunction1D(Eigen::Vector3d(0, 2, 1), Eigen::Vector3d(1, 1, 1)), Error);
    CHECK_THROWS_AS(GridFunction1D(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)), Error);
  }
}
