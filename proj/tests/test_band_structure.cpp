#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magstrip/band_structure.hpp"

using namespace magstrip;

namespace {

constexpr double kPi = std::numbers::pi;

BandContext ctx(double b, double L, Eigen::Index n = 1024) { return {b, L, SolverOptions{n, 1e-9, true}}; }

double free_threshold(int j, double L) { return std::pow(j * kPi / (2 * L), 2); }

// Fourth-order central second difference at k = 0, using evenness E(-k) = E(k),
// then one Richardson step in h.
double mu_oracle(const BandContext& c, int j, double h) {
  auto e = [&](double k) { return solve_fiber({c.b, c.L, k}, j, c.solver).pairs.back().energy; };
  const double e0 = e(0);
  auto d2 = [&](double step) { return (-2 * e(2 * step) + 32 * e(step) - 30 * e0) / (12 * step * step); };
  const double coarse = d2(h), fine = d2(h / 2);
  return 0.5 * (fine + (fine - coarse) / 15);
}

}  // namespace

TEST_SUITE("band_structure") {
  TEST_CASE("free strip bands are parabolas") {
    const auto bands = sample_bands(ctx(0.0, 1.0), 3, 2.0, 41);
    for (const Band& band : bands) {
      const double e0 = free_threshold(band.j, 1.0);
      CHECK(band.threshold == doctest::Approx(e0).epsilon(1e-8));
      // Energy errors of order tol * E are divided by k_fit^2 in the fit.
      CHECK(band.mu == doctest::Approx(1.0).epsilon(1e-6));
      for (Eigen::Index i = 0; i < band.k.size(); ++i) {
        const double k = band.k[i];
        CHECK(band.energy[i] == doctest::Approx(e0 + k * k).epsilon(1e-8));
        CHECK(band.slope[i] == doctest::Approx(2 * k).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("band invariants at b = 1, L = 1") {
    const auto bands = sample_bands(ctx(1.0, 1.0), 3, 3.0, 61);
    for (const Band& band : bands) {
      const Eigen::Index c = band.zero_index();
      CHECK(band.k[c] == 0.0);
      for (Eigen::Index i = 1; i <= c; ++i) {
        CHECK(std::abs(band.energy[c + i] - band.energy[c - i]) <= 1e-8);
        CHECK(band.energy[c + i] > band.energy[c + i - 1]);
        CHECK(band.k[c + i] * band.slope[c + i] > 0);
        CHECK(band.k[c - i] * band.slope[c - i] > 0);
      }
      CHECK(band.threshold > 2 * band.j - 1);
      CHECK(band.mu > 0);
    }
  }

  TEST_CASE("thresholds exceed the Landau levels") {
    for (double b : {0.5, 1.0, 2.0})
      for (double L : {0.5, 1.0, 2.0}) {
        const auto sol = solve_fiber({b, L, 0.0}, 5, {1024, 1e-9, true});
        for (const auto& p : sol.pairs) CHECK(p.energy > (2 * p.j - 1) * b);
      }
  }

  TEST_CASE("curvature against a finite-difference oracle") {
    const auto band = sample_band(ctx(1.0, 1.0), 1, 1.0, 101);
    const double oracle = mu_oracle(band.context, 1, 1e-2);
    CHECK(band.mu == doctest::Approx(oracle).epsilon(1e-5));
    CHECK(band.mu == doctest::Approx(0.9323945).epsilon(1e-6));
    CHECK_THROWS_AS(fit_curvature(band, 0.02), Error);
  }

  TEST_CASE("wide strips flatten the lowest band") {
    double previous = 1e9;
    for (double L : {2.0, 4.0, 8.0}) {
      const auto band = sample_band(ctx(1.0, L, 2048), 1, 1.0, 101);
      CHECK(band.mu < previous);
      previous = band.mu;
    }
    CHECK(previous < 1e-3);
  }

  TEST_CASE("Feynman-Hellmann derivative against central differences") {
    const BandContext c = ctx(1.0, 1.0);
    const double h = 1e-3;
    for (int j : {1, 2, 3})
      for (double k : {-1.7, 0.35, 0.7, 2.2}) {
        const double fd = (solve_fiber({1.0, 1.0, k + h}, j, c.solver).pairs.back().energy -
                           solve_fiber({1.0, 1.0, k - h}, j, c.solver).pairs.back().energy) /
                          (2 * h);
        const double fh = band_derivative(c, j, k);
        CHECK(std::abs(fh - fd) <= 1e-5 * (1 + std::abs(fh)));
      }
    CHECK(std::abs(band_derivative(c, 1, 0.0)) < 1e-9);
  }

  TEST_CASE("large-momentum growth") {
    for (int j : {1, 2}) {
      const double e0 = solve_fiber({1.0, 1.0, 0.0}, j).pairs.back().energy;
      const double k0 = 10 * std::max(std::sqrt(e0), 1.0);
      for (double k : {k0, 1.5 * k0}) {
        const double ratio = solve_fiber({1.0, 1.0, k}, j).pairs.back().energy / (k * k);
        CHECK(ratio >= 0.9);
        CHECK(ratio <= 1.1);
      }
    }
  }

  TEST_CASE("inverse band") {
    const auto free = sample_band(ctx(0.0, 1.0), 2, 2.0, 41);
    CHECK(inverse_band(free, 0.0) == 0.0);
    for (double s : {1e-6, 0.01, 0.5, 3.9}) CHECK(inverse_band(free, s) == doctest::Approx(std::sqrt(s)).epsilon(1e-8));
    CHECK_THROWS_AS(inverse_band(free, 4.1), Error);
    CHECK_THROWS_AS(inverse_band(free, -1.0), Error);

    const auto band = sample_band(ctx(1.0, 1.0), 1, 1.0, 201);
    const double target = 1 / std::sqrt(band.mu);
    double lo = 1e9, hi = 0;
    for (double s = 1e-6; s <= 0.3; s *= 3) {
      const double ratio = inverse_band(band, s) / std::sqrt(s);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.5 * target);
    CHECK(hi < 2 * target);
    for (double s : {1e-4, 1e-5, 1e-6}) CHECK(inverse_band(band, s) / std::sqrt(s) == doctest::Approx(target).epsilon(1e-2));
  }

  TEST_CASE("separation radius") {
    const auto bands = sample_bands(ctx(0.0, 1.0), 4, 6.0, 121);
    const double e1 = free_threshold(1, 1), e2 = free_threshold(2, 1), e3 = free_threshold(3, 1);

    // One band below: the radius is half the distance to the thresholds.
    const double e = 0.3 * e1 + 0.7 * e2;
    CHECK(separation_delta(bands, e) == doctest::Approx(0.5 * std::min(e - e1, e2 - e)).epsilon(1e-8));

    // Two bands below: b = 0 preimages [sqrt(E - d - e_r), sqrt(E + d - e_r)] separate iff 2 d < e2 - e1.
    for (double t : {0.1, 0.5, 0.9}) {
      const double en = e2 + t * (e3 - e2);
      double oracle = 0.5 * std::min(en - e2, e3 - en);
      while (!(2 * oracle < e2 - e1 && en + oracle < e3)) oracle /= 2;
      const double d = separation_delta(bands, en);
      CHECK(d == doctest::Approx(oracle).epsilon(1e-8));
      const double b1_lo = std::sqrt(en - d - e1), b2_hi = std::sqrt(en + d - e2);
      CHECK(b2_hi < b1_lo);
    }
    CHECK_THROWS_AS(separation_delta(bands, bands[1].threshold), Error);
    CHECK_THROWS_AS(separation_delta(bands, 0.5 * e1), Error);
  }

  TEST_CASE("Mourre constant") {
    const auto free = sample_bands(ctx(0.0, 1.0), 2, 4.0, 161);
    const double e1 = free_threshold(1, 1), e2 = free_threshold(2, 1);
    const double e = 0.5 * (e1 + e2), delta = separation_delta(free, e);
    const MourreReport r = mourre_constant(free, e, delta);
    CHECK(r.n == 1);
    CHECK(r.mourre_constant == doctest::Approx(2 * (e - delta - e1)).epsilon(1e-7));
    CHECK(r.preimages_disjoint);
    CHECK_THROWS_AS(mourre_constant(free, free[1].threshold, 0.1), Error);

    const auto bands = sample_bands(ctx(1.0, 1.0), 4, 6.0, 121);
    const auto z = thresholds(bands);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
      const double mid = 0.5 * (z[i] + z[i + 1]);
      const MourreReport m = mourre_constant(bands, mid, separation_delta(bands, mid));
      CHECK(m.mourre_constant > 0);
      CHECK(m.preimages_disjoint);
      CHECK(m.per_band_constants.size() == i + 1);
    }
  }
}
