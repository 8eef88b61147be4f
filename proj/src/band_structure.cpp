#include "magstrip/band_structure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "magstrip/parallel.hpp"

namespace magstrip {

double default_k_max(double b, double threshold_m) { return 3 * std::sqrt(threshold_m + 5 * b); }

std::vector<Band> sample_bands(const BandContext& context, int m, double k_max, Eigen::Index n_k) {
  if (!(k_max > 0)) throw Error(ErrorKind::InvalidSpec, "k_max must be positive");
  if (n_k < 5 || n_k % 2 == 0) throw Error(ErrorKind::InvalidSpec, "n_k must be odd and >= 5");
  if (m < 1) throw Error(ErrorKind::InvalidSpec, "need at least one band");

  const Eigen::Index center = n_k / 2;
  Eigen::VectorXd k(n_k);
  for (Eigen::Index i = 0; i <= center; ++i) {
    const double v = k_max * static_cast<double>(i) / static_cast<double>(center);
    k[center + i] = v;
    k[center - i] = -v;
  }

  Eigen::MatrixXd energy(n_k, m), slope(n_k, m);
  parallel_for(static_cast<std::size_t>(n_k), [&](std::size_t i) {
    const FiberSpec spec{context.b, context.L, k[static_cast<Eigen::Index>(i)]};
    const FiberSolution sol = solve_fiber(spec, m, context.solver);
    for (int j = 0; j < m; ++j) {
      energy(static_cast<Eigen::Index>(i), j) = sol.pairs[j].energy;
      slope(static_cast<Eigen::Index>(i), j) = sol.slopes[j];
    }
  });

  // Two momentum steps on each side guarantee the five nodes the fit needs.
  const double k_fit = std::max(0.2, 2 * k_max / static_cast<double>(center) * (1 + 1e-9));
  std::vector<Band> bands;
  for (int j = 0; j < m; ++j) {
    Band band;
    band.j = j + 1;
    band.context = context;
    band.k = k;
    band.energy = energy.col(j);
    band.slope = slope.col(j);
    band.threshold = energy(center, j);
    band.mu = fit_curvature(band, k_fit).mu;
    bands.push_back(std::move(band));
  }
  return bands;
}

Band sample_band(const BandContext& context, int j, double k_max, Eigen::Index n_k) {
  if (j < 1) throw Error(ErrorKind::InvalidSpec, "band index must be >= 1");
  auto bands = sample_bands(context, j, k_max, n_k);
  return std::move(bands.back());
}

double band_derivative(const BandContext& context, int j, double k) {
  if (j < 1) throw Error(ErrorKind::InvalidSpec, "band index must be >= 1");
  const FiberSolution sol = solve_fiber({context.b, context.L, k}, j, context.solver);
  return sol.slopes.back();
}

CurvatureFit fit_curvature(const Band& band, double k_fit) {
  std::vector<Eigen::Index> used;
  for (Eigen::Index i = 0; i < band.k.size(); ++i)
    if (std::abs(band.k[i]) <= k_fit) used.push_back(i);
  if (used.size() < 5)
    throw Error(ErrorKind::FitDegenerate, "only " + std::to_string(used.size()) + " samples within |k| <= k_fit");

  const auto rows = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd design(rows, 2);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double k2 = band.k[used[r]] * band.k[used[r]];
    design(r, 0) = k2;
    design(r, 1) = k2 * k2;
    rhs[r] = band.energy[used[r]] - band.threshold;
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef[0], coef[1], static_cast<int>(rows)};
}

double curvature_mu(const Band& band, double k_fit) { return fit_curvature(band, k_fit).mu; }

double inverse_band(const Band& band, double s) {
  const Eigen::Index c = band.zero_index();
  const Eigen::Index last = band.k.size() - 1;
  const double rise = band.energy[last] - band.threshold;
  if (!(s >= 0)) throw Error(ErrorKind::OutOfRange, "inverse band needs s >= 0");
  if (s > rise) throw Error(ErrorKind::OutOfRange, "s exceeds the sampled band rise " + std::to_string(rise));
  if (s == 0) return 0.0;

  // On k >= 0 the band is an increasing function of t = k^2; interpolate there.
  auto t_at = [&](Eigen::Index i) { return band.k[i] * band.k[i]; };
  auto g_at = [&](Eigen::Index i) { return band.energy[i] - band.threshold; };

  Eigen::Index lo = c, hi = last;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (g_at(mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  const Eigen::Index i0 = std::clamp<Eigen::Index>(lo, c, last - 2);
  const double t0 = t_at(i0), t1 = t_at(i0 + 1), t2 = t_at(i0 + 2);
  const double g0 = g_at(i0), g1 = g_at(i0 + 1), g2 = g_at(i0 + 2);
  auto interp = [&](double t) {
    return g0 * (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2)) + g1 * (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2)) +
           g2 * (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
  };

  double a = t_at(lo), b = t_at(hi);
  for (int it = 0; it < 200 && b - a > 1e-16 * std::max(1.0, b); ++it) {
    const double m = 0.5 * (a + b);
    if (interp(m) < s)
      a = m;
    else
      b = m;
  }
  return std::sqrt(0.5 * (a + b));
}

std::vector<double> thresholds(const std::vector<Band>& bands) {
  std::vector<double> out;
  for (const auto& band : bands) out.push_back(band.threshold);
  return out;
}

namespace {

struct Bracket {
  int n;        // number of thresholds strictly below E
  double dist;  // distance to the nearest threshold
};

Bracket bracket_energy(const std::vector<Band>& bands, double energy) {
  if (bands.empty()) throw Error(ErrorKind::InvalidArgument, "no bands supplied");
  for (std::size_t r = 0; r < bands.size(); ++r)
    if (bands[r].j != static_cast<int>(r) + 1)
      throw Error(ErrorKind::InvalidArgument, "bands must be supplied as 1..m in order");
  const auto z = thresholds(bands);
  int n = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (double e : z) {
    if (e < energy) ++n;
    dist = std::min(dist, std::abs(energy - e));
  }
  if (dist <= 1e-12 * std::max(1.0, std::abs(energy)))
    throw Error(ErrorKind::AtThreshold, "energy " + std::to_string(energy) + " coincides with a threshold");
  if (n == 0) throw Error(ErrorKind::EmptyWindow, "energy lies below the first threshold");
  if (n == static_cast<int>(bands.size()))
    throw Error(ErrorKind::OutOfRange, "band " + std::to_string(n + 1) + " is needed to bracket the energy");
  return {n, dist};
}

bool pairwise_disjoint(std::vector<Preimage> p) {
  std::sort(p.begin(), p.end(), [](const Preimage& a, const Preimage& b) { return a.k_lo < b.k_lo; });
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (!(p[i].k_hi < p[i + 1].k_lo)) return false;
  return true;
}

}  // namespace

std::vector<Preimage> window_preimages(const std::vector<Band>& bands, double energy, double delta) {
  const Bracket br = bracket_energy(bands, energy);
  std::vector<Preimage> out;
  for (int r = 0; r < br.n; ++r) {
    const Band& band = bands[static_cast<std::size_t>(r)];
    out.push_back({band.j, inverse_band(band, energy - delta - band.threshold),
                   inverse_band(band, energy + delta - band.threshold)});
  }
  return out;
}

double separation_delta(const std::vector<Band>& bands, double energy) {
  const Bracket br = bracket_energy(bands, energy);
  const double upper = bands[static_cast<std::size_t>(br.n)].threshold;
  double delta = br.dist / 2;
  for (int halving = 0; halving <= 40; ++halving, delta /= 2) {
    if (!(energy + delta < upper)) continue;
    if (br.n == 1 || pairwise_disjoint(window_preimages(bands, energy, delta))) return delta;
  }
  throw Error(ErrorKind::NoConvergence, "no separating radius found after 40 halvings");
}

MourreReport mourre_constant(const std::vector<Band>& bands, double energy, double delta) {
  const Bracket br = bracket_energy(bands, energy);
  const double lower = bands[static_cast<std::size_t>(br.n - 1)].threshold;
  const double upper = bands[static_cast<std::size_t>(br.n)].threshold;
  if (!(delta > 0) || !(energy - delta > lower) || !(energy + delta < upper))
    throw Error(ErrorKind::AtThreshold, "window [E - delta, E + delta] touches a threshold");

  MourreReport report;
  report.window_lo = energy - delta;
  report.window_hi = energy + delta;
  report.n = br.n;
  report.preimages = window_preimages(bands, energy, delta);
  report.preimages_disjoint = pairwise_disjoint(report.preimages);
  report.mourre_constant = std::numeric_limits<double>::infinity();
  for (const Preimage& p : report.preimages) {
    const Band& band = bands[static_cast<std::size_t>(p.r - 1)];
    // Endpoints get fresh fiber solves; interior points reuse the sampled slopes.
    double c = std::min(p.k_lo * band_derivative(band.context, p.r, p.k_lo),
                        p.k_hi * band_derivative(band.context, p.r, p.k_hi));
    for (Eigen::Index i = band.zero_index(); i < band.k.size(); ++i)
      if (band.k[i] > p.k_lo && band.k[i] < p.k_hi) c = std::min(c, band.k[i] * band.slope[i]);
    report.per_band_constants.push_back(c);
    report.mourre_constant = std::min(report.mourre_constant, c);
  }
  return report;
}

}  // namespace magstrip
