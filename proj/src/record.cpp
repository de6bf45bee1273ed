#include "nlwlab/record.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace nlwlab {

SolverState SolverState::zeros(double dr, double r_max, double t) {
  if (!(dr > 0.0) || !(r_max > dr))
    throw InvalidArgument(fmt::format("grid: need 0 < dr < r_max (dr = {}, r_max = {})", dr, r_max));
  const double n = r_max / dr;
  const auto cells = static_cast<std::size_t>(std::llround(n));
  if (std::abs(n - static_cast<double>(cells)) > 1e-9 * n)
    throw InvalidArgument(fmt::format("grid: r_max = {} is not a multiple of dr = {}", r_max, dr));
  SolverState s;
  s.t = t;
  s.dr = dr;
  s.r_max = static_cast<double>(cells) * dr;
  s.phi.assign(cells + 1, 0.0);
  s.pi.assign(cells + 1, 0.0);
  return s;
}

void SolverState::check() const {
  if (!(dr > 0.0)) throw InvalidArgument("state: dr must be positive");
  if (phi.size() != pi.size()) throw InvalidArgument("state: phi and pi lengths differ");
  if (phi.size() < 3) throw InvalidArgument("state: need at least 3 nodes");
  const double expect = r_max / dr + 1.0;
  if (std::abs(expect - static_cast<double>(phi.size())) > 1e-6)
    throw InvalidArgument(fmt::format("state: {} nodes but r_max/dr + 1 = {}", phi.size(), expect));
}

FieldPoint SpacetimeRecord::node(std::size_t j, std::size_t i) const {
  const auto k = index(j, i);
  return {time(j), radius(i), phi[k], dphi_dt[k], dphi_dr[k]};
}

double SpacetimeRecord::causal_radius(double t) const {
  const double reach = 2.0 * r_max - support_radius - (t - t0) - causal_margin;
  return std::min(r_rec_max(), reach);
}

bool SpacetimeRecord::covers(double t, double r, double tol) const {
  if (t < t0 - tol || t > t_final() + tol) return false;
  if (r < -tol) return false;
  return r <= causal_radius(t) + tol;
}

FieldPoint SpacetimeRecord::sample(double t, double r) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t) + r);
  if (!covers(t, r, tol))
    throw CoverageError(fmt::format(
        "record '{}': point (t={}, r={}) outside coverage t in [{}, {}], r <= {}", id, t, r, t0,
        t_final(), causal_radius(t)));
  const double x = std::clamp((t - t0) / dt_rec, 0.0, static_cast<double>(nt - 1));
  const double y = std::clamp(r / dr_rec, 0.0, static_cast<double>(nr - 1));
  auto j = static_cast<std::size_t>(x);
  auto i = static_cast<std::size_t>(y);
  // snap to nodes so lattice-aligned samples are exact
  double a = x - static_cast<double>(j);
  double b = y - static_cast<double>(i);
  if (a > 1.0 - 1e-10) { ++j; a = 0.0; }
  if (b > 1.0 - 1e-10) { ++i; b = 0.0; }
  if (a < 1e-10) a = 0.0;
  if (b < 1e-10) b = 0.0;
  const std::size_t j1 = std::min(j + 1, nt - 1);
  const std::size_t i1 = std::min(i + 1, nr - 1);
  auto lerp2 = [&](const std::vector<double>& f) {
    const double f00 = f[index(j, i)];
    const double f01 = f[index(j, i1)];
    const double f10 = f[index(j1, i)];
    const double f11 = f[index(j1, i1)];
    return (1 - a) * ((1 - b) * f00 + b * f01) + a * ((1 - b) * f10 + b * f11);
  };
  return {t, r, lerp2(phi), lerp2(dphi_dt), lerp2(dphi_dr)};
}

const SolverState* SpacetimeRecord::snapshot_at(double t, double tol) const {
  const SolverState* best = nullptr;
  for (const auto& s : snapshots)
    if (std::abs(s.t - t) <= tol && (!best || std::abs(s.t - t) < std::abs(best->t - t))) best = &s;
  return best;
}

}  // namespace nlwlab
