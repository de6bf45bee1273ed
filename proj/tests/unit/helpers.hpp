#pragma once

#include <cmath>

#include "nlwlab/initial_data.hpp"
#include "nlwlab/solver.hpp"

namespace testing {

inline nlwlab::EvolveResult run_gaussian(double p, double dr, double r_max, double T, bool nonlinear = true,
                                         double cfl = 0.5, std::vector<double> snapshots = {}) {
  nlwlab::ModelParams m;
  m.p = p;
  const auto data = nlwlab::make_initial_data({}, dr, r_max, m);
  nlwlab::EvolveOptions o;
  o.dt = cfl * dr;
  o.n_steps = static_cast<std::size_t>(std::llround(T / o.dt));
  o.nonlinear = nonlinear;
  o.snapshot_times = std::move(snapshots);
  return nlwlab::evolve(data.state, m, o);
}

// Exact d = 3 linear solution for phi0 = exp(-r^2), phi1 = 0.
inline double gaussian_wave(double t, double r) {
  const auto g = [](double x) { return x * std::exp(-x * x); };
  if (r == 0.0) {
    const auto gp = [](double x) { return (1.0 - 2.0 * x * x) * std::exp(-x * x); };
    return gp(t);
  }
  return (g(r + t) + g(r - t)) / (2.0 * r);
}

}  // namespace testing

namespace testing {

// Record with analytic fields, far from any causal cut.
template <class F>
nlwlab::SpacetimeRecord synthetic_record(double dt, double dr, std::size_t nt, std::size_t nr, F field) {
  nlwlab::SpacetimeRecord rec;
  rec.dt_rec = dt;
  rec.dr_rec = dr;
  rec.dt_solver = dt / 4.0;
  rec.dr_solver = dr / 2.0;
  rec.nt = nt;
  rec.nr = nr;
  rec.r_max = 10.0 * dr * static_cast<double>(nr);
  rec.support_radius = 0.0;
  rec.causal_margin = 0.0;
  rec.phi.resize(nt * nr);
  rec.dphi_dt.resize(nt * nr);
  rec.dphi_dr.resize(nt * nr);
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t i = 0; i < nr; ++i) {
      const auto f = field(rec.time(j), rec.radius(i));
      const auto k = rec.index(j, i);
      rec.phi[k] = f[0];
      rec.dphi_dt[k] = f[1];
      rec.dphi_dr[k] = f[2];
    }
  return rec;
}

}  // namespace testing
