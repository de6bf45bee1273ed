#include "nlwlab/scattering.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlwlab/geometry.hpp"
#include "nlwlab/solver.hpp"

namespace nlwlab {

double required_r_max(const SolverState& s, double duration) {
  return support_radius(s) + std::abs(duration) + std::max(1.0, 20.0 * s.dr);
}

SolverState linear_propagate(const SolverState& s, double t_target, const ModelParams& m, double cfl) {
  s.check();
  const double span = t_target - s.t;
  if (span == 0.0) return s;
  const double need = required_r_max(s, span);
  if (need > s.r_max)
    throw CoverageError(fmt::format(
        "linear_propagate: propagating {} in time needs r_max >= {} (grid has {})", span, need, s.r_max));
  const double c = std::min(cfl, max_cfl(m.d));
  const auto n = static_cast<std::size_t>(std::ceil(std::abs(span) / (c * s.dr) - 1e-9));
  SolverState out = advance(s, m, span / static_cast<double>(n), n, false);
  out.t = t_target;
  return out;
}

OracleField dalembert_oracle_d3(const RadialProfile& data, double t, const std::vector<double>& r, int d) {
  if (d != 3) throw InvalidArgument(fmt::format("dalembert_oracle_d3: d = {} (only d = 3)", d));
  auto g = [&](double x) { return x * data.phi0(std::abs(x)); };
  auto gp = [&](double x) { const double a = std::abs(x); return data.phi0(a) + a * data.dphi0(a); };
  auto h = [&](double x) { return x * data.phi1(std::abs(x)); };
  auto hint = [&](double a, double b) {
    // h is odd, so the integral over [a, b] equals the one over [|a|, b] when a < 0 < b
    if (a < 0.0 && b > 0.0) a = -a;
    if (b <= a) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    const double step = 1.0;
    for (double x = a; x < b; x += step)
      total += gauss_kronrod<double, 31>::integrate(h, x, std::min(b, x + step), 10, 1e-14);
    return total;
  };
  auto d5 = [](auto&& f, double x, double e) {
    return (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * e);
  };

  OracleField out;
  for (double ri : r) {
    if (ri > 0.0) {
      const double rphi = 0.5 * (g(ri + t) + g(ri - t)) + 0.5 * hint(ri - t, ri + t);
      const double rphit = 0.5 * (gp(ri + t) - gp(ri - t)) + 0.5 * (h(ri + t) + h(ri - t));
      out.phi.push_back(rphi / ri);
      out.dphi_dt.push_back(rphit / ri);
    } else {
      // limits: phi(t,0) = g'(t) + h(t), d_t phi(t,0) = g''(t) + h'(t)
      const double e = 1e-3;
      out.phi.push_back(gp(t) + h(t));
      out.dphi_dt.push_back(t == 0.0 ? data.phi1(0.0) : d5(gp, t, e) + d5(h, t, e));
    }
  }
  return out;
}

double energy_norm_difference(const SolverState& a, const SolverState& b, int d) {
  a.check();
  b.check();
  if (a.nodes() != b.nodes() || std::abs(a.dr - b.dr) > 1e-12 * a.dr)
    throw InvalidArgument("energy_norm_difference: states live on different grids");
  SolverState w = a;
  for (std::size_t i = 0; i < w.nodes(); ++i) {
    w.phi[i] -= b.phi[i];
    w.pi[i] -= b.pi[i];
  }
  return energy_norm(w, d);
}

double energy_norm(const SolverState& a, int d) {
  const auto g = radial_derivative(a);
  std::vector<double> e(a.nodes());
  for (std::size_t i = 0; i < a.nodes(); ++i) e[i] = g[i] * g[i] + a.pi[i] * a.pi[i];
  return std::sqrt(sphere_area(d) * integrate_radial_samples(e, a.dr, d - 1.0));
}

SolverState state_from_record(const SpacetimeRecord& rec, double t) {
  if (const auto* s = rec.snapshot_at(t, 0.5 * std::abs(rec.dt_solver) + 1e-9)) return *s;
  const double x = (t - rec.t0) / rec.dt_rec;
  const double j = std::round(x);
  if (std::abs(x - j) > 1e-6 || j < 0 || j > static_cast<double>(rec.nt - 1))
    throw CoverageError(fmt::format("state_from_record: t = {} is neither a snapshot nor a record time", t));
  const auto jj = static_cast<std::size_t>(j);
  SolverState s;
  s.t = rec.time(jj);
  s.dr = rec.dr_rec;
  s.r_max = rec.r_rec_max();
  s.phi.assign(rec.phi.begin() + rec.index(jj, 0), rec.phi.begin() + rec.index(jj, 0) + rec.nr);
  s.pi.assign(rec.dphi_dt.begin() + rec.index(jj, 0), rec.dphi_dt.begin() + rec.index(jj, 0) + rec.nr);
  return s;
}

namespace {

struct PulledBack {
  SolverState w1, w2;
};

PulledBack pull_back_pair(const SpacetimeRecord& rec, double t1, double t2, const ModelParams& m, const char* who) {
  const SolverState s1 = state_from_record(rec, t1);
  const SolverState s2 = state_from_record(rec, t2);
  // pull back with the run's own step ratio; RK4 is not time reversible and a
  // coarser pull-back leaves a floor growing like t
  const double cfl = rec.dr_solver > 0.0 ? std::abs(rec.dt_solver) / rec.dr_solver : 0.5;
  PulledBack out{linear_propagate(s1, rec.t0, m, cfl), linear_propagate(s2, rec.t0, m, cfl)};
  if (out.w1.nodes() != out.w2.nodes())
    throw InvalidArgument(fmt::format("{}: states at t1 and t2 come from different resolutions", who));
  return out;
}

// Sine transform norm for any exponent s > -3/2 (the rho integral converges
// at 0 there). Checked entry points restrict s further.
double hankel_norm_d3(const std::vector<double>& f, double dr, double s, const char* who) {
  if (f.size() < 8 || !(dr > 0.0)) throw InvalidArgument(fmt::format("{}: need a sampled profile", who));
  double peak = 0.0;
  for (double x : f) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return 0.0;
  const std::size_t n = f.size();
  const std::size_t tail = std::max<std::size_t>(2, n / 20);
  for (std::size_t i = n - tail; i < n; ++i)
    if (std::abs(f[i]) > 1e-10 * peak)
      throw InvalidArgument(fmt::format("{}: profile has not decayed near r_max (|f| = {} at r = {})", who,
                                        std::abs(f[i]), static_cast<double>(i) * dr));

  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(f[i]) > 1e-15 * peak) last = i;
  const double R = std::max(1.0, static_cast<double>(last + 1) * dr);
  const double drho = std::numbers::pi / (16.0 * R);
  const double rho_max = std::numbers::pi / dr;
  const auto nrho = static_cast<std::size_t>(std::ceil(rho_max / drho));

  double acc = 0.0;
  for (std::size_t k = 0; k < nrho; ++k) {
    const double rho = (static_cast<double>(k) + 0.5) * drho;
    double sum = 0.0;
    for (std::size_t i = 1; i <= last + 1 && i < n; ++i) {
      const double r = static_cast<double>(i) * dr;
      sum += r * f[i] * std::sin(r * rho);
    }
    const double fhat = 4.0 * std::numbers::pi / rho * sum * dr;
    acc += fhat * fhat * std::pow(rho, 2.0 * s + 2.0);
  }
  acc *= 4.0 * std::numbers::pi * drho / std::pow(2.0 * std::numbers::pi, 3);
  return std::sqrt(acc);
}

}  // namespace

double scatter_cauchy(const SpacetimeRecord& rec, double t1, double t2, const ModelParams& m) {
  if (t2 < t1) throw InvalidArgument(fmt::format("scatter_cauchy: need t1 <= t2 ({}, {})", t1, t2));
  if (t1 == t2) return 0.0;
  const auto pb = pull_back_pair(rec, t1, t2, m, "scatter_cauchy");
  return energy_norm_difference(pb.w1, pb.w2, m.d);
}

double scatter_cauchy_sobolev(const SpacetimeRecord& rec, double t1, double t2, const ModelParams& m, double s) {
  if (m.d != 3) throw InvalidArgument(fmt::format("scatter_cauchy_sobolev: d = {}, only d = 3", m.d));
  if (!(s > 0.0 && s <= 1.0)) throw InvalidArgument(fmt::format("scatter_cauchy_sobolev: s = {} outside (0, 1]", s));
  if (t2 < t1) throw InvalidArgument(fmt::format("scatter_cauchy_sobolev: need t1 <= t2 ({}, {})", t1, t2));
  if (t1 == t2) return 0.0;
  const auto pb = pull_back_pair(rec, t1, t2, m, "scatter_cauchy_sobolev");
  std::vector<double> dphi(pb.w1.nodes()), dpi(pb.w1.nodes());
  for (std::size_t i = 0; i < dphi.size(); ++i) {
    dphi[i] = pb.w2.phi[i] - pb.w1.phi[i];
    dpi[i] = pb.w2.pi[i] - pb.w1.pi[i];
  }
  const double a = hankel_norm_d3(dphi, pb.w1.dr, s, "scatter_cauchy_sobolev");
  const double b = hankel_norm_d3(dpi, pb.w1.dr, s - 1.0, "scatter_cauchy_sobolev");
  return std::sqrt(a * a + b * b);
}

FunctionalSeries scatter_cauchy_series(const SpacetimeRecord& rec, const std::vector<double>& t_list,
                                       const ModelParams& m) {
  FunctionalSeries out;
  out.label = "scatter_cauchy";
  out.parameter = "t";
  out.params = m;
  out.provenance = rec.id;
  for (double t : t_list) out.pairs.emplace_back(t, scatter_cauchy(rec, t, 2.0 * t, m));
  return out;
}

double sobolev_norm_radial_d3(const std::vector<double>& f, double dr, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw InvalidArgument(fmt::format("sobolev_norm_radial_d3: s = {} outside (0, 1]", s));
  return hankel_norm_d3(f, dr, s, "sobolev_norm_radial_d3");
}

}  // namespace nlwlab
