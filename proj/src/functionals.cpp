#include "nlwlab/functionals.hpp"

#include <fmt/format.h>

#include <cmath>

#include "nlwlab/multipliers.hpp"
#include "nlwlab/solver.hpp"

namespace nlwlab {

std::vector<double> FunctionalSeries::parameters() const {
  std::vector<double> v;
  for (const auto& pr : pairs) v.push_back(pr.first);
  return v;
}

std::vector<double> FunctionalSeries::values() const {
  std::vector<double> v;
  for (const auto& pr : pairs) v.push_back(pr.second);
  return v;
}

void FunctionalSeries::check(double tol) const {
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!std::isfinite(pairs[k].second))
      throw InvalidArgument(fmt::format("series '{}': non-finite value at {} = {}", label, parameter, pairs[k].first));
    if (pairs[k].second < -tol)
      throw InvalidArgument(fmt::format("series '{}': negative value {} at {} = {}", label, pairs[k].second,
                                        parameter, pairs[k].first));
    if (k > 0 && !(pairs[k].first > pairs[k - 1].first))
      throw InvalidArgument(fmt::format("series '{}': parameters not strictly increasing", label));
  }
}

namespace {

double abs_pow_p1(double phi, double p) { return (p + 1.0) * potential(phi, p); }

void require_time(const SpacetimeRecord& rec, double T, const char* what) {
  if (T > rec.t_final() + 1e-9 * std::max(1.0, T) || T <= rec.t0)
    throw CoverageError(fmt::format("{}: T = {} outside the record time range ({}, {}]", what, T, rec.t0,
                                    rec.t_final()));
}

}  // namespace

WeightedDensity energy_density(SliceKind kind, const ModelParams& m) {
  const double p = m.p;
  const double a = m.d - 1;
  switch (kind) {
    case SliceKind::time_slice:
      return {a, [p](const FieldPoint& x) {
                return x.dphi_dt * x.dphi_dt + x.dphi_dr * x.dphi_dr + 2.0 * potential(x.phi, p);
              }};
    case SliceKind::outgoing_null:
      return {a, [p](const FieldPoint& x) { return x.L() * x.L() + 2.0 * potential(x.phi, p); }};
    case SliceKind::incoming_null:
      return {a, [p](const FieldPoint& x) { return x.Lbar() * x.Lbar() + 2.0 * potential(x.phi, p); }};
    default:
      break;
  }
  throw InvalidArgument(fmt::format("energy_flux: no energy integrand for {}", to_string(kind)));
}

double energy_flux(const SpacetimeRecord& rec, const SliceSpec& slice) {
  double total = 0.0;
  for (const auto& seg : sample_slice(rec, slice))
    total += integrate_segment(seg, energy_density(seg.kind, rec.model), rec.model.d);
  return total;
}

double energy_partition_residual(const SpacetimeRecord& rec, double u1, double u2, double v) {
  if (u1 < -1.0 || !(u1 < u2) || !(v > u2 + 2.0))
    throw InvalidArgument(fmt::format("energy partition: need -1 <= u1 < u2 and v > u2 + 2 ({}, {}, {})", u1, u2, v));
  const double e1 = energy_flux(rec, SliceSpec::hybrid(u1, v));
  const double e2 = energy_flux(rec, SliceSpec::hybrid(u2, v));
  const double eb = energy_flux(rec, SliceSpec::incoming(v, u1, u2));
  return e1 - e2 - eb;
}

double iled_bulk(const SpacetimeRecord& rec, double T, const ModelParams& m) {
  require_time(rec, T, "iled_bulk");
  return integrate_region(rec, RegionSpec::slab(rec.t0, T), iled_weighted(m));
}

double iled_bulk_region(const SpacetimeRecord& rec, double u, const ModelParams& m) {
  return integrate_region(rec, RegionSpec::future(u), iled_weighted(m));
}

double rweighted_flux_integrand(const FieldPoint& x, int d) {
  const double a = x.L() + 0.5 * (d - 1) * x.phi / x.r;
  return a * a;
}

RWeightedResult rweighted_bulk_and_flux(const SpacetimeRecord& rec, const std::vector<double>& u_list,
                                        double gamma, const ModelParams& m, double T) {
  if (!(gamma >= 1.0 && gamma <= m.gamma0))
    throw InvalidArgument(fmt::format("rweighted: gamma = {} outside [1, gamma0 = {}]", gamma, m.gamma0));
  if (std::isinf(T)) T = rec.t_final();
  require_time(rec, T, "rweighted_bulk_and_flux");
  const double d = m.d, eps = m.epsilon, p = m.p;
  const WeightedDensity bulk{gamma + d - 4, [=](const FieldPoint& x) {
                               const double a = x.r * x.L() + 0.5 * (d - 1) * x.phi;
                               const double vplus = 1.0 + 0.5 * (x.t + x.r);
                               return a * a + std::pow(x.r, 3.0 - gamma) * std::pow(vplus, gamma - eps - 1.0) *
                                                  abs_pow_p1(x.phi, p);
                             }};
  const WeightedDensity flux{gamma + d - 3, [=](const FieldPoint& x) {
                               const double a = x.r * x.L() + 0.5 * (d - 1) * x.phi;
                               return a * a;
                             }};
  RWeightedResult out;
  out.bulk = integrate_region(rec, RegionSpec::slab(rec.t0, T), bulk);
  out.flux.label = fmt::format("rweighted_flux(gamma={:g})", gamma);
  out.flux.parameter = "u";
  out.flux.params = m;
  out.flux.provenance = rec.id;
  for (double u : u_list) out.flux.pairs.emplace_back(u, integrate_slice(rec, SliceSpec::outgoing(u), flux));
  return out;
}

double spacetime_norm(const SpacetimeRecord& rec, double q, double weight_exponent, double T) {
  if (!(q >= 1.0)) throw InvalidArgument(fmt::format("spacetime_norm: q = {} must be >= 1", q));
  if (weight_exponent < 0.0) throw InvalidArgument("spacetime_norm: weight exponent must be >= 0");
  require_time(rec, T, "spacetime_norm");
  const WeightedDensity w{rec.model.d - 1.0, [=](const FieldPoint& x) {
                            const double a = std::abs(x.phi);
                            if (a == 0.0) return 0.0;
                            const double vplus = 1.0 + 0.5 * (x.t + x.r);
                            return std::pow(vplus, weight_exponent) * std::exp(q * std::log(a));
                          }};
  return std::pow(integrate_region(rec, RegionSpec::slab(rec.t0, T), w), 1.0 / q);
}

double weighted_initial_energy(const SolverState& s, const ModelParams& m, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 2.0))
    throw InvalidArgument(fmt::format("weighted_initial_energy: gamma = {} outside [0, 2]", gamma));
  s.check();
  const auto g = radial_derivative(s);
  std::vector<double> e(s.nodes());
  for (std::size_t i = 0; i < s.nodes(); ++i)
    e[i] = std::pow(1.0 + s.r(i), gamma) * (s.pi[i] * s.pi[i] + g[i] * g[i] + 2.0 * potential(s.phi[i], m.p));
  return sphere_area(m.d) * integrate_radial_samples(e, s.dr, m.d - 1.0);
}

FunctionalSeries exterior_flux_series(const SpacetimeRecord& rec, const std::vector<double>& u_list) {
  FunctionalSeries out;
  out.label = "exterior_flux";
  out.parameter = "u";
  out.params = rec.model;
  out.provenance = rec.id;
  for (double u : u_list) {
    if (u > -1.0) throw InvalidArgument(fmt::format("exterior_flux_series: u = {} must be <= -1", u));
    out.pairs.emplace_back(u, energy_flux(rec, SliceSpec::outgoing(u)));
  }
  return out;
}

FunctionalSeries foliation_flux_series(const SpacetimeRecord& rec, const std::vector<double>& u_list) {
  FunctionalSeries out;
  out.label = "foliation_flux";
  out.parameter = "u";
  out.params = rec.model;
  out.provenance = rec.id;
  for (double u : u_list) out.pairs.emplace_back(u, energy_flux(rec, SliceSpec::hybrid(u)));
  return out;
}

std::pair<double, double> hardy_sides(const SpacetimeRecord& rec, double t) {
  const int d = rec.model.d;
  const auto slice = SliceSpec::time(t);
  const double lhs = integrate_slice(rec, slice, {d - 3.0, [](const FieldPoint& x) { return x.phi * x.phi; }});
  const double c = 2.0 / (d - 2.0);
  const double rhs =
      c * c * integrate_slice(rec, slice, {d - 1.0, [](const FieldPoint& x) { return x.dphi_dr * x.dphi_dr; }});
  return {lhs, rhs};
}

}  // namespace nlwlab
