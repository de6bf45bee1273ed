#include "nlwlab/multipliers.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "nlwlab/solver.hpp"

namespace nlwlab {

std::string MultiplierSpec::label() const {
  switch (kind) {
    case MultiplierKind::energy: return "energy";
    case MultiplierKind::morawetz: return fmt::format("morawetz(eps={:g})", epsilon);
    case MultiplierKind::rweighted: return fmt::format("rweighted(gamma={:g})", gamma);
  }
  return "?";
}

double one_minus_rplus_pow(double r, double eps) { return -std::expm1(-eps * std::log1p(r)); }

double morawetz_f(double r, const ModelParams& m, double eps) {
  return 2.0 / delta_p(m) + one_minus_rplus_pow(r, eps);
}

double morawetz_fprime(double r, double eps) { return eps * std::pow(1.0 + r, -1.0 - eps); }

double morawetz_minus_box_chi(double r, const ModelParams& m, double eps) {
  const double d = m.d;
  const double a = eps * (1.0 + eps) * std::pow(1.0 + r, -2.0 - eps);
  const double b = (d - 3.0) * (morawetz_f(r, m, eps) / r - morawetz_fprime(r, eps)) / r;
  return 0.5 * (d - 1.0) * (a + b) / r;
}

double morawetz_potential_margin(double r, const ModelParams& m, double eps) {
  // delta f - 2 f' r - 1 = 1 + delta (1 - r_+^{-eps}) - 2 eps r r_+^{-1-eps}
  return 1.0 + delta_p(m) * one_minus_rplus_pow(r, eps) - 2.0 * r * morawetz_fprime(r, eps);
}

double morawetz_f_margin(double r, const ModelParams& /*m*/, double eps) {
  // f - f' r - 2/delta = 1 - r_+^{-eps} - eps r r_+^{-1-eps}
  return one_minus_rplus_pow(r, eps) - r * morawetz_fprime(r, eps);
}

double rweighted_potential_coefficient(const ModelParams& m, double gamma) {
  return 0.5 * (m.d - 1) - (gamma + m.d - 1) / (m.p + 1.0);
}

namespace {

void check_spec(const MultiplierSpec& s) {
  if (s.kind == MultiplierKind::rweighted && !(s.gamma >= 1.0 && s.gamma <= 2.0))
    throw InvalidArgument(fmt::format("rweighted multiplier: gamma = {} outside [1, 2]", s.gamma));
  if (s.kind == MultiplierKind::morawetz && !(s.epsilon > 0.0 && s.epsilon < 0.5))
    throw InvalidArgument(fmt::format("morawetz multiplier: eps = {} outside (0, 1/2)", s.epsilon));
}

double abs_pow_p1(double phi, double p) { return (p + 1.0) * potential(phi, p); }

// J_mu = r^{-m} Jhat_mu with Jhat smooth up to r = 0.
struct Scaled {
  double m;
  double jt;  // lower J_t
  double jr;  // lower J_r
};

double scale_power(const MultiplierSpec& s) {
  switch (s.kind) {
    case MultiplierKind::energy: return 0.0;
    case MultiplierKind::morawetz: return 2.0;
    case MultiplierKind::rweighted: return 2.0 - s.gamma;
  }
  return 0.0;
}

Scaled scaled_current(const FieldPoint& x, const MultiplierSpec& s, const ModelParams& m) {
  const double d = m.d;
  const double r = x.r, ph = x.phi, pt = x.dphi_dt, pr = x.dphi_dr;
  const double V = potential(ph, m.p);
  const double e = 0.5 * (pt * pt + pr * pr) + V;
  const double half_q_rr = 0.5 * (pt * pt + pr * pr) - V;  // phi_r^2 - Q/2
  switch (s.kind) {
    case MultiplierKind::energy:
      return {0.0, e, pt * pr};
    case MultiplierKind::morawetz: {
      const double f = morawetz_f(r, m, s.epsilon);
      const double fp = morawetz_fprime(r, s.epsilon);
      const double jt = r * r * f * pt * pr + 0.5 * (d - 1) * r * f * ph * pt;
      const double jr = r * r * f * half_q_rr - 0.25 * (d - 1) * (fp * r - f) * ph * ph +
                        0.5 * (d - 1) * r * f * ph * pr;
      return {2.0, jt, jr};
    }
    case MultiplierKind::rweighted: {
      const double g = s.gamma;
      const double k = 0.25 * (d - 1) * g;
      const double jt = r * r * (e + pt * pr) + 0.5 * (d - 1) * r * ph * pt - k * ph * ph;
      const double jr = r * r * (pt * pr + half_q_rr) - 0.25 * (d - 1) * (g - 1) * ph * ph +
                        0.5 * (d - 1) * r * ph * pr + k * ph * ph;
      return {2.0 - g, jt, jr};
    }
  }
  return {0.0, 0.0, 0.0};
}

double face_combination(SliceKind kind, const Scaled& j) {
  switch (kind) {
    case SliceKind::time_slice: return j.jt;
    case SliceKind::outgoing_null: return j.jr + j.jt;
    case SliceKind::incoming_null: return j.jt - j.jr;
    case SliceKind::timelike_cylinder: return -j.jr;
    case SliceKind::hybrid_sigma: break;
  }
  throw InvalidArgument("boundary density: hybrid_sigma is not a face kind; split it first");
}

// r^k * morawetz bulk, k = 1 for d = 3 and k = 3 otherwise.
double morawetz_bulk_scaled(const FieldPoint& x, const ModelParams& m, double eps, int k) {
  const double d = m.d, p = m.p, r = x.r;
  const double f = morawetz_f(r, m, eps);
  const double fp = morawetz_fprime(r, eps);
  const double rk = std::pow(r, k);
  const double rk1 = std::pow(r, k - 1);
  const double kin = 0.5 * fp * rk * (x.dphi_dt * x.dphi_dt + x.dphi_dr * x.dphi_dr);
  const double pot = ((p - 1) * (d - 1) * f * rk1 - 2.0 * fp * rk) / (2.0 * (p + 1)) *
                     abs_pow_p1(x.phi, p);
  double mass = eps * (1.0 + eps) * std::pow(1.0 + r, -2.0 - eps) * rk1;
  if (m.d != 3) mass += (d - 3) * (f - fp * r) * std::pow(r, k - 3);
  return kin + pot + 0.25 * (d - 1) * mass * x.phi * x.phi;
}

}  // namespace

CurrentComponents current(const FieldPoint& x, const MultiplierSpec& s, const ModelParams& m) {
  check_spec(s);
  if (!(x.r > 0.0)) throw InvalidArgument("current: needs r > 0");
  const Scaled j = scaled_current(x, s, m);
  const double w = std::pow(x.r, -j.m);
  return {-w * j.jt, w * j.jr};
}

double bulk_density(const FieldPoint& x, const MultiplierSpec& s, const ModelParams& m) {
  check_spec(s);
  if (!(x.r > 0.0)) throw InvalidArgument("bulk_density: needs r > 0 (use bulk_weighted at the origin)");
  const auto w = bulk_weighted(s, m);
  return std::pow(x.r, w.alpha - (m.d - 1)) * w.g(x);
}

double boundary_density(const FieldPoint& x, SliceKind kind, const MultiplierSpec& s,
                        const ModelParams& m) {
  check_spec(s);
  if (!(x.r > 0.0)) throw InvalidArgument("boundary_density: needs r > 0");
  const Scaled j = scaled_current(x, s, m);
  return std::pow(x.r, -j.m) * face_combination(kind, j);
}

WeightedDensity bulk_weighted(const MultiplierSpec& s, const ModelParams& m) {
  check_spec(s);
  const double d = m.d;
  switch (s.kind) {
    case MultiplierKind::energy:
      return {d - 1, [](const FieldPoint&) { return 0.0; }};
    case MultiplierKind::morawetz: {
      const int k = m.d == 3 ? 1 : 3;
      const double eps = s.epsilon;
      return {d - 1 - k, [m, eps, k](const FieldPoint& x) { return morawetz_bulk_scaled(x, m, eps, k); }};
    }
    case MultiplierKind::rweighted: {
      const double g = s.gamma;
      const double coef = rweighted_potential_coefficient(m, g);
      const double cd = c_d(m.d);
      return {g + d - 4, [m, g, coef, cd](const FieldPoint& x) {
                const double d = m.d;
                const double a = x.r * x.L() + 0.5 * (d - 1) * x.phi;
                return 0.5 * g * a * a + 0.5 * (2.0 - g) * cd * x.phi * x.phi +
                       coef * x.r * x.r * abs_pow_p1(x.phi, m.p);
              }};
    }
  }
  return {};
}

WeightedDensity boundary_weighted(SliceKind kind, const MultiplierSpec& s, const ModelParams& m) {
  check_spec(s);
  face_combination(kind, {0, 0, 0});  // rejects unsupported kinds early
  const double alpha = m.d - 1 - scale_power(s);
  return {alpha, [kind, s, m](const FieldPoint& x) { return face_combination(kind, scaled_current(x, s, m)); }};
}

WeightedDensity rweighted_derivative_part(SliceKind kind, double gamma, const ModelParams& m) {
  const double d = m.d;
  const double n = d + gamma - 2.0;  // Phi = r^n phi^2
  const double c = 0.25 * (d - 1);
  // r^{n-1} * bracket, bracket from d(Phi)/ds along the face parameter
  switch (kind) {
    case SliceKind::time_slice:
      return {n - 1, [=](const FieldPoint& x) { return -c * (n * x.phi * x.phi + 2.0 * x.r * x.phi * x.dphi_dr); }};
    case SliceKind::outgoing_null:
      return {n - 1, [=](const FieldPoint& x) { return -c * (n * x.phi * x.phi + 2.0 * x.r * x.phi * x.L()); }};
    case SliceKind::incoming_null:
      return {n - 1, [=](const FieldPoint& x) { return c * (-n * x.phi * x.phi + 2.0 * x.r * x.phi * x.Lbar()); }};
    case SliceKind::timelike_cylinder:
      return {n - 1, [=](const FieldPoint& x) { return c * 2.0 * x.r * x.phi * x.dphi_dt; }};
    case SliceKind::hybrid_sigma: break;
  }
  throw InvalidArgument("rweighted_derivative_part: unsupported face kind");
}

WeightedDensity audited_boundary_weighted(SliceKind kind, const MultiplierSpec& s, const ModelParams& m) {
  auto full = boundary_weighted(kind, s, m);
  if (s.kind != MultiplierKind::rweighted) return full;
  auto part = rweighted_derivative_part(kind, s.gamma, m);
  return {full.alpha, [f = full.g, q = part.g](const FieldPoint& x) { return f(x) - q(x); }};
}

namespace {

// Fourth order d/dx at sample k of f(0..n-1), one-sided near the ends.
template <class F>
double diff4(F f, std::size_t k, std::size_t n, double h) {
  if (k >= 2 && k + 2 < n) return (-f(k + 2) + 8.0 * f(k + 1) - 8.0 * f(k - 1) + f(k - 2)) / (12.0 * h);
  // mirrored index: q counts from the near end, sign flips at the far end
  const bool tail = k >= 2;
  const double sgn = tail ? -1.0 : 1.0;
  auto g = [&](std::size_t q) { return tail ? f(n - 1 - q) : f(q); };
  const std::size_t q = tail ? n - 1 - k : k;
  if (q == 0) return sgn * (-25.0 * g(0) + 48.0 * g(1) - 36.0 * g(2) + 16.0 * g(3) - 3.0 * g(4)) / (12.0 * h);
  return sgn * (-3.0 * g(0) - 10.0 * g(1) + 18.0 * g(2) - 6.0 * g(3) + g(4)) / (12.0 * h);
}

}  // namespace

// The solver's stored residual when present. Otherwise phi_tt - Lap phi +
// |phi|^{p-1} phi on the record lattice, with fourth order differences so that
// it resolves the scheme's own O(dr^2) residual. phi is extended evenly across r = 0. The last two columns are
// left at zero (they are never inside coverage).
std::vector<double> pde_residual(const SpacetimeRecord& rec) {
  if (!rec.residual.empty()) return rec.residual;
  const std::size_t nt = rec.nt, nr = rec.nr;
  std::vector<double> res(nt * nr, 0.0);
  if (nt < 5 || nr < 5) return res;
  const double dt = rec.dt_rec, dr = rec.dr_rec;
  const double d = rec.model.d;
  for (std::size_t j = 0; j < nt; ++j) {
    auto f = [&](long i) { return rec.phi[rec.index(j, static_cast<std::size_t>(std::labs(i)))]; };
    for (std::size_t i = 0; i + 2 < nr; ++i) {
      const double ptt = diff4([&](std::size_t q) { return rec.dphi_dt[rec.index(q, i)]; }, j, nt, dt);
      const long k = static_cast<long>(i);
      const double frr =
          (-f(k + 2) + 16.0 * f(k + 1) - 30.0 * f(k) + 16.0 * f(k - 1) - f(k - 2)) / (12.0 * dr * dr);
      double lap = d * frr;
      if (i > 0) {
        const double fr = (-f(k + 2) + 8.0 * f(k + 1) - 8.0 * f(k - 1) + f(k - 2)) / (12.0 * dr);
        lap = frr + (d - 1) / rec.radius(i) * fr;
      }
      double r = ptt - lap;
      if (rec.nonlinear) r += nonlinearity(f(k), rec.model.p);
      res[rec.index(j, i)] = r;
    }
  }
  return res;
}

WeightedDensity source_weighted(const MultiplierSpec& s, const ModelParams& m, const SpacetimeRecord& rec,
                                const std::vector<double>& residual) {
  check_spec(s);
  const double d = m.d;
  auto lookup = [&rec, &residual](const FieldPoint& x) {
    const auto j = static_cast<std::size_t>(std::llround((x.t - rec.t0) / rec.dt_rec));
    const auto i = static_cast<std::size_t>(std::llround(x.r / rec.dr_rec));
    return residual[rec.index(j, i)];
  };
  switch (s.kind) {
    case MultiplierKind::energy:
      return {d - 1, [lookup](const FieldPoint& x) { return -lookup(x) * x.dphi_dt; }};
    case MultiplierKind::morawetz: {
      const double eps = s.epsilon;
      return {d - 2, [lookup, m, eps](const FieldPoint& x) {
                const double f = morawetz_f(x.r, m, eps);
                return -lookup(x) * (x.r * f * x.dphi_dr + 0.5 * (m.d - 1) * f * x.phi);
              }};
    }
    case MultiplierKind::rweighted:
      return {s.gamma + d - 2, [lookup, m](const FieldPoint& x) {
                return -lookup(x) * (x.r * x.L() + 0.5 * (m.d - 1) * x.phi);
              }};
  }
  return {};
}

double CurrentEvaluation::boundary_sum() const {
  double s = 0.0;
  for (const auto& [k, v] : boundary_terms) s += v;
  return s;
}

double CurrentEvaluation::scale() const {
  double s = std::abs(bulk);
  for (const auto& [k, v] : boundary_terms) s = std::max(s, std::abs(v));
  return s;
}

double CurrentEvaluation::relative_residual() const {
  const double s = scale();
  return s > 0.0 ? std::abs(residual) / s : 0.0;
}

CurrentEvaluation audit_identity(const SpacetimeRecord& rec, const RegionSpec& region,
                                 const MultiplierSpec& spec, const ModelParams& m) {
  check_spec(spec);
  const RegionSpec closed = close_in_coverage(rec, region);
  const auto faces = closed.faces();  // throws for open regions
  CurrentEvaluation ev;
  ev.region = region.label();
  ev.spec = spec.label();
  ev.bulk = integrate_region(rec, closed, bulk_weighted(spec, m));
  const auto res = pde_residual(rec);
  ev.source = integrate_region(rec, closed, source_weighted(spec, m, rec, res));
  for (const auto& f : faces)
    ev.boundary_terms[f.id] = f.sign * integrate_slice(rec, f.slice, audited_boundary_weighted(f.slice.kind, spec, m));
  ev.residual = ev.bulk + ev.source - ev.boundary_sum();
  return ev;
}

double rweighted_telescoping_sum(const SpacetimeRecord& rec, const RegionSpec& region, double gamma,
                                 const ModelParams& m) {
  double s = 0.0;
  for (const auto& f : close_in_coverage(rec, region).faces())
    s += f.sign * integrate_slice(rec, f.slice, rweighted_derivative_part(f.slice.kind, gamma, m));
  return s;
}

double iled_density(const FieldPoint& x, const ModelParams& m) {
  if (!(x.r > 0.0)) throw InvalidArgument("iled_density: needs r > 0");
  const auto w = iled_weighted(m);
  return std::pow(x.r, w.alpha - (m.d - 1)) * w.g(x);
}

WeightedDensity iled_weighted(const ModelParams& m) {
  const double eps = m.epsilon, p = m.p;
  return {m.d - 2.0, [eps, p](const FieldPoint& x) {
            const double rp = 1.0 + x.r;
            const double q = x.dphi_dt * x.dphi_dt + x.dphi_dr * x.dphi_dr + x.phi * x.phi / (rp * rp);
            return x.r * q * std::pow(rp, -1.0 - eps) + abs_pow_p1(x.phi, p);
          }};
}

double iled_pointwise_constant(const ModelParams& m) {
  const double e = m.epsilon;
  return std::min({0.5 * e, 1.0 / (2.0 * (m.p + 1.0)), 0.25 * (m.d - 1) * e * (1.0 + e)});
}

IledCheck iled_lower_bound_check(const SpacetimeRecord& rec, const RegionSpec& region, const ModelParams& m) {
  IledCheck c;
  c.lhs = integrate_region(rec, region, iled_weighted(m));
  c.rhs = integrate_region(rec, region, bulk_weighted(MultiplierSpec::morawetz(m.epsilon), m));
  c.bound = 1.0 / iled_pointwise_constant(m);
  if (c.lhs == 0.0 && c.rhs == 0.0) c.ratio = 1.0;
  else c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : std::numeric_limits<double>::infinity();
  c.holds = c.lhs <= c.bound * c.rhs * (1.0 + 1e-12) + 1e-300;
  return c;
}

}  // namespace nlwlab
