#include "nlwlab/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace nlwlab {

WeightedDensity regular_density(int d, std::function<double(const FieldPoint&)> rho) {
  return {static_cast<double>(d - 1), std::move(rho)};
}

std::string to_string(SliceKind k) {
  switch (k) {
    case SliceKind::outgoing_null: return "outgoing_null";
    case SliceKind::incoming_null: return "incoming_null";
    case SliceKind::hybrid_sigma: return "hybrid_sigma";
    case SliceKind::time_slice: return "time_slice";
    case SliceKind::timelike_cylinder: return "timelike_cylinder";
  }
  return "?";
}

std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::foliation: return "foliation";
    case RegionKind::slab: return "slab";
    case RegionKind::exterior: return "exterior";
    case RegionKind::future: return "future";
  }
  return "?";
}

SliceSpec SliceSpec::outgoing(double u, double v_lo, double v_hi) {
  return {SliceKind::outgoing_null, u, v_lo, v_hi};
}
SliceSpec SliceSpec::incoming(double v, double u_lo, double u_hi) {
  return {SliceKind::incoming_null, v, u_lo, u_hi};
}
SliceSpec SliceSpec::hybrid(double u, double v_hi) { return {SliceKind::hybrid_sigma, u, -kInf, v_hi}; }
SliceSpec SliceSpec::time(double t, double r_lo, double r_hi) {
  return {SliceKind::time_slice, t, r_lo, r_hi};
}
SliceSpec SliceSpec::cylinder(double R, double t_lo, double t_hi) {
  return {SliceKind::timelike_cylinder, R, t_lo, t_hi};
}

std::string SliceSpec::label() const {
  return fmt::format("{}({:g})[{:g},{:g}]", to_string(kind), param, lo, hi);
}

namespace {

struct Pt {
  double t, r;
};
using Polygon = std::vector<Pt>;

double scale_tol(double c) { return 1e-9 * std::max(1.0, std::abs(c)); }

std::vector<HalfPlane> coverage_planes(const SpacetimeRecord& rec) {
  const double K = 2.0 * rec.r_max - rec.support_radius - rec.causal_margin + rec.t0;
  return {{-1.0, 0.0, -rec.t0},
          {1.0, 0.0, rec.t_final()},
          {0.0, -1.0, 0.0},
          {0.0, 1.0, rec.r_rec_max()},
          {1.0, 1.0, K}};
}

// Parameter interval of the line (t, r) = (ta + tb s, ra + rb s) inside the planes.
std::pair<double, double> clip_line(const std::vector<HalfPlane>& planes, double ta, double tb,
                                    double ra, double rb) {
  double lo = -kInf, hi = kInf;
  for (const auto& h : planes) {
    const double k = h.a_t * tb + h.a_r * rb;
    const double rest = h.c - h.a_t * ta - h.a_r * ra;
    if (k == 0.0) {
      if (rest < -scale_tol(h.c)) return {1.0, 0.0};
      continue;
    }
    const double s = rest / k;
    if (k > 0.0) hi = std::min(hi, s);
    else lo = std::max(lo, s);
  }
  return {lo, hi};
}

Polygon clip(const Polygon& poly, const HalfPlane& h) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  const double tol = scale_tol(h.c) * 0.1;
  auto side = [&](const Pt& p) { return h.c - (h.a_t * p.t + h.a_r * p.r); };
  for (std::size_t k = 0; k < n; ++k) {
    const Pt& P = poly[k];
    const Pt& Q = poly[(k + 1) % n];
    const double sp = side(P), sq = side(Q);
    if (sp >= -tol) out.push_back(P);
    if ((sp > tol && sq < -tol) || (sp < -tol && sq > tol)) {
      const double a = sp / (sp - sq);
      out.push_back({P.t + a * (Q.t - P.t), P.r + a * (Q.r - P.r)});
    }
  }
  return out;
}

double polygon_area(const Polygon& p) {
  double a = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Pt& P = p[k];
    const Pt& Q = p[(k + 1) % p.size()];
    a += P.t * Q.r - Q.t * P.r;
  }
  return 0.5 * std::abs(a);
}

Polygon clip_all(Polygon p, const std::vector<HalfPlane>& planes) {
  for (const auto& h : planes) {
    p = clip(p, h);
    if (p.size() < 3) return {};
  }
  return p;
}

Polygon big_box(const SpacetimeRecord& rec) {
  const double B = 1e7 + rec.t_final() + rec.r_max;
  return {{-B, -B}, {B, -B}, {B, B}, {-B, B}};
}

// Weights (w_a, w_b) with int_a^b r^alpha f dr = w_a f(a) + w_b f(b) for linear f.
std::pair<double, double> linear_moment_weights(double a, double b, double alpha) {
  const double h = b - a;
  if (h <= 0.0) return {0.0, 0.0};
  if (a < 4.0 * h) {
    const double m0 = (std::pow(b, alpha + 1.0) - std::pow(a, alpha + 1.0)) / (alpha + 1.0);
    const double m1 = (std::pow(b, alpha + 2.0) - std::pow(a, alpha + 2.0)) / (alpha + 2.0);
    const double wb = (m1 - a * m0) / h;
    return {m0 - wb, wb};
  }
  // 4-point Gauss-Legendre
  static constexpr std::array<double, 4> x = {-0.8611363115940526, -0.3399810435848563,
                                              0.3399810435848563, 0.8611363115940526};
  static constexpr std::array<double, 4> w = {0.3478548451374538, 0.6521451548625461,
                                              0.6521451548625461, 0.3478548451374538};
  double wa = 0.0, wb = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double r = a + 0.5 * h * (x[k] + 1.0);
    const double q = 0.5 * h * w[k] * std::pow(r, alpha);
    wa += q * (b - r) / h;
    wb += q * (r - a) / h;
  }
  return {wa, wb};
}

// Moments int_lo^hi (base + x)^alpha x^q dx for q = 0, 1, 2.
std::array<double, 3> power_moments(double base, double lo, double hi, double alpha) {
  const double a = base + lo, b = base + hi, h = hi - lo;
  if (a < 4.0 * h) {
    std::array<double, 3> I{};
    for (int k = 0; k < 3; ++k) {
      const double e = alpha + k + 1.0;
      I[k] = (std::pow(b, e) - std::pow(a, e)) / e;
    }
    return {I[0], I[1] - base * I[0], I[2] - 2.0 * base * I[1] + base * base * I[0]};
  }
  static constexpr std::array<double, 8> x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                              0.7966664774136267,  0.9602898564975363};
  static constexpr std::array<double, 8> w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  std::array<double, 3> M{};
  for (int k = 0; k < 8; ++k) {
    const double xi = lo + 0.5 * h * (x[k] + 1.0);
    const double q = 0.5 * h * w[k] * std::pow(base + xi, alpha);
    M[0] += q;
    M[1] += q * xi;
    M[2] += q * xi * xi;
  }
  return M;
}

// int_{x[i]}^{x[i+1]} r^alpha P(r) dr for the quadratic P through (x[k], g[k]),
// k = j..j+2, with i in {j, j+1}.
double quadratic_piece(const std::vector<double>& x, const std::vector<double>& g, std::size_t j,
                       std::size_t i, double alpha) {
  const double base = x[j];
  const double y[3] = {0.0, x[j + 1] - base, x[j + 2] - base};
  const auto M = power_moments(base, x[i] - base, x[i + 1] - base, alpha);
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double p = y[(k + 1) % 3], q = y[(k + 2) % 3];
    const double den = (y[k] - p) * (y[k] - q);
    total += g[j + k] * (M[2] - (p + q) * M[1] + p * q * M[0]) / den;
  }
  return total;
}

// int r^alpha (piecewise quadratic interpolant of g) over increasing nodes x.
// Nodes are grouped in pairs of intervals; a leftover interval uses the
// quadratic through its left neighbour. Intervals much shorter than the
// typical spacing (slice endpoints next to a lattice crossing) get the
// linear rule, which keeps the Lagrange weights bounded.
double piecewise_quadratic_integral(const std::vector<double>& x, const std::vector<double>& g, double alpha) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double hmax = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) hmax = std::max(hmax, x[k + 1] - x[k]);
  const double tiny = 1e-3 * hmax;
  auto short_iv = [&](std::size_t k) { return x[k + 1] - x[k] < tiny; };
  auto linear = [&](std::size_t k) {
    const auto [wa, wb] = linear_moment_weights(x[k], x[k + 1], alpha);
    return wa * g[k] + wb * g[k + 1];
  };
  double total = 0.0;
  std::size_t k = 0;
  while (k + 1 < n) {
    if (short_iv(k)) {
      total += linear(k);
      k += 1;
    } else if (k + 2 < n && !short_iv(k + 1)) {
      total += quadratic_piece(x, g, k, k, alpha) + quadratic_piece(x, g, k, k + 1, alpha);
      k += 2;
    } else if (k >= 1 && !short_iv(k - 1)) {
      total += quadratic_piece(x, g, k - 1, k, alpha);
      k += 1;
    } else {
      total += linear(k);
      k += 1;
    }
  }
  return total;
}

// One straight elementary slice: the line, its natural domain and lattice step.
struct Line {
  SliceKind kind;
  double param;
  double ta, tb, ra, rb;
  std::vector<HalfPlane> domain;
  // s values where the line crosses lattice lines: s = s0 + k*step
  double s0, step;
};

Line make_line(const SpacetimeRecord& rec, SliceKind kind, double param) {
  Line L{kind, param, 0, 0, 0, 0, {}, 0.0, rec.dr_rec};
  switch (kind) {
    case SliceKind::outgoing_null:  // s = v
      L.ta = param; L.tb = 1.0; L.ra = -param; L.rb = 1.0;
      L.domain = {{0.0, -1.0, -2.0}};  // r >= 2
      L.s0 = param;                    // r = s - u on the lattice
      break;
    case SliceKind::incoming_null:  // s = u
      L.ta = param; L.tb = 1.0; L.ra = param; L.rb = -1.0;
      L.domain = {{0.0, -1.0, -2.0}};
      L.s0 = param;  // r = v - s
      break;
    case SliceKind::time_slice:  // s = r
      L.ta = param; L.tb = 0.0; L.ra = 0.0; L.rb = 1.0;
      L.s0 = 0.0;
      break;
    case SliceKind::timelike_cylinder:  // s = t
      L.ta = 0.0; L.tb = 1.0; L.ra = param; L.rb = 0.0;
      L.s0 = rec.t0;
      L.step = rec.dt_rec;
      break;
    case SliceKind::hybrid_sigma:
      throw InvalidArgument("hybrid_sigma is not an elementary slice");
  }
  return L;
}

SliceSegment sample_line(const SpacetimeRecord& rec, const Line& L, double lo, double hi) {
  const auto dom = clip_line(L.domain, L.ta, L.tb, L.ra, L.rb);
  const auto cov = clip_line(coverage_planes(rec), L.ta, L.tb, L.ra, L.rb);
  const double nat_lo = dom.first, nat_hi = dom.second;
  const double lo_all = std::max(nat_lo, cov.first);
  const double hi_all = std::min(nat_hi, cov.second);
  const std::string name = fmt::format("{}({:g})", to_string(L.kind), L.param);
  if (!(cov.first <= cov.second))
    throw CoverageError(fmt::format("{}: slice misses the record coverage (t in [{}, {}], r <= {})", name, rec.t0,
                                    rec.t_final(), rec.r_rec_max()));

  double a = lo, b = hi;
  if (std::isinf(a)) a = lo_all;
  if (std::isinf(b)) b = hi_all;
  const double tol_s = 1e-9 * std::max(1.0, std::abs(a) + std::abs(b));
  if (a < nat_lo - tol_s || b > nat_hi + tol_s)
    throw InvalidArgument(fmt::format("{}: requested range [{}, {}] leaves the slice domain [{}, {}]",
                                      name, a, b, nat_lo, nat_hi));
  if (a < cov.first - tol_s || b > cov.second + tol_s)
    throw CoverageError(fmt::format("{}: requested range [{}, {}] outside record coverage [{}, {}]",
                                    name, a, b, cov.first, cov.second));
  a = std::max(a, lo_all);
  b = std::min(b, hi_all);
  if (!(b > a - tol_s))
    throw CoverageError(fmt::format("{}: empty after coverage truncation ([{}, {}])", name, a, b));

  SliceSegment seg;
  seg.kind = L.kind;
  seg.param = L.param;
  auto add = [&](double s) {
    const double t = L.ta + L.tb * s;
    const double r = std::max(0.0, L.ra + L.rb * s);
    seg.s.push_back(s);
    seg.points.push_back(rec.sample(t, r));
  };
  add(a);
  if (b > a + tol_s) {
    const double kfirst = std::floor((a - L.s0) / L.step + 1e-9) + 1.0;
    for (double k = kfirst;; k += 1.0) {
      const double s = L.s0 + k * L.step;
      if (s >= b - tol_s) break;
      if (s > a + tol_s) add(s);
    }
    add(b);
  }
  return seg;
}

}  // namespace

std::vector<SliceSegment> sample_slice(const SpacetimeRecord& rec, const SliceSpec& slice) {
  if (slice.lo > slice.hi) throw InvalidArgument(fmt::format("{}: lo > hi", slice.label()));
  if (slice.kind != SliceKind::hybrid_sigma) {
    const Line L = make_line(rec, slice.kind, slice.param);
    return {sample_line(rec, L, slice.lo, slice.hi)};
  }
  const double u = slice.param;
  std::vector<SliceSegment> out;
  if (u >= -1.0) {
    out.push_back(sample_line(rec, make_line(rec, SliceKind::time_slice, 2.0 * u + 2.0), 0.0, 2.0));
    out.push_back(sample_line(rec, make_line(rec, SliceKind::outgoing_null, u), u + 2.0, slice.hi));
  } else {
    out.push_back(sample_line(rec, make_line(rec, SliceKind::outgoing_null, u), -u, slice.hi));
  }
  return out;
}

double integrate_segment(const SliceSegment& seg, const WeightedDensity& w, int d) {
  const std::size_t n = seg.points.size();
  if (n < 2) return 0.0;
  std::vector<double> x(n), g(n);
  if (seg.kind == SliceKind::timelike_cylinder) {
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = seg.s[k];
      g[k] = w.g(seg.points[k]);
    }
    return sphere_area(d) * std::pow(seg.points[0].r, w.alpha) * piecewise_quadratic_integral(x, g, 0.0);
  }
  // every other kind has |dr/ds| = 1; integrate in r
  const bool rev = seg.points.back().r < seg.points.front().r;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = seg.points[rev ? n - 1 - k : k];
    x[k] = p.r;
    g[k] = w.g(p);
  }
  return sphere_area(d) * piecewise_quadratic_integral(x, g, w.alpha);
}

double integrate_radial_samples(const std::vector<double>& g, double dr, double alpha) {
  std::vector<double> x(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) x[k] = static_cast<double>(k) * dr;
  return piecewise_quadratic_integral(x, g, alpha);
}

double integrate_slice(const SpacetimeRecord& rec, const SliceSpec& slice, const WeightedDensity& w) {
  double total = 0.0;
  for (const auto& seg : sample_slice(rec, slice)) total += integrate_segment(seg, w, rec.model.d);
  return total;
}

// ---------------------------------------------------------------- regions

RegionSpec RegionSpec::foliation(double u1, double u2, double v) {
  if (!(u1 < u2)) throw InvalidArgument(fmt::format("foliation region: need u1 < u2 ({} , {})", u1, u2));
  if (!(v > u2 + 2.0))
    throw InvalidArgument(fmt::format("foliation region: need v > u2 + 2 (v = {}, u2 = {})", v, u2));
  RegionSpec s;
  s.kind_ = RegionKind::foliation;
  s.b_ = {u1, u2, v};
  return s;
}

RegionSpec RegionSpec::slab(double t1, double t2, double R) {
  if (!(t1 < t2)) throw InvalidArgument(fmt::format("slab: need t1 < t2 ({}, {})", t1, t2));
  if (!(R > 0.0)) throw InvalidArgument("slab: need R > 0");
  RegionSpec s;
  s.kind_ = RegionKind::slab;
  s.b_ = {t1, t2, R};
  return s;
}

RegionSpec RegionSpec::exterior(double u1, double u2) {
  if (!(u1 < u2) || u2 > -1.0)
    throw InvalidArgument(fmt::format("exterior region: need u1 < u2 <= -1 ({}, {})", u1, u2));
  RegionSpec s;
  s.kind_ = RegionKind::exterior;
  s.b_ = {u1, u2};
  return s;
}

RegionSpec RegionSpec::future(double u) {
  RegionSpec s;
  s.kind_ = RegionKind::future;
  s.b_ = {u};
  return s;
}

bool RegionSpec::truncated() const {
  if (kind_ == RegionKind::future) return true;
  return std::any_of(b_.begin(), b_.end(), [](double x) { return std::isinf(x); });
}

std::vector<ConvexPiece> RegionSpec::pieces() const {
  std::vector<ConvexPiece> out;
  const HalfPlane t_nonneg{-1.0, 0.0, 0.0};
  switch (kind_) {
    case RegionKind::foliation: {
      const double u1 = b_[0], u2 = b_[1], v = b_[2];
      if (u2 >= -1.0)
        out.push_back({{0.0, 1.0, 2.0}, {0.0, -1.0, 0.0}, {-1.0, 0.0, -(2 * u1 + 2)},
                       {1.0, 0.0, 2 * u2 + 2}, t_nonneg});
      out.push_back({{0.0, -1.0, -2.0}, {-1.0, 1.0, -2 * u1}, {1.0, -1.0, 2 * u2},
                     {1.0, 1.0, 2 * v}, t_nonneg});
      break;
    }
    case RegionKind::slab: {
      ConvexPiece p{{-1.0, 0.0, -b_[0]}, {1.0, 0.0, b_[1]}, {0.0, -1.0, 0.0}};
      if (std::isfinite(b_[2])) p.push_back({0.0, 1.0, b_[2]});
      out.push_back(p);
      break;
    }
    case RegionKind::exterior: {
      const double u1 = b_[0], u2 = b_[1];
      out.push_back({t_nonneg, {-1.0, 1.0, -2 * u1}, {1.0, -1.0, 2 * u2}, {1.0, 1.0, -2 * u1}});
      break;
    }
    case RegionKind::future: {
      const double u = b_[0];
      out.push_back({{0.0, 1.0, 2.0}, {0.0, -1.0, 0.0}, {-1.0, 0.0, -(2 * u + 2)}, t_nonneg});
      out.push_back({{0.0, -1.0, -2.0}, {-1.0, 1.0, -2 * u}, t_nonneg});
      break;
    }
  }
  return out;
}

std::vector<Face> RegionSpec::faces() const {
  switch (kind_) {
    case RegionKind::foliation: {
      const double u1 = b_[0], u2 = b_[1], v = b_[2];
      if (u1 < -1.0)
        throw InvalidArgument("faces: foliation regions with u1 < -1 are not supported by the auditor");
      const double ta = 2 * u1 + 2, tb = 2 * u2 + 2;
      return {{"sigma_u1_ball", SliceSpec::time(ta, 0.0, 2.0), 1.0},
              {"H_u1", SliceSpec::outgoing(u1, u1 + 2.0, v), 1.0},
              {"sigma_u2_ball", SliceSpec::time(tb, 0.0, 2.0), -1.0},
              {"H_u2", SliceSpec::outgoing(u2, u2 + 2.0, v), -1.0},
              {"Hbar_v", SliceSpec::incoming(v, u1, u2), -1.0},
              {"origin", SliceSpec::cylinder(0.0, ta, tb), 1.0}};
    }
    case RegionKind::slab: {
      const double t1 = b_[0], t2 = b_[1], R = b_[2];
      if (std::isinf(R)) throw InvalidArgument("faces: slab with infinite radius is not closed");
      return {{"t1", SliceSpec::time(t1, 0.0, R), 1.0},
              {"t2", SliceSpec::time(t2, 0.0, R), -1.0},
              {"cylinder", SliceSpec::cylinder(R, t1, t2), -1.0},
              {"origin", SliceSpec::cylinder(0.0, t1, t2), 1.0}};
    }
    case RegionKind::exterior: {
      const double u1 = b_[0], u2 = b_[1];
      return {{"initial", SliceSpec::time(0.0, -2 * u2, -2 * u1), 1.0},
              {"H_u2", SliceSpec::outgoing(u2, -u2, -u1), -1.0},
              {"Hbar_v", SliceSpec::incoming(-u1, u1, u2), -1.0}};
    }
    case RegionKind::future:
      throw InvalidArgument("faces: the future region D_u is not closed");
  }
  return {};
}

RegionSpec close_in_coverage(const SpacetimeRecord& rec, const RegionSpec& region) {
  if (region.kind() != RegionKind::slab || std::isfinite(region.bounds()[2])) return region;
  const double t2 = region.bounds()[1];
  const double K = 2.0 * rec.r_max - rec.support_radius - rec.causal_margin + rec.t0;
  const double R = std::floor(std::min(rec.r_rec_max(), K - t2) / rec.dr_rec + 1e-9) * rec.dr_rec;
  if (!(R > 0.0)) throw CoverageError(fmt::format("{}: no covered radius at t = {}", region.label(), t2));
  return RegionSpec::slab(region.bounds()[0], t2, R);
}

std::string RegionSpec::label() const {
  std::string s = to_string(kind_) + "(";
  for (std::size_t k = 0; k < b_.size(); ++k) s += fmt::format("{}{:g}", k ? "," : "", b_[k]);
  return s + ")";
}

namespace {

// Dunavant degree-4 rule on a triangle (barycentric points, weights sum to 1).
constexpr std::array<std::array<double, 4>, 6> kTri = {{
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
}};

std::vector<Polygon> region_polygons(const SpacetimeRecord& rec, const RegionSpec& region,
                                     std::vector<std::vector<HalfPlane>>& planes_out) {
  const auto cov = coverage_planes(rec);
  std::vector<Polygon> polys;
  double raw_area = 0.0;
  for (const auto& piece : region.pieces()) {
    Polygon raw = clip_all(big_box(rec), piece);
    raw_area += raw.size() >= 3 ? polygon_area(raw) : 0.0;
    if (!region.truncated()) {
      for (const Pt& p : raw)
        for (const auto& h : cov) {
          const double s = h.c - (h.a_t * p.t + h.a_r * p.r);
          if (s < -scale_tol(h.c) * 10.0)
            throw CoverageError(fmt::format(
                "region {}: vertex (t={}, r={}) outside record coverage (t <= {}, r <= {} at that t)",
                region.label(), p.t, p.r, rec.t_final(), rec.causal_radius(p.t)));
        }
    }
    std::vector<HalfPlane> all = piece;
    all.insert(all.end(), cov.begin(), cov.end());
    polys.push_back(clip_all(big_box(rec), all));
    planes_out.push_back(std::move(all));
  }
  if (!(raw_area > 0.0)) throw InvalidArgument(fmt::format("region {} is empty", region.label()));
  return polys;
}

}  // namespace

namespace {

// Weights of int_lo^hi r^alpha P(r) dr for the quadratic P through x0 < x1 < x2.
std::array<double, 3> quadratic_weights(const std::array<double, 3>& xs, double lo, double hi, double alpha) {
  const double base = xs[0];
  const double y[3] = {0.0, xs[1] - base, xs[2] - base};
  const auto M = power_moments(base, lo - base, hi - base, alpha);
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const double p = y[(k + 1) % 3], q = y[(k + 2) % 3];
    out[k] = (M[2] - (p + q) * M[1] + p * q * M[0]) / ((y[k] - p) * (y[k] - q));
  }
  return out;
}

std::array<double, 3> lagrange3(const std::array<double, 3>& xs, double x) {
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const double p = xs[(k + 1) % 3], q = xs[(k + 2) % 3];
    out[k] = (x - p) * (x - q) / ((xs[k] - p) * (xs[k] - q));
  }
  return out;
}

// First node of the 3-node stencil serving cell [k, k+1] on a line of n nodes.
std::size_t stencil_start(std::size_t k, std::size_t n) {
  std::size_t b = k - k % 2;
  if (b + 2 > n - 1) b = n - 3;
  return b;
}

}  // namespace

double integrate_region(const SpacetimeRecord& rec, const RegionSpec& region, const WeightedDensity& w) {
  std::vector<std::vector<HalfPlane>> planes;
  const auto polys = region_polygons(rec, region, planes);
  if (rec.nt < 3 || rec.nr < 3) throw CoverageError("integrate_region: record has fewer than 3 rows or columns");
  const double dt = rec.dt_rec;
  double total = 0.0;

  // time weights of the quadratic through rows b, b+1, b+2 over the first
  // and the second interval
  const std::array<double, 3> tw_first = {5.0 * dt / 12.0, 8.0 * dt / 12.0, -dt / 12.0};
  const std::array<double, 3> tw_second = {-dt / 12.0, 8.0 * dt / 12.0, 5.0 * dt / 12.0};

  for (std::size_t q = 0; q < polys.size(); ++q) {
    const Polygon& poly = polys[q];
    if (poly.size() < 3) continue;
    const auto& hp = planes[q];
    double tmin = kInf, tmax = -kInf, rmin = kInf, rmax = -kInf;
    for (const Pt& p : poly) {
      tmin = std::min(tmin, p.t); tmax = std::max(tmax, p.t);
      rmin = std::min(rmin, p.r); rmax = std::max(rmax, p.r);
    }
    auto jidx = [&](double t) { return (t - rec.t0) / dt; };
    const auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor(jidx(tmin) + 1e-9)));
    const auto j1 = std::min(rec.nt - 1, static_cast<std::size_t>(std::ceil(jidx(tmax) - 1e-9)));
    const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor(rmin / rec.dr_rec + 1e-9)));
    const auto i1 = std::min(rec.nr - 1, static_cast<std::size_t>(std::ceil(rmax / rec.dr_rec - 1e-9)));
    if (j1 <= j0 || i1 <= i0) continue;

    // nodal values on every row and column a stencil can reach
    const std::size_t ja = stencil_start(j0, rec.nt), jb = stencil_start(j1 - 1, rec.nt) + 2;
    const std::size_t ia = stencil_start(i0, rec.nr), ib = stencil_start(i1 - 1, rec.nr) + 2;
    const std::size_t ncol = ib - ia + 1;
    std::vector<double> G((jb - ja + 1) * ncol);
    for (std::size_t j = ja; j <= jb; ++j)
      for (std::size_t i = ia; i <= ib; ++i) G[(j - ja) * ncol + (i - ia)] = w.g(rec.node(j, i));
    auto gv = [&](std::size_t j, std::size_t i) { return G[(j - ja) * ncol + (i - ia)]; };

    std::vector<std::array<double, 3>> RW(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i) {
      const std::size_t s0 = stencil_start(i, rec.nr);
      RW[i - i0] = quadratic_weights({rec.radius(s0), rec.radius(s0 + 1), rec.radius(s0 + 2)}, rec.radius(i),
                                     rec.radius(i + 1), w.alpha);
    }

    for (std::size_t j = j0; j < j1; ++j) {
      const std::size_t tj = stencil_start(j, rec.nt);
      const auto& tw = (j == tj) ? tw_first : tw_second;
      const double ta = rec.time(j), tb = rec.time(j + 1);
      for (std::size_t i = i0; i < i1; ++i) {
        const std::size_t ri = stencil_start(i, rec.nr);
        const double ra = rec.radius(i), rb = rec.radius(i + 1);
        const std::array<Pt, 4> corner = {{{ta, ra}, {ta, rb}, {tb, rb}, {tb, ra}}};
        bool full = true, empty = false;
        for (const auto& h : hp) {
          const double tol = scale_tol(h.c);
          int inside = 0, outside = 0;
          for (const Pt& c : corner) {
            const double sd = h.c - (h.a_t * c.t + h.a_r * c.r);
            if (sd >= -tol) ++inside;
            if (sd <= tol) ++outside;
          }
          if (outside == 4) { empty = true; break; }
          if (inside < 4) full = false;
        }
        if (empty) continue;
        if (full) {
          const auto& rw = RW[i - i0];
          for (int a2 = 0; a2 < 3; ++a2)
            for (int b2 = 0; b2 < 3; ++b2) total += tw[a2] * rw[b2] * gv(tj + a2, ri + b2);
          continue;
        }
        Polygon cell(corner.begin(), corner.end());
        for (const auto& h : hp) {
          cell = clip(cell, h);
          if (cell.size() < 3) break;
        }
        if (cell.size() < 3) continue;
        const std::array<double, 3> tn = {rec.time(tj), rec.time(tj + 1), rec.time(tj + 2)};
        const std::array<double, 3> rn = {rec.radius(ri), rec.radius(ri + 1), rec.radius(ri + 2)};
        auto ghat = [&](double t, double r) {
          const auto lt = lagrange3(tn, t);
          const auto lr = lagrange3(rn, r);
          double v = 0.0;
          for (int a2 = 0; a2 < 3; ++a2)
            for (int b2 = 0; b2 < 3; ++b2) v += lt[a2] * lr[b2] * gv(tj + a2, ri + b2);
          return v;
        };
        for (std::size_t m = 1; m + 1 < cell.size(); ++m) {
          const Pt& A = cell[0];
          const Pt& B = cell[m];
          const Pt& C = cell[m + 1];
          const double area = 0.5 * std::abs((B.t - A.t) * (C.r - A.r) - (C.t - A.t) * (B.r - A.r));
          if (area == 0.0) continue;
          double acc = 0.0;
          for (const auto& qp : kTri) {
            const double t = qp[0] * A.t + qp[1] * B.t + qp[2] * C.t;
            const double r = std::max(0.0, qp[0] * A.r + qp[1] * B.r + qp[2] * C.r);
            acc += qp[3] * std::pow(r, w.alpha) * ghat(t, r);
          }
          total += area * acc;
        }
      }
    }
  }
  return sphere_area(rec.model.d) * total;
}

double region_area(const SpacetimeRecord& rec, const RegionSpec& region) {
  std::vector<std::vector<HalfPlane>> planes;
  double a = 0.0;
  for (const auto& p : region_polygons(rec, region, planes)) a += p.size() >= 3 ? polygon_area(p) : 0.0;
  return a;
}

}  // namespace nlwlab
