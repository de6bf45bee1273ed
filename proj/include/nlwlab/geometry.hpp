#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nlwlab/record.hpp"

namespace nlwlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// u = (t-r)/2, v = (t+r)/2
struct NullPoint {
  double u = 0.0;
  double v = 0.0;
};
inline NullPoint to_null(double t, double r) { return {0.5 * (t - r), 0.5 * (t + r)}; }
inline double t_of(NullPoint p) { return p.u + p.v; }
inline double r_of(NullPoint p) { return p.v - p.u; }

// Foliation coordinate: Sigma_u = {tau = u}.
inline double foliation_tau(double t, double r) { return 0.5 * (t - (r > 2.0 ? r : 2.0)); }

// Integrands are written as r^alpha * g(point) with g smooth up to r = 0.
// The unit-sphere area factor is applied by the integrators, so a regular
// density rho corresponds to {d-1, rho}.
struct WeightedDensity {
  double alpha = 0.0;
  std::function<double(const FieldPoint&)> g;
};

WeightedDensity regular_density(int d, std::function<double(const FieldPoint&)> rho);

enum class SliceKind { outgoing_null, incoming_null, hybrid_sigma, time_slice, timelike_cylinder };
std::string to_string(SliceKind k);

// Truncation bounds act on the complementary coordinate:
//   outgoing_null(u): v,  incoming_null(v): u,  time_slice(t): r,
//   timelike_cylinder(R): t,  hybrid_sigma(u): upper v of the null part.
// Infinite bounds are cut at the record coverage; finite bounds must lie inside it.
struct SliceSpec {
  SliceKind kind = SliceKind::time_slice;
  double param = 0.0;
  double lo = -kInf;
  double hi = kInf;

  static SliceSpec outgoing(double u, double v_lo = -kInf, double v_hi = kInf);
  static SliceSpec incoming(double v, double u_lo = -kInf, double u_hi = kInf);
  static SliceSpec hybrid(double u, double v_hi = kInf);
  static SliceSpec time(double t, double r_lo = 0.0, double r_hi = kInf);
  static SliceSpec cylinder(double R, double t_lo = -kInf, double t_hi = kInf);

  std::string label() const;
};

// A straight piece of a slice. s is the integration variable
// (v, u, r or t) and points carry bilinearly interpolated fields.
struct SliceSegment {
  SliceKind kind = SliceKind::time_slice;
  double param = 0.0;
  std::vector<double> s;
  std::vector<FieldPoint> points;
};

std::vector<SliceSegment> sample_slice(const SpacetimeRecord& rec, const SliceSpec& slice);

// omega_{d-1} * sum over segments of int r^alpha g ds, with g piecewise
// quadratic through the samples and the power weight integrated exactly.
double integrate_slice(const SpacetimeRecord& rec, const SliceSpec& slice, const WeightedDensity& w);
double integrate_segment(const SliceSegment& seg, const WeightedDensity& w, int d);

// int_0^{r_n} r^alpha g dr for g sampled at r_i = i*dr, piecewise quadratic,
// power weight exact. No sphere factor.
double integrate_radial_samples(const std::vector<double>& g, double dr, double alpha);

// Half-plane a_t t + a_r r <= c.
struct HalfPlane {
  double a_t = 0.0;
  double a_r = 0.0;
  double c = 0.0;
};
using ConvexPiece = std::vector<HalfPlane>;

enum class RegionKind { foliation, slab, exterior, future };
std::string to_string(RegionKind k);

// Boundary face of a closed region: the slice and the sign with which its
// flux enters the divergence identity.
struct Face {
  std::string id;
  SliceSpec slice;
  double sign = 1.0;
};

class RegionSpec {
 public:
  // D_{u1,u2}^v: points between Sigma_{u1} and Sigma_{u2} with v' <= v.
  static RegionSpec foliation(double u1, double u2, double v);
  // [t1, t2] x {r <= R}.
  static RegionSpec slab(double t1, double t2, double R = kInf);
  // {t >= 0, u1 <= u <= u2, v <= -u1}, u2 <= -1.
  static RegionSpec exterior(double u1, double u2);
  // D_u: the future of Sigma_u, cut at the record coverage.
  static RegionSpec future(double u);

  RegionKind kind() const { return kind_; }
  const std::vector<double>& bounds() const { return b_; }
  std::vector<ConvexPiece> pieces() const;
  // True when some bound is infinite and coverage truncation is intended.
  bool truncated() const;
  // Faces of a closed region. Throws InvalidArgument for open regions.
  std::vector<Face> faces() const;
  std::string label() const;

 private:
  RegionKind kind_ = RegionKind::slab;
  std::vector<double> b_;
};

// omega_{d-1} * int int_region r^alpha g dt dr. Nodal g values are
// interpolated biquadratically on 3x3 node blocks; whole cells use exact
// power weights in r, cut cells a degree-4 triangle rule on the clipped
// polygon.
double integrate_region(const SpacetimeRecord& rec, const RegionSpec& region,
                        const WeightedDensity& w);

// A slab with infinite radius becomes the slab out to the largest covered
// lattice radius at its top time, so it has a cylinder face. Other regions
// are returned unchanged.
RegionSpec close_in_coverage(const SpacetimeRecord& rec, const RegionSpec& region);

// Area of the region inside coverage (dt dr, no weight), handy for tests.
double region_area(const SpacetimeRecord& rec, const RegionSpec& region);

}  // namespace nlwlab
