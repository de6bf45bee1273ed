#pragma once

#include <map>
#include <string>
#include <vector>

#include "nlwlab/geometry.hpp"
#include "nlwlab/model.hpp"

namespace nlwlab {

enum class MultiplierKind { energy, morawetz, rweighted };

// energy:    X = d_t, Y = 0, chi = 0
// morawetz:  X = f d_r, f = 2/delta_p + 1 - (1+r)^{-eps}, chi = (d-1) f / (2r)
// rweighted: X = r^g L, Y = (d-1) g r^{g-2} phi^2 L / 4, chi = (d-1) r^{g-1} / 2
struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::energy;
  double epsilon = 0.1;
  double gamma = 1.0;

  static MultiplierSpec energy() { return {MultiplierKind::energy, 0.1, 1.0}; }
  static MultiplierSpec morawetz(double eps) { return {MultiplierKind::morawetz, eps, 1.0}; }
  static MultiplierSpec rweighted(double gamma) { return {MultiplierKind::rweighted, 0.1, gamma}; }
  std::string label() const;
};

// 1 - (1+r)^{-eps} without cancellation for small r.
double one_minus_rplus_pow(double r, double eps);
double morawetz_f(double r, const ModelParams& m, double eps);
double morawetz_fprime(double r, double eps);
// -Box chi for the morawetz chi, r > 0.
double morawetz_minus_box_chi(double r, const ModelParams& m, double eps);
// r * ((p-1)(d-1) f / r - 2 f') - 1, nonnegative by the coefficient bound.
double morawetz_potential_margin(double r, const ModelParams& m, double eps);
// r (f/r - f') - 2/delta_p, nonnegative.
double morawetz_f_margin(double r, const ModelParams& m, double eps);
// (d-1)/2 - (gamma+d-1)/(p+1), positive inside the gamma window.
double rweighted_potential_coefficient(const ModelParams& m, double gamma);

// Upper components J^t, J^r of the current at r > 0.
struct CurrentComponents {
  double jt = 0.0;
  double jr = 0.0;
};
CurrentComponents current(const FieldPoint& x, const MultiplierSpec& s, const ModelParams& m);

// Pointwise densities at r > 0 (no measure).
double bulk_density(const FieldPoint& x, const MultiplierSpec& s, const ModelParams& m);
// Face flux density per unit of the face parameter, oriented so that
// energy gives the future-directed flux:
//   time_slice -J^t, outgoing J^r - J^t, incoming -(J^r + J^t), cylinder -J^r.
double boundary_density(const FieldPoint& x, SliceKind kind, const MultiplierSpec& s,
                        const ModelParams& m);

// Measure-weighted forms (r^alpha g, continuous at the origin).
WeightedDensity bulk_weighted(const MultiplierSpec& s, const ModelParams& m);
WeightedDensity boundary_weighted(SliceKind kind, const MultiplierSpec& s, const ModelParams& m);
// Total-derivative part (d-1)/4 d(r^{d+g-2} phi^2) of the rweighted face
// densities; sums to zero over a closed boundary.
WeightedDensity rweighted_derivative_part(SliceKind kind, double gamma, const ModelParams& m);
// Face density used by the auditor: the rweighted flux with its derivative
// part removed (the removed parts cancel exactly around a closed boundary,
// but their quadrature errors do not). Other multipliers: boundary_weighted.
WeightedDensity audited_boundary_weighted(SliceKind kind, const MultiplierSpec& s, const ModelParams& m);

// Discrete residual phi_tt - Lap phi + |phi|^{p-1} phi on the record lattice.
std::vector<double> pde_residual(const SpacetimeRecord& rec);
// -R (X phi + chi phi), looked up on lattice nodes.
WeightedDensity source_weighted(const MultiplierSpec& s, const ModelParams& m,
                                const SpacetimeRecord& rec, const std::vector<double>& residual);

struct CurrentEvaluation {
  std::string region;
  std::string spec;
  double bulk = 0.0;
  double source = 0.0;
  std::map<std::string, double> boundary_terms;  // signed contributions per face
  double residual = 0.0;

  double boundary_sum() const;
  // max(|bulk|, |boundary term|) used to normalize the residual.
  double scale() const;
  double relative_residual() const;
};

CurrentEvaluation audit_identity(const SpacetimeRecord& rec, const RegionSpec& region,
                                 const MultiplierSpec& spec, const ModelParams& m);

// Signed sum of the derivative parts over the faces of a closed region.
double rweighted_telescoping_sum(const SpacetimeRecord& rec, const RegionSpec& region, double gamma,
                                 const ModelParams& m);

// ILED integrand (|d phi|^2 + (1+r)^{-2} phi^2)/(1+r)^{1+eps} + |phi|^{p+1}/r at r > 0.
double iled_density(const FieldPoint& x, const ModelParams& m);
WeightedDensity iled_weighted(const ModelParams& m);

// c with morawetz bulk >= c * ILED integrand pointwise:
//   c = min(eps/2, 1/(2(p+1)), (d-1) eps (1+eps) / 4)
double iled_pointwise_constant(const ModelParams& m);

struct IledCheck {
  double lhs = 0.0;    // int ILED integrand
  double rhs = 0.0;    // int morawetz bulk
  double ratio = 1.0;  // lhs / rhs, 1 when both vanish
  double bound = 0.0;  // 1 / c
  bool holds = true;
};
IledCheck iled_lower_bound_check(const SpacetimeRecord& rec, const RegionSpec& region,
                                 const ModelParams& m);

}  // namespace nlwlab
