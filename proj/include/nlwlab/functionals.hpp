#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nlwlab/geometry.hpp"
#include "nlwlab/model.hpp"

namespace nlwlab {

// Tagged (parameter, value) sequence.
struct FunctionalSeries {
  std::string label;
  std::string parameter = "u";
  std::vector<std::pair<double, double>> pairs;
  ModelParams params;
  std::string provenance;

  std::vector<double> parameters() const;
  std::vector<double> values() const;
  // Strictly increasing parameters, finite values, values >= -tol.
  void check(double tol = 0.0) const;
};

// Energy through a slice with the kind-appropriate integrand:
//   time slice |d phi|^2 + 2/(p+1)|phi|^{p+1}          (dr)
//   H_u        |L phi|^2 + 2/(p+1)|phi|^{p+1}          (dv)
//   Hbar_v     |Lbar phi|^2 + 2/(p+1)|phi|^{p+1}       (du)
// all against omega r^{d-1}. This is twice the flux of the d_t current, which
// makes E(Sigma_u1^v) = E(Sigma_u2^v) + E(Hbar_v^{u1,u2}) exact in the continuum.
double energy_flux(const SpacetimeRecord& rec, const SliceSpec& slice);
WeightedDensity energy_density(SliceKind kind, const ModelParams& m);

// E(Sigma_u1^v) - E(Sigma_u2^v) - E(Hbar_v^{u1,u2}), u1 >= -1.
double energy_partition_residual(const SpacetimeRecord& rec, double u1, double u2, double v);

// int int_{[t0,T] x R^d} ILED integrand dx dt
double iled_bulk(const SpacetimeRecord& rec, double T, const ModelParams& m);
// Same integrand over D_u, cut at coverage.
double iled_bulk_region(const SpacetimeRecord& rec, double u, const ModelParams& m);

struct RWeightedResult {
  double bulk = 0.0;
  FunctionalSeries flux;
};

// bulk = int int_{[t0,T]} r^{g-d}|L psi|^2 + v_+^{g-eps-1}|phi|^{p+1} dx dt
// flux = u -> int_{H_u} r^g |L psi|^2 dv dw, psi = r^{(d-1)/2} phi.
// Requires 1 <= gamma <= gamma0. T = infinity uses the whole record.
RWeightedResult rweighted_bulk_and_flux(const SpacetimeRecord& rec, const std::vector<double>& u_list,
                                        double gamma, const ModelParams& m, double T = kInf);

// |L psi|^2 / r^{d-1} = (L phi + (d-1) phi / (2r))^2, r > 0.
double rweighted_flux_integrand(const FieldPoint& x, int d);

// (int int_{[t0,T]} v_+^w |phi|^q dx dt)^{1/q}
double spacetime_norm(const SpacetimeRecord& rec, double q, double weight_exponent, double T);

// int (1+r)^gamma (|grad phi0|^2 + |phi1|^2 + 2/(p+1)|phi0|^{p+1}) dx on the
// grid: radial_derivative for phi0', piecewise quadratic in r.
double weighted_initial_energy(const SolverState& s, const ModelParams& m, double gamma);

// u -> E(H_u) for u <= -1 (H_u starts on the initial slice).
FunctionalSeries exterior_flux_series(const SpacetimeRecord& rec, const std::vector<double>& u_list);

// u -> E(Sigma_u), with the null part cut at coverage.
FunctionalSeries foliation_flux_series(const SpacetimeRecord& rec, const std::vector<double>& u_list);

// int r^{-2} phi^2 dx and (2/(d-2))^2 int phi_r^2 dx on the time slice t.
std::pair<double, double> hardy_sides(const SpacetimeRecord& rec, double t);

}  // namespace nlwlab
