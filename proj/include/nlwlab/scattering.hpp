#pragma once

#include <vector>

#include "nlwlab/functionals.hpp"
#include "nlwlab/initial_data.hpp"
#include "nlwlab/record.hpp"

namespace nlwlab {

// Smallest r_max for which a linear evolution over |dt| stays causally clean.
double required_r_max(const SolverState& s, double duration);

// Linear flow (nonlinearity off) from s.t to t_target, forward or backward,
// with the solver's scheme at |dt| = cfl*dr. Throws CoverageError when the grid
// is too small for the requested duration.
SolverState linear_propagate(const SolverState& s, double t_target, const ModelParams& m, double cfl = 0.5);

// Exact d = 3 radial solution of the linear wave equation:
//   r phi(t,r) = [g(r+t) + g(r-t)]/2 + (1/2) int_{r-t}^{r+t} h,
// g = r phi0 and h = r phi1 extended oddly. Returns phi and d_t phi at r.
struct OracleField {
  std::vector<double> phi;
  std::vector<double> dphi_dt;
};
OracleField dalembert_oracle_d3(const RadialProfile& data, double t, const std::vector<double>& r, int d = 3);

// (int |grad(a-b)|^2 + |d_t a - d_t b|^2 dx)^{1/2} on the common grid.
double energy_norm_difference(const SolverState& a, const SolverState& b, int d);
double energy_norm(const SolverState& a, int d);

// State at time t: the full resolution snapshot if the run stored one,
// otherwise the record row at t (record resolution).
SolverState state_from_record(const SpacetimeRecord& rec, double t);

// Energy-norm distance of L(-t1) u(t1) and L(-t2) u(t2), pulled back to the
// record start at the run's dt/dr.
double scatter_cauchy(const SpacetimeRecord& rec, double t1, double t2, const ModelParams& m);

// Same pull-back measured in Hdot^s x Hdot^{s-1}, d = 3, 0 < s <= 1. Both
// components use the sine transform below (the s-1 exponent is fine there for
// s > -1/2). s = 1 reproduces scatter_cauchy up to quadrature.
double scatter_cauchy_sobolev(const SpacetimeRecord& rec, double t1, double t2, const ModelParams& m, double s);

// t -> scatter_cauchy(t, 2t)
FunctionalSeries scatter_cauchy_series(const SpacetimeRecord& rec, const std::vector<double>& t_list,
                                       const ModelParams& m);

// Homogeneous Sobolev norm of a radial d = 3 profile sampled at r_i = i*dr:
//   ||f||^2 = (2 pi)^{-3} int |f^(rho)|^2 rho^{2s} 4 pi rho^2 d rho,
//   f^(rho) = (4 pi / rho) int r f(r) sin(r rho) dr.
// The (2 pi)^{-3} makes s = 1 equal int |grad f|^2 dx. The rho grid is
// midpoint with spacing pi/(16 R), R the numerical support, up to pi/dr.
double sobolev_norm_radial_d3(const std::vector<double>& f, double dr, double s);

}  // namespace nlwlab
