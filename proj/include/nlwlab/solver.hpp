#pragma once

#include <cstddef>
#include <vector>

#include "nlwlab/model.hpp"
#include "nlwlab/record.hpp"

namespace nlwlab {

// sign(x)|x|^p; exact zero at x = 0.
double nonlinearity(double x, double p);
// |x|^{p+1} / (p+1)
double potential(double x, double p);

struct StateRates {
  std::vector<double> dphi;
  std::vector<double> dpi;
};

// Time derivative of (phi, pi) for phi_tt = Lap phi - |phi|^{p-1} phi.
// The radial Laplacian uses the flux form
//   (Lap f)_i = [a_{i+1/2}(f_{i+1}-f_i) - a_{i-1/2}(f_i-f_{i-1})] / (dr^2 w_i)
// with a = r^{d-1} at half nodes and w_i the cell volume / dr. At i = 0
// this reduces to 2d(f_1-f_0)/dr^2, the even-extension limit d*f''(0).
// The outer node is held fixed.
StateRates rhs(const SolverState& s, const ModelParams& m, bool nonlinear = true);

// Energy conserved by the semi-discrete flux-form scheme:
//   sum w_i dr (pi_i^2 + 2 V(phi_i)) + sum a_{i+1/2} dr ((phi_{i+1}-phi_i)/dr)^2
// times the sphere area. Same normalization as the time-slice energy.
double discrete_energy(const SolverState& s, const ModelParams& m, bool nonlinear = true);

// Continuum residual phi_tt - Lap phi + |phi|^{p-1} phi of the semi-discrete
// solution through s: the flux-form Laplacian minus a fourth order one.
// The nonlinear term cancels. The last two nodes are set to zero.
std::vector<double> scheme_residual(const SolverState& s, const ModelParams& m);

// Largest node radius where |phi| or |pi| exceeds rel * max.
double support_radius(const SolverState& s, double rel = 1e-14);

// Largest admissible dt/dr.
double max_cfl(int d);

struct EvolveOptions {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::size_t record_every = 4;
  std::size_t record_stride = 2;
  bool nonlinear = true;
  bool keep_record = true;
  // Full resolution snapshots are stored at the steps closest to these times.
  std::vector<double> snapshot_times;
  // Margin subtracted from the causal radius of the record.
  double causal_margin = -1.0;  // negative: max(1, 20 dr)
};

struct EvolveResult {
  SolverState state;
  SpacetimeRecord record;
};

// Classical RK4 on the semi-discrete system. dt may be negative (backward).
// Throws InvalidArgument on CFL violation and BlowUpError on non-finite values.
EvolveResult evolve(const SolverState& initial, const ModelParams& m, const EvolveOptions& opt);

// Plain RK4 stepping without a record.
SolverState advance(SolverState s, const ModelParams& m, double dt, std::size_t n_steps,
                    bool nonlinear);

// Fourth order d_r on the solver grid (even across r = 0, one-sided at the
// outer nodes).
std::vector<double> radial_derivative(const SolverState& s);

}  // namespace nlwlab
