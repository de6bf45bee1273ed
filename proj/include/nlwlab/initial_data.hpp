#pragma once

#include <functional>
#include <string>

#include "nlwlab/model.hpp"
#include "nlwlab/record.hpp"

namespace nlwlab {

enum class DataFamily { gaussian, compact_bump, polynomial_tail };
enum class VelocityProfile { zero, outgoing };

DataFamily parse_family(const std::string& s);
VelocityProfile parse_velocity(const std::string& s);
std::string to_string(DataFamily f);
std::string to_string(VelocityProfile v);

// gaussian        A exp(-((r-c)/w)^2)
// compact_bump    A exp(1 - 1/(1-x^2)) for |x| < 1, x = (r-c)/w, else 0
// polynomial_tail A (1 + r^2)^{-k/2}, which behaves like (1+r)^{-k}
struct InitialDataSpec {
  DataFamily family = DataFamily::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double tail_exponent = 3.0;
  // outgoing sets phi_1 = -phi_0' - (d-1) phi_0 / (2r), which is exactly
  // outgoing in d = 3. Needs data supported away from the origin.
  VelocityProfile velocity = VelocityProfile::zero;
};

// Analytic data, used by the quadratures and the d'Alembert oracle.
struct RadialProfile {
  std::function<double(double)> phi0;
  std::function<double(double)> dphi0;
  std::function<double(double)> phi1;
  // Beyond this radius both functions vanish identically (infinity for tails).
  double support = 0.0;
};

RadialProfile make_profile(const InitialDataSpec& spec, int d);

struct InitialData {
  SolverState state;
  double energy = 0.0;           // E_0 = int |d phi|^2 + 2/(p+1)|phi|^{p+1}
  double weighted_energy = 0.0;  // same with (1+r)^{gamma0}
};

// Samples the profile on the grid and computes both energies by adaptive
// Gauss-Kronrod quadrature of the analytic profile. Infinite support is handled
// by doubling the upper limit until the tail is negligible; a tail that does
// not settle is reported as a divergent weighted energy.
InitialData make_initial_data(const InitialDataSpec& spec, double dr, double r_max,
                              const ModelParams& m);

// int (1+r)^gamma (phi1^2 + phi0'^2 + 2/(p+1)|phi0|^{p+1}) dx
double profile_energy(const RadialProfile& prof, const ModelParams& m, double gamma);

}  // namespace nlwlab
