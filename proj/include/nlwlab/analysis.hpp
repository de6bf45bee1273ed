#pragma once

#include <string>

#include "nlwlab/functionals.hpp"

namespace nlwlab {

struct PowerLawFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

// Least squares line through (log u_+, log value), u_+ = 1 + |u|, over the
// series points with lo <= parameter <= hi.
PowerLawFit fit_power_law(const FunctionalSeries& series, double lo, double hi);

struct PlateauVerdict {
  bool pass = false;
  double sup = 0.0;
  double last_increment_ratio = 0.0;  // (v_n - v_{n-1}) / v_n
};

// Needs >= 3 levels with doubling parameters. Passes iff the last increment
// is within tolerance * current value.
PlateauVerdict plateau_check(const FunctionalSeries& series, double tolerance);

enum class ConvergenceStatus { ok, noise_floor, non_monotone };
std::string to_string(ConvergenceStatus s);

struct ConvergenceVerdict {
  double order = 0.0;
  ConvergenceStatus status = ConvergenceStatus::ok;
};

// log2(|v(h) - v(h/2)| / |v(h/2) - v(h/4)|)
ConvergenceVerdict convergence_order(double v_h, double v_h2, double v_h4);

// Uniform bound: every value <= ceiling * (1 + tolerance).
struct UniformBoundVerdict {
  bool pass = false;
  double sup = 0.0;
  double ceiling = 0.0;
};
UniformBoundVerdict uniform_bound_check(const FunctionalSeries& series, double ceiling, double tolerance);

}  // namespace nlwlab
