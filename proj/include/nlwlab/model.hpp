#pragma once

#include <stdexcept>
#include <string>

namespace nlwlab {

// Base class for all library errors. Subclasses let callers tell user-input
// problems apart from numerical ones.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Requested data lies outside what a record (or grid) can answer for.
class CoverageError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t) : Error(what), time(t) {}
  double time;
};

struct ModelParams {
  int d = 3;
  double p = 3.0;
  double gamma0 = 1.5;
  double epsilon = 0.1;
};

// Which admissibility window a run is checked against.
//   none        only 1 < p <= (d+2)/(d-2)
//   exploratory same as none, results carry no claim
//   flux_decay  adds the gamma0 window for decay on the foliation
//   scattering  adds the scattering window and p > p(d)
enum class Mode { none, exploratory, flux_decay, scattering };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

struct OpenInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
  bool contains(double x) const { return lo < x && x < hi; }
};

// s_p = d/2 - 2/(p-1)
double critical_exponent(int d, double p);
inline double critical_exponent(const ModelParams& m) { return critical_exponent(m.d, m.p); }

// p(d) = (1 + sqrt(d^2 + 4d - 4)) / (d - 1)
double scattering_threshold(int d);

double energy_critical_power(int d);    // (d+2)/(d-2)
double flux_decay_threshold(int d);     // (d+1)/(d-1)

inline double delta_p(const ModelParams& m) { return (m.p - 1.0) * (m.d - 1); }
inline double c_d(int d) { return (d - 1) * (d - 3) / 4.0; }

// Area of the unit sphere S^{d-1}.
double sphere_area(int d);

OpenInterval admissible_gamma0_window(const ModelParams& m, Mode mode);

// Throws InvalidArgument naming the offending field and the window it violates.
void validate(const ModelParams& m, Mode mode);

}  // namespace nlwlab
