#include "nlwlab/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlwlab {

Mode parse_mode(const std::string& s) {
  if (s == "none") return Mode::none;
  if (s == "exploratory") return Mode::exploratory;
  if (s == "flux_decay") return Mode::flux_decay;
  if (s == "scattering") return Mode::scattering;
  throw InvalidArgument(fmt::format(
      "model.mode: unknown value '{}' (expected none|exploratory|flux_decay|scattering)", s));
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::none: return "none";
    case Mode::exploratory: return "exploratory";
    case Mode::flux_decay: return "flux_decay";
    case Mode::scattering: return "scattering";
  }
  return "none";
}

double critical_exponent(int d, double p) {
  if (!(p > 1.0)) throw InvalidArgument(fmt::format("critical_exponent: p = {} must exceed 1", p));
  return d / 2.0 - 2.0 / (p - 1.0);
}

double scattering_threshold(int d) {
  if (d < 3) throw InvalidArgument(fmt::format("scattering_threshold: d = {} must be >= 3", d));
  const double dd = d;
  return (1.0 + std::sqrt(dd * dd + 4.0 * dd - 4.0)) / (dd - 1.0);
}

double energy_critical_power(int d) { return (d + 2.0) / (d - 2.0); }
double flux_decay_threshold(int d) { return (d + 1.0) / (d - 1.0); }

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

OpenInterval admissible_gamma0_window(const ModelParams& m, Mode mode) {
  const OpenInterval none{0.0, 0.0};
  if (m.d < 3 || !(m.p > 1.0) || m.p > energy_critical_power(m.d)) return none;
  const double half_delta = 0.5 * (m.p - 1.0) * (m.d - 1);
  switch (mode) {
    case Mode::flux_decay: {
      if (!(m.p > flux_decay_threshold(m.d))) return none;
      return {1.0, std::min(2.0, half_delta)};
    }
    case Mode::scattering: {
      // energy-critical power excluded for scattering
      if (!(m.p > scattering_threshold(m.d)) || !(m.p < energy_critical_power(m.d))) return none;
      const double lo = std::max(4.0 / (m.p - 1.0) - m.d + 2.0, 1.0);
      const double hi = std::min(half_delta, 2.0);
      if (!(lo < hi)) return none;
      return {lo, hi};
    }
    case Mode::none:
    case Mode::exploratory:
      return {-1e300, 1e300};
  }
  return none;
}

void validate(const ModelParams& m, Mode mode) {
  if (m.d < 3) throw InvalidArgument(fmt::format("model.d = {}: need d >= 3", m.d));
  const double pc = energy_critical_power(m.d);
  if (!(m.p > 1.0) || m.p > pc)
    throw InvalidArgument(fmt::format(
        "model.p = {}: outside the global existence range 1 < p <= (d+2)/(d-2) = {}", m.p, pc));
  if (!(m.epsilon > 0.0 && m.epsilon < 0.5))
    throw InvalidArgument(fmt::format("model.epsilon = {}: need 0 < epsilon < 1/2", m.epsilon));
  if (mode == Mode::none || mode == Mode::exploratory) return;

  const auto w = admissible_gamma0_window(m, mode);
  if (w.empty()) {
    if (mode == Mode::flux_decay)
      throw InvalidArgument(fmt::format(
          "model.p = {}: flux decay needs p > (d+1)/(d-1) = {}", m.p, flux_decay_threshold(m.d)));
    throw InvalidArgument(fmt::format(
        "model.p = {}: scattering needs p(d) = {} < p < (d+2)/(d-2) = {}", m.p,
        scattering_threshold(m.d), pc));
  }
  if (!w.contains(m.gamma0))
    throw InvalidArgument(fmt::format(
        "model.gamma0 = {}: outside the admissible {} window ({}, {}) (endpoints excluded)",
        m.gamma0, to_string(mode), w.lo, w.hi));
  if (!(m.epsilon < m.gamma0 - 1.0))
    throw InvalidArgument(fmt::format(
        "model.epsilon = {}: need epsilon < gamma0 - 1 = {}", m.epsilon, m.gamma0 - 1.0));
}

}  // namespace nlwlab
