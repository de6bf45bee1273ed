#include "nlwlab/initial_data.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "nlwlab/solver.hpp"

namespace nlwlab {

DataFamily parse_family(const std::string& s) {
  if (s == "gaussian") return DataFamily::gaussian;
  if (s == "compact_bump") return DataFamily::compact_bump;
  if (s == "polynomial_tail") return DataFamily::polynomial_tail;
  throw InvalidArgument(fmt::format(
      "data.family: unknown value '{}' (expected gaussian|compact_bump|polynomial_tail)", s));
}

VelocityProfile parse_velocity(const std::string& s) {
  if (s == "zero") return VelocityProfile::zero;
  if (s == "outgoing") return VelocityProfile::outgoing;
  throw InvalidArgument(fmt::format("data.velocity: unknown value '{}' (expected zero|outgoing)", s));
}

std::string to_string(DataFamily f) {
  switch (f) {
    case DataFamily::gaussian: return "gaussian";
    case DataFamily::compact_bump: return "compact_bump";
    case DataFamily::polynomial_tail: return "polynomial_tail";
  }
  return "gaussian";
}

std::string to_string(VelocityProfile v) { return v == VelocityProfile::zero ? "zero" : "outgoing"; }

RadialProfile make_profile(const InitialDataSpec& spec, int d) {
  const double A = spec.amplitude;
  const double c = spec.center;
  const double w = spec.width;
  if (!(w > 0.0)) throw InvalidArgument(fmt::format("data.width = {}: must be positive", w));
  if (c < 0.0) throw InvalidArgument(fmt::format("data.center = {}: must be >= 0", c));
  RadialProfile p;
  switch (spec.family) {
    case DataFamily::gaussian:
      p.phi0 = [=](double r) { const double x = (r - c) / w; return A * std::exp(-x * x); };
      p.dphi0 = [=](double r) {
        const double x = (r - c) / w;
        return -2.0 * A * x / w * std::exp(-x * x);
      };
      // exp(-x^2) < 1e-300 beyond x ~ 26.3
      p.support = c + 27.0 * w;
      break;
    case DataFamily::compact_bump:
      p.phi0 = [=](double r) {
        const double x = (r - c) / w;
        if (std::abs(x) >= 1.0) return 0.0;
        return A * std::exp(1.0 - 1.0 / (1.0 - x * x));
      };
      p.dphi0 = [=](double r) {
        const double x = (r - c) / w;
        if (std::abs(x) >= 1.0) return 0.0;
        const double q = 1.0 - x * x;
        return A * std::exp(1.0 - 1.0 / q) * (-2.0 * x / (q * q)) / w;
      };
      p.support = c + w;
      break;
    case DataFamily::polynomial_tail: {
      const double k = spec.tail_exponent;
      if (!(k > 0.0)) throw InvalidArgument(fmt::format("data.tail_exponent = {}: must be positive", k));
      if (spec.velocity == VelocityProfile::outgoing)
        throw InvalidArgument("data.velocity = outgoing is not available for polynomial_tail");
      p.phi0 = [=](double r) { return A * std::pow(1.0 + r * r, -0.5 * k); };
      p.dphi0 = [=](double r) { return -A * k * r * std::pow(1.0 + r * r, -0.5 * k - 1.0); };
      p.support = std::numeric_limits<double>::infinity();
      break;
    }
  }
  if (spec.velocity == VelocityProfile::zero) {
    p.phi1 = [](double) { return 0.0; };
  } else {
    const double clear = spec.family == DataFamily::gaussian ? 6.0 * w : w;
    if (c < clear)
      throw InvalidArgument(fmt::format(
          "data.velocity = outgoing needs data away from the origin (center >= {})", clear));
    auto f0 = p.phi0;
    auto f1 = p.dphi0;
    p.phi1 = [=](double r) {
      if (r <= 0.0) return 0.0;
      return -f1(r) - 0.5 * (d - 1) * f0(r) / r;
    };
  }
  return p;
}

namespace {

double integrate_piece(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-14, &err);
}

}  // namespace

double profile_energy(const RadialProfile& prof, const ModelParams& m, double gamma) {
  const double p = m.p;
  const int d = m.d;
  auto density = [&](double r) {
    const double f0 = prof.phi0(r);
    const double g0 = prof.dphi0(r);
    const double f1 = prof.phi1(r);
    const double e = f1 * f1 + g0 * g0 + 2.0 * potential(f0, p);
    return std::pow(1.0 + r, gamma) * e * std::pow(r, d - 1);
  };
  const double omega = sphere_area(d);

  if (std::isfinite(prof.support)) {
    // unit-length panels resolve the features of width >= 1/10
    double total = 0.0;
    const double step = 0.5;
    for (double a = 0.0; a < prof.support; a += step)
      total += integrate_piece(density, a, std::min(a + step, prof.support));
    return omega * total;
  }

  // Infinite support: [0, 8] then dyadic shells [R, 2R].
  double total = 0.0;
  for (double a = 0.0; a < 8.0; a += 0.5) total += integrate_piece(density, a, a + 0.5);
  double R = 8.0;
  double prev_piece = -1.0;
  for (int k = 0; k < 200; ++k) {
    const double piece = integrate_piece(density, R, 2.0 * R);
    total += piece;
    R *= 2.0;
    if (piece == 0.0) return omega * total;
    if (prev_piece > 0.0) {
      const double q = piece / prev_piece;
      if (q < 0.9) {
        const double tail = piece * q / (1.0 - q);
        if (tail <= 1e-12 * std::abs(total)) return omega * total;
      }
    }
    prev_piece = piece;
    if (!std::isfinite(total) || R > 1e150) break;
  }
  throw InvalidArgument(fmt::format(
      "data: weighted energy with gamma = {} does not converge for this profile "
      "(tail quadrature did not settle)", gamma));
}

InitialData make_initial_data(const InitialDataSpec& spec, double dr, double r_max,
                              const ModelParams& m) {
  InitialData out;
  out.state = SolverState::zeros(dr, r_max);
  if (spec.amplitude == 0.0) return out;
  const auto prof = make_profile(spec, m.d);
  for (std::size_t i = 0; i < out.state.nodes(); ++i) {
    const double r = out.state.r(i);
    out.state.phi[i] = prof.phi0(r);
    out.state.pi[i] = prof.phi1(r);
  }
  out.energy = profile_energy(prof, m, 0.0);
  out.weighted_energy = profile_energy(prof, m, m.gamma0);
  return out;
}

}  // namespace nlwlab
