#include "nlwlab/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlwlab/model.hpp"

namespace nlwlab {

PowerLawFit fit_power_law(const FunctionalSeries& series, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgument(fmt::format("fit_power_law: empty window [{}, {}]", lo, hi));
  std::vector<double> x, y;
  for (const auto& [u, v] : series.pairs) {
    if (u < lo || u > hi) continue;
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument(fmt::format("fit_power_law: value {} at u = {} is not positive", v, u));
    x.push_back(std::log(1.0 + std::abs(u)));
    y.push_back(std::log(v));
  }
  if (x.size() < 4)
    throw InvalidArgument(fmt::format("fit_power_law: {} points in [{}, {}], need at least 4", x.size(), lo, hi));
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 1e-14 * n)) throw InvalidArgument("fit_power_law: degenerate window (all u_+ equal)");
  PowerLawFit out;
  out.points = x.size();
  out.exponent = sxy / sxx;
  out.intercept = my - out.exponent * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (out.intercept + out.exponent * x[k]);
    ssr += e * e;
  }
  // a flat series is fitted perfectly by the zero slope line
  out.r_squared = syy > 1e-28 * n ? 1.0 - ssr / syy : 1.0;
  return out;
}

PlateauVerdict plateau_check(const FunctionalSeries& series, double tolerance) {
  const auto& pr = series.pairs;
  if (pr.size() < 3) throw InvalidArgument(fmt::format("plateau_check: {} levels, need at least 3", pr.size()));
  for (std::size_t k = 1; k < pr.size(); ++k)
    if (std::abs(pr[k].first - 2.0 * pr[k - 1].first) > 1e-9 * std::abs(pr[k].first))
      throw InvalidArgument(fmt::format("plateau_check: parameters {} and {} are not a doubling", pr[k - 1].first,
                                        pr[k].first));
  if (!(tolerance >= 0.0)) throw InvalidArgument("plateau_check: tolerance must be >= 0");
  PlateauVerdict out;
  out.sup = pr.front().second;
  for (const auto& x : pr) out.sup = std::max(out.sup, x.second);
  const double cur = pr.back().second;
  const double inc = cur - pr[pr.size() - 2].second;
  if (cur == 0.0) {
    out.last_increment_ratio = inc == 0.0 ? 0.0 : INFINITY;
  } else {
    out.last_increment_ratio = inc / std::abs(cur);
  }
  out.pass = out.last_increment_ratio <= tolerance;
  return out;
}

std::string to_string(ConvergenceStatus s) {
  switch (s) {
    case ConvergenceStatus::ok: return "ok";
    case ConvergenceStatus::noise_floor: return "converged below noise floor";
    case ConvergenceStatus::non_monotone: return "non-monotone differences";
  }
  return "?";
}

ConvergenceVerdict convergence_order(double v_h, double v_h2, double v_h4) {
  const double a = v_h - v_h2;
  const double b = v_h2 - v_h4;
  const double scale = std::max({std::abs(v_h), std::abs(v_h2), std::abs(v_h4)});
  ConvergenceVerdict out;
  if (std::abs(b) <= 4.0 * std::numeric_limits<double>::epsilon() * scale || b == 0.0) {
    out.status = ConvergenceStatus::noise_floor;
    out.order = a == 0.0 ? 0.0 : INFINITY;
    return out;
  }
  out.order = std::log2(std::abs(a) / std::abs(b));
  if (a * b < 0.0) out.status = ConvergenceStatus::non_monotone;
  return out;
}

UniformBoundVerdict uniform_bound_check(const FunctionalSeries& series, double ceiling, double tolerance) {
  if (series.pairs.empty()) throw InvalidArgument("uniform_bound_check: empty series");
  UniformBoundVerdict out;
  out.ceiling = ceiling;
  out.sup = series.pairs.front().second;
  for (const auto& x : series.pairs) out.sup = std::max(out.sup, x.second);
  out.pass = out.sup <= ceiling * (1.0 + tolerance);
  return out;
}

}  // namespace nlwlab
