#include <doctest.h>

#include <cmath>

#include "nlwlab/analysis.hpp"

using namespace nlwlab;

namespace {

template <class F>
FunctionalSeries series(const std::vector<double>& us, F f) {
  FunctionalSeries s;
  s.label = "test";
  for (double u : us) s.pairs.emplace_back(u, f(u));
  return s;
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  for (double u = lo; u <= hi + 1e-12; u += step) v.push_back(u);
  return v;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("exact power law") {
    const auto s = series(range(2, 32, 1), [](double u) { return 7.0 * std::pow(1.0 + u, -1.5); });
    const auto f = fit_power_law(s, 2, 32);
    CHECK(f.exponent == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
    CHECK(f.points == 31);
  }

  TEST_CASE("oscillating power law") {
    const auto s = series(range(2, 32, 1), [](double u) { return 3.0 * std::pow(1.0 + u, -2.0) * (1.0 + 0.01 * std::sin(u)); });
    CHECK(std::abs(fit_power_law(s, 2, 32).exponent + 2.0) < 0.02);
  }

  TEST_CASE("constant series and scaling") {
    const auto c = series(range(2, 32, 1), [](double) { return 4.0; });
    CHECK(fit_power_law(c, 2, 32).exponent == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    const auto a = series(range(2, 32, 1), [](double u) { return std::pow(1.0 + u, -1.2) * (1 + 0.1 / u); });
    const auto b = series(range(2, 32, 1), [](double u) { return 50.0 * std::pow(1.0 + u, -1.2) * (1 + 0.1 / u); });
    CHECK(fit_power_law(a, 2, 32).exponent == doctest::Approx(fit_power_law(b, 2, 32).exponent).epsilon(1e-12));
  }

  TEST_CASE("fit window must hold two points") {
    const auto s = series(range(2, 32, 1), [](double u) { return 1.0 / u; });
    CHECK_THROWS_AS(fit_power_law(s, 40, 50), InvalidArgument);
  }

  TEST_CASE("plateau") {
    const auto flat = series({25, 50, 100}, [](double T) { return 1.0 - std::exp(-T); });
    CHECK(plateau_check(flat, 0.02).pass);
    // 1 - 2^{-T/25}: last increment 0.1875 of 0.9375, 20 %
    const auto geo = series({25, 50, 100}, [](double T) { return 1.0 - std::pow(2.0, -T / 25.0); });
    const auto v = plateau_check(geo, 0.05);
    CHECK(v.last_increment_ratio == doctest::Approx(0.2).epsilon(1e-12));
    CHECK_FALSE(v.pass);
    const auto log = series({25, 50, 100}, [](double T) { return std::log(T); });
    CHECK_FALSE(plateau_check(log, 0.02).pass);
    CHECK_THROWS_AS(plateau_check(series({25, 50}, [](double) { return 1.0; }), 0.1), InvalidArgument);
    CHECK_THROWS_AS(plateau_check(series({25, 50, 70}, [](double) { return 1.0; }), 0.1), InvalidArgument);
  }

  TEST_CASE("convergence order") {
    const auto q = [](double h) { return 1.0 + h * h; };
    auto c = convergence_order(q(0.1), q(0.05), q(0.025));
    CHECK(c.order == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(c.status == ConvergenceStatus::ok);
    const auto qc = [](double h) { return 1.0 + h * h + h * h * h; };
    // log2((0.0075 + 0.000875) / (0.001875 + 0.000109375))
    c = convergence_order(qc(0.1), qc(0.05), qc(0.025));
    CHECK(c.order == doctest::Approx(std::log2(0.008375 / 0.001984375)).epsilon(1e-9));
    CHECK(c.order == doctest::Approx(2.077).epsilon(1e-3));
    CHECK(convergence_order(1.0, 1.0, 1.0).status == ConvergenceStatus::noise_floor);
    CHECK(convergence_order(1.0, 1.1, 1.0).status == ConvergenceStatus::non_monotone);
  }

  TEST_CASE("uniform bound") {
    const auto s = series({0, 1, 2}, [](double u) { return 1.0 - 0.1 * u; });
    CHECK(uniform_bound_check(s, 1.0, 0.0).pass);
    CHECK_FALSE(uniform_bound_check(s, 0.95, 0.01).pass);
    CHECK(uniform_bound_check(s, 0.95, 0.06).pass);
  }
}
