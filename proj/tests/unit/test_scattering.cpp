#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nlwlab/geometry.hpp"
#include "nlwlab/scattering.hpp"

using namespace nlwlab;

namespace {

std::vector<double> sampled(double dr, double r_max, double (*f)(double)) {
  std::vector<double> v;
  for (std::size_t i = 0; static_cast<double>(i) * dr <= r_max + 1e-12; ++i) v.push_back(f(static_cast<double>(i) * dr));
  return v;
}

}  // namespace

TEST_SUITE("scattering") {
  TEST_CASE("Sobolev norms of the Gaussian") {
    const auto f = sampled(0.02, 12.0, [](double r) { return std::exp(-r * r); });
    // mpmath
    CHECK(sobolev_norm_radial_d3(f, 0.02, 1.0) == doctest::Approx(std::sqrt(5.9061037296459074041)).epsilon(1e-6));
    CHECK_THROWS_AS(sobolev_norm_radial_d3(f, 0.02, 0.0), InvalidArgument);
    CHECK(sobolev_norm_radial_d3(f, 0.02, 0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-6));
  }

  TEST_CASE("d'Alembert oracle against closed forms") {
    ModelParams m;
    const auto prof = make_profile({}, 3);
    const std::vector<double> r = {0.0, 0.5, 2.5, 7.0};
    // mpmath values of the exact solution
    const auto a = dalembert_oracle_d3(prof, 1.0, r);
    CHECK(a.phi[1] == doctest::Approx(-0.23130155469290592895).epsilon(1e-12));
    CHECK(a.phi[0] == doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
    CHECK(dalembert_oracle_d3(prof, 3.0, r).phi[2] == doctest::Approx(-0.077880078307060321859).epsilon(1e-12));
    CHECK(dalembert_oracle_d3(prof, 5.0, r).phi[3] == doctest::Approx(0.002616519841247740042).epsilon(1e-12));
    // d_t phi by central difference of the closed form
    const double h = 1e-5;
    const double dt = (testing::gaussian_wave(1.0 + h, 0.5) - testing::gaussian_wave(1.0 - h, 0.5)) / (2 * h);
    CHECK(a.dphi_dt[1] == doctest::Approx(dt).epsilon(1e-8));
    CHECK_THROWS_AS(dalembert_oracle_d3(prof, 1.0, r, 4), InvalidArgument);
  }

  TEST_CASE("oracle with pure velocity data") {
    RadialProfile prof;
    prof.phi0 = [](double) { return 0.0; };
    prof.dphi0 = [](double) { return 0.0; };
    prof.phi1 = [](double r) { return std::exp(-r * r); };
    prof.support = kInf;
    // r phi = (1/2) int_{r-t}^{r+t} s e^{-s^2} ds
    const double t = 1.5, r = 0.8;
    const double expect = 0.25 * (std::exp(-(r - t) * (r - t)) - std::exp(-(r + t) * (r + t))) / r;
    CHECK(dalembert_oracle_d3(prof, t, {r}).phi[0] == doctest::Approx(expect).epsilon(1e-10));
  }

  TEST_CASE("linear propagation there and back") {
    ModelParams m;
    const auto d = make_initial_data({}, 0.05, 30.0, m);
    const auto fwd = linear_propagate(d.state, 8.0, m);
    CHECK(fwd.t == doctest::Approx(8.0));
    const auto back = linear_propagate(fwd, 0.0, m, 0.25);
    CHECK(energy_norm_difference(back, d.state, 3) < 1e-3 * energy_norm(d.state, 3));
    CHECK_THROWS_AS(linear_propagate(d.state, 40.0, m), CoverageError);
  }

  TEST_CASE("energy norm of the initial Gaussian") {
    ModelParams m;
    const auto d = make_initial_data({}, 0.02, 12.0, m);
    CHECK(energy_norm(d.state, 3) == doctest::Approx(std::sqrt(5.9061037296459074041)).epsilon(1e-4));
  }

  TEST_CASE("linear runs scatter trivially") {
    const auto r = testing::run_gaussian(4.0, 0.05, 60.0, 20.0, false, 0.25, {5.0, 10.0, 20.0});
    ModelParams m;
    m.p = 4.0;
    CHECK(scatter_cauchy(r.record, 5.0, 10.0, m) < 1e-4);
    CHECK(scatter_cauchy(r.record, 10.0, 20.0, m) < 1e-4);
    CHECK(state_from_record(r.record, 10.0).dr == doctest::Approx(0.05));
    // no snapshot at 7: record row at record resolution
    CHECK(state_from_record(r.record, 7.0).dr == doctest::Approx(0.1));
    CHECK_THROWS(state_from_record(r.record, 30.0));
  }

  TEST_CASE("round trip at t = 20 within 1e-3 of the energy norm") {
    ModelParams m;
    const auto probe = make_initial_data({}, 0.025, 20.0, m);
    // the backward leg starts from the spread out state at t = 20
    const double r_max = std::ceil(required_r_max(probe.state, 40.0)) + 1.0;
    const auto d = make_initial_data({}, 0.025, r_max, m);
    const auto back = linear_propagate(linear_propagate(d.state, 20.0, m), 0.0, m);
    CHECK(energy_norm_difference(back, d.state, 3) <= 1e-3 * energy_norm(d.state, 3));
    const auto same = linear_propagate(d.state, 0.0, m);
    CHECK(same.phi == d.state.phi);
    CHECK(same.pi == d.state.pi);
  }

  TEST_CASE("oracle: initial data, strong Huygens, constant energy") {
    const auto prof = make_profile({}, 3);
    const std::vector<double> r = {0.0, 0.3, 1.7};
    const auto a = dalembert_oracle_d3(prof, 0.0, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(a.phi[i] == doctest::Approx(std::exp(-r[i] * r[i])).epsilon(1e-14));
      CHECK(a.dphi_dt[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    }

    InitialDataSpec bump;
    bump.family = DataFamily::compact_bump;
    const auto pb = make_profile(bump, 3);
    REQUIRE(pb.support <= 1.0 + 1e-12);
    CHECK(dalembert_oracle_d3(pb, 0.5, {0.0}).phi[0] != 0.0);
    CHECK(dalembert_oracle_d3(pb, 2.5, {0.0}).phi[0] == 0.0);
    CHECK(dalembert_oracle_d3(pb, 2.5, {0.2}).phi[0] == 0.0);

    // int phi_t^2 + phi_r^2 dx of the oracle field, fourth order differences
    const double h = 0.004;
    std::vector<double> rr;
    for (double x = 0.0; x <= 16.0 + 1e-12; x += h) rr.push_back(x);
    for (double t : {0.0, 2.0, 5.0}) {
      const auto f = dalembert_oracle_d3(prof, t, rr);
      std::vector<double> e(rr.size(), 0.0);
      for (std::size_t i = 2; i + 2 < rr.size(); ++i) {
        const double fr = (f.phi[i - 2] - 8 * f.phi[i - 1] + 8 * f.phi[i + 1] - f.phi[i + 2]) / (12 * h);
        e[i] = fr * fr + f.dphi_dt[i] * f.dphi_dt[i];
      }
      CAPTURE(t);
      CHECK(4 * M_PI * integrate_radial_samples(e, h, 2.0) == doctest::Approx(5.9061037296459074041).epsilon(1e-6));
    }
  }

  TEST_CASE("Sobolev norm: grid agreement, closed form, scaling, rejections") {
    ModelParams m;
    const auto d = make_initial_data({}, 0.02, 12.0, m);
    const double grid = energy_norm(d.state, 3);
    CHECK(sobolev_norm_radial_d3(d.state.phi, 0.02, 1.0) == doctest::Approx(grid).epsilon(1e-3));

    // exp(-r^2/2) has transform (2 pi)^{3/2} exp(-rho^2/2), so the squared
    // norm is 2 pi Gamma(s + 3/2)
    const auto g = sampled(0.02, 14.0, [](double r) { return std::exp(-0.5 * r * r); });
    for (double s : {0.25, 0.5, 1.0}) {
      CAPTURE(s);
      CHECK(sobolev_norm_radial_d3(g, 0.02, s) == doctest::Approx(std::sqrt(2 * M_PI * std::tgamma(s + 1.5))).epsilon(1e-6));
    }

    // p = 3: s_p = 1/2 and phi_2(r) = 2 phi(2r)
    const auto f = sampled(0.01, 12.0, [](double r) { return std::exp(-r * r); });
    const auto f2 = sampled(0.01, 12.0, [](double r) { return 2.0 * std::exp(-4.0 * r * r); });
    CHECK(critical_exponent(3, 3.0) == 0.5);
    CHECK(sobolev_norm_radial_d3(f2, 0.01, 0.5) == doctest::Approx(sobolev_norm_radial_d3(f, 0.01, 0.5)).epsilon(1e-6));

    CHECK(sobolev_norm_radial_d3(std::vector<double>(100, 0.0), 0.1, 0.5) == 0.0);
    CHECK_THROWS_AS(sobolev_norm_radial_d3(sampled(0.1, 10.0, [](double r) { return 1.0 / (1.0 + r); }), 0.1, 1.0),
                    InvalidArgument);
  }

  TEST_CASE("Cauchy distance: zero on the diagonal, triangle, critical norm") {
    const auto r = testing::run_gaussian(4.0, 0.05, 80.0, 20.0, true, 0.25, {5.0, 10.0, 20.0});
    ModelParams m;
    m.p = 4.0;
    CHECK(scatter_cauchy(r.record, 10.0, 10.0, m) == 0.0);
    const double a = scatter_cauchy(r.record, 5.0, 10.0, m), b = scatter_cauchy(r.record, 10.0, 20.0, m);
    const double c = scatter_cauchy(r.record, 5.0, 20.0, m);
    CHECK(c <= a + b + 1e-9);
    CHECK(scatter_cauchy_sobolev(r.record, 5.0, 10.0, m, 1.0) == doctest::Approx(a).epsilon(1e-3));
    const double sp = critical_exponent(m);
    const double x = scatter_cauchy_sobolev(r.record, 5.0, 10.0, m, sp);
    const double y = scatter_cauchy_sobolev(r.record, 10.0, 20.0, m, sp);
    CHECK(x > 0.0);
    CHECK(y < x);
    ModelParams m4 = m;
    m4.d = 4;
    CHECK_THROWS_AS(scatter_cauchy_sobolev(r.record, 5.0, 10.0, m4, 1.0), InvalidArgument);
    CHECK_THROWS_AS(scatter_cauchy(r.record, 10.0, 5.0, m), InvalidArgument);
  }
}
