#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nlwlab/geometry.hpp"

using namespace nlwlab;

namespace {

constexpr double kPi = std::numbers::pi;

WeightedDensity phi_density(double alpha) {
  return {alpha, [](const FieldPoint& x) { return x.phi; }};
}

// phi = 1 + t r + r^2: quadratic, so the piecewise quadratic rules are exact
SpacetimeRecord quad_record() {
  return testing::synthetic_record(0.1, 0.1, 81, 81, [](double t, double r) {
    return std::array<double, 3>{1.0 + t * r + r * r, r, t + 2.0 * r};
  });
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("null coordinates") {
    const auto p = to_null(3.0, 1.0);
    CHECK(p.u == 1.0);
    CHECK(p.v == 2.0);
    CHECK(t_of(p) == 3.0);
    CHECK(r_of(p) == 1.0);
    CHECK(foliation_tau(5.0, 1.0) == 1.5);  // inside r <= 2 the leaf is a time slice
    CHECK(foliation_tau(5.0, 3.0) == 1.0);
  }

  TEST_CASE("radial sample integration is exact for quadratics against r^alpha") {
    for (std::size_t n : {10u, 11u, 40u}) {
      const double dr = 0.1;
      std::vector<double> g(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        const double r = dr * i;
        g[i] = 2.0 - r + 3.0 * r * r;
      }
      const double R = dr * n;
      for (double a : {0.0, 2.0, 0.5}) {
        const double exact =
            2.0 * std::pow(R, a + 1) / (a + 1) - std::pow(R, a + 2) / (a + 2) + 3.0 * std::pow(R, a + 3) / (a + 3);
        CHECK(integrate_radial_samples(g, dr, a) == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("time slice integral") {
    const auto rec = quad_record();
    // 4 pi int_0^4 r^2 (1 + 2 r + r^2) dr at t = 2
    const double R = 4.0;
    const double exact = 4.0 * kPi * (R * R * R / 3.0 + 2.0 * std::pow(R, 4) / 4.0 + std::pow(R, 5) / 5.0);
    CHECK(integrate_slice(rec, SliceSpec::time(2.0, 0.0, R), phi_density(2.0)) ==
          doctest::Approx(exact).epsilon(1e-12));
  }

  TEST_CASE("slab region integral and area") {
    const auto rec = quad_record();
    // int_1^3 int_0^2 r^2 (1 + t r + r^2) dr dt, times 4 pi
    const double exact = 4.0 * kPi * (2.0 * 8.0 / 3.0 + 4.0 * 4.0 + 2.0 * 32.0 / 5.0);
    CHECK(integrate_region(rec, RegionSpec::slab(1.0, 3.0, 2.0), phi_density(2.0)) ==
          doctest::Approx(exact).epsilon(1e-12));
    CHECK(region_area(rec, RegionSpec::slab(1.0, 3.0, 2.0)) == doctest::Approx(4.0));
  }

  TEST_CASE("foliation region area") {
    const auto rec = quad_record();
    // D_{0,1}^{v=3}: between tau = 0 and tau = 1, v <= 3, i.e. the band
    // 0 <= t - max(r, 2) <= 2 with t + r <= 6
    const double a = region_area(rec, RegionSpec::foliation(0.0, 1.0, 3.5));
    // r in [0,2]: t in [2,4], area 4. r in [2,2.5]: t in [r,r+2], area 1.
    // r in [2.5,3.5]: t in [r,7-r], area 1
    CHECK(a == doctest::Approx(6.0).epsilon(1e-12));
  }

  TEST_CASE("labels and faces") {
    CHECK(SliceSpec::time(1.0).label().find("time") != std::string::npos);
    CHECK(RegionSpec::slab(0.0, 10.0).label() == "slab(0,10,inf)");
    CHECK(RegionSpec::foliation(0.0, 4.0, 20.0).label() == "foliation(0,4,20)");
    CHECK_THROWS_AS(RegionSpec::slab(0.0, 1.0).faces(), InvalidArgument);
    CHECK_THROWS_AS(RegionSpec::future(1.0).faces(), InvalidArgument);
    CHECK(RegionSpec::slab(0.0, 1.0, 2.0).faces().size() == 4);
  }

  TEST_CASE("coverage") {
    const auto rec = quad_record();
    CHECK_THROWS_AS(integrate_slice(rec, SliceSpec::time(9.0), phi_density(2.0)), CoverageError);
    const auto closed = close_in_coverage(rec, RegionSpec::slab(0.0, 2.0));
    CHECK(closed.bounds()[2] == doctest::Approx(rec.r_rec_max()));
  }

  TEST_CASE("outgoing d = 3 wave: r L phi + phi = 0 along H_u") {
    // r phi = h(t - r) - h(t + r), h(s) = exp(-(s + 5)^2); the incoming part is
    // below 1e-10 where t + r >= 0
    const auto h = [](double s) { return std::exp(-(s + 5) * (s + 5)); };
    const auto hp = [](double s) { return -2 * (s + 5) * std::exp(-(s + 5) * (s + 5)); };
    auto rec_at = [&](double dr) {
      return testing::synthetic_record(dr, dr, static_cast<std::size_t>(std::llround(8 / dr)) + 1,
                                       static_cast<std::size_t>(std::llround(16 / dr)) + 1, [&](double t, double r) {
                                         if (r == 0.0) return std::array<double, 3>{-2 * hp(t), 0.0, 0.0};
                                         const double g = h(t - r) - h(t + r);
                                         const double gt = hp(t - r) - hp(t + r);
                                         const double gr = -hp(t - r) - hp(t + r);
                                         return std::array<double, 3>{g / r, gt / r, gr / r - g / (r * r)};
                                       });
    };
    auto worst = [&](double dr) {
      const auto rec = rec_at(dr);
      double e = 0.0;
      for (const auto& seg : sample_slice(rec, SliceSpec::outgoing(-2.5, 3.0, 5.0)))
        for (const auto& x : seg.points) e = std::max(e, std::abs(x.r * x.L() + x.phi));
      return e;
    };
    // H_u points with dt = dr land on record nodes, so only roundoff is left
    CHECK(worst(0.1) < 1e-12);
    CHECK(worst(0.05) < 1e-12);
  }

  TEST_CASE("unit density over H_u and over D_{0,1}^{3.5}") {
    const auto rec = quad_record();
    const auto one = regular_density(3, [](const FieldPoint&) { return 1.0; });
    // 4 pi [(v2-u)^3 - (v1-u)^3] / 3 with u = 1, v in [3, 4.5]
    CHECK(integrate_slice(rec, SliceSpec::outgoing(1.0, 3.0, 4.5), one) ==
          doctest::Approx(4 * kPi * (std::pow(3.5, 3) - 8.0) / 3).epsilon(1e-12));
    // iterated integral: 2 int_0^2 r^2 + 2 int_2^2.5 r^2 + int_2.5^3.5 (7 - 2r) r^2 = 37/2
    CHECK(integrate_region(rec, RegionSpec::foliation(0.0, 1.0, 3.5), one) ==
          doctest::Approx(4 * kPi * 18.5).epsilon(1e-12));
  }
}
