#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "nlwlab/functionals.hpp"
#include "nlwlab/multipliers.hpp"

using namespace nlwlab;

namespace {

const EvolveResult& short_run(double dr) {
  static std::map<double, EvolveResult> cache;
  auto it = cache.find(dr);
  if (it == cache.end()) it = cache.emplace(dr, testing::run_gaussian(3.0, dr, 40.0, 24.0)).first;
  return it->second;
}

}  // namespace

TEST_SUITE("multipliers") {
  TEST_CASE("morawetz weight") {
    ModelParams m;
    // 2/delta_p + 1 - 3^{-0.1}, mpmath
    CHECK(morawetz_f(2.0, m, 0.1) == doctest::Approx(0.60404154015923780547).epsilon(1e-15));
    CHECK(one_minus_rplus_pow(1e-12, 0.1) == doctest::Approx(1e-13).epsilon(1e-9));
    CHECK(morawetz_fprime(0.0, 0.1) == doctest::Approx(0.1));
    CHECK(iled_pointwise_constant(m) == doctest::Approx(0.05));
  }

  TEST_CASE("coefficient inequalities on a radial sweep") {
    for (double p : {1.2, 2.0, 3.0, 5.0}) {
      ModelParams m;
      m.p = p;
      for (double r = 1e-3; r < 1e3; r *= 1.3) {
        CHECK(morawetz_potential_margin(r, m, 0.1) >= 0.0);
        CHECK(morawetz_f_margin(r, m, 0.1) >= 0.0);
      }
    }
    ModelParams m;
    CHECK(rweighted_potential_coefficient(m, 1.5) > 0.0);
    // (d-1)/2 - (gamma+d-1)/(p+1) = 1 - 3/4
    CHECK(rweighted_potential_coefficient(m, 1.0) == doctest::Approx(0.25));
  }

  TEST_CASE("energy multiplier has no bulk") {
    ModelParams m;
    FieldPoint x{1.0, 2.0, 0.7, -0.3, 0.4};
    CHECK(bulk_density(x, MultiplierSpec::energy(), m) == 0.0);
    // time slice flux density is half the energy density
    const double e = 0.3 * 0.3 + 0.4 * 0.4 + 0.5 * std::pow(0.7, 4);
    CHECK(boundary_density(x, SliceKind::time_slice, MultiplierSpec::energy(), m) == doctest::Approx(0.5 * e));
  }

  TEST_CASE("morawetz bulk dominates the ILED integrand") {
    ModelParams m;
    for (double r : {0.01, 0.5, 3.0, 40.0}) {
      FieldPoint x{0.0, r, 0.9, -0.2, 1.3};
      CHECK(bulk_density(x, MultiplierSpec::morawetz(0.1), m) >= iled_pointwise_constant(m) * iled_density(x, m));
    }
  }

  TEST_CASE("energy audit on D_{0,4} closes like the partition") {
    const auto& r = short_run(0.05);
    const auto ev = audit_identity(r.record, RegionSpec::foliation(0.0, 4.0, 20.0), MultiplierSpec::energy(),
                                   r.record.model);
    // bulk vanishes; faces are half the partition energies on the same slices
    CHECK(ev.bulk == 0.0);
    CHECK(ev.boundary_sum() ==
          doctest::Approx(0.5 * energy_partition_residual(r.record, 0.0, 4.0, 20.0)).epsilon(1e-12).scale(1.0));
  }

  TEST_CASE("identity residuals shrink under refinement") {
    const std::vector<MultiplierSpec> specs = {MultiplierSpec::energy(), MultiplierSpec::morawetz(0.1),
                                               MultiplierSpec::rweighted(1.5)};
    for (const auto& s : specs)
      for (const auto& g : {RegionSpec::slab(0.0, 10.0), RegionSpec::foliation(0.0, 4.0, 20.0)}) {
        const auto a = audit_identity(short_run(0.1).record, g, s, short_run(0.1).record.model);
        const auto b = audit_identity(short_run(0.05).record, g, s, short_run(0.05).record.model);
        CAPTURE(s.label());
        CAPTURE(g.label());
        CHECK(b.relative_residual() < a.relative_residual() / 4.0);
        CHECK(b.relative_residual() < 5e-3);
      }
  }

  TEST_CASE("r-weighted derivative parts telescope") {
    // zero in the continuum; the quadrature error is fourth order
    const auto g = RegionSpec::slab(0.0, 10.0, 12.0);
    const double a = rweighted_telescoping_sum(short_run(0.1).record, g, 1.5, short_run(0.1).record.model);
    const double b = rweighted_telescoping_sum(short_run(0.05).record, g, 1.5, short_run(0.05).record.model);
    CHECK(std::abs(b) < std::abs(a) / 8.0);
    const auto ev = audit_identity(short_run(0.05).record, g, MultiplierSpec::rweighted(1.5), short_run(0.05).record.model);
    CHECK(std::abs(b) < 1e-4 * ev.scale());
  }

  TEST_CASE("stored residual is second order") {
    auto max_abs = [](const std::vector<double>& v) {
      double mx = 0.0;
      for (double x : v) mx = std::max(mx, std::abs(x));
      return mx;
    };
    const double a = max_abs(pde_residual(short_run(0.1).record)), b = max_abs(pde_residual(short_run(0.05).record));
    CHECK(a / b > 3.5);
    CHECK(b < 0.02);
  }

  TEST_CASE("ILED lower bound holds on a slab") {
    const auto& r = short_run(0.05);
    const auto c = iled_lower_bound_check(r.record, RegionSpec::slab(0.0, 20.0), r.record.model);
    CHECK(c.holds);
    CHECK(c.ratio <= c.bound);
  }

  TEST_CASE("pointwise morawetz bulk and ILED integrand at a fixture point") {
    // r = 1, phi = 1, phi_t = 1, phi_r = 0, d = 3, p = 3, eps = 0.1, mpmath
    ModelParams m;
    const FieldPoint x{0.0, 1.0, 1.0, 1.0, 0.0};
    CHECK(bulk_density(x, MultiplierSpec::morawetz(0.1), m) == doctest::Approx(0.307975620259437486678838627661).epsilon(1e-14));
    CHECK(iled_density(x, m) == doctest::Approx(1.58314561971050463498833954134).epsilon(1e-14));
    const FieldPoint zero{0.0, 1.0, 0.0, 0.0, 0.0};
    CHECK(bulk_density(zero, MultiplierSpec::morawetz(0.1), m) == 0.0);
    CHECK(iled_density(zero, m) == 0.0);
  }
}
