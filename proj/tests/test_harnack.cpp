#include <doctest.h>

#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/harnack.hpp"

using namespace curvlab;
using namespace curvlab::harnack;
using std::numbers::pi;

TEST_SUITE("harnack") {

TEST_CASE("closed forms") {
  const auto s4 = ModelFlow::round_sphere(4);
  CHECK(s4.scal(-1.0) == doctest::Approx(2.0));
  CHECK(s4.diam(-1.0) == doctest::Approx(pi * std::sqrt(6.0)));
  for (int n : {2, 3, 4, 7})
    for (double tau : {-0.01, -1.0, -10.0, -100.0})
      CHECK(std::abs(tau) * ModelFlow::round_sphere(n).scal(tau) ==
            doctest::Approx(n / 2.0).epsilon(1e-14));
  const auto sp = ModelFlow::sphere_product(2, 2);
  CHECK(sp.scal(-1.0) == doctest::Approx(2.0));
  CHECK(sp.diam(-1.0) == doctest::Approx(pi * 2.0));
  CHECK(sp.dim() == 4);
}

TEST_CASE("closed-form ratios are constant in tau") {
  for (const auto& f : {ModelFlow::round_sphere(4), ModelFlow::sphere_product(2, 3)}) {
    const double ts = f.scal(-1.0), dd = f.diam(-1.0);
    for (double tau : {-10.0, -100.0, -0.37}) {
      CHECK(std::abs(std::abs(tau) * f.scal(tau) - ts) <= 1e-12 * ts);
      CHECK(std::abs(f.diam(tau) / std::sqrt(std::abs(tau)) - dd) <= 1e-12 * dd);
    }
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(ModelFlow::sphere_product(3, 1), ParameterError);
  CHECK_THROWS_AS(ModelFlow::round_sphere(4).scal(0.0), ParameterError);
  CHECK_THROWS_AS(ModelFlow::round_sphere(4).diam(1.0), ParameterError);
  CHECK_THROWS_AS(check_harnack_gap(ModelFlow::round_sphere(4), 0.0), ParameterError);
  CHECK_THROWS_AS(check_diameter_bound(ModelFlow::round_sphere(4), {}), ParameterError);
}

TEST_CASE("Harnack gap examples") {
  const auto g = check_harnack_gap(ModelFlow::round_sphere(4), -1.0);
  CHECK(g.lhs == doctest::Approx(4.0));
  CHECK(g.rhs == doctest::Approx(2.0 * std::exp(-6.0 * pi * pi)));
  CHECK(g.passed);
  CHECK(g.slack_factor >= std::exp(6.0 * pi * pi) / 2.0 * (1 - 1e-12));

  const auto h = check_harnack_gap(ModelFlow::sphere_product(2, 2), -10.0);
  CHECK(h.lhs == doctest::Approx(0.4));
  CHECK(h.rhs == doctest::Approx(0.2 * std::exp(-4.0 * pi * pi)));
  CHECK(h.passed);
}

TEST_CASE("property: Harnack verdict is scale invariant") {
  for (const auto& f : {ModelFlow::round_sphere(4), ModelFlow::sphere_product(2, 2),
                        ModelFlow::round_sphere(9)})
    for (double tau : {-1.0, -3.0}) {
      const auto a = check_harnack_gap(f, tau), b = check_harnack_gap(f, 100.0 * tau);
      CHECK(a.passed == b.passed);
      CHECK(a.slack_factor == doctest::Approx(b.slack_factor).epsilon(1e-12));
    }
}

TEST_CASE("diameter bound") {
  const std::vector<double> taus{-1.0, -10.0, -100.0};
  const auto s = check_diameter_bound(ModelFlow::round_sphere(4), taus);
  CHECK(s.passed());
  for (const auto& e : s.entries) {
    CHECK(e.inf_half == doctest::Approx(e.premise).epsilon(1e-14));
    CHECK(e.tau_scal == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e.bound >= e.sup_scal);
  }
  const auto p = check_diameter_bound(ModelFlow::sphere_product(2, 2), taus, 4);
  CHECK(p.bounded);
  CHECK(p.max_tau_scal == doctest::Approx(2.0));
  CHECK(p.passed());
  const std::string csv = harnack_csv({check_harnack_gap(ModelFlow::round_sphere(4), -1.0)});
  CHECK(csv.rfind("tau,lhs,rhs,slack\n", 0) == 0);
}

}  // TEST_SUITE
