#include <doctest.h>

#include <cmath>
#include <limits>

#include "curvlab/constants.hpp"
#include "curvlab/errors.hpp"

using namespace curvlab;

TEST_SUITE("constants") {

TEST_CASE("delta_of examples") {
  CHECK(delta_of(0.2, 1.0, 4) == doctest::Approx(1.0 / 300.0).epsilon(1e-15));
  CHECK(delta_of(10.0, 1.0, 4) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  CHECK(delta_of(100.0, 0.0, 4) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  double prev = INFINITY;
  for (double lam : {1.0, 10.0, 1e3, 1e6}) {
    const double d = delta_of(0.2, lam, 4);
    CHECK(d == doctest::Approx(0.04 / (4.0 * (1.0 + 2.0 * lam * lam))).epsilon(1e-14));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-13);
  CHECK(delta_of(0.5, 0.3, 6) <= 1.0 / 60.0);
}

TEST_CASE("delta_of errors") {
  CHECK_THROWS_AS(delta_of(0.0, 1.0, 4), ParameterError);
  CHECK_THROWS_AS(delta_of(-0.1, 1.0, 4), ParameterError);
  CHECK_THROWS_AS(delta_of(0.1, -1.0, 4), ParameterError);
  CHECK_THROWS_AS(delta_of(0.1, 1.0, 3), DimensionError);
}

TEST_CASE("lambda of the identity") {
  const auto e = estimate_lambda(std::vector<CurvTensor>{identity_tensor(4)});
  CHECK(e.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.samples == 1);
  CHECK(e.scal_positive);
  CHECK_THROWS_AS(estimate_lambda(std::vector<CurvTensor>{}), InputError);
  CHECK_THROWS_AS(estimate_lambda(ConeSpec::chat(), 4, 0, 1), InputError);
}

TEST_CASE("lambda flags a non-positive scal sample") {
  const auto e = estimate_lambda(std::vector<CurvTensor>{negative_plane_tensor(4, -1.0, 0.0)});
  CHECK_FALSE(e.scal_positive);
}

TEST_CASE("lambda estimate for Chat is at most 1 and nested-monotone") {
  const ConeSpec cone = ConeSpec::chat();
  const auto members = member_samples(cone, 4, 32, 7);
  std::vector<CurvTensor> half(members.begin(), members.begin() + 16);
  const auto full = estimate_lambda(members);
  const auto part = estimate_lambda(half);
  CHECK(full.value <= 1.0 + 1e-6);
  CHECK(full.value >= part.value);
  CHECK(full.scal_positive);
  CHECK(estimate_lambda(cone, 4, 32, 7).value == full.value);
}

TEST_CASE("property: estimates are scale invariant") {
  const ConeSpec cone = ConeSpec::chat();
  auto members = member_samples(cone, 4, 8, 3);
  auto scaled = members;
  for (auto& r : scaled) r = 3.7 * r;
  CHECK(std::abs(estimate_lambda(members).value - estimate_lambda(scaled).value) <= 1e-10);

  auto bd = boundary_samples(cone, 4, 3, 3);
  auto bd_scaled = bd;
  for (auto& r : bd_scaled) r = 2.5 * r;
  const double a = estimate_alpha0(cone, bd).value;
  const double b = estimate_alpha0(cone, bd_scaled).value;
  CHECK(std::abs(a - b) <= 1e-10);
}

TEST_CASE("the identity sample never constrains alpha0") {
  const ConeSpec cone = ConeSpec::chat();
  const auto only_id = estimate_alpha0(cone, std::vector<CurvTensor>{identity_tensor(4)});
  CHECK(only_id.value == 1.0);
  auto bd = boundary_samples(cone, 4, 3, 5);
  const double base = estimate_alpha0(cone, bd).value;
  bd.push_back(identity_tensor(4));
  CHECK(estimate_alpha0(cone, bd).value == base);
  CHECK_THROWS_AS(estimate_alpha0(cone, std::vector<CurvTensor>{}), InputError);
}

TEST_CASE("property: alpha0 is positive and non-increasing under nested doubling") {
  const ConeSpec cone = ConeSpec::chat();
  for (std::uint64_t seed : {1u, 2u}) {
    const double a2 = estimate_alpha0(cone, 4, 2, seed).value;
    const double a4 = estimate_alpha0(cone, 4, 4, seed).value;
    const double a8 = estimate_alpha0(cone, 4, 8, seed).value;
    CHECK(a8 > 0.0);
    CHECK(a4 <= a2);
    CHECK(a8 <= a4);
  }
}

TEST_CASE("constants report satisfies the min identity") {
  const auto rep = estimate_constants(ConeSpec::chat(), 4, 4, 9);
  CHECK(rep.delta_hat == delta_of(rep.alpha0_hat, rep.lambda_hat, 4));
  CHECK(rep.delta_hat == std::min({1.0 / 24.0, rep.alpha0_hat / 2.0,
                                   rep.alpha0_hat * rep.alpha0_hat /
                                       (4.0 * (1.0 + 2.0 * rep.lambda_hat * rep.lambda_hat))}));
  CHECK(rep.delta_hat <= 1.0 / 24.0);
  CHECK(rep.delta_used == delta_of(0.5 * rep.alpha0_hat, rep.lambda_hat, 4));
  CHECK(rep.lambda_hat <= 1.0 + 1e-6);
  CHECK(rep.alpha0_hat > 0.0);
}

}  // TEST_SUITE
