#include <doctest.h>

#include <cmath>
#include <random>

#include "curvlab/cones.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/sampling.hpp"

using namespace curvlab;

TEST_SUITE("sampling") {

TEST_CASE("random rotations are orthogonal") {
  std::mt19937_64 rng(1);
  for (int n = 3; n <= 7; ++n) {
    const Eigen::MatrixXd o = random_rotation(n, rng);
    CHECK((o.transpose() * o - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-13);
  }
}

TEST_CASE("gaussian tensors have unit norm") {
  std::mt19937_64 rng(2);
  CHECK(gaussian_tensor(5, rng).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary samples sit on the boundary") {
  for (const ConeSpec& cone : {ConeSpec::chat(), ConeSpec::ctilde_s(1.0), ConeSpec::ctilde()}) {
    for (std::uint64_t k = 0; k < 4; ++k) {
      const auto bd = sample_boundary(cone, 4, frames::mix_seed(3, k));
      CHECK(std::abs(bd.report.margin) <= 1e-8);
      CHECK(scal(bd.tensor) == doctest::Approx(1.0).epsilon(1e-12));
      SearchOptions o;
      o.seed = 999;
      CHECK(std::abs(min_margin(bd.tensor, cone, o).margin) <= 1e-8);
    }
  }
}

TEST_CASE("boundary_point requires a non-member start") {
  CHECK_THROWS_AS(boundary_point(ConeSpec::chat(), identity_tensor(4)), PreconditionError);
}

TEST_CASE("members are members and sampling is deterministic") {
  const ConeSpec cone = ConeSpec::chat();
  const CurvTensor a = sample_member(cone, 4, 11);
  const CurvTensor b = sample_member(cone, 4, 11);
  CHECK((a - b).norm() == 0.0);
  CHECK(min_margin(a, cone).margin >= -1e-8);
}

TEST_CASE("identity headroom") {
  const ConeSpec cone = ConeSpec::chat();
  CHECK(identity_headroom(cone, identity_tensor(4)) == doctest::Approx(1.0).epsilon(1e-6));
  const CurvTensor sp = sphere_product_tensor(2, 2, 1.0, 1.0);
  CHECK(std::abs(identity_headroom(cone, sp)) <= 1e-7);
  const CurvTensor r = sp + 0.25 * identity_tensor(4);
  CHECK(identity_headroom(cone, r) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("family samples satisfy both memberships") {
  const ConeSpec cone = ConeSpec::chat();
  const double t = 0.004;
  const CurvTensor id = identity_tensor(4);
  for (FamilyRegime regime : {FamilyRegime::Trivial, FamilyRegime::Scaled}) {
    const auto samples = family_samples(cone, 4, t, 6, 13, regime);
    REQUIRE(samples.size() == 6);
    for (const auto& r : samples) {
      const double ts = t * scal(r);
      if (regime == FamilyRegime::Trivial) CHECK(ts < 1.0);
      else CHECK(ts >= 1.0);
      CHECK(min_margin(r, cone).margin >= -1e-8);
      CHECK(min_margin(r + (1.0 - ts) * id, cone).margin >= -1e-8);
    }
  }
  CHECK_THROWS(family_samples(cone, 4, 0.0, 3, 1, FamilyRegime::Trivial));
}

}  // TEST_SUITE
