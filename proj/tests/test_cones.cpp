#include <doctest.h>

#include <cmath>
#include <random>

#include "curvlab/cones.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/sampling.hpp"
#include "helpers.hpp"

using namespace curvlab;

namespace {

Frame4 random_frame(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, 4);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 4; ++k) m(i, k) = g(rng);
  return Frame4::orthonormalize(m);
}

Frame4 split_frame() {
  // e1, e2 in the first S^2 factor, e3, e4 in the second.
  return Frame4::standard(4);
}

}  // namespace

TEST_SUITE("cones") {

TEST_CASE("frame quantity of the identity") {
  std::mt19937_64 rng(1);
  const CurvTensor id = identity_tensor(4);
  for (int k = 0; k < 20; ++k) {
    const Frame4 f = random_frame(4, rng);
    CHECK(frame_quantity(id, f, 1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(frame_quantity(id, f, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(frame_quantity(id, f, 0.3, 0.7) ==
          doctest::Approx((1 + 0.09) * (1 + 0.49)).epsilon(1e-12));
  }
  const Frame4 f6 = random_frame(6, rng);
  CHECK(frame_quantity(identity_tensor(6), f6, 1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("frame quantity vanishes on a split frame of S2xS2") {
  const CurvTensor sp = sphere_product_tensor(2, 2, 1.0, 1.0);
  for (double l : {0.0, 0.25, 0.5, 1.0})
    for (double m : {0.0, 0.4, 1.0}) CHECK(std::abs(frame_quantity(sp, split_frame(), l, m)) <= 1e-14);
}

TEST_CASE("frame quantity argument checks") {
  const CurvTensor id = identity_tensor(4);
  CHECK_THROWS_AS(frame_quantity(id, Frame4::standard(4), -0.1, 0.0), ParameterError);
  CHECK_THROWS_AS(frame_quantity(id, Frame4::standard(4), 0.0, 1.5), ParameterError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4, 4);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(Frame4::checked(bad), InputError);
  CHECK_THROWS_AS(ConeSpec::ctilde_s(0.0).validate(4), ParameterError);
  CHECK_THROWS_AS(ConeSpec::chat().shifted(-0.1).validate(4), ParameterError);
  CHECK_THROWS_AS(ConeSpec::chat().transformed(0.5).validate(4), ParameterError);
}

TEST_CASE("cone fixtures") {
  const auto id = min_margin(identity_tensor(4), ConeSpec::chat());
  CHECK(id.margin > 0.0);
  CHECK(id.min_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(id.member);

  const auto sp = min_margin(sphere_product_tensor(2, 2, 1.0, 1.0), ConeSpec::chat());
  CHECK(std::abs(sp.margin) <= 1e-6);
  CHECK(sp.member);

  const auto np = min_margin(negative_plane_tensor(4, -1.0, 0.0), ConeSpec::ctilde());
  CHECK(np.margin < 0.0);
  CHECK_FALSE(np.member);
}

TEST_CASE("negative plane: dense frame sampling agrees with the optimizer") {
  const CurvTensor r = negative_plane_tensor(4, -1.0, 0.0);
  const ConeSpec cone = ConeSpec::ctilde();
  std::mt19937_64 rng(2);
  double brute = INFINITY;
  for (int k = 0; k < 4000; ++k) {
    const Frame4 f = random_frame(4, rng);
    for (int j = 0; j <= 8; ++j) brute = std::min(brute, cone_quantity(cone, r, f, j / 8.0, 1.0));
  }
  CHECK(brute < 0.0);
  const auto rep = min_margin(r, cone);
  CHECK(rep.min_value <= brute + 1e-9);
  CHECK(rep.margin < 0.0);
}

TEST_CASE("is_member and pinched_member examples") {
  CHECK(is_member(identity_tensor(4), ConeSpec::ctilde()));
  CHECK(pinched_member(identity_tensor(4), 0.01, ConeSpec::ctilde()));
  CHECK_FALSE(pinched_member(sphere_product_tensor(2, 2, 1.0, 1.0), 0.01, ConeSpec::ctilde()));
  CHECK_FALSE(is_member(negative_plane_tensor(4, -1.0, 0.0), ConeSpec::chat()));
}

TEST_CASE("tangent cone examples at S2xS2") {
  const ConeSpec cone = ConeSpec::chat();
  const CurvTensor sp = sphere_product_tensor(2, 2, 1.0, 1.0);
  const auto up = tangent_cone_contains(cone, sp, identity_tensor(4));
  CHECK(up.contained);
  CHECK(up.interior);
  const auto down = tangent_cone_contains(cone, sp, -1.0 * identity_tensor(4));
  CHECK_FALSE(down.interior);
  CHECK_FALSE(down.contained);
  const auto ray = tangent_cone_contains(cone, sp, sp);
  CHECK(ray.contained);
  CHECK_THROWS_AS(tangent_cone_contains(cone, negative_plane_tensor(4, -1.0, 0.0), sp),
                  PreconditionError);
}

TEST_CASE("tangent cone at sampled boundary points contains I and R_bd") {
  const ConeSpec cone = ConeSpec::chat();
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto bd = sample_boundary(cone, 4, frames::mix_seed(3, s));
    CHECK(tangent_cone_contains(cone, bd.tensor, bd.report, identity_tensor(4)).interior);
    CHECK(tangent_cone_contains(cone, bd.tensor, bd.report, bd.tensor).contained);
  }
}

TEST_CASE("property: margins are rotation invariant") {
  std::mt19937_64 rng(4);
  for (const ConeSpec& cone : {ConeSpec::chat(), ConeSpec::ctilde(), ConeSpec::ctilde_s(1.0)}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const CurvTensor r = sample_member(cone, 4, frames::mix_seed(5, s));
      const double m0 = min_margin(r, cone).margin;
      for (int k = 0; k < 3; ++k) {
        const double m1 = min_margin(rotate(r, random_rotation(4, rng)), cone).margin;
        CHECK(std::abs(m1 - m0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("property: C~(s) margin is non-increasing in s") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 6; ++k) {
    CurvTensor r = k < 3 ? sample_member(ConeSpec::ctilde(), 4, frames::mix_seed(7, k))
                         : gaussian_tensor(4, rng) + 0.3 * identity_tensor(4);
    if (scal(r) < 0.0) r = -1.0 * r;
    double prev = INFINITY;
    for (double s : {0.5, 1.0, 2.0, 4.0}) {
      const double v = min_margin(r, ConeSpec::ctilde_s(s)).min_value;
      CHECK(v <= prev + 1e-9 * r.norm());
      prev = v;
    }
  }
}

TEST_CASE("property: Chat inside C~(s) inside C~") {
  for (std::uint64_t k = 0; k < 6; ++k) {
    const CurvTensor h = sample_member(ConeSpec::chat(), 4, frames::mix_seed(8, k));
    for (double s : {0.5, 1.0, 2.0, 4.0}) CHECK(is_member(h, ConeSpec::ctilde_s(s)));
    for (double s : {0.5, 1.0, 2.0}) {
      const CurvTensor m = sample_member(ConeSpec::ctilde_s(s), 4, frames::mix_seed(9, k));
      CHECK(is_member(m, ConeSpec::ctilde()));
    }
  }
}

TEST_CASE("property: min_margin is deterministic and the argmin reproduces the value") {
  for (const ConeSpec& cone :
       {ConeSpec::chat(), ConeSpec::ctilde_s(0.5), ConeSpec::ctilde().transformed(0.1),
        ConeSpec::chat().shifted(0.02)}) {
    std::mt19937_64 rng(10);
    const CurvTensor r = gaussian_tensor(5, rng) + 0.2 * identity_tensor(5);
    SearchOptions o;
    o.seed = 42;
    const auto a = min_margin(r, cone, o);
    const auto b = min_margin(r, cone, o);
    CHECK(a.min_value == b.min_value);
    CHECK(a.margin == b.margin);
    CHECK((a.argmin.frame.vectors() - b.argmin.frame.vectors()).norm() == 0.0);
    CHECK(a.argmin.lambda == b.argmin.lambda);
    CHECK(a.argmin.mu == b.argmin.mu);
    const double re = cone_quantity(cone, r, a.argmin.frame, a.argmin.lambda, a.argmin.mu);
    CHECK(std::abs(re - a.min_value) <= 1e-9);
    CHECK(a.member == (a.margin >= -o.tol));
  }
}

TEST_CASE("transformed cone membership matches the pulled-back tensor") {
  const double b = 0.1;
  const CurvTensor r = sample_member(ConeSpec::ctilde(), 4, 77);
  const CurvTensor lr = l_ab(r, b);
  const auto direct = min_margin(r, ConeSpec::ctilde());
  const auto pulled = min_margin(lr, ConeSpec::ctilde().transformed(b));
  CHECK(pulled.min_value == doctest::Approx(direct.min_value).epsilon(1e-6).scale(1.0));
}

}  // TEST_SUITE
