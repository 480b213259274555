#include <doctest.h>

#include <cmath>
#include <random>

#include "curvlab/constants.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/ode.hpp"
#include "curvlab/sampling.hpp"
#include "helpers.hpp"

using namespace curvlab;

namespace {

CurvTensor state_at(const Trajectory& tr, double t) {
  // Last accepted sample plus a fixed-step flow to land exactly on t.
  std::size_t k = 0;
  while (k + 1 < tr.samples.size() && tr.samples[k + 1].t <= t) ++k;
  const auto& s = tr.samples[k];
  return s.t == t ? s.r : flow(s.r, t - s.t, 64);
}

}  // namespace

TEST_SUITE("ode") {

TEST_CASE("identity start follows the closed form") {
  const CurvTensor id = identity_tensor(4);
  const Trajectory tr = integrate(id, 0.1, INFINITY);
  CHECK(tr.terminal == Terminal::Horizon);
  CHECK(tr.back().t == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(testutil::rel_diff(tr.back().r, 2.5 * id) <= 1e-6);
  for (const auto& s : tr.samples)
    CHECK(testutil::rel_diff(s.r, (1.0 / (1.0 - 6.0 * s.t)) * id) <= 1e-6);
}

TEST_CASE("zero stays zero") {
  const Trajectory tr = integrate(CurvTensor::zero(4), 1.0, INFINITY);
  for (const auto& s : tr.samples) CHECK(s.r.norm() == 0.0);
  CHECK(tr.back().t == doctest::Approx(1.0));
}

TEST_CASE("scal cap terminates near the closed-form time") {
  const Trajectory tr = integrate(identity_tensor(4), 10.0, 120.0);
  CHECK(tr.terminal == Terminal::ScalCap);
  CHECK(tr.back().t == doctest::Approx(0.15).epsilon(1e-6));
  CHECK(scal(tr.back().r) == doctest::Approx(120.0).epsilon(1e-6));
}

TEST_CASE("property: times increase, scal is monotone, symmetries hold") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10; ++k) {
    const int n = 3 + k % 4;
    const CurvTensor r0 = gaussian_tensor(n, rng);
    const Trajectory tr = integrate(r0, 2.0, 50.0 * std::max(1.0, std::abs(scal(r0))));
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
      CHECK(tr.samples[i].t > tr.samples[i - 1].t);
      CHECK(scal(tr.samples[i].r) >= scal(tr.samples[i - 1].r) - 1e-12 * tr.samples[i].r.norm());
    }
    CHECK(symmetry_residual(n, tr.back().r.components()).max() <= 1e-12);
  }
}

TEST_CASE("property: scaling commutes with the flow") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 4; ++k) {
    const CurvTensor r0 = gaussian_tensor(4, rng) + 0.5 * identity_tensor(4);
    const double c = 2.0, t = 0.05;
    const CurvTensor a = state_at(integrate(c * r0, t, INFINITY), t);
    const CurvTensor b = c * state_at(integrate(r0, c * t, INFINITY), c * t);
    CHECK(testutil::rel_diff(a, b) <= 1e-6);
  }
}

TEST_CASE("property: rotation equivariance of trajectories") {
  std::mt19937_64 rng(3);
  const CurvTensor r0 = gaussian_tensor(5, rng) + 0.3 * identity_tensor(5);
  const Eigen::MatrixXd o = random_rotation(5, rng);
  const double t = 0.1;
  const CurvTensor a = state_at(integrate(rotate(r0, o), t, INFINITY), t);
  const CurvTensor b = rotate(state_at(integrate(r0, t, INFINITY), t), o);
  CHECK(testutil::rel_diff(a, b) <= 1e-8);
}

TEST_CASE("property: the ray through I is invariant") {
  for (int n = 3; n <= 6; ++n) {
    const CurvTensor id = identity_tensor(n);
    const Trajectory tr = integrate(0.7 * id, 10.0, 100.0);
    for (const auto& s : tr.samples) {
      const double c = scal(s.r) / (n * (n - 1.0));
      CHECK((s.r - c * id).norm() <= 1e-9 * s.r.norm());
      CHECK(testutil::rel_diff(s.r, (0.7 / (1.0 - 2.0 * (n - 1) * 0.7 * s.t)) * id) <= 1e-6);
    }
  }
}

TEST_CASE("flow is reversible") {
  std::mt19937_64 rng(4);
  const CurvTensor r0 = gaussian_tensor(4, rng);
  const CurvTensor there = flow(r0, 0.05, 32);
  CHECK(testutil::rel_diff(flow(there, -0.05, 32), r0) <= 1e-9);
}

TEST_CASE("verify_invariance: identity stays inside and gains margin") {
  InvarianceOptions o;
  const auto rep = verify_invariance(ConeSpec::chat(), {identity_tensor(4)}, o);
  CHECK(rep.passed());
  CHECK(rep.samples_run == 1);
  CHECK(rep.worst_margin > 0.0);
  const auto traj = integrate(identity_tensor(4), 1.0, 8.0 * 12.0);
  const auto m0 = min_margin(traj.samples.front().r, ConeSpec::chat());
  const auto m1 = min_margin(traj.back().r, ConeSpec::chat());
  CHECK(m1.min_value > m0.min_value);
  CHECK(m1.margin == doctest::Approx(m0.margin).epsilon(1e-9));
}

TEST_CASE("verify_invariance: non-member starts are skipped") {
  const auto rep =
      verify_invariance(ConeSpec::ctilde(), {negative_plane_tensor(4, -1.0, 0.0), identity_tensor(4)});
  CHECK(rep.skipped == 1);
  CHECK(rep.samples_run == 1);
  CHECK(rep.violations.empty());
}

TEST_CASE("verify_invariance: a few boundary samples of C~(1)") {
  const ConeSpec cone = ConeSpec::ctilde_s(1.0);
  std::vector<CurvTensor> samples;
  for (std::uint64_t k = 0; k < 6; ++k) samples.push_back(sample_boundary(cone, 4, frames::mix_seed(5, k)).tensor);
  const auto rep = verify_invariance(cone, samples);
  CHECK(rep.passed());
  CHECK(rep.samples_run == 6);
  CHECK(rep.worst_margin >= -1e-6);
}

TEST_CASE("pinching family preconditions and trivial member") {
  const ConeSpec cone = ConeSpec::chat();
  const double delta = 0.004;
  CHECK_THROWS_AS(verify_pinching_family(cone, delta, {identity_tensor(4)}, 0.0, 2 * delta),
                  PreconditionError);
  CHECK_THROWS_AS(verify_pinching_family(cone, delta, {identity_tensor(4)}, 0.003, 0.001),
                  PreconditionError);
  // scal(R(t)) = 12 c / (1 - 6 c t) with c = 1: t scal stays below 1 on [0, delta].
  const auto rep = verify_pinching_family(cone, delta, {identity_tensor(4)}, 0.0, delta);
  CHECK(rep.passed());
  CHECK(rep.samples_run == 1);
}

TEST_CASE("property: F(t) is convex") {
  const ConeSpec cone = ConeSpec::chat();
  const double t = 0.002;
  const auto a = family_samples(cone, 4, t, 50, 21, FamilyRegime::Scaled);
  const auto b = family_samples(cone, 4, t, 50, 22, FamilyRegime::Trivial);
  const auto c = family_samples(cone, 4, t, 50, 23, FamilyRegime::Scaled);
  int checked = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const auto* other : {&b, &c}) {
      const CurvTensor mid = 0.5 * (a[i] + (*other)[i]);
      const auto fm = family_margins(cone, mid, t);
      CHECK(fm.member(1e-8));
      ++checked;
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("aux lemma: trivial regime passes, t > delta rejected") {
  const ConeSpec cone = ConeSpec::chat();
  const double delta = 0.004;
  const auto samples = family_samples(cone, 4, delta, 4, 31, FamilyRegime::Trivial);
  const auto rep = verify_aux_lemma(cone, delta, samples, delta);
  CHECK(rep.all_passed());
  for (const auto& e : rep.entries) CHECK(e.trivial);
  CHECK_THROWS_AS(verify_aux_lemma(cone, delta, samples, 2 * delta), PreconditionError);
  CHECK_THROWS_AS(verify_aux_lemma(cone, delta, samples, -0.001), PreconditionError);
}

TEST_CASE("aux lemma: scaled regime samples pass") {
  const ConeSpec cone = ConeSpec::chat();
  const double delta = 0.004;
  const auto samples = family_samples(cone, 4, delta, 4, 32, FamilyRegime::Scaled);
  const auto rep = verify_aux_lemma(cone, delta, samples, delta);
  CHECK(rep.all_passed());
  for (const auto& e : rep.entries) {
    CHECK_FALSE(e.trivial);
    CHECK(e.tangent.interior);
  }
}

TEST_CASE("ancient space form stays pinched, sphere product fails") {
  const ConeSpec cone = ConeSpec::chat();
  const std::vector<double> times{-0.5, -1.0, -10.0, -1000.0};
  const auto sf = ancient_margin_check(cone, 1.0 / 24.0, AncientModel::SpaceForm, 4, times);
  CHECK(sf.consistent());
  double first = sf.entries.front().margin;
  for (const auto& e : sf.entries) {
    CHECK(e.member);
    CHECK(e.margin == doctest::Approx(first).epsilon(1e-9));
  }
  const auto sp = ancient_margin_check(cone, 0.001, AncientModel::SphereProduct, 4, times);
  CHECK_FALSE(sp.expected_member);
  CHECK(sp.consistent());
  for (const auto& e : sp.entries) CHECK_FALSE(e.member);

  const CurvTensor r = ancient_tensor(AncientModel::SpaceForm, 4, -2.0);
  CHECK(scal(r) == doctest::Approx(4.0 / (2.0 * 2.0)));
  CHECK_THROWS(parse_ancient_model("cigar"));
}

TEST_CASE("ancient tensors solve the ODE") {
  for (AncientModel m : {AncientModel::SpaceForm, AncientModel::SphereProduct}) {
    const CurvTensor a = ancient_tensor(m, 4, -2.0);
    const CurvTensor b = ancient_tensor(m, 4, -1.0);
    CHECK(testutil::rel_diff(flow(a, 1.0, 400), b) <= 1e-8);
  }
}

TEST_CASE("continuity sweep examples") {
  auto family = [](double s) { return ConeSpec::ctilde_s(s).shifted(0.01); };
  const std::vector<double> grid{1.0, 2.0, 4.0, 8.0};
  const auto id = continuity_sweep(family, {identity_tensor(4)}, grid);
  CHECK(id.largest_passing.has_value());
  CHECK(*id.largest_passing == 8.0);
  CHECK_FALSE(id.first_failing.has_value());

  const auto sp = continuity_sweep(family, {sphere_product_tensor(2, 2, 1.0, 1.0)}, grid);
  REQUIRE(sp.first_failing.has_value());
  CHECK(*sp.first_failing == 1.0);
  CHECK_FALSE(sp.largest_passing.has_value());

  CHECK_THROWS_AS(continuity_sweep(family, {identity_tensor(4)}, {2.0, 1.0}), ParameterError);
}

TEST_CASE("continuity sweep over transformed cones with pinched tensors") {
  auto family = [](double s) { return ConeSpec::ctilde_s(s).transformed(0.02); };
  std::vector<CurvTensor> tensors;
  const CurvTensor id = identity_tensor(4);
  for (std::uint64_t k = 0; k < 4; ++k) {
    const CurvTensor m = sample_member(ConeSpec::ctilde(), 4, frames::mix_seed(40, k));
    tensors.push_back(m + 0.05 * scal(m) / (1.0 - 12 * 0.05) * id);
  }
  for (const auto& t : tensors) CHECK(pinched_member(t, 0.05, ConeSpec::ctilde()));
  const auto rep = continuity_sweep(family, tensors, {1.0, 2.0, 4.0, 8.0});
  REQUIRE(rep.largest_passing.has_value());
  CHECK(*rep.largest_passing == 8.0);
  for (const auto& e : rep.entries) CHECK(e.all_member);
}

}  // TEST_SUITE
