#include <doctest.h>

#include <cmath>

#include "curvlab/dim3.hpp"
#include "curvlab/errors.hpp"
#include "helpers.hpp"

using namespace curvlab;
using namespace curvlab::dim3;

TEST_SUITE("dim3") {

TEST_CASE("triple round trip") {
  for (Triple t : {Triple{1, 1, 1}, Triple{0, 0, 1}, Triple{-0.3, 0.2, 2.5}, Triple{0.1, 0.7, 0.4}}) {
    Triple sorted = t;
    std::sort(sorted.begin(), sorted.end());
    const Triple back = tensor_to_triple(triple_to_tensor(t));
    for (int k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(sorted[k]).epsilon(1e-12));
    const Triple rr = triple_of_ricci(ricci_of_triple(t));
    for (int k = 0; k < 3; ++k) CHECK(rr[k] == doctest::Approx(t[k]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tensor_to_triple(identity_tensor(4)), DimensionError);
}

TEST_CASE("space form and degenerate triples") {
  const CurvTensor sf = triple_to_tensor({1, 1, 1});
  CHECK(contractions(sf).ric0.norm() <= 1e-14);
  const Triple ric = ricci_eigenvalues(triple_to_tensor({0, 0, 1}));
  CHECK(std::abs(ric[0]) <= 1e-14);
  CHECK(scal(triple_to_tensor({0, 0, 1})) > 0.0);
  const double c = 0.75;
  const CurvTensor cc = triple_to_tensor({c, c, c});
  CHECK(testutil::rel_diff(cc, c * identity_tensor(3)) <= 1e-15);
  CHECK(scal(cc) == doctest::Approx(6.0 * c));
  CHECK(scal(cc) == doctest::Approx(c * scal(identity_tensor(3))));
}

TEST_CASE("ricci correspondence agrees with contractions") {
  const Triple t{0.2, 0.5, 1.1};
  const Triple want = ricci_of_triple(t);
  Triple w = want;
  std::sort(w.begin(), w.end());
  const Triple got = ricci_eigenvalues(triple_to_tensor(t));
  for (int k = 0; k < 3; ++k) CHECK(got[k] == doctest::Approx(w[k]).epsilon(1e-14));
}

TEST_CASE("f examples") {
  CHECK(f_value(triple_to_tensor({2, 2, 2}), 0.3) == doctest::Approx(0.0));
  const CurvTensor r = triple_to_tensor(triple_of_ricci({1, 1, 2}));
  CHECK(scal(r) == doctest::Approx(4.0));
  CHECK(contractions(r).ric0.m.squaredNorm() == doctest::Approx(2.0 / 3.0));
  CHECK(f_value(r, 0.01) == doctest::Approx(std::pow(4.0, -1.99) * (2.0 / 3.0)).epsilon(1e-13));
  CHECK(f_value(2.0 * r, 0.01) == doctest::Approx(std::pow(2.0, 0.01) * f_value(r, 0.01)).epsilon(1e-13));
  CHECK_THROWS_AS(f_value(triple_to_tensor({-1, -1, -1}), 0.1), InputError);
  CHECK_THROWS_AS(f_value(r, 0.0), ParameterError);
  CHECK_THROWS_AS(f_value(r, 1.0), ParameterError);
}

TEST_CASE("property: f <= scal^sigma on pinched samples") {
  for (double rho : {0.05, 0.15, 0.25}) {
    const double sigma = rho * rho;
    for (const auto& r : pinched_samples(rho, 50, 3)) {
      CHECK(f_value(r, sigma) <= std::pow(scal(r), sigma) * (1 + 1e-12));
      const Triple ric = ricci_eigenvalues(r);
      CHECK(ric[0] >= rho * scal(r) - 1e-12 * scal(r));
    }
  }
}

TEST_CASE("barrier identity") {
  for (double rho : {0.05, 0.15, 0.25, 1.0 / 3.0}) {
    const double sigma = rho * rho;
    CHECK(barrier_self_test(sigma) <= 1e-10);
    CHECK(barrier(1.5, sigma) == doctest::Approx(1.0));
  }
}

TEST_CASE("pinched triple validation") {
  CHECK_NOTHROW((PinchedTriple{{1, 1, 1}, 0.3}.validate()));
  CHECK_THROWS_AS((PinchedTriple{{1, 1, 1}, 0.0}.validate()), ParameterError);
  CHECK_THROWS_AS((PinchedTriple{{1, 1, 1}, 0.4}.validate()), ParameterError);
  CHECK_THROWS_AS((PinchedTriple{triple_of_ricci({-0.1, 0.5, 0.6}), 0.1}.validate()), InputError);
}

TEST_CASE("Einstein samples satisfy everything with equality") {
  const std::vector<CurvTensor> e{triple_to_tensor({1, 1, 1}), triple_to_tensor({3, 3, 3})};
  const auto rr = verify_reaction_inequality(0.15, e);
  CHECK(rr.passed());
  for (const auto& x : rr.entries) {
    CHECK(x.f == doctest::Approx(0.0));
    CHECK(std::abs(x.dfdt) <= 1e-12);
  }
  const auto est = verify_dim3_estimate(0.15, e);
  CHECK(est.passed());
  for (const auto& x : est.entries) CHECK(x.worst_gap <= 0.0);
  const auto pin = verify_pinching_preserved(1.0 / 3.0, e);
  CHECK(pin.passed());
  CHECK(pin.degenerate);
  for (const auto& x : pin.entries) CHECK(std::abs(x.min_pinching) <= 1e-12);
}

TEST_CASE("unpinched samples are rejected") {
  const std::vector<CurvTensor> bad{triple_to_tensor(triple_of_ricci({-0.1, 0.5, 0.6}))};
  const auto rr = verify_reaction_inequality(0.1, bad);
  CHECK(rr.rejected == 1);
  CHECK_FALSE(rr.passed());
  CHECK(verify_dim3_estimate(0.1, bad).rejected == 1);
}

TEST_CASE("sampled reaction, estimate and pinching checks") {
  const auto s15 = pinched_samples(0.15, 20, 11);
  CHECK(verify_reaction_inequality(0.15, s15).passed());
  CHECK(verify_dim3_estimate(0.15, s15).passed());
  const auto s10 = pinched_samples(0.1, 20, 12);
  CHECK(verify_pinching_preserved(0.1, s10).passed());
}

TEST_CASE("rho = 1/3 forces Ric0 = 0") {
  for (const auto& r : pinched_samples(1.0 / 3.0, 5, 13)) CHECK(contractions(r).ric0.norm() <= 1e-12 * scal(r));
}

TEST_CASE("trajectory csv header") {
  const auto est = verify_dim3_estimate(0.15, pinched_samples(0.15, 1, 14));
  const std::string csv = trajectory_csv(est.entries.front());
  CHECK(csv.rfind("t,scal,ric0_sq,f,barrier,slack\n", 0) == 0);
}

}  // TEST_SUITE
