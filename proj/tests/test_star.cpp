#include <doctest.h>

#include "curvlab/star.hpp"

using namespace curvlab;

namespace {

const StarCheck& find(const StarReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  return r.checks.front();
}

}  // namespace

TEST_SUITE("star") {

TEST_CASE("Chat satisfies all five conditions") {
  const StarReport r = star_property_check(ConeSpec::chat(), 4);
  CHECK(r.checks.size() == 5);
  for (const auto& c : r.checks) {
    INFO(c.name << ": " << c.note);
    CHECK(c.ran);
    CHECK(c.passed);
  }
  CHECK(find(r, "convexity").tested >= 200);
  CHECK(find(r, "rotation").tested >= 100);
  CHECK(find(r, "transversal").tested >= 100);
  CHECK(r.passed());
}

TEST_CASE("C~(1) satisfies all five conditions") {
  const StarReport r = star_property_check(ConeSpec::ctilde_s(1.0), 4);
  for (const auto& c : r.checks) {
    INFO(c.name << ": " << c.note);
    CHECK(c.passed);
  }
  CHECK(r.passed());
}

TEST_CASE("the over-pinched shift rho = 1 fails the identity condition") {
  const StarReport r = star_property_check(ConeSpec::ctilde().shifted(1.0), 4);
  CHECK_FALSE(r.passed());
  const StarCheck& id = find(r, "identity");
  CHECK(id.ran);
  CHECK_FALSE(id.passed);
  CHECK(id.value < 0.0);
}

}  // TEST_SUITE
