#include "curvlab/star.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/sampling.hpp"

namespace curvlab {

bool StarReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const StarCheck& c) { return c.passed; });
}

namespace {

std::vector<FrameChoice> rotated(const std::vector<FrameChoice>& fs, const Eigen::MatrixXd& o) {
  std::vector<FrameChoice> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back({Frame4::orthonormalize(o * f.frame.vectors()), f.lambda, f.mu});
  return out;
}

SearchOptions seeded(const SearchOptions& base, std::uint64_t seed, std::uint64_t stream) {
  SearchOptions s = base;
  s.seed = frames::mix_seed(seed, stream);
  return s;
}

StarCheck named(const char* name) {
  StarCheck c;
  c.name = name;
  return c;
}

}  // namespace

StarReport star_property_check(const ConeSpec& cone, int n, const StarOptions& opts) {
  cone.validate(n);
  StarReport rep;
  rep.n = n;
  rep.cone = cone.name();

  StarCheck identity = named("identity");
  identity.ran = true;
  identity.tested = 1;
  identity.value = min_margin(identity_tensor(n), cone, seeded(opts.search, opts.seed, 1)).margin;
  identity.passed = identity.value > 0.0;
  identity.failures = identity.passed ? 0 : 1;

  StarCheck convexity = named("convexity"), rotation = named("rotation"),
            scal_check = named("scal"), transversal = named("transversal");
  if (!identity.passed) {
    for (StarCheck* c : {&convexity, &rotation, &scal_check, &transversal})
      c->note = "not run: I is not interior, sampling toward I is undefined";
    rep.checks = {convexity, rotation, scal_check, identity, transversal};
    return rep;
  }

  // Members for convexity and scal: pairs (2k, 2k+1).
  const int n_members = 2 * std::max(opts.pairs, 0);
  std::vector<CurvTensor> members(static_cast<std::size_t>(n_members));
  parallel_for(members.size(), [&](std::size_t i) {
    members[i] = sample_member(cone, n, frames::mix_seed(opts.seed, 10000 + i));
  });

  std::vector<double> mid(static_cast<std::size_t>(opts.pairs));
  parallel_for(mid.size(), [&](std::size_t k) {
    const CurvTensor m = 0.5 * (members[2 * k] + members[2 * k + 1]);
    mid[k] = min_margin(m, cone, seeded(opts.search, opts.seed, 20000 + k)).margin;
  });
  convexity.ran = true;
  convexity.tested = opts.pairs;
  convexity.value = mid.empty() ? 0.0 : *std::min_element(mid.begin(), mid.end());
  convexity.failures = static_cast<int>(
      std::count_if(mid.begin(), mid.end(), [&](double m) { return m < -opts.tol; }));
  convexity.passed = convexity.tested > 0 && convexity.failures == 0;

  scal_check.ran = true;
  scal_check.tested = n_members;
  scal_check.value = std::numeric_limits<double>::infinity();
  for (const auto& m : members) {
    const double nrm = m.norm();
    const double s = nrm > 0.0 ? scal(m) / nrm : 0.0;
    scal_check.value = std::min(scal_check.value, s);
    if (!(s > 0.0)) ++scal_check.failures;
  }
  if (members.empty()) scal_check.value = 0.0;
  scal_check.passed = scal_check.tested > 0 && scal_check.failures == 0;

  // Rotation invariance on members; both sides share each other's minima as
  // warm starts so they compare the same local minimizers.
  std::vector<double> delta(static_cast<std::size_t>(std::max(opts.rotations, 0)));
  parallel_for(delta.size(), [&](std::size_t k) {
    std::mt19937_64 rng(frames::mix_seed(opts.seed, 30000 + k));
    const Eigen::MatrixXd o = random_rotation(n, rng);
    const CurvTensor r = members.empty() ? sample_member(cone, n, frames::mix_seed(opts.seed, 40000 + k))
                                         : members[k % members.size()];
    const CurvTensor orr = rotate(r, o);
    SearchOptions s1 = seeded(opts.search, opts.seed, 50000 + k);
    const MembershipReport a = min_margin(r, cone, s1);
    SearchOptions s2 = seeded(opts.search, opts.seed, 60000 + k);
    s2.warm_starts = rotated(a.minima, o);
    const MembershipReport b = min_margin(orr, cone, s2);
    double ma = a.margin;
    if (b.margin < ma) {
      s1.warm_starts = rotated(b.minima, o.transpose());
      ma = std::min(ma, min_margin(r, cone, s1).margin);
    }
    delta[k] = std::abs(b.margin - ma);
  });
  rotation.ran = true;
  rotation.tested = opts.rotations;
  rotation.value = delta.empty() ? 0.0 : *std::max_element(delta.begin(), delta.end());
  rotation.failures = static_cast<int>(
      std::count_if(delta.begin(), delta.end(), [&](double d) { return d > opts.rotation_tol; }));
  rotation.passed = rotation.tested > 0 && rotation.failures == 0;

  std::vector<double> slope(static_cast<std::size_t>(std::max(opts.boundary, 0)));
  std::vector<char> interior(slope.size(), 0);
  parallel_for(slope.size(), [&](std::size_t k) {
    const BoundarySample b = sample_boundary(cone, n, frames::mix_seed(opts.seed, 70000 + k));
    const SearchOptions s = seeded(opts.search, opts.seed, 80000 + k);
    const MembershipReport base = min_margin(b.tensor, cone, s);
    const TangentReport t =
        tangent_cone_contains(cone, b.tensor, base, q_quadratic(b.tensor), s, opts.tangent);
    slope[k] = t.min_slope;
    interior[k] = t.interior;
  });
  transversal.ran = true;
  transversal.tested = opts.boundary;
  transversal.value = slope.empty() ? 0.0 : *std::min_element(slope.begin(), slope.end());
  transversal.failures = static_cast<int>(std::count(interior.begin(), interior.end(), 0));
  transversal.passed = transversal.tested > 0 && transversal.failures == 0;

  rep.checks = {convexity, rotation, scal_check, identity, transversal};
  return rep;
}

}  // namespace curvlab
