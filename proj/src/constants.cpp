#include "curvlab/constants.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/sampling.hpp"

namespace curvlab {

std::vector<CurvTensor> member_samples(const ConeSpec& cone, int n, int count, std::uint64_t seed) {
  std::vector<CurvTensor> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = sample_member(cone, n, frames::mix_seed(seed, 2 * i));
  });
  return out;
}

std::vector<CurvTensor> boundary_samples(const ConeSpec& cone, int n, int count,
                                         std::uint64_t seed) {
  std::vector<CurvTensor> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = sample_boundary(cone, n, frames::mix_seed(seed, 2 * i + 1)).tensor;
  });
  return out;
}

LambdaEstimate estimate_lambda(const std::vector<CurvTensor>& members) {
  if (members.empty()) throw InputError("estimate_lambda needs at least one sample");
  LambdaEstimate est;
  est.samples = static_cast<int>(members.size());
  est.min_scal = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto c = contractions(members[i]);
    const double nrm = members[i].norm();
    if (nrm > 0.0) est.min_scal = std::min(est.min_scal, c.scal / nrm);
    if (!(c.scal > 0.0)) {
      est.scal_positive = false;
      continue;
    }
    const double ratio = c.ric.norm() / c.scal;
    if (ratio > est.value) {
      est.value = ratio;
      est.worst_sample = static_cast<int>(i);
    }
  }
  return est;
}

LambdaEstimate estimate_lambda(const ConeSpec& cone, int n, int samples, std::uint64_t seed) {
  if (samples <= 0) throw InputError("estimate_lambda needs at least one sample");
  return estimate_lambda(member_samples(cone, n, samples, seed));
}

namespace {

struct SampleContext {
  CurvTensor r;
  double scal = 0.0;
  SearchOptions search;
  MembershipReport base;
};

bool sample_passes(const ConeSpec& cone, const SampleContext& s, double a0,
                   const Alpha0Options& opts) {
  const int n = s.r.dim();
  const CurvTensor id = identity_tensor(n);
  const int grid = std::max(opts.alpha_grid, 1);
  for (int j = 0; j < grid; ++j) {
    const double alpha = grid == 1 ? 0.0 : a0 * j / (grid - 1.0);
    const CurvTensor b =
        q_quadratic(s.r + (alpha * s.scal) * id) - (a0 * a0 * s.scal * s.scal) * id;
    if (!tangent_cone_contains(cone, s.r, s.base, b, s.search, opts.tangent).contained)
      return false;
  }
  return true;
}

}  // namespace

Alpha0Estimate estimate_alpha0(const ConeSpec& cone, const std::vector<CurvTensor>& boundary,
                               const Alpha0Options& opts) {
  if (boundary.empty()) throw InputError("estimate_alpha0 needs at least one sample");
  if (!(opts.tol > 0.0)) throw ParameterError("bisection tolerance must be positive");

  std::vector<SampleContext> ctx(boundary.size());
  parallel_for(ctx.size(), [&](std::size_t i) {
    SampleContext& c = ctx[i];
    c.r = boundary[i];
    c.scal = scal(c.r);
    c.search = opts.search;
    c.search.seed = frames::mix_seed(opts.search.seed, 5000 + i);
    c.base = min_margin(c.r, cone, c.search);
    if (!c.base.member)
      throw PreconditionError("alpha0 sample " + std::to_string(i) + " is outside the cone");
  });

  Alpha0Estimate est;
  est.samples = static_cast<int>(boundary.size());
  auto passes = [&](double a0) {
    ++est.candidates_tested;
    std::vector<char> fail(ctx.size(), 0);
    std::atomic<bool> failed{false};
    parallel_for(ctx.size(), [&](std::size_t i) {
      if (failed.load()) return;
      if (!sample_passes(cone, ctx[i], a0, opts)) {
        fail[i] = 1;
        failed = true;
      }
    });
    const auto it = std::find(fail.begin(), fail.end(), 1);
    if (it == fail.end()) return true;
    est.binding_sample = static_cast<int>(it - fail.begin());
    return false;
  };

  double lo = 0.0, hi = 1.0;
  if (passes(hi)) {
    est.value = hi;
    return est;
  }
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid))
      lo = mid;
    else
      hi = mid;
  }
  if (!(lo > 0.0))
    throw EstimationError("no alpha0 candidate down to " + std::to_string(hi) +
                          " passed for cone " + cone.name());
  est.value = lo;
  return est;
}

Alpha0Estimate estimate_alpha0(const ConeSpec& cone, int n, int samples, std::uint64_t seed,
                               const Alpha0Options& opts) {
  if (samples <= 0) throw InputError("estimate_alpha0 needs at least one sample");
  return estimate_alpha0(cone, boundary_samples(cone, n, samples, seed), opts);
}

double delta_of(double alpha0, double lambda, int n) {
  if (n < 4) throw DimensionError("delta is defined for n >= 4");
  if (!(alpha0 > 0.0)) throw ParameterError("alpha0 must be positive");
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be nonnegative");
  return std::min({1.0 / (2.0 * n * (n - 1.0)), alpha0 / 2.0,
                   alpha0 * alpha0 / (4.0 * (1.0 + 2.0 * lambda * lambda))});
}

ConstantsReport estimate_constants(const ConeSpec& cone, int n, int samples, std::uint64_t seed,
                                   const Alpha0Options& opts, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ParameterError("safety factor must be in (0, 1]");
  ConstantsReport rep;
  rep.n = n;
  rep.samples = samples;
  rep.seed = seed;
  rep.safety = safety;
  rep.lambda = estimate_lambda(cone, n, samples, seed);
  Alpha0Options aopts = opts;
  aopts.search.seed = seed;
  rep.alpha0 = estimate_alpha0(cone, n, samples, seed, aopts);
  rep.lambda_hat = rep.lambda.value;
  rep.alpha0_hat = rep.alpha0.value;
  rep.delta_hat = delta_of(rep.alpha0_hat, rep.lambda_hat, n);
  rep.delta_used = delta_of(safety * rep.alpha0_hat, rep.lambda_hat, n);
  return rep;
}

}  // namespace curvlab
