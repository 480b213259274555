#include "curvlab/sampling.hpp"

#include <cmath>

#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/parallel.hpp"

namespace curvlab {

Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

CurvTensor gaussian_tensor(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int np = pair_count(n);
  Eigen::MatrixXd m(np, np);
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) m(p, q) = g(rng);
  CurvTensor r = CurvTensor::from_operator(n, m);
  const double nrm = r.norm();
  return nrm > 0.0 ? (1.0 / nrm) * r : r;
}

namespace {

double functional(const ConeSpec& cone, const CurvTensor& r, const FrameChoice& fc) {
  return frames::Objective::for_cone(cone, r).value(fc.frame.vectors(), fc.lambda, fc.mu);
}

CurvTensor normalized_by_scal(const CurvTensor& r) {
  const double s = scal(r);
  return s > 0.0 ? (1.0 / s) * r : r;
}

}  // namespace

BoundarySample boundary_point(const ConeSpec& cone, const CurvTensor& outside,
                              const BoundaryOptions& opts) {
  const int n = outside.dim();
  const CurvTensor id = identity_tensor(n);
  const double xn = outside.norm();
  const CurvTensor target = (xn > 0.0 ? xn / id.norm() : 1.0) * id;

  SearchOptions sopts = opts.search;
  if (!min_margin(target, cone, sopts).member)
    throw PreconditionError("identity is not inside cone " + cone.name());

  auto point = [&](double t) { return (1.0 - t) * outside + t * target; };
  double lo = 0.0, hi = 1.0, t = 0.0;
  BoundarySample out;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const CurvTensor p = point(t);
    MembershipReport rep = min_margin(p, cone, sopts);
    out.iterations = it + 1;
    if (it == 0 && rep.margin > opts.margin_tol)
      throw PreconditionError("boundary search must start outside cone " + cone.name());
    if (std::abs(rep.margin) <= opts.margin_tol) {
      out.tensor = normalized_by_scal(p);
      out.report = min_margin(out.tensor, cone, sopts);
      return out;
    }
    sopts.warm_starts = rep.minima;
    double next;
    if (rep.margin > 0.0) {
      hi = t;
      next = 0.5 * (lo + hi);
    } else {
      lo = t;
      const double gx = functional(cone, outside, rep.argmin);
      const double gj = functional(cone, target, rep.argmin);
      next = (gj - gx) > 0.0 ? -gx / (gj - gx) : 0.5 * (lo + hi);
      if (!(next > t) || !(next < hi)) next = 0.5 * (lo + hi);
    }
    t = next;
  }
  throw IntegrationError("boundary search did not converge for cone " + cone.name());
}

BoundarySample sample_boundary(const ConeSpec& cone, int n, std::uint64_t seed,
                               const BoundaryOptions& opts) {
  std::mt19937_64 rng(seed);
  BoundaryOptions bopts = opts;
  bopts.search.seed = frames::mix_seed(seed, 77);
  for (int attempt = 0; attempt < 32; ++attempt) {
    CurvTensor x = gaussian_tensor(n, rng);
    if (min_margin(x, cone, bopts.search).member) {
      x = -x;
      if (min_margin(x, cone, bopts.search).member) continue;
    }
    return boundary_point(cone, x, bopts);
  }
  throw IntegrationError("could not draw a non-member for cone " + cone.name());
}

CurvTensor sample_member(const ConeSpec& cone, int n, std::uint64_t seed, double max_theta,
                         const BoundaryOptions& opts) {
  const BoundarySample b = sample_boundary(cone, n, seed, opts);
  std::mt19937_64 rng(frames::mix_seed(seed, 91));
  std::uniform_real_distribution<double> u(0.0, max_theta);
  const double theta = u(rng);
  CurvTensor r = b.tensor + (theta / (n * (n - 1.0))) * identity_tensor(n);
  return normalized_by_scal(r);
}

double identity_headroom(const ConeSpec& cone, const CurvTensor& r, const SearchOptions& opts) {
  const CurvTensor id = identity_tensor(r.dim());
  SearchOptions sopts = opts;
  MembershipReport rep = min_margin(r, cone, sopts);
  if (!rep.member) throw PreconditionError("identity headroom needs a cone member");
  double eps = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double gr = functional(cone, r, rep.argmin);
    const double gi = functional(cone, id, rep.argmin);
    if (!(gi > 0.0)) throw PreconditionError("identity is not inside cone " + cone.name());
    const double next = gr / gi;
    sopts.warm_starts = rep.minima;
    const double prev = eps;
    eps = next;
    rep = min_margin(r - eps * id, cone, sopts);
    if (std::abs(rep.margin) <= opts.tol || std::abs(eps - prev) <= 1e-15 * std::abs(eps)) break;
  }
  return eps;
}

}  // namespace curvlab

namespace curvlab {

std::vector<CurvTensor> family_samples(const ConeSpec& cone, int n, double t, int count,
                                       std::uint64_t seed, FamilyRegime regime) {
  if (!(t > 0.0)) throw ParameterError("family samples need t > 0");
  std::vector<CurvTensor> out(static_cast<std::size_t>(std::max(count, 0)));
  const CurvTensor id = identity_tensor(n);
  const double nn = n * (n - 1.0);
  parallel_for(out.size(), [&](std::size_t i) {
    const std::uint64_t s = frames::mix_seed(seed, i);
    std::mt19937_64 rng(frames::mix_seed(s, 3));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (regime == FamilyRegime::Trivial) {
      const double x = 0.05 + 0.9 * u01(rng);
      out[i] = (x / t) * sample_member(cone, n, s);
      return;
    }
    const CurvTensor bd = sample_boundary(cone, n, s).tensor;
    const double h = 0.9 * u01(rng) * t;
    const double c = 1.0 / (t * (1.0 + nn * h) - h);
    out[i] = c * (bd + h * id);
  });
  return out;
}

}  // namespace curvlab
