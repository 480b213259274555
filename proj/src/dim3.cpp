#include "curvlab/dim3.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/sampling.hpp"

namespace curvlab::dim3 {

namespace {

void require_dim3(const CurvTensor& r) {
  if (r.dim() != 3) throw DimensionError("expected a tensor on R^3");
}

double sigma_of(double rho) {
  if (!(rho > 0.0) || rho > 1.0 / 3.0) throw ParameterError("rho must lie in (0, 1/3]");
  return rho * rho;
}

// Relative slack of the pinching condition, (min ric - rho scal) / scal.
double pinching_of(const CurvTensor& r, double rho) {
  const Triple ric = ricci_eigenvalues(r);
  const double s = ric[0] + ric[1] + ric[2];
  return s > 0.0 ? (ric[0] - rho * s) / s : -std::numeric_limits<double>::infinity();
}

}  // namespace

void PinchedTriple::validate() const {
  sigma_of(rho);
  const Triple ric = ricci_of_triple(eigs);
  const double s = ric[0] + ric[1] + ric[2];
  if (!(s >= 0.0)) throw InputError("pinched triple has negative scalar curvature");
  const double lo = *std::min_element(ric.begin(), ric.end());
  if (lo < rho * s - 1e-12 * std::abs(s)) throw InputError("triple is not rho-pinched");
}

CurvTensor triple_to_tensor(const Triple& eigs) {
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(3, 3);
  // Pairs in order (01), (02), (12).
  op(0, 0) = eigs[2];
  op(1, 1) = eigs[1];
  op(2, 2) = eigs[0];
  return CurvTensor::from_canonical(3, std::move(op));
}

Triple tensor_to_triple(const CurvTensor& r) {
  require_dim3(r);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Eigen::Matrix3d(r.op()),
                                                    Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return {v[0], v[1], v[2]};
}

Triple ricci_of_triple(const Triple& eigs) {
  const double sum = eigs[0] + eigs[1] + eigs[2];
  return {sum - eigs[0], sum - eigs[1], sum - eigs[2]};
}

Triple triple_of_ricci(const Triple& ric) {
  const double half = 0.5 * (ric[0] + ric[1] + ric[2]);
  return {half - ric[0], half - ric[1], half - ric[2]};
}

Triple ricci_eigenvalues(const CurvTensor& r) {
  require_dim3(r);
  const auto c = contractions(r);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Eigen::Matrix3d(c.ric.m),
                                                    Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return {v[0], v[1], v[2]};
}

double f_value(const CurvTensor& r, double sigma) {
  require_dim3(r);
  if (!(sigma > 0.0 && sigma < 1.0)) throw ParameterError("sigma must lie in (0, 1)");
  const auto c = contractions(r);
  if (!(c.scal > 0.0)) throw InputError("f needs positive scalar curvature");
  return std::pow(c.scal, sigma - 2.0) * c.ric0.m.squaredNorm();
}

double barrier(double t, double sigma) { return std::pow(1.5 / t, sigma); }

double barrier_residual(double t, double sigma) {
  const double y = barrier(t, sigma);
  const double dy = -sigma * std::pow(1.5, sigma) * std::pow(t, -sigma - 1.0);
  return dy + (2.0 / 3.0) * sigma * std::pow(y, 1.0 + 1.0 / sigma);
}

double barrier_self_test(double sigma, double t_min, double t_max, int points) {
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = t_min * std::pow(t_max / t_min, points == 1 ? 0.0 : k / (points - 1.0));
    worst = std::max(worst, std::abs(barrier_residual(t, sigma)));
  }
  return worst;
}

std::vector<CurvTensor> pinched_samples(double rho, int count, std::uint64_t seed,
                                        double log_scale) {
  sigma_of(rho);
  std::vector<CurvTensor> out(static_cast<std::size_t>(std::max(count, 0)));
  parallel_for(out.size(), [&](std::size_t i) {
    std::mt19937_64 rng(frames::mix_seed(seed, i));
    std::exponential_distribution<double> ex(1.0);
    const double e0 = ex(rng), e1 = ex(rng), e2 = ex(rng);
    const double sum = e0 + e1 + e2;
    const double free = 1.0 - 3.0 * rho;
    const Triple ric{rho + free * e0 / sum, rho + free * e1 / sum, rho + free * e2 / sum};
    const Eigen::MatrixXd o = random_rotation(3, rng);
    std::uniform_real_distribution<double> u(-log_scale, log_scale);
    out[i] = std::exp(u(rng)) * rotate(triple_to_tensor(triple_of_ricci(ric)), o);
  });
  return out;
}

ReactionReport verify_reaction_inequality(double rho, const std::vector<CurvTensor>& samples,
                                          double tol) {
  ReactionReport rep;
  rep.rho = rho;
  rep.sigma = sigma_of(rho);
  const double sigma = rep.sigma;
  rep.entries.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    ReactionEntry& e = rep.entries[i];
    e.sample = static_cast<int>(i);
    const CurvTensor& r = samples[i];
    require_dim3(r);
    e.scal = scal(r);
    if (!(e.scal > 0.0) || pinching_of(r, rho) < -1e-12) {
      e.rejected = true;
      return;
    }
    const double h = 1e-4 / e.scal;
    e.f = f_value(r, sigma);
    e.dfdt = (f_value(flow(r, h), sigma) - f_value(flow(r, -h), sigma)) / (2.0 * h);
    e.rhs = -(2.0 / 3.0) * sigma * std::pow(e.f, 1.0 + 1.0 / sigma);
    const double allowance = tol * e.scal * (e.f + 1e-4 * std::pow(e.scal, sigma));
    e.slack = e.rhs + allowance - e.dfdt;
  });
  for (const auto& e : rep.entries) {
    if (e.rejected)
      ++rep.rejected;
    else if (e.slack < 0.0)
      ++rep.violations;
  }
  return rep;
}

namespace {

template <class Check>
EstimateReport run_trajectories(double rho, const std::vector<CurvTensor>& samples,
                                const EstimateOptions& opts, Check&& check) {
  EstimateReport rep;
  rep.rho = rho;
  rep.sigma = sigma_of(rho);
  rep.degenerate = std::abs(rho - 1.0 / 3.0) <= 1e-15;
  rep.entries.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    EstimateEntry& e = rep.entries[i];
    e.sample = static_cast<int>(i);
    const CurvTensor& r0 = samples[i];
    require_dim3(r0);
    const double s0 = scal(r0);
    if (!(s0 > 0.0) || pinching_of(r0, rho) < -1e-12) {
      e.rejected = true;
      return;
    }
    IntegrateOptions iopts = opts.integrate;
    iopts.t0 = 0.0;
    const Trajectory traj = integrate(r0, opts.horizon, s0 * opts.scal_growth, iopts);
    e.terminal = traj.terminal;
    e.worst_gap = -std::numeric_limits<double>::infinity();
    e.min_pinching = std::numeric_limits<double>::infinity();
    e.points.reserve(traj.samples.size());
    for (const auto& smp : traj.samples) {
      const auto c = contractions(smp.r);
      TrajectoryPoint p;
      p.t = smp.t;
      p.scal = c.scal;
      p.ric0_sq = c.ric0.m.squaredNorm();
      p.f = std::pow(c.scal, rep.sigma - 2.0) * p.ric0_sq;
      p.barrier = smp.t > 0.0 ? barrier(smp.t, rep.sigma) : std::numeric_limits<double>::infinity();
      p.pinching = pinching_of(smp.r, rho);
      e.min_pinching = std::min(e.min_pinching, p.pinching);
      if (smp.t > 0.0) {
        e.worst_gap = std::max(e.worst_gap, p.f - p.barrier);
        e.max_ratio = std::max(e.max_ratio, p.f / p.barrier);
      }
      e.points.push_back(p);
    }
    e.violated = !check(e);
  });
  for (const auto& e : rep.entries) {
    if (e.rejected)
      ++rep.rejected;
    else if (e.violated)
      ++rep.violations;
  }
  return rep;
}

}  // namespace

EstimateReport verify_dim3_estimate(double rho, const std::vector<CurvTensor>& samples,
                                    const EstimateOptions& opts) {
  return run_trajectories(rho, samples, opts,
                          [&](const EstimateEntry& e) { return e.worst_gap <= opts.tol; });
}

EstimateReport verify_pinching_preserved(double rho, const std::vector<CurvTensor>& samples,
                                         const EstimateOptions& opts) {
  return run_trajectories(rho, samples, opts,
                          [&](const EstimateEntry& e) { return e.min_pinching >= -opts.tol; });
}

std::string trajectory_csv(const EstimateEntry& entry) {
  std::ostringstream os;
  os << std::setprecision(17) << "t,scal,ric0_sq,f,barrier,slack\n";
  for (const auto& p : entry.points)
    os << p.t << ',' << p.scal << ',' << p.ric0_sq << ',' << p.f << ',' << p.barrier << ','
       << p.barrier - p.f << '\n';
  return os.str();
}

}  // namespace curvlab::dim3
