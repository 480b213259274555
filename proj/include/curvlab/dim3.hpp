#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "curvlab/ode.hpp"
#include "curvlab/tensor.hpp"

// Three-dimensional curvature: a tensor is determined up to rotation by the
// three eigenvalues of its curvature operator. With the operator stored as
// R_ijij on e_i ^ e_j, eigs[k] is the sectional curvature of the plane
// orthogonal to e_k, so
//   ric_k = eigs_0 + eigs_1 + eigs_2 - eigs_k,   scal = 2 (eigs_0 + eigs_1 + eigs_2),
// and conversely eigs_k = scal / 2 - ric_k.

namespace curvlab::dim3 {

using Triple = std::array<double, 3>;

struct PinchedTriple {
  Triple eigs{};
  double rho = 0.0;
  /// Throws ParameterError for rho outside (0, 1/3] and InputError when
  /// min ric < rho scal - 1e-12 scal or scal < 0.
  void validate() const;
};

CurvTensor triple_to_tensor(const Triple& eigs);
/// Curvature operator eigenvalues in ascending order. Throws DimensionError
/// unless n = 3.
Triple tensor_to_triple(const CurvTensor& r);

Triple ricci_of_triple(const Triple& eigs);
Triple triple_of_ricci(const Triple& ric);
/// Ricci eigenvalues of a dimension-3 tensor, ascending.
Triple ricci_eigenvalues(const CurvTensor& r);

/// scal^(sigma - 2) |Ric°|^2. Throws InputError for scal <= 0 and
/// ParameterError unless 0 < sigma < 1.
double f_value(const CurvTensor& r, double sigma);

/// (3 / (2t))^sigma, the solution of y' = -(2/3) sigma y^(1 + 1/sigma)
/// that is infinite at t = 0.
double barrier(double t, double sigma);
/// y' + (2/3) sigma y^(1 + 1/sigma) with y = barrier and y' in closed form.
double barrier_residual(double t, double sigma);
/// Largest |residual| over a logarithmic grid of [t_min, t_max].
double barrier_self_test(double sigma, double t_min = 0.1, double t_max = 10.0, int points = 101);

/// Ricci eigenvalues uniform on {r_i >= rho, sum r_i = 1}, mapped to a
/// tensor, rotated by a Haar-random O(3) element and rescaled by
/// exp(U[-log_scale, log_scale]). Sample i uses mix_seed(seed, i).
std::vector<CurvTensor> pinched_samples(double rho, int count, std::uint64_t seed,
                                        double log_scale = 2.0);

struct ReactionEntry {
  int sample = 0;
  bool rejected = false;
  double scal = 0.0;
  double f = 0.0;
  double dfdt = 0.0;
  double rhs = 0.0;    // -(2/3) sigma f^(1 + 1/sigma)
  double slack = 0.0;  // rhs + allowance - dfdt
};

struct ReactionReport {
  double rho = 0.0;
  double sigma = 0.0;
  std::vector<ReactionEntry> entries;
  int violations = 0;
  int rejected = 0;
  bool passed() const { return violations == 0 && rejected == 0; }
};

/// Centered difference of f along the Hamilton ODE with step 1e-4 / scal,
/// compared with -(2/3) sigma f^(1 + 1/sigma), sigma = rho^2. The allowance
/// is tol * scal * (f + 1e-4 scal^sigma), homogeneous of the same degree as
/// df/dt. Samples that are not rho-pinched are rejected.
ReactionReport verify_reaction_inequality(double rho, const std::vector<CurvTensor>& samples,
                                          double tol = 1e-6);

struct TrajectoryPoint {
  double t = 0.0;
  double scal = 0.0;
  double ric0_sq = 0.0;
  double f = 0.0;
  double barrier = 0.0;  // +inf at t = 0
  double pinching = 0.0; // (min ric - rho scal) / scal
};

struct EstimateEntry {
  int sample = 0;
  bool rejected = false;
  bool violated = false;
  double worst_gap = 0.0;   // max over t > 0 of f - barrier
  double max_ratio = 0.0;   // max over t > 0 of f / barrier
  double min_pinching = 0.0;
  Terminal terminal = Terminal::Horizon;
  std::vector<TrajectoryPoint> points;
};

struct EstimateReport {
  double rho = 0.0;
  double sigma = 0.0;
  bool degenerate = false;  // rho = 1/3 forces Ric° = 0
  std::vector<EstimateEntry> entries;
  int violations = 0;
  int rejected = 0;
  bool passed() const { return violations == 0 && rejected == 0; }
};

struct EstimateOptions {
  double horizon = 10.0;
  /// Stop once scal has grown by this factor.
  double scal_growth = 1e8;
  double tol = 1e-8;
  IntegrateOptions integrate;
};

/// Along the Hamilton ODE from t = 0, checks f(t) <= (3/(2t))^sigma + tol at
/// every accepted step (sigma = rho^2).
EstimateReport verify_dim3_estimate(double rho, const std::vector<CurvTensor>& samples,
                                    const EstimateOptions& opts = {});

/// Along the Hamilton ODE, checks min ric - rho scal >= -tol scal at every
/// accepted step.
EstimateReport verify_pinching_preserved(double rho, const std::vector<CurvTensor>& samples,
                                         const EstimateOptions& opts = {});

/// CSV with columns t,scal,ric0_sq,f,barrier,slack.
std::string trajectory_csv(const EstimateEntry& entry);

}  // namespace curvlab::dim3
