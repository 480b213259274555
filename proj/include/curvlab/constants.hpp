#pragma once

#include <cstdint>
#include <vector>

#include "curvlab/cones.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

/// max |Ric(R)| / scal(R) over a sample of cone members. A lower bound for
/// the true constant of the cone.
struct LambdaEstimate {
  double value = 0.0;
  int samples = 0;
  int worst_sample = -1;
  double min_scal = 0.0;        // smallest scal(R)/||R|| seen
  bool scal_positive = true;    // false if some member had scal <= 0
};

/// Throws InputError on an empty sample list.
LambdaEstimate estimate_lambda(const std::vector<CurvTensor>& members);
/// Members drawn with sample_member(cone, n, mix_seed(seed, i)), i < samples.
LambdaEstimate estimate_lambda(const ConeSpec& cone, int n, int samples, std::uint64_t seed);

struct Alpha0Options {
  double tol = 1e-3;     // bisection width on (0, 1]
  int alpha_grid = 17;   // points of [0, alpha0] tried per sample
  SearchOptions search;  // seed is replaced per sample
  TangentOptions tangent;
};

/// Largest a0 in (0, 1] (to tol) such that, for every boundary sample R and
/// every alpha on the grid of [0, a0],
///   Q(R + alpha scal(R) I) - a0^2 scal(R)^2 I
/// lies in the tangent cone at R. Sample i uses its own search seed, so
/// verdicts on a nested sample set never exceed those of a subset: the
/// result is non-increasing in the sample set. An upper estimate for the
/// uniform constant. Throws EstimationError when no candidate passes and
/// InputError on an empty sample list.
struct Alpha0Estimate {
  double value = 0.0;
  int samples = 0;
  int candidates_tested = 0;
  int binding_sample = -1;  // sample that rejected the last failing candidate
};
Alpha0Estimate estimate_alpha0(const ConeSpec& cone, const std::vector<CurvTensor>& boundary,
                               const Alpha0Options& opts = {});
Alpha0Estimate estimate_alpha0(const ConeSpec& cone, int n, int samples, std::uint64_t seed,
                               const Alpha0Options& opts = {});

/// min{ 1/(2n(n-1)), a0/2, a0^2 / (4(1 + 2 lambda^2)) }.
/// Throws ParameterError for a0 <= 0 or lambda < 0, DimensionError for n < 4.
double delta_of(double alpha0, double lambda, int n);

struct ConstantsReport {
  double lambda_hat = 0.0;
  double alpha0_hat = 0.0;
  double delta_hat = 0.0;   // delta_of(alpha0_hat, lambda_hat, n)
  double safety = 0.5;
  double delta_used = 0.0;  // delta_of(safety * alpha0_hat, lambda_hat, n)
  int n = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  LambdaEstimate lambda;
  Alpha0Estimate alpha0;
};

ConstantsReport estimate_constants(const ConeSpec& cone, int n, int samples, std::uint64_t seed,
                                   const Alpha0Options& opts = {}, double safety = 0.5);

/// The members and boundary points behind estimate_constants.
std::vector<CurvTensor> member_samples(const ConeSpec& cone, int n, int count, std::uint64_t seed);
std::vector<CurvTensor> boundary_samples(const ConeSpec& cone, int n, int count,
                                         std::uint64_t seed);

}  // namespace curvlab
