#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "curvlab/cones.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

/// Haar-distributed element of O(n).
Eigen::MatrixXd random_rotation(int n, std::mt19937_64& rng);
/// Projection of an i.i.d. standard Gaussian table; unit 4-index norm.
CurvTensor gaussian_tensor(int n, std::mt19937_64& rng);

struct BoundaryOptions {
  /// Stop when |margin| <= this (normalized).
  double margin_tol = 1e-8;
  int max_iterations = 60;
  SearchOptions search;
};

struct BoundarySample {
  CurvTensor tensor;  // on the boundary, scal normalized to 1 when positive
  MembershipReport report;
  int iterations = 0;
};

/// Point where the segment from the non-member `outside` to a multiple of I
/// crosses the cone boundary. Every cone here is cut out by linear
/// functionals of R, so along the segment the minimized quantity is a
/// concave function of the segment parameter with a single root; it is
/// located by Newton steps on the active functional, with bisection as the
/// fallback when a step fails to make progress. Throws PreconditionError
/// when `outside` is already a member or I is not interior.
BoundarySample boundary_point(const ConeSpec& cone, const CurvTensor& outside,
                              const BoundaryOptions& opts = {});

/// Random boundary point: a Gaussian tensor (negated if it happens to be a
/// member) pushed toward I until it hits the boundary.
BoundarySample sample_boundary(const ConeSpec& cone, int n, std::uint64_t seed,
                               const BoundaryOptions& opts = {});

/// Random member: a boundary sample plus theta * I / n(n-1) with theta
/// uniform in [0, max_theta], renormalized to scal = 1.
CurvTensor sample_member(const ConeSpec& cone, int n, std::uint64_t seed, double max_theta = 0.5,
                         const BoundaryOptions& opts = {});

/// Largest eps with R - eps I in the cone (the segment from R toward -I), by
/// the same Newton iteration. Requires R in the cone.
double identity_headroom(const ConeSpec& cone, const CurvTensor& r, const SearchOptions& opts = {});

/// Members R with S = R + (1 - t scal(R)) I also in the cone, for
/// tangent-cone checks at S.
///   Trivial regime: a random member rescaled so t scal(R) is uniform in
///   [0.05, 0.95] (S is then a positive combination of R and I).
///   Scaled regime: R = c (R_bd + h I) for a boundary sample R_bd and
///   h = u t with u uniform in [0, 0.9]; c is chosen so that S = c R_bd, a
///   boundary point, which forces t scal(R) >= 1.
/// Sample i is drawn from mix_seed(seed, i). Requires t > 0.
enum class FamilyRegime { Trivial, Scaled };
std::vector<CurvTensor> family_samples(const ConeSpec& cone, int n, double t, int count,
                                       std::uint64_t seed, FamilyRegime regime);

}  // namespace curvlab
