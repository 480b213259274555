#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>

#include "curvlab/cones.hpp"
#include "curvlab/tensor.hpp"

// Minimization of the four-frame cone quantity over orthonormal frames and
// (lambda, mu) in [0,1]^2: random restarts, projected descent on the set of
// orthonormal 4-frames with a Gram-Schmidt retraction, and an exact-in-lambda
// grid search in mu.

namespace curvlab::frames {

/// The five frame numbers the cone quantity depends on:
/// R(e1,e3,e1,e3), R(e1,e4,e1,e4), R(e2,e3,e2,e3), R(e2,e4,e2,e4),
/// R(e1,e2,e3,e4).
struct FrameNumbers {
  double k13 = 0, k14 = 0, k23 = 0, k24 = 0, x = 0;
};

class Objective {
 public:
  /// `y` is the tensor tested against the base cone; tau multiplies
  /// (1-lambda^2)(1-mu^2); with mu_fixed the mu variable is pinned to 1.
  Objective(const CurvTensor& y, double tau, bool mu_fixed);
  static Objective for_cone(const ConeSpec& cone, const CurvTensor& r);

  int dim() const { return n_; }
  bool mu_fixed() const { return mu_fixed_; }
  double tau() const { return tau_; }

  FrameNumbers numbers(const Eigen::MatrixXd& x) const;
  double combine(const FrameNumbers& k, double lambda, double mu) const;
  double value(const Eigen::MatrixXd& x, double lambda, double mu) const;

  struct Gradient {
    double value = 0.0;
    Eigen::MatrixXd dx;  // n x 4 Euclidean gradient
    double dlambda = 0.0;
    double dmu = 0.0;
    FrameNumbers k;
  };
  Gradient gradient(const Eigen::MatrixXd& x, double lambda, double mu) const;

  /// Global minimization over (lambda, mu) for fixed frame numbers: exact in
  /// lambda, 1/64 grid in mu refined by golden section.
  std::array<double, 2> best_lambda_mu(const FrameNumbers& k) const;

 private:
  int n_;
  Eigen::MatrixXd op_;
  double tau_;
  bool mu_fixed_;
};

/// Gram-Schmidt on the columns (twice, for orthogonality to rounding).
Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& a);
Eigen::MatrixXd random_frame(int n, std::mt19937_64& rng);

struct LocalResult {
  Eigen::MatrixXd x;
  double lambda = 0.0;
  double mu = 0.0;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

LocalResult descend(const Objective& obj, Eigen::MatrixXd x, double lambda, double mu,
                    double scale, const SearchOptions& opts);

/// Deterministic per-stream seed derivation (splitmix64).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace curvlab::frames
