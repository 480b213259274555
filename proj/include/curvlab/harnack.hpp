#pragma once

#include <string>
#include <vector>

// Closed-form shrinking solutions used as fixtures for the Harnack-type
// inequalities. Both are spatially homogeneous, so sup and inf of scal over
// the manifold coincide.

namespace curvlab::harnack {

class ModelFlow {
 public:
  enum class Kind { RoundSphere, SphereProduct };

  /// S^n with r(tau)^2 = 2(n-1)|tau|. Throws ParameterError for n < 2.
  static ModelFlow round_sphere(int n);
  /// S^p x S^q with r_i^2 = 2(p_i - 1)|tau|. Throws ParameterError when a
  /// factor has dimension < 2.
  static ModelFlow sphere_product(int p, int q);

  Kind kind() const { return kind_; }
  int dim() const { return p_ + q_; }
  std::string name() const;

  /// Both throw ParameterError for tau >= 0.
  double scal(double tau) const;
  double diam(double tau) const;

 private:
  ModelFlow(Kind k, int p, int q) : kind_(k), p_(p), q_(q) {}
  Kind kind_;
  int p_;
  int q_;  // 0 for the round sphere
};

/// inf scal(tau/2) >= exp(-diam(tau)^2 / |tau|) sup scal(tau).
struct HarnackGap {
  double tau = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack_factor = 0.0;  // lhs / rhs
  bool passed = false;
};
HarnackGap check_harnack_gap(const ModelFlow& flow, double tau);

struct DiameterEntry {
  double tau = 0.0;
  double inf_half = 0.0;     // inf scal(tau/2)
  double premise = 0.0;      // n / |tau|
  double sup_scal = 0.0;     // sup scal(tau)
  double bound = 0.0;        // (n/|tau|) exp(diam(tau)^2 / |tau|)
  double tau_scal = 0.0;     // |tau| sup scal(tau)
  bool premise_holds = false;
  bool bound_holds = false;
};

struct DiameterReport {
  std::vector<DiameterEntry> entries;
  bool premise = false;   // (a) at every tau
  bool bound = false;     // (b) at every tau
  bool bounded = false;   // (c) |tau| sup scal bounded by the largest bound seen
  double max_tau_scal = 0.0;
  bool passed() const { return premise && bound && bounded; }
};

/// `n` is the ambient dimension used in the premise and the bound; 0 means
/// the model's own dimension. Relative tolerance 1e-12 on the equality case
/// of (a). Throws ParameterError for an empty list or tau >= 0.
DiameterReport check_diameter_bound(const ModelFlow& flow, const std::vector<double>& taus,
                                    int n = 0);

/// CSV with columns tau,lhs,rhs,slack.
std::string harnack_csv(const std::vector<HarnackGap>& rows);

}  // namespace curvlab::harnack
