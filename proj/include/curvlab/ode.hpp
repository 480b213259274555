#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/cones.hpp"
#include "curvlab/tensor.hpp"

namespace curvlab {

enum class Terminal { Horizon, ScalCap, StepUnderflow };
std::string terminal_name(Terminal t);

struct TrajectorySample {
  double t = 0.0;
  CurvTensor r;
};

/// Solution of dR/dt = Q(R) as accepted steps. Times strictly increase and
/// start at the initial time.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  int accepted = 0;
  int rejected = 0;
  Terminal terminal = Terminal::Horizon;

  const TrajectorySample& back() const { return samples.back(); }
};

struct IntegrateOptions {
  /// Local error per step, relative to ||R||.
  double tol = 1e-10;
  /// Step bound c / ||R||.
  double step_factor = 0.1;
  /// Start time (the ODE is autonomous; this only labels samples).
  double t0 = 0.0;
};

/// Classical RK4 with step doubling for the error estimate and PI step
/// control. Stops at t0 + horizon, when scal(R) reaches scal_cap (the last
/// step is shortened to land on the cap), or on step underflow.
/// Throws IntegrationError when no step at all can be taken.
Trajectory integrate(const CurvTensor& r0, double horizon, double scal_cap,
                     const IntegrateOptions& opts = {});

/// Fixed-step RK4 over a signed time span, `substeps` equal steps.
CurvTensor flow(const CurvTensor& r, double dt, int substeps = 8);

/// Indices of trajectory samples closest above the geometric scal levels
/// scal0 * growth^(k/count), k = 0..count, plus the final sample.
std::vector<std::size_t> scal_checkpoints(const Trajectory& traj, double growth, int count);

struct Violation {
  int sample = 0;
  double t = 0.0;
  double margin = 0.0;
  std::string what;
};

struct InvarianceReport {
  int samples_run = 0;
  int skipped = 0;
  int failures = 0;  // integration errors
  std::vector<Violation> violations;  // sorted by time
  double worst_margin = 0.0;
  std::vector<std::string> notes;

  bool passed() const { return violations.empty() && failures == 0; }
};

struct InvarianceOptions {
  /// Integrate until scal grows by this factor ...
  double scal_growth = 8.0;
  /// ... or until this multiple of 1/scal(R0) has elapsed.
  double horizon_factor = 10.0;
  double violation_threshold = -1e-6;
  /// Margin checks per trajectory, geometric in scal.
  int checkpoints = 12;
  IntegrateOptions integrate;
  /// Search for the starting tensor; later checks warm-start from the
  /// previous minima and use `tracking_restarts` random restarts on top.
  SearchOptions search;
  int tracking_restarts = 16;
};

/// Integrates each sample and records the first time its margin drops
/// below the violation threshold. Starting non-members are skipped.
InvarianceReport verify_invariance(const ConeSpec& cone, const std::vector<CurvTensor>& samples,
                                   const InvarianceOptions& opts = {});

/// Members of F(t): R in C and R + (1 - t scal R) I in C.
struct FamilyMargins {
  double cone_margin = 0.0;
  double shifted_margin = 0.0;
  bool member(double tol) const { return cone_margin >= -tol && shifted_margin >= -tol; }
};
FamilyMargins family_margins(const ConeSpec& cone, const CurvTensor& r, double t,
                             const SearchOptions& opts = {});

/// Checks that R(t) stays in F(t) at every accepted step of the Hamilton ODE
/// on [t0, t1].
/// Throws PreconditionError unless 0 <= t0 <= t1 <= delta.
InvarianceReport verify_pinching_family(const ConeSpec& cone, double delta,
                                        const std::vector<CurvTensor>& samples, double t0,
                                        double t1, const InvarianceOptions& opts = {});

struct AuxLemmaEntry {
  int sample = 0;
  bool trivial = false;  // t scal(R) < 1
  bool passed = false;
  bool skipped = false;
  double t_scal = 0.0;
  double s_margin = 0.0;
  TangentReport tangent;
};

struct AuxLemmaReport {
  std::vector<AuxLemmaEntry> entries;
  int passed = 0;
  int failed = 0;
  int skipped = 0;
  bool all_passed() const { return failed == 0 && skipped == 0; }
};

/// For each R with R in C and S = R + (1 - t scal R) I in C, checks that
/// Q(R) - scal(R) I - 2t |Ric R|^2 I is interior to T_S C. Samples with
/// t scal(R) < 1 pass when S is interior. Throws PreconditionError unless
/// 0 <= t <= delta.
AuxLemmaReport verify_aux_lemma(const ConeSpec& cone, double delta,
                                const std::vector<CurvTensor>& samples, double t,
                                const SearchOptions& search = {},
                                const TangentOptions& topts = {});

/// Closed-form ancient solutions of the Hamilton ODE.
enum class AncientModel { SpaceForm, SphereProduct };
AncientModel parse_ancient_model(const std::string& id);
/// Space form: (2(n-1)|t|)^{-1} I. Sphere product S^p x S^q with radii
/// r_i^2 = 2(p_i - 1)|t| (requires p, q >= 2).
CurvTensor ancient_tensor(AncientModel model, int n, double t, int p = 2, int q = 2);

struct AncientEntry {
  double t = 0.0;
  double margin = 0.0;
  bool member = false;
};
struct AncientReport {
  AncientModel model = AncientModel::SpaceForm;
  bool expected_member = true;
  std::vector<AncientEntry> entries;
  bool consistent() const;
};

AncientReport ancient_margin_check(const ConeSpec& cone, double delta, AncientModel model, int n,
                                   const std::vector<double>& times, int p = 2, int q = 2,
                                   const SearchOptions& search = {});

struct SweepEntry {
  double s = 0.0;
  double min_margin = 0.0;
  int worst_tensor = 0;
  bool all_member = false;
};
struct SweepReport {
  std::vector<SweepEntry> entries;
  std::optional<double> largest_passing;  // largest s with all margins >= -tol
  std::optional<double> first_failing;
};

/// Minimum margin of the tensors in each cone family(s) over the grid.
/// Throws ParameterError unless s_grid is strictly increasing.
SweepReport continuity_sweep(const std::function<ConeSpec(double)>& family,
                             const std::vector<CurvTensor>& tensors,
                             const std::vector<double>& s_grid, double tol = 1e-8,
                             const SearchOptions& search = {});

}  // namespace curvlab
