#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvlab/cones.hpp"

namespace curvlab {

struct StarOptions {
  int pairs = 200;       // convexity: midpoints of member pairs
  int rotations = 100;   // O(n) invariance of the margin
  int boundary = 100;    // Q(R) at boundary points
  double tol = 1e-8;     // membership tolerance
  double rotation_tol = 1e-9;
  std::uint64_t seed = 1;
  SearchOptions search;
  TangentOptions tangent;
};

struct StarCheck {
  std::string name;
  bool ran = false;
  bool passed = false;
  int tested = 0;
  int failures = 0;
  double value = 0.0;  // worst statistic of the check
  std::string note;
};

/// The four conditions on a cone C of curvature tensors:
///   convexity           midpoint margins of member pairs >= -tol
///   rotation            |margin(O.R) - margin(R)| <= rotation_tol
///   scal                min scal over members with ||R|| = 1 is > 0
///   identity            margin(I) > 0
///   transversal         Q(R) interior to the tangent cone at boundary R
/// Sampling walks toward I, so when I is not interior the sampled checks are
/// reported as not run (and failed).
struct StarReport {
  int n = 0;
  std::string cone;
  std::vector<StarCheck> checks;
  bool passed() const;
};

StarReport star_property_check(const ConeSpec& cone, int n, const StarOptions& opts = {});

}  // namespace curvlab
