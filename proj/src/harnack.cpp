#include "curvlab/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "curvlab/errors.hpp"

namespace curvlab::harnack {

namespace {

void require_negative(double tau) {
  if (!(tau < 0.0)) throw ParameterError("model flows are defined for tau < 0");
}

}  // namespace

ModelFlow ModelFlow::round_sphere(int n) {
  if (n < 2) throw ParameterError("round sphere needs n >= 2");
  return ModelFlow(Kind::RoundSphere, n, 0);
}

ModelFlow ModelFlow::sphere_product(int p, int q) {
  if (p < 2 || q < 2)
    throw ParameterError("sphere product factors need dimension >= 2 (a circle factor does not shrink)");
  return ModelFlow(Kind::SphereProduct, p, q);
}

std::string ModelFlow::name() const {
  if (kind_ == Kind::RoundSphere) return "round_sphere(" + std::to_string(p_) + ")";
  return "sphere_product(" + std::to_string(p_) + "," + std::to_string(q_) + ")";
}

double ModelFlow::scal(double tau) const {
  require_negative(tau);
  return dim() / (2.0 * std::abs(tau));
}

double ModelFlow::diam(double tau) const {
  require_negative(tau);
  const double a = std::abs(tau);
  if (kind_ == Kind::RoundSphere) return std::numbers::pi * std::sqrt(2.0 * (p_ - 1) * a);
  return std::numbers::pi * std::sqrt(2.0 * (p_ - 1) * a + 2.0 * (q_ - 1) * a);
}

HarnackGap check_harnack_gap(const ModelFlow& flow, double tau) {
  require_negative(tau);
  HarnackGap g;
  g.tau = tau;
  const double d = flow.diam(tau);
  g.lhs = flow.scal(0.5 * tau);
  g.rhs = std::exp(-d * d / std::abs(tau)) * flow.scal(tau);
  g.slack_factor = g.lhs / g.rhs;
  g.passed = g.lhs >= g.rhs;
  return g;
}

DiameterReport check_diameter_bound(const ModelFlow& flow, const std::vector<double>& taus,
                                    int n) {
  if (taus.empty()) throw ParameterError("diameter check needs at least one tau");
  const int dim = n > 0 ? n : flow.dim();
  DiameterReport rep;
  rep.premise = rep.bound = true;
  double min_bound = std::numeric_limits<double>::infinity();
  for (double tau : taus) {
    require_negative(tau);
    DiameterEntry e;
    e.tau = tau;
    const double a = std::abs(tau);
    const double d = flow.diam(tau);
    e.inf_half = flow.scal(0.5 * tau);
    e.premise = dim / a;
    e.sup_scal = flow.scal(tau);
    e.bound = (dim / a) * std::exp(d * d / a);
    e.tau_scal = a * e.sup_scal;
    e.premise_holds = e.inf_half <= e.premise * (1.0 + 1e-12);
    e.bound_holds = e.sup_scal <= e.bound;
    rep.premise = rep.premise && e.premise_holds;
    rep.bound = rep.bound && e.bound_holds;
    rep.max_tau_scal = std::max(rep.max_tau_scal, e.tau_scal);
    min_bound = std::min(min_bound, a * e.bound);
    rep.entries.push_back(e);
  }
  // |tau| sup scal <= |tau| (n/|tau|) exp(d^2/|tau|) at every tau, so the
  // family is bounded once the smallest such bound dominates every entry.
  rep.bounded = std::isfinite(rep.max_tau_scal) && rep.max_tau_scal <= min_bound;
  return rep;
}

std::string harnack_csv(const std::vector<HarnackGap>& rows) {
  std::ostringstream os;
  os << std::setprecision(17) << "tau,lhs,rhs,slack\n";
  for (const auto& r : rows) os << r.tau << ',' << r.lhs << ',' << r.rhs << ',' << r.lhs - r.rhs << '\n';
  return os.str();
}

}  // namespace curvlab::harnack
