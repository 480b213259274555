#include "curvlab/cones.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "curvlab/frame_search.hpp"

namespace curvlab {

void ConeSpec::validate(int n) const {
  if (base == BaseCone::CTildeS && !(s > 0.0 && std::isfinite(s)))
    throw ParameterError("interpolating cone needs s > 0");
  if (b) lab_params(n, *b);
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ParameterError("pinching shift rho must be >= 0");
}

std::string base_cone_name(BaseCone b) {
  switch (b) {
    case BaseCone::CTilde:
      return "ctilde";
    case BaseCone::CHat:
      return "chat";
    case BaseCone::CTildeS:
      return "ctilde_s";
  }
  return "?";
}

BaseCone parse_base_cone(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "chat") return BaseCone::CHat;
  if (s == "ctilde") return BaseCone::CTilde;
  if (s == "ctilde_s") return BaseCone::CTildeS;
  throw ParameterError("unknown cone '" + name + "' (expected chat, ctilde, ctilde_s)");
}

std::string ConeSpec::name() const {
  std::ostringstream os;
  os.precision(17);
  os << base_cone_name(base);
  if (base == BaseCone::CTildeS) os << "(s=" << s << ")";
  if (b) os << "[l_ab b=" << *b << "]";
  if (rho > 0.0) os << "{rho=" << rho << "}";
  return os.str();
}

CurvTensor tested_tensor(const ConeSpec& cone, const CurvTensor& r) {
  CurvTensor y = r;
  if (cone.rho > 0.0) y -= (cone.rho * scal(r)) * identity_tensor(r.dim());
  if (cone.b) y = l_ab_inverse(y, *cone.b);
  return y;
}

Frame4 Frame4::orthonormalize(const Eigen::MatrixXd& columns) {
  if (columns.cols() != 4) throw InputError("a four-frame has exactly four vectors");
  if (columns.rows() < 4) throw DimensionError("four-frames need n >= 4");
  return Frame4(frames::orthonormalize_columns(columns));
}

Frame4 Frame4::standard(int n) {
  if (n < 4) throw DimensionError("four-frames need n >= 4");
  return Frame4(Eigen::MatrixXd::Identity(n, 4));
}

Frame4 Frame4::checked(const Eigen::MatrixXd& columns) {
  if (columns.cols() != 4) throw InputError("a four-frame has exactly four vectors");
  if (columns.rows() < 4) throw DimensionError("four-frames need n >= 4");
  const Eigen::Matrix4d gram = columns.transpose() * columns;
  if ((gram - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw InputError("frame is not orthonormal to 1e-10");
  return Frame4(columns);
}

double frame_quantity(const CurvTensor& r, const Frame4& f, double lambda, double mu) {
  if (!(lambda >= 0.0 && lambda <= 1.0) || !(mu >= 0.0 && mu <= 1.0))
    throw ParameterError("lambda and mu must lie in [0,1]");
  if (f.dim() != r.dim()) throw DimensionError("frame and tensor dimensions differ");
  const frames::Objective obj(r, 0.0, false);
  return obj.value(f.vectors(), lambda, mu);
}

double cone_quantity(const ConeSpec& cone, const CurvTensor& r, const Frame4& f,
                     double lambda, double mu) {
  if (!(lambda >= 0.0 && lambda <= 1.0) || !(mu >= 0.0 && mu <= 1.0))
    throw ParameterError("lambda and mu must lie in [0,1]");
  if (f.dim() != r.dim()) throw DimensionError("frame and tensor dimensions differ");
  cone.validate(r.dim());
  return frames::Objective::for_cone(cone, r).value(f.vectors(), lambda, mu);
}

MembershipReport min_margin(const CurvTensor& r, const ConeSpec& cone,
                            const SearchOptions& opts) {
  const int n = r.dim();
  if (n < 4) throw DimensionError("four-frame cones need n >= 4");
  cone.validate(n);
  const CurvTensor y = tested_tensor(cone, r);
  const double scale = std::max(scal(y), y.norm());

  MembershipReport rep;
  rep.scale = scale;
  if (!(scale > 0.0)) {
    rep.argmin = {Frame4::standard(n), 0.0, cone.base == BaseCone::CTilde ? 1.0 : 0.0};
    rep.minima = {rep.argmin};
    return rep;
  }

  const frames::Objective obj(y, cone.base == BaseCone::CTildeS ? scal(y) / cone.s : 0.0,
                              cone.base == BaseCone::CTilde);

  struct Candidate {
    frames::LocalResult res;
    int index;
  };
  std::vector<Candidate> found;
  const int n_warm = static_cast<int>(opts.warm_starts.size());
  found.reserve(static_cast<std::size_t>(n_warm + std::max(opts.restarts, 0)));

  SearchOptions coarse = opts;
  coarse.grad_tol = std::max(opts.coarse_tol, opts.grad_tol);
  coarse.max_iter = std::min(opts.coarse_iter, opts.max_iter);

  for (int w = 0; w < n_warm; ++w) {
    const auto& ws = opts.warm_starts[static_cast<std::size_t>(w)];
    if (ws.frame.dim() != n) continue;
    found.push_back({frames::descend(obj, ws.frame.vectors(), ws.lambda, ws.mu, scale, coarse), w});
  }
  for (int k = 0; k < opts.restarts; ++k) {
    std::mt19937_64 rng(frames::mix_seed(opts.seed, static_cast<std::uint64_t>(k)));
    Eigen::MatrixXd x0 = frames::random_frame(n, rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double l0 = u(rng), m0 = u(rng);
    found.push_back({frames::descend(obj, std::move(x0), l0, m0, scale, coarse), n_warm + k});
  }
  if (found.empty()) {
    std::mt19937_64 rng(frames::mix_seed(opts.seed, 0));
    found.push_back({frames::descend(obj, frames::random_frame(n, rng), 0.5, 0.5, scale, coarse), 0});
  }

  auto by_value = [](const Candidate& a, const Candidate& b) {
    return a.res.value < b.res.value || (a.res.value == b.res.value && a.index < b.index);
  };
  std::stable_sort(found.begin(), found.end(), by_value);
  const auto n_polish = std::min<std::size_t>(found.size(), static_cast<std::size_t>(std::max(opts.polish, 1)));
  for (std::size_t i = 0; i < n_polish; ++i) {
    auto& c = found[i].res;
    const int before = c.iterations;
    c = frames::descend(obj, c.x, c.lambda, c.mu, scale, opts);
    c.iterations += before;
  }
  std::stable_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(n_polish), by_value);

  const auto& best = found.front().res;
  rep.min_value = best.value;
  rep.margin = best.value / scale;
  rep.argmin = {Frame4::checked(best.x), best.lambda, best.mu};
  rep.member = rep.margin >= -opts.tol;
  rep.restarts_used = static_cast<int>(found.size());
  rep.low_confidence = !best.converged;
  const auto keep = std::min<std::size_t>(found.size(), static_cast<std::size_t>(std::max(opts.keep_minima, 1)));
  for (std::size_t i = 0; i < keep; ++i)
    rep.minima.push_back({Frame4::checked(found[i].res.x), found[i].res.lambda, found[i].res.mu});
  return rep;
}

bool is_member(const CurvTensor& r, const ConeSpec& cone, double tol, const SearchOptions& opts) {
  return min_margin(r, cone, opts).margin >= -tol;
}

bool pinched_member(const CurvTensor& r, double rho, const ConeSpec& cone,
                    const SearchOptions& opts) {
  if (!(rho >= 0.0)) throw ParameterError("pinching constant rho must be >= 0");
  return min_margin(r, cone.shifted(rho), opts).member;
}

TangentReport tangent_cone_contains(const ConeSpec& cone, const CurvTensor& r_bd,
                                    const CurvTensor& b, const SearchOptions& search,
                                    const TangentOptions& topts) {
  return tangent_cone_contains(cone, r_bd, min_margin(r_bd, cone, search), b, search, topts);
}

TangentReport tangent_cone_contains(const ConeSpec& cone, const CurvTensor& r_bd,
                                    const MembershipReport& base, const CurvTensor& b,
                                    const SearchOptions& search, const TangentOptions& topts) {
  if (b.dim() != r_bd.dim()) throw DimensionError("direction and base point dimensions differ");
  if (base.margin < -search.tol)
    throw PreconditionError("tangent cone requested at a point outside the cone (margin " +
                            std::to_string(base.margin) + ")");
  TangentReport rep;
  rep.base_margin = base.margin;
  if (base.margin > topts.interior_margin || !(base.scale > 0.0)) {
    // Interior point (or the apex with an empty tested tensor): T_R C is
    // everything when R is interior.
    const bool interior = base.margin > topts.interior_margin;
    rep.contained = true;
    rep.interior = interior;
    rep.margins.fill(base.margin);
    rep.min_slope = interior ? std::numeric_limits<double>::infinity() : 0.0;
    if (!interior) {
      // Apex: B must itself lie in the cone.
      const auto m = min_margin(b, cone, search);
      rep.contained = m.member;
      rep.interior = m.margin > topts.interior_margin;
    }
    return rep;
  }

  const double bnorm = b.norm();
  if (!(bnorm > 0.0)) {
    rep.contained = true;
    rep.interior = false;
    rep.margins.fill(base.margin);
    return rep;
  }
  const CurvTensor dir = (r_bd.norm() / bnorm) * b;

  SearchOptions sopts = search;
  sopts.restarts = topts.perturbed_restarts;
  sopts.warm_starts = base.minima;
  rep.min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < topts.ladder.size(); ++k) {
    const double h = topts.ladder[k];
    sopts.seed = frames::mix_seed(search.seed, 1000 + k);
    const auto m = min_margin(r_bd + h * dir, cone, sopts);
    const double margin = m.min_value / base.scale;
    rep.margins[k] = margin;
    rep.penetration[k] = std::max(0.0, -margin) / h;
    rep.min_slope = std::min(rep.min_slope, margin / h);
    for (const auto& fc : m.minima) sopts.warm_starts.push_back(fc);
  }
  rep.interior = rep.min_slope >= topts.interior_slope;
  rep.contained =
      rep.interior ||
      rep.penetration.back() <= std::max(topts.decay * rep.penetration.front(), topts.penetration_tol);
  return rep;
}

}  // namespace curvlab
