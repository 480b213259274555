#include "curvlab/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "curvlab/cones.hpp"
#include "curvlab/constants.hpp"
#include "curvlab/dim3.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/frame_search.hpp"
#include "curvlab/harnack.hpp"
#include "curvlab/ode.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/report.hpp"
#include "curvlab/sampling.hpp"
#include "curvlab/star.hpp"

namespace curvlab {

namespace {

std::vector<ParamSpec> cone_params(const std::string& base) {
  return {{"cone", base, "base cone: chat, ctilde or ctilde_s"},
          {"s", "1", "interpolation parameter of ctilde_s"},
          {"b", "none", "l_{a,b} image parameter, or none"},
          {"rho", "0", "pinching shift: tests R - rho scal(R) I"}};
}

std::vector<ParamSpec> join(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<CommandSpec> build_specs() {
  std::vector<CommandSpec> v;
  v.push_back({"membership", "minimum margin of one tensor over a cone",
               "four-frame cone membership: minimum of the frame quantity over orthonormal "
               "four-frames and lambda, mu in [0,1]",
               join(cone_params("chat"),
                    {{"n", "4", "dimension"},
                     {"tensor", "identity",
                      "identity, sphere_product, negative_plane, gaussian or file"},
                     {"tensor_file", "", "curvtensor file for tensor = file"},
                     {"p", "2", "sphere_product: first factor dimension"},
                     {"q", "2", "sphere_product: second factor dimension"},
                     {"r1", "1", "sphere_product: first radius"},
                     {"r2", "1", "sphere_product: second radius"},
                     {"negative", "-1", "negative_plane: curvature of the e1^e2 plane"},
                     {"kappa", "0", "negative_plane: curvature of the other planes"},
                     {"restarts", "64", "random restarts of the frame search"},
                     {"tol", "1e-8", "membership tolerance on the normalized margin"}})});
  v.push_back({"invariance", "cone invariance along the Hamilton ODE",
               "invariance of the interpolating cones under the Hamilton ODE dR/dt = Q(R)",
               join(cone_params("ctilde_s"),
                    {{"n", "4", "dimension"},
                     {"samples", "200", "number of starting tensors"},
                     {"sampler", "boundary", "boundary or member"},
                     {"scal_growth", "8", "integrate until scal grows by this factor"},
                     {"horizon_factor", "10", "or until this multiple of 1/scal(R0)"},
                     {"checkpoints", "12", "margin checks per trajectory, geometric in scal"},
                     {"restarts", "64", "restarts for the starting tensor"},
                     {"tracking_restarts", "16", "restarts on top of warm starts along the flow"},
                     {"threshold", "-1e-6", "violation threshold on the normalized margin"},
                     {"csv_samples", "2", "trajectories exported as CSV"}})});
  const std::vector<ParamSpec> delta_params = {
      {"delta", "auto", "delta, or auto to estimate it from the sampled constants"},
      {"constants_samples", "64", "samples for the constants when delta = auto"},
      {"safety", "0.5", "factor applied to the sampled alpha0 when delta = auto"}};
  v.push_back({"pinching-family", "propagation of the family F(t) along the Hamilton ODE",
               "R(t) stays in F(t) = {R in C : R + (1 - t scal(R)) I in C} for t in [0, delta]",
               join(join(cone_params("chat"), delta_params),
                    {{"n", "4", "dimension"},
                     {"samples", "100", "number of starting tensors (members of C = F(0))"},
                     {"t0", "0", "start time"},
                     {"t1", "delta", "end time, or delta"},
                     {"scale_min", "0.2", "starting tensors are scaled so delta scal(R0) is"},
                     {"scale_max", "2", "uniform in [scale_min, scale_max]"},
                     {"restarts", "64", "restarts for the starting tensor"},
                     {"tracking_restarts", "16", "restarts on top of warm starts along the flow"},
                     {"threshold", "-1e-6", "violation threshold on the normalized margin"}})});
  v.push_back({"aux-lemma", "tangent-cone interior check at S = R + (1 - t scal) I",
               "Q(R) - scal(R) I - 2t |Ric(R)|^2 I lies in the interior of the tangent cone of C "
               "at R + (1 - t scal(R)) I",
               join(join(cone_params("chat"), delta_params),
                    {{"n", "4", "dimension"},
                     {"samples", "100", "samples per regime"},
                     {"regime", "both", "trivial (t scal < 1), scaled (t scal >= 1) or both"},
                     {"t", "delta", "time parameter in [0, delta], or delta"},
                     {"restarts", "64", "restarts of the frame search"},
                     {"perturbed_restarts", "8", "restarts per tangent-cone rung"}})});
  v.push_back({"constants", "sampled estimates of Lambda, alpha0 and delta",
               "sampled estimates of alpha0, Lambda and delta = min{1/(2n(n-1)), alpha0/2, "
               "alpha0^2/(4(1+2 Lambda^2))}",
               join(cone_params("chat"),
                    {{"n", "4", "dimension"},
                     {"samples", "64", "member and boundary samples"},
                     {"tol", "1e-3", "bisection tolerance for alpha0"},
                     {"alpha_grid", "17", "alpha grid points on [0, alpha0]"},
                     {"safety", "0.5", "factor on alpha0 for the delta used downstream"},
                     {"restarts", "64", "restarts of the frame search"},
                     {"doublings", "0", "also estimate with 2x, 4x, ... nested samples"}})});
  v.push_back({"dim3", "dimension-3 interior estimate along pinched ODE solutions",
               "dimension-3 estimate |Ric°|^2 <= (3/(2t))^sigma scal^(2-sigma), sigma = rho^2, "
               "for solutions with Ric >= rho scal, and the reaction inequality "
               "df/dt <= -(2/3) sigma f^(1+1/sigma)",
               {{"rho", "0.15", "pinching constant in (0, 1/3]"},
                {"count", "100", "number of pinched samples"},
                {"horizon", "10", "integration horizon"},
                {"tol", "1e-8", "tolerance of f <= barrier"},
                {"reaction_tol", "1e-6", "scale-free tolerance of the reaction inequality"},
                {"pinching_tol", "1e-8", "tolerance of min ric >= rho scal, relative to scal"},
                {"scal_growth", "1e8", "stop once scal grew by this factor"},
                {"log_scale", "2", "samples rescaled by exp(U[-log_scale, log_scale])"},
                {"csv_samples", "2", "trajectories exported as CSV"}}});
  v.push_back({"harnack", "Harnack gap and diameter bound on shrinking models",
               "Harnack gap inf scal(tau/2) >= exp(-diam(tau)^2/|tau|) sup scal(tau) and "
               "sup scal(tau) <= (n/|tau|) exp(diam(tau)^2/|tau|) on shrinking models",
               {{"model", "round_sphere", "round_sphere or sphere_product"},
                {"n", "4", "round_sphere dimension"},
                {"p", "2", "sphere_product first factor"},
                {"q", "2", "sphere_product second factor"},
                {"taus", "-1,-10,-100", "negative times"},
                {"ambient_n", "0", "n in the premise and bound; 0 uses the model dimension"}}});
  v.push_back({"sweep", "minimum margins over a cone family in s",
               "continuity in s of the family l_{a,b}(C(s)) on a fixed set of tensors",
               {{"base", "ctilde_s", "family base cone (ctilde_s varies with s)"},
                {"b", "0.02", "l_{a,b} image parameter, or none"},
                {"n", "4", "dimension"},
                {"tensors", "pinched", "pinched, identity or sphere_product"},
                {"count", "20", "number of pinched tensors"},
                {"pinch_rho", "0.05", "pinched tensors satisfy R - rho scal I in ctilde"},
                {"s_grid", "1,2,4,8", "increasing s values"},
                {"tol", "1e-8", "membership tolerance"},
                {"restarts", "64", "restarts of the frame search"}}});
  v.push_back({"star-check", "the structural conditions on a cone",
               "convexity, O(n) invariance, positive scal, interior identity and transversal "
               "invariance (Q(R) interior to the tangent cone at boundary points)",
               join(cone_params("chat"),
                    {{"n", "4", "dimension"},
                     {"pairs", "200", "member pairs for convexity"},
                     {"rotations", "100", "random rotations"},
                     {"boundary", "100", "boundary samples for transversal invariance"},
                     {"restarts", "64", "restarts of the frame search"}})});
  return v;
}

// Resolved parameters of one campaign: defaults overridden by the config.
class Params {
 public:
  Params(const CommandSpec& spec, const Config& cfg) {
    for (const auto& p : spec.params) values_[p.key] = p.default_value;
    for (const auto& [k, val] : cfg.values()) {
      if (k == "command" || k == "seed") continue;
      if (!values_.count(k))
        throw ConfigError("unknown key '" + k + "' for command " + spec.name);
      values_[k] = val;
    }
  }

  const std::string& str(const std::string& key) const { return values_.at(key); }

  double real(const std::string& key) const { return to_real(key, str(key)); }

  int integer(const std::string& key) const {
    const std::string& v = str(key);
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(v, &pos);
      if (pos != v.size() || x < std::numeric_limits<int>::min() ||
          x > std::numeric_limits<int>::max())
        throw std::invalid_argument("trailing");
      return static_cast<int>(x);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
    }
  }

  int positive(const std::string& key) const {
    const int v = integer(key);
    if (v <= 0) throw ConfigError("key '" + key + "' must be positive");
    return v;
  }

  int nonnegative(const std::string& key) const {
    const int v = integer(key);
    if (v < 0) throw ConfigError("key '" + key + "' must be nonnegative");
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream is(str(key));
    std::string tok;
    while (std::getline(is, tok, ',')) {
      tok.erase(0, tok.find_first_not_of(' '));
      tok.erase(tok.find_last_not_of(' ') + 1);
      out.push_back(to_real(key, tok));
    }
    if (out.empty()) throw ConfigError("key '" + key + "' expects a comma-separated list");
    return out;
  }

  const std::map<std::string, std::string>& all() const { return values_; }

 private:
  static double to_real(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument("bad");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' expects a finite number, got '" + v + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

ConeSpec cone_from(const Params& p, int n, const std::string& base_key = "cone") {
  ConeSpec c;
  try {
    c.base = parse_base_cone(p.str(base_key));
  } catch (const Error&) {
    throw ConfigError("key '" + base_key + "': unknown cone '" + p.str(base_key) + "'");
  }
  if (c.base == BaseCone::CTildeS) c.s = p.all().count("s") ? p.real("s") : 1.0;
  if (p.str("b") != "none") c.b = p.real("b");
  if (p.all().count("rho")) c.rho = p.real("rho");
  try {
    c.validate(n);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("cone parameters: ") + e.what());
  }
  return c;
}

int dimension(const Params& p, int min_n) {
  const int n = p.integer("n");
  if (n < min_n || n > 12)
    throw ConfigError("key 'n' must lie in [" + std::to_string(min_n) + ", 12]");
  return n;
}

SearchOptions search_from(const Params& p, std::uint64_t seed) {
  SearchOptions s;
  s.restarts = p.positive("restarts");
  s.seed = seed;
  return s;
}

std::string status(bool ok) { return ok ? "pass" : "fail"; }

struct Ctx {
  const CommandSpec& spec;
  const Params& p;
  std::uint64_t seed;
  std::ostringstream report;
  CampaignOutput out;

  void emit(const Record& r) { report << r.str() << '\n'; }
};

// ---------------------------------------------------------------- membership

CurvTensor fixture_tensor(const Params& p, int n, std::uint64_t seed, const std::string& base_dir) {
  const std::string& kind = p.str("tensor");
  if (kind == "identity") return identity_tensor(n);
  if (kind == "sphere_product") {
    const int pp = p.integer("p"), qq = p.integer("q");
    if (pp + qq != n) throw ConfigError("keys 'p' and 'q' must add up to n");
    try {
      return sphere_product_tensor(pp, qq, p.real("r1"), p.real("r2"));
    } catch (const Error& e) {
      throw ConfigError(std::string("sphere_product: ") + e.what());
    }
  }
  if (kind == "negative_plane") return negative_plane_tensor(n, p.real("negative"), p.real("kappa"));
  if (kind == "gaussian") {
    std::mt19937_64 rng(frames::mix_seed(seed, 99));
    return gaussian_tensor(n, rng);
  }
  if (kind == "file") {
    const std::string& f = p.str("tensor_file");
    if (f.empty()) throw ConfigError("key 'tensor_file' is required when tensor = file");
    const std::filesystem::path path =
        std::filesystem::path(f).is_absolute() ? std::filesystem::path(f)
                                               : std::filesystem::path(base_dir) / f;
    std::ifstream is(path);
    if (!is) throw ConfigError("key 'tensor_file': cannot open '" + path.string() + "'");
    CurvTensor r = read_tensor(is);
    if (r.dim() != n) throw ConfigError("key 'tensor_file': tensor dimension differs from n");
    return r;
  }
  throw ConfigError("key 'tensor': unknown fixture '" + kind + "'");
}

void run_membership(Ctx& c, const std::string& base_dir) {
  const int n = dimension(c.p, 4);
  const ConeSpec cone = cone_from(c.p, n);
  const CurvTensor r = fixture_tensor(c.p, n, c.seed, base_dir);
  SearchOptions s = search_from(c.p, c.seed);
  s.tol = c.p.real("tol");
  const MembershipReport m = min_margin(r, cone, s);
  c.emit(Record("membership")
             .add("cone", cone.name())
             .add("n", n)
             .add("tensor", c.p.str("tensor"))
             .add("margin", m.margin)
             .add("min_value", m.min_value)
             .add("scale", m.scale)
             .add("member", m.member)
             .add("restarts_used", m.restarts_used)
             .add("low_confidence", m.low_confidence)
             .add("lambda", m.argmin.lambda)
             .add("mu", m.argmin.mu)
             .add("frame", serialize_frame(m.argmin.frame))
             .add("seed", c.seed));
  if (!m.member) {
    c.emit(Record("counterexample")
               .add("value", cone_quantity(cone, r, m.argmin.frame, m.argmin.lambda, m.argmin.mu))
               .add("lambda", m.argmin.lambda)
               .add("mu", m.argmin.mu)
               .add("frame", serialize_frame(m.argmin.frame)));
  }
  c.emit(Record("summary").add("status", status(m.member)).add("margin", m.margin));
  c.out.exit_code = m.member ? 0 : 2;
}

// ---------------------------------------------------------------- invariance

void emit_invariance(Ctx& c, const InvarianceReport& rep, bool ok, const std::string& extra_key = "",
                     double extra = 0.0) {
  for (const auto& v : rep.violations)
    c.emit(Record("violation").add("sample", v.sample).add("t", v.t).add("margin", v.margin).add("kind", v.what));
  for (const auto& note : rep.notes) c.emit(Record("note").add("text", note));
  Record s("summary");
  s.add("status", status(ok))
      .add("samples_run", rep.samples_run)
      .add("skipped", rep.skipped)
      .add("failures", rep.failures)
      .add("violations", static_cast<int>(rep.violations.size()))
      .add("worst_margin", rep.worst_margin);
  if (!extra_key.empty()) s.add(extra_key, extra);
  c.emit(s);
}

// Margins at every accepted step, for CSV export.
std::vector<double> step_margins(const ConeSpec& cone, const Trajectory& traj,
                                 const SearchOptions& search, int tracking_restarts) {
  std::vector<double> out;
  SearchOptions s = search;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    s.seed = frames::mix_seed(search.seed, k);
    const auto m = min_margin(traj.samples[k].r, cone, s);
    out.push_back(m.margin);
    s.warm_starts = m.minima;
    s.restarts = tracking_restarts;
  }
  return out;
}

void run_invariance(Ctx& c) {
  const int n = dimension(c.p, 4);
  const ConeSpec cone = cone_from(c.p, n);
  const int count = c.p.positive("samples");
  const std::string sampler = c.p.str("sampler");
  if (sampler != "boundary" && sampler != "member")
    throw ConfigError("key 'sampler' must be boundary or member");
  InvarianceOptions opts;
  opts.scal_growth = c.p.real("scal_growth");
  opts.horizon_factor = c.p.real("horizon_factor");
  opts.checkpoints = c.p.positive("checkpoints");
  opts.violation_threshold = c.p.real("threshold");
  opts.tracking_restarts = c.p.nonnegative("tracking_restarts");
  opts.search = search_from(c.p, frames::mix_seed(c.seed, 1));
  if (!(opts.scal_growth > 1.0)) throw ConfigError("key 'scal_growth' must exceed 1");

  std::vector<CurvTensor> samples(static_cast<std::size_t>(count));
  parallel_for(samples.size(), [&](std::size_t i) {
    const std::uint64_t s = frames::mix_seed(c.seed, 1000 + i);
    samples[i] = sampler == "boundary" ? sample_boundary(cone, n, s).tensor : sample_member(cone, n, s);
  });
  const InvarianceReport rep = verify_invariance(cone, samples, opts);

  const int csv = std::min(c.p.nonnegative("csv_samples"), count);
  for (int k = 0; k < csv; ++k) {
    const CurvTensor& r0 = samples[static_cast<std::size_t>(k)];
    const double s0 = scal(r0);
    const Trajectory traj = integrate(r0, opts.horizon_factor / s0, s0 * opts.scal_growth);
    SearchOptions s = opts.search;
    s.seed = frames::mix_seed(opts.search.seed, 7000 + k);
    c.out.files.push_back({"invariance_sample" + std::to_string(k) + ".csv",
                           trajectory_csv(traj, step_margins(cone, traj, s, opts.tracking_restarts))});
  }
  c.emit(Record("campaign_detail").add("cone", cone.name()).add("n", n).add("sampler", sampler));
  const bool ok = rep.passed() && rep.skipped == 0;
  emit_invariance(c, rep, ok);
  c.out.exit_code = ok ? 0 : 2;
}

// ------------------------------------------------------------ delta handling

struct DeltaChoice {
  double delta = 0.0;
  bool estimated = false;
};

DeltaChoice resolve_delta(Ctx& c, const ConeSpec& cone, int n) {
  DeltaChoice d;
  if (c.p.str("delta") != "auto") {
    d.delta = c.p.real("delta");
    if (!(d.delta > 0.0)) throw ConfigError("key 'delta' must be positive");
    return d;
  }
  const double safety = c.p.real("safety");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("key 'safety' must lie in (0, 1]");
  Alpha0Options aopts;
  aopts.search.restarts = c.p.positive("restarts");
  const ConstantsReport k =
      estimate_constants(cone, n, c.p.positive("constants_samples"), frames::mix_seed(c.seed, 2),
                         aopts, safety);
  c.emit(Record("constants")
             .add("samples", k.samples)
             .add("lambda_hat", k.lambda_hat)
             .add("alpha0_hat", k.alpha0_hat)
             .add("delta_hat", k.delta_hat)
             .add("safety", k.safety)
             .add("delta_used", k.delta_used));
  d.delta = k.delta_used;
  d.estimated = true;
  return d;
}

double time_param(const Params& p, const std::string& key, double delta) {
  if (p.str(key) == "delta") return delta;
  return p.real(key);
}

// ----------------------------------------------------------- pinching family

void run_pinching_family(Ctx& c) {
  const int n = dimension(c.p, 4);
  const ConeSpec cone = cone_from(c.p, n);
  const DeltaChoice d = resolve_delta(c, cone, n);
  const double t0 = time_param(c.p, "t0", d.delta);
  const double t1 = time_param(c.p, "t1", d.delta);
  const double lo = c.p.real("scale_min"), hi = c.p.real("scale_max");
  if (!(lo > 0.0 && hi >= lo)) throw ConfigError("keys 'scale_min'/'scale_max' need 0 < min <= max");
  const int count = c.p.positive("samples");

  std::vector<CurvTensor> samples = member_samples(cone, n, count, frames::mix_seed(c.seed, 3));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::mt19937_64 rng(frames::mix_seed(c.seed, 4000 + i));
    std::uniform_real_distribution<double> u(lo, hi);
    samples[i] = (u(rng) / d.delta) * samples[i];
  }
  InvarianceOptions opts;
  opts.violation_threshold = c.p.real("threshold");
  opts.tracking_restarts = c.p.nonnegative("tracking_restarts");
  opts.search = search_from(c.p, frames::mix_seed(c.seed, 5));
  InvarianceReport rep;
  try {
    rep = verify_pinching_family(cone, d.delta, samples, t0, t1, opts);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("keys 't0'/'t1': ") + e.what());
  }
  c.emit(Record("campaign_detail")
             .add("cone", cone.name())
             .add("n", n)
             .add("delta", d.delta)
             .add("t0", t0)
             .add("t1", t1));
  const bool ok = rep.passed() && rep.skipped == 0;
  emit_invariance(c, rep, ok);
  c.out.exit_code = ok ? 0 : 2;
}

// ----------------------------------------------------------------- aux lemma

void run_aux_lemma(Ctx& c) {
  const int n = dimension(c.p, 4);
  const ConeSpec cone = cone_from(c.p, n);
  const DeltaChoice d = resolve_delta(c, cone, n);
  const double t = time_param(c.p, "t", d.delta);
  if (!(t > 0.0) || t > d.delta) throw ConfigError("key 't' must lie in (0, delta]");
  const std::string regime = c.p.str("regime");
  if (regime != "both" && regime != "trivial" && regime != "scaled")
    throw ConfigError("key 'regime' must be trivial, scaled or both");
  const int count = c.p.positive("samples");
  SearchOptions search = search_from(c.p, frames::mix_seed(c.seed, 6));
  TangentOptions topts;
  topts.perturbed_restarts = c.p.positive("perturbed_restarts");

  bool ok = true;
  for (const auto& [name, reg] : {std::pair{std::string("trivial"), FamilyRegime::Trivial},
                                  std::pair{std::string("scaled"), FamilyRegime::Scaled}}) {
    if (regime != "both" && regime != name) continue;
    const std::uint64_t s = frames::mix_seed(c.seed, reg == FamilyRegime::Trivial ? 7 : 8);
    const auto samples = family_samples(cone, n, t, count, s, reg);
    const AuxLemmaReport rep = verify_aux_lemma(cone, d.delta, samples, t, search, topts);
    double min_slope = std::numeric_limits<double>::infinity();
    double min_tscal = std::numeric_limits<double>::infinity(), max_tscal = 0.0;
    for (const auto& e : rep.entries) {
      min_tscal = std::min(min_tscal, e.t_scal);
      max_tscal = std::max(max_tscal, e.t_scal);
      if (!e.trivial && !e.skipped) min_slope = std::min(min_slope, e.tangent.min_slope);
      if (!e.passed)
        c.emit(Record("failure")
                   .add("regime", name)
                   .add("sample", e.sample)
                   .add("skipped", e.skipped)
                   .add("t_scal", e.t_scal)
                   .add("s_margin", e.s_margin)
                   .add("min_slope", e.tangent.min_slope));
    }
    c.emit(Record("regime")
               .add("name", name)
               .add("samples", static_cast<int>(rep.entries.size()))
               .add("passed", rep.passed)
               .add("failed", rep.failed)
               .add("skipped", rep.skipped)
               .add("t_scal_min", min_tscal)
               .add("t_scal_max", max_tscal)
               .add("min_slope", min_slope));
    ok = ok && rep.all_passed();
  }
  c.emit(Record("summary").add("status", status(ok)).add("delta", d.delta).add("t", t));
  c.out.exit_code = ok ? 0 : 2;
}

// ----------------------------------------------------------------- constants

void run_constants(Ctx& c) {
  const int n = dimension(c.p, 4);
  const ConeSpec cone = cone_from(c.p, n);
  Alpha0Options aopts;
  aopts.tol = c.p.real("tol");
  if (!(aopts.tol > 0.0 && aopts.tol < 1.0)) throw ConfigError("key 'tol' must lie in (0, 1)");
  aopts.alpha_grid = c.p.positive("alpha_grid");
  aopts.search.restarts = c.p.positive("restarts");
  const double safety = c.p.real("safety");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("key 'safety' must lie in (0, 1]");
  const int base = c.p.positive("samples");
  const int doublings = c.p.nonnegative("doublings");
  if (doublings > 6) throw ConfigError("key 'doublings' must be at most 6");

  bool ok = true;
  double prev_lambda = -1.0, prev_alpha = 2.0;
  bool mono_lambda = true, mono_alpha = true;
  for (int level = 0; level <= doublings; ++level) {
    const int samples = base << level;
    ConstantsReport k;
    try {
      k = estimate_constants(cone, n, samples, c.seed, aopts, safety);
    } catch (const EstimationError& e) {
      c.emit(Record("estimation_failure").add("samples", samples).add("reason", e.what()));
      ok = false;
      break;
    }
    const double identity =
        std::min({1.0 / (2.0 * n * (n - 1.0)), k.alpha0_hat / 2.0,
                  k.alpha0_hat * k.alpha0_hat / (4.0 * (1.0 + 2.0 * k.lambda_hat * k.lambda_hat))});
    const bool delta_identity = identity == k.delta_hat && k.delta_hat <= 1.0 / (2.0 * n * (n - 1.0));
    mono_lambda = mono_lambda && k.lambda_hat >= prev_lambda;
    mono_alpha = mono_alpha && k.alpha0_hat <= prev_alpha;
    prev_lambda = k.lambda_hat;
    prev_alpha = k.alpha0_hat;
    c.emit(Record("constants")
               .add("level", level)
               .add("samples", samples)
               .add("lambda_hat", k.lambda_hat)
               .add("alpha0_hat", k.alpha0_hat)
               .add("delta_hat", k.delta_hat)
               .add("safety", k.safety)
               .add("delta_used", k.delta_used)
               .add("delta_identity", delta_identity)
               .add("scal_positive", k.lambda.scal_positive)
               .add("min_scal", k.lambda.min_scal)
               .add("alpha0_candidates", k.alpha0.candidates_tested)
               .add("binding_sample", k.alpha0.binding_sample)
               .add("seed", c.seed));
    ok = ok && delta_identity && k.lambda.scal_positive;
  }
  ok = ok && mono_lambda && mono_alpha;
  c.emit(Record("summary")
             .add("status", status(ok))
             .add("lambda_monotone", mono_lambda)
             .add("alpha0_monotone", mono_alpha));
  c.out.exit_code = ok ? 0 : 2;
}

// ---------------------------------------------------------------------- dim3

void run_dim3(Ctx& c) {
  const double rho = c.p.real("rho");
  if (!(rho > 0.0) || rho > 1.0 / 3.0) throw ConfigError("key 'rho' must lie in (0, 1/3]");
  const double sigma = rho * rho;
  const int count = c.p.positive("count");
  dim3::EstimateOptions eopts;
  eopts.horizon = c.p.real("horizon");
  eopts.tol = c.p.real("tol");
  eopts.scal_growth = c.p.real("scal_growth");
  if (!(eopts.horizon > 0.0)) throw ConfigError("key 'horizon' must be positive");
  const auto samples = dim3::pinched_samples(rho, count, c.seed, c.p.real("log_scale"));

  const double residual = dim3::barrier_self_test(sigma);
  const auto reaction = dim3::verify_reaction_inequality(rho, samples, c.p.real("reaction_tol"));
  const auto estimate = dim3::verify_dim3_estimate(rho, samples, eopts);
  dim3::EstimateOptions popts = eopts;
  popts.tol = c.p.real("pinching_tol");
  const auto pinching = dim3::verify_pinching_preserved(rho, samples, popts);

  double worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& e : reaction.entries)
    if (!e.rejected) {
      const double scale = e.scal * (e.f + 1e-4 * std::pow(e.scal, sigma));
      worst_slack = std::min(worst_slack, e.slack / scale);
      if (e.slack < 0.0)
        c.emit(Record("reaction_violation").add("sample", e.sample).add("f", e.f).add("dfdt", e.dfdt).add("rhs", e.rhs));
    }
  double worst_gap = -std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  double min_pinch = std::numeric_limits<double>::infinity();
  for (const auto& e : estimate.entries) {
    if (e.rejected) continue;
    worst_gap = std::max(worst_gap, e.worst_gap);
    max_ratio = std::max(max_ratio, e.max_ratio);
    if (e.violated) c.emit(Record("estimate_violation").add("sample", e.sample).add("gap", e.worst_gap));
  }
  for (const auto& e : pinching.entries) {
    if (e.rejected) continue;
    min_pinch = std::min(min_pinch, e.min_pinching);
    if (e.violated)
      c.emit(Record("pinching_violation").add("sample", e.sample).add("min_pinching", e.min_pinching));
  }
  const int csv = std::min(c.p.nonnegative("csv_samples"), count);
  for (int k = 0; k < csv; ++k)
    c.out.files.push_back({"dim3_sample" + std::to_string(k) + ".csv",
                           dim3::trajectory_csv(estimate.entries[static_cast<std::size_t>(k)])});

  const bool self_ok = residual <= 1e-10;
  c.emit(Record("barrier_self_test").add("sigma", sigma).add("residual", residual).add("passed", self_ok));
  c.emit(Record("reaction")
             .add("samples", count)
             .add("violations", reaction.violations)
             .add("rejected", reaction.rejected)
             .add("worst_relative_slack", worst_slack));
  c.emit(Record("estimate")
             .add("violations", estimate.violations)
             .add("rejected", estimate.rejected)
             .add("worst_gap", worst_gap)
             .add("max_ratio", max_ratio));
  c.emit(Record("pinching")
             .add("violations", pinching.violations)
             .add("min_pinching", min_pinch)
             .add("degenerate", pinching.degenerate));
  // f <= barrier with ratio below one means no forward run gains f beyond
  // what a time-translated ancient solution could carry: f -> 0 as the
  // available past grows.
  c.emit(Record("ancient_absence").add("max_ratio", max_ratio).add("consistent", max_ratio <= 1.0));
  const bool ok = self_ok && reaction.passed() && estimate.passed() && pinching.passed();
  c.emit(Record("summary").add("status", status(ok)).add("rho", rho).add("sigma", sigma));
  c.out.exit_code = ok ? 0 : 2;
}

// ------------------------------------------------------------------- harnack

void run_harnack(Ctx& c) {
  const std::string model = c.p.str("model");
  harnack::ModelFlow flow = harnack::ModelFlow::round_sphere(2);
  try {
    if (model == "round_sphere")
      flow = harnack::ModelFlow::round_sphere(c.p.integer("n"));
    else if (model == "sphere_product")
      flow = harnack::ModelFlow::sphere_product(c.p.integer("p"), c.p.integer("q"));
    else
      throw ConfigError("key 'model' must be round_sphere or sphere_product");
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("model parameters: ") + e.what());
  }
  const std::vector<double> taus = c.p.list("taus");
  for (double t : taus)
    if (!(t < 0.0)) throw ConfigError("key 'taus' must contain negative times only");
  const int ambient = c.p.nonnegative("ambient_n");
  const int n = ambient > 0 ? ambient : flow.dim();

  std::vector<harnack::HarnackGap> gaps;
  bool gap_ok = true;
  double min_slack = std::numeric_limits<double>::infinity();
  for (double t : taus) {
    const auto g = harnack::check_harnack_gap(flow, t);
    gaps.push_back(g);
    gap_ok = gap_ok && g.passed;
    min_slack = std::min(min_slack, g.slack_factor);
    c.emit(Record("harnack")
               .add("tau", t)
               .add("lhs", g.lhs)
               .add("rhs", g.rhs)
               .add("log_slack_factor", std::log(g.slack_factor))
               .add("passed", g.passed));
  }
  const auto d = harnack::check_diameter_bound(flow, taus, n);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, eq = 0.0;
  for (const auto& e : d.entries) {
    lo = std::min(lo, e.tau_scal);
    hi = std::max(hi, e.tau_scal);
    eq = std::max(eq, std::abs(e.inf_half - e.premise) / e.premise);
    c.emit(Record("diameter")
               .add("tau", e.tau)
               .add("inf_scal_half", e.inf_half)
               .add("premise", e.premise)
               .add("sup_scal", e.sup_scal)
               .add("log_bound", std::log(e.bound))
               .add("tau_scal", e.tau_scal)
               .add("premise_holds", e.premise_holds)
               .add("bound_holds", e.bound_holds));
  }
  c.out.files.push_back({"harnack.csv", harnack::harnack_csv(gaps)});
  const bool ok = gap_ok && d.passed();
  c.emit(Record("summary")
             .add("status", status(ok))
             .add("model", flow.name())
             .add("n", n)
             .add("log_min_slack_factor", std::log(min_slack))
             .add("premise_equality_error", eq)
             .add("tau_scal_spread", (hi - lo) / hi)
             .add("premise", d.premise)
             .add("bound", d.bound)
             .add("bounded", d.bounded));
  c.out.exit_code = ok ? 0 : 2;
}

// --------------------------------------------------------------------- sweep

void run_sweep(Ctx& c) {
  const int n = dimension(c.p, 4);
  const std::vector<double> grid = c.p.list("s_grid");
  ConeSpec proto = cone_from(c.p, n, "base");
  const std::string kind = c.p.str("tensors");
  std::vector<CurvTensor> tensors;
  if (kind == "identity") {
    tensors.push_back(identity_tensor(n));
  } else if (kind == "sphere_product") {
    if (n != 4) throw ConfigError("tensors = sphere_product needs n = 4");
    tensors.push_back(sphere_product_tensor(2, 2, 1.0, 1.0));
  } else if (kind == "pinched") {
    const double rho = c.p.real("pinch_rho");
    if (!(rho > 0.0)) throw ConfigError("key 'pinch_rho' must be positive");
    tensors = member_samples(ConeSpec::ctilde().shifted(rho), n, c.p.positive("count"), c.seed);
  } else {
    throw ConfigError("key 'tensors' must be pinched, identity or sphere_product");
  }
  auto family = [&](double s) {
    ConeSpec cs = proto;
    if (cs.base == BaseCone::CTildeS) cs.s = s;
    return cs;
  };
  for (double s : grid)
    if (!(s > 0.0)) throw ConfigError("key 's_grid' must contain positive values");
  SweepReport rep;
  try {
    rep = continuity_sweep(family, tensors, grid, c.p.real("tol"), search_from(c.p, frames::mix_seed(c.seed, 9)));
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("key 's_grid': ") + e.what());
  }
  for (const auto& e : rep.entries)
    c.emit(Record("sweep")
               .add("s", e.s)
               .add("cone", family(e.s).name())
               .add("min_margin", e.min_margin)
               .add("worst_tensor", e.worst_tensor)
               .add("all_member", e.all_member));
  const bool ok = !rep.first_failing.has_value();
  Record s("summary");
  s.add("status", status(ok)).add("tensors", kind).add("count", static_cast<int>(tensors.size()));
  s.add("largest_passing", rep.largest_passing ? format_double(*rep.largest_passing) : "none");
  s.add("first_failing", rep.first_failing ? format_double(*rep.first_failing) : "none");
  c.emit(s);
  c.out.exit_code = ok ? 0 : 2;
}

// ---------------------------------------------------------------- star-check

void run_star(Ctx& c) {
  const int n = dimension(c.p, 4);
  const ConeSpec cone = cone_from(c.p, n);
  StarOptions o;
  o.pairs = c.p.positive("pairs");
  o.rotations = c.p.positive("rotations");
  o.boundary = c.p.positive("boundary");
  o.seed = c.seed;
  o.search = search_from(c.p, c.seed);
  const StarReport rep = star_property_check(cone, n, o);
  for (const auto& ch : rep.checks) {
    Record r("check");
    r.add("name", ch.name).add("ran", ch.ran).add("passed", ch.passed).add("tested", ch.tested);
    r.add("failures", ch.failures).add("value", ch.value);
    if (!ch.note.empty()) r.add("note", ch.note);
    c.emit(r);
  }
  c.emit(Record("summary").add("status", status(rep.passed())).add("cone", rep.cone).add("n", n));
  c.out.exit_code = rep.passed() ? 0 : 2;
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = build_specs();
  return specs;
}

const CommandSpec& command_spec(const std::string& name) {
  for (const auto& s : command_specs())
    if (s.name == name) return s;
  throw ConfigError("unknown command '" + name + "'");
}

std::string describe(const std::string& command) {
  const CommandSpec& s = command_spec(command);
  std::ostringstream os;
  os << s.name << ": " << s.summary << "\n";
  os << "checks: " << s.claim << "\n";
  os << "parameters (key = default):\n";
  std::size_t width = 0;
  for (const auto& p : s.params) width = std::max(width, p.key.size() + p.default_value.size() + 3);
  for (const auto& p : s.params) {
    std::string head = p.key + " = " + p.default_value;
    head.resize(std::max(width, head.size()), ' ');
    os << "  " << head << "  " << p.help << "\n";
  }
  os << "  seed = 1" << std::string(width > 8 ? width - 8 : 0, ' ') << "  campaign seed (--seed overrides)\n";
  return os.str();
}

Config Config::parse(std::string_view text) {
  Config cfg;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key)) throw ConfigError("duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return parse(os.str());
}

CampaignOutput run_campaign(const Campaign& campaign) {
  const CommandSpec& spec = command_spec(campaign.command);
  if (campaign.params.has("command") && campaign.params.get("command") != campaign.command)
    throw ConfigError("key 'command' says '" + campaign.params.get("command") + "' but '" +
                      campaign.command + "' was requested");
  const Params params(spec, campaign.params);

  std::string canonical = "command=" + campaign.command + "\nseed=" + std::to_string(campaign.seed) + "\n";
  for (const auto& [k, v] : params.all()) canonical += k + "=" + v + "\n";

  Ctx c{spec, params, campaign.seed, {}, {}};
  c.emit(Record("campaign")
             .add("tool", kToolName)
             .add("version", kToolVersion)
             .add("command", campaign.command)
             .add("seed", campaign.seed)
             .add("campaign_hash", hex64(fnv1a(canonical)))
             .add("claim", spec.claim));
  Record pr("params");
  for (const auto& [k, v] : params.all()) pr.add(k, v);
  c.emit(pr);

  const std::string& cmd = campaign.command;
  if (cmd == "membership")
    run_membership(c, campaign.base_dir);
  else if (cmd == "invariance")
    run_invariance(c);
  else if (cmd == "pinching-family")
    run_pinching_family(c);
  else if (cmd == "aux-lemma")
    run_aux_lemma(c);
  else if (cmd == "constants")
    run_constants(c);
  else if (cmd == "dim3")
    run_dim3(c);
  else if (cmd == "harnack")
    run_harnack(c);
  else if (cmd == "sweep")
    run_sweep(c);
  else if (cmd == "star-check")
    run_star(c);

  c.out.report = c.report.str();
  return std::move(c.out);
}

void write_outputs(const CampaignOutput& out, const std::string& dir, const std::string& command) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream os(root / name, std::ios::binary);
    if (!os) throw Error("cannot write '" + (root / name).string() + "'");
    os << content;
  };
  put(command + ".report", out.report);
  for (const auto& [name, content] : out.files) put(name, content);
}

}  // namespace curvlab
