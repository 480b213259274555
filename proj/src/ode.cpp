#include "curvlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvlab/frame_search.hpp"
#include "curvlab/parallel.hpp"

namespace curvlab {
namespace {

CurvTensor rk4_step(const CurvTensor& y, double h, const CurvTensor& k1) {
  const CurvTensor k2 = q_quadratic(y + (0.5 * h) * k1);
  const CurvTensor k3 = q_quadratic(y + (0.5 * h) * k2);
  const CurvTensor k4 = q_quadratic(y + h * k3);
  CurvTensor out = y;
  out += (h / 6.0) * k1;
  out += (h / 3.0) * k2;
  out += (h / 3.0) * k3;
  out += (h / 6.0) * k4;
  return out;
}

struct DoubledStep {
  CurvTensor y;
  double err = 0.0;
};

// One step of size h against two of size h/2; the difference estimates the
// local error of the finer solution (Richardson, order 4).
DoubledStep doubled_step(const CurvTensor& y, double h, const CurvTensor& k1) {
  const CurvTensor full = rk4_step(y, h, k1);
  const CurvTensor half = rk4_step(y, 0.5 * h, k1);
  const CurvTensor fine = rk4_step(half, 0.5 * h, q_quadratic(half));
  return {CurvTensor::from_operator(fine.dim(), fine.op()), (fine - full).norm() / 15.0};
}

}  // namespace

std::string terminal_name(Terminal t) {
  switch (t) {
    case Terminal::Horizon:
      return "horizon";
    case Terminal::ScalCap:
      return "scal_cap";
    case Terminal::StepUnderflow:
      return "step_underflow";
  }
  return "?";
}

Trajectory integrate(const CurvTensor& r0, double horizon, double scal_cap,
                     const IntegrateOptions& opts) {
  if (!(horizon > 0.0)) throw ParameterError("integration horizon must be positive");
  if (!(opts.tol > 0.0)) throw ParameterError("integration tolerance must be positive");
  Trajectory traj;
  CurvTensor y = r0;
  double t = opts.t0;
  const double t_end = opts.t0 + horizon;
  traj.samples.push_back({t, y});
  if (scal(y) >= scal_cap) {
    traj.terminal = Terminal::ScalCap;
    return traj;
  }

  double h = horizon;
  double err_prev = 1.0;
  while (t < t_end) {
    const double nrm = y.norm();
    const double hmax = nrm > 0.0 ? opts.step_factor / nrm : std::numeric_limits<double>::infinity();
    h = std::min({h, hmax, t_end - t});
    const double floor = 1e-14 * std::max(std::abs(t), nrm > 0.0 ? 1.0 / nrm : horizon);
    if (h < floor) {
      if (traj.accepted == 0) throw IntegrationError("step size underflow before any progress");
      traj.terminal = Terminal::StepUnderflow;
      return traj;
    }

    const CurvTensor k1 = q_quadratic(y);
    DoubledStep st = doubled_step(y, h, k1);
    const double errn = st.err / (opts.tol * std::max(nrm, 1e-300));
    if (!(errn <= 1.0) && nrm > 0.0) {
      ++traj.rejected;
      h *= std::isfinite(errn) ? std::max(0.2, 0.9 * std::pow(errn, -0.2)) : 0.2;
      continue;
    }

    bool capped = false;
    if (scal(st.y) > scal_cap) {
      // Shorten the step so that it lands on the cap; scal is increasing in h.
      double lo = 0.0, hi = h;
      DoubledStep best = st;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        DoubledStep trial = doubled_step(y, mid, k1);
        const double s = scal(trial.y);
        if (s > scal_cap) {
          hi = mid;
          best = std::move(trial);
        } else {
          lo = mid;
          if (scal_cap - s <= 1e-12 * scal_cap) {
            best = std::move(trial);
            hi = mid;
            break;
          }
        }
        if (hi - lo <= 1e-15 * std::max(std::abs(t), hi)) break;
      }
      st = std::move(best);
      h = hi;
      capped = true;
    }

    t = capped ? t + h : (t_end - t <= h ? t_end : t + h);
    y = std::move(st.y);
    traj.samples.push_back({t, y});
    ++traj.accepted;
    if (capped) {
      traj.terminal = Terminal::ScalCap;
      return traj;
    }

    const double e = std::max(errn, 1e-10);
    double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
    fac = std::clamp(fac, 0.2, 5.0);
    err_prev = e;
    h *= fac;
  }
  traj.terminal = Terminal::Horizon;
  return traj;
}

CurvTensor flow(const CurvTensor& r, double dt, int substeps) {
  if (substeps < 1) throw ParameterError("flow needs at least one substep");
  CurvTensor y = r;
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) y = rk4_step(y, h, q_quadratic(y));
  return y;
}

std::vector<std::size_t> scal_checkpoints(const Trajectory& traj, double growth, int count) {
  std::vector<std::size_t> idx;
  const std::size_t last = traj.samples.size() - 1;
  const double s0 = scal(traj.samples.front().r);
  if (s0 > 0.0 && growth > 1.0 && count > 0) {
    std::size_t cur = 0;
    for (int k = 0; k <= count; ++k) {
      const double level = s0 * std::pow(growth, static_cast<double>(k) / count);
      while (cur < last && scal(traj.samples[cur].r) < level) ++cur;
      idx.push_back(cur);
    }
  } else {
    const int c = std::max(count, 1);
    for (int k = 0; k <= c; ++k) idx.push_back(last * static_cast<std::size_t>(k) / static_cast<std::size_t>(c));
  }
  idx.push_back(last);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

namespace {

struct SampleOutcome {
  bool skipped = false;
  bool failed = false;
  double worst = std::numeric_limits<double>::infinity();
  std::optional<Violation> violation;
  std::string note;
};

InvarianceReport merge(std::vector<SampleOutcome>& outcomes) {
  InvarianceReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (auto& o : outcomes) {
    if (o.skipped) {
      ++rep.skipped;
      if (!o.note.empty()) rep.notes.push_back(o.note);
      continue;
    }
    ++rep.samples_run;
    if (o.failed) {
      ++rep.failures;
      rep.notes.push_back(o.note);
    }
    rep.worst_margin = std::min(rep.worst_margin, o.worst);
    if (o.violation) rep.violations.push_back(*o.violation);
  }
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  std::stable_sort(rep.violations.begin(), rep.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.t < b.t; });
  return rep;
}

SearchOptions sample_search(const SearchOptions& base, int sample) {
  SearchOptions s = base;
  s.seed = frames::mix_seed(base.seed, static_cast<std::uint64_t>(sample));
  return s;
}

}  // namespace

InvarianceReport verify_invariance(const ConeSpec& cone, const std::vector<CurvTensor>& samples,
                                   const InvarianceOptions& opts) {
  std::vector<SampleOutcome> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    SampleOutcome& o = out[i];
    const int id = static_cast<int>(i);
    const CurvTensor& r0 = samples[i];
    SearchOptions search = sample_search(opts.search, id);
    const MembershipReport start = min_margin(r0, cone, search);
    if (start.margin < opts.violation_threshold) {
      o.skipped = true;
      o.note = "sample " + std::to_string(id) + " skipped: starts outside the cone";
      return;
    }
    o.worst = start.margin;
    const double s0 = scal(r0);
    const double nrm = r0.norm();
    if (!(nrm > 0.0)) return;
    const double horizon = opts.horizon_factor / (s0 > 0.0 ? s0 : nrm);
    const double cap = s0 > 0.0 ? s0 * opts.scal_growth : std::numeric_limits<double>::infinity();
    try {
      const Trajectory traj = integrate(r0, horizon, cap, opts.integrate);
      search.warm_starts = start.minima;
      search.restarts = opts.tracking_restarts;
      for (std::size_t k : scal_checkpoints(traj, opts.scal_growth, opts.checkpoints)) {
        if (k == 0) continue;
        search.seed = frames::mix_seed(search.seed, k);
        const auto rep = min_margin(traj.samples[k].r, cone, search);
        search.warm_starts = rep.minima;
        o.worst = std::min(o.worst, rep.margin);
        if (rep.margin < opts.violation_threshold && !o.violation)
          o.violation = Violation{id, traj.samples[k].t, rep.margin, "cone"};
      }
    } catch (const IntegrationError& e) {
      o.failed = true;
      o.note = "sample " + std::to_string(id) + ": " + e.what();
    }
  });
  return merge(out);
}

FamilyMargins family_margins(const ConeSpec& cone, const CurvTensor& r, double t,
                             const SearchOptions& opts) {
  FamilyMargins fm;
  fm.cone_margin = min_margin(r, cone, opts).margin;
  const CurvTensor s = r + (1.0 - t * scal(r)) * identity_tensor(r.dim());
  fm.shifted_margin = min_margin(s, cone, opts).margin;
  return fm;
}

InvarianceReport verify_pinching_family(const ConeSpec& cone, double delta,
                                        const std::vector<CurvTensor>& samples, double t0,
                                        double t1, const InvarianceOptions& opts) {
  if (!(t0 >= 0.0) || !(t1 >= t0) || !(t1 <= delta))
    throw PreconditionError("pinching family needs 0 <= t0 <= t1 <= delta");
  std::vector<SampleOutcome> out(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    SampleOutcome& o = out[i];
    const int id = static_cast<int>(i);
    const CurvTensor& r0 = samples[i];
    const int n = r0.dim();
    const CurvTensor id_t = identity_tensor(n);
    SearchOptions search = sample_search(opts.search, id);
    SearchOptions search_s = search;

    const auto start_c = min_margin(r0, cone, search);
    const auto start_s = min_margin(r0 + (1.0 - t0 * scal(r0)) * id_t, cone, search_s);
    if (start_c.margin < opts.violation_threshold || start_s.margin < opts.violation_threshold) {
      o.skipped = true;
      o.note = "sample " + std::to_string(id) + " skipped: not in F(t0)";
      return;
    }
    o.worst = std::min(start_c.margin, start_s.margin);
    if (t1 == t0) return;
    search.warm_starts = start_c.minima;
    search_s.warm_starts = start_s.minima;
    search.restarts = search_s.restarts = opts.tracking_restarts;
    try {
      IntegrateOptions iopts = opts.integrate;
      iopts.t0 = t0;
      const double s0 = std::max(scal(r0), 1e-300);
      const Trajectory traj = integrate(r0, t1 - t0, s0 * 1e6, iopts);
      for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        const auto& smp = traj.samples[k];
        search.seed = frames::mix_seed(search.seed, k);
        search_s.seed = frames::mix_seed(search_s.seed, k + 7);
        const auto rc = min_margin(smp.r, cone, search);
        const auto rs = min_margin(smp.r + (1.0 - smp.t * scal(smp.r)) * id_t, cone, search_s);
        search.warm_starts = rc.minima;
        search_s.warm_starts = rs.minima;
        o.worst = std::min({o.worst, rc.margin, rs.margin});
        if (!o.violation) {
          if (rc.margin < opts.violation_threshold)
            o.violation = Violation{id, smp.t, rc.margin, "cone"};
          else if (rs.margin < opts.violation_threshold)
            o.violation = Violation{id, smp.t, rs.margin, "shifted"};
        }
      }
    } catch (const IntegrationError& e) {
      o.failed = true;
      o.note = "sample " + std::to_string(id) + ": " + e.what();
    }
  });
  return merge(out);
}

AuxLemmaReport verify_aux_lemma(const ConeSpec& cone, double delta,
                                const std::vector<CurvTensor>& samples, double t,
                                const SearchOptions& search, const TangentOptions& topts) {
  if (!(t >= 0.0) || !(t <= delta))
    throw PreconditionError("auxiliary check needs 0 <= t <= delta");
  std::vector<AuxLemmaEntry> entries(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    AuxLemmaEntry& e = entries[i];
    e.sample = static_cast<int>(i);
    const CurvTensor& r = samples[i];
    const int n = r.dim();
    const CurvTensor id = identity_tensor(n);
    const SearchOptions s = sample_search(search, e.sample);
    const auto c = contractions(r);
    e.t_scal = t * c.scal;
    e.trivial = e.t_scal < 1.0;
    const CurvTensor sh = r + (1.0 - e.t_scal) * id;
    const auto rep_r = min_margin(r, cone, s);
    const auto rep_s = min_margin(sh, cone, s);
    e.s_margin = rep_s.margin;
    if (!rep_r.member || !rep_s.member) {
      e.skipped = true;
      return;
    }
    if (e.trivial) {
      e.passed = rep_s.margin > 0.0;
      e.tangent.contained = e.tangent.interior = e.passed;
      e.tangent.base_margin = rep_s.margin;
      return;
    }
    const double ric2 = c.ric.m.squaredNorm();
    const CurvTensor b = q_quadratic(r) - (c.scal + 2.0 * t * ric2) * id;
    e.tangent = tangent_cone_contains(cone, sh, rep_s, b, s, topts);
    e.passed = e.tangent.interior;
  });
  AuxLemmaReport rep;
  rep.entries = std::move(entries);
  for (const auto& e : rep.entries) {
    if (e.skipped)
      ++rep.skipped;
    else if (e.passed)
      ++rep.passed;
    else
      ++rep.failed;
  }
  return rep;
}

AncientModel parse_ancient_model(const std::string& id) {
  if (id == "space_form") return AncientModel::SpaceForm;
  if (id == "sphere_product") return AncientModel::SphereProduct;
  throw ParameterError("unknown ancient model '" + id + "'");
}

CurvTensor ancient_tensor(AncientModel model, int n, double t, int p, int q) {
  if (!(t < 0.0)) throw ParameterError("ancient models live at negative times");
  if (model == AncientModel::SpaceForm)
    return (1.0 / (2.0 * (n - 1) * std::abs(t))) * identity_tensor(n);
  if (p + q != n) throw ParameterError("sphere product factors must add up to n");
  if (p < 2 || q < 2) throw ParameterError("ancient sphere product needs p, q >= 2");
  return sphere_product_tensor(p, q, std::sqrt(2.0 * (p - 1) * std::abs(t)),
                               std::sqrt(2.0 * (q - 1) * std::abs(t)));
}

bool AncientReport::consistent() const {
  return std::all_of(entries.begin(), entries.end(),
                     [&](const AncientEntry& e) { return e.member == expected_member; });
}

AncientReport ancient_margin_check(const ConeSpec& cone, double delta, AncientModel model, int n,
                                   const std::vector<double>& times, int p, int q,
                                   const SearchOptions& search) {
  if (!(delta >= 0.0)) throw ParameterError("delta must be >= 0");
  AncientReport rep;
  rep.model = model;
  rep.expected_member = model == AncientModel::SpaceForm;
  for (double t : times) {
    const CurvTensor r = ancient_tensor(model, n, t, p, q);
    const auto m = min_margin(r, cone.shifted(delta), search);
    rep.entries.push_back({t, m.margin, m.member});
  }
  return rep;
}

SweepReport continuity_sweep(const std::function<ConeSpec(double)>& family,
                             const std::vector<CurvTensor>& tensors,
                             const std::vector<double>& s_grid, double tol,
                             const SearchOptions& search) {
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    if (!(s_grid[i] > s_grid[i - 1])) throw ParameterError("s grid must be strictly increasing");
  SweepReport rep;
  rep.entries.resize(s_grid.size());
  parallel_for(s_grid.size(), [&](std::size_t k) {
    SweepEntry& e = rep.entries[k];
    e.s = s_grid[k];
    e.min_margin = std::numeric_limits<double>::infinity();
    const ConeSpec cone = family(e.s);
    for (std::size_t j = 0; j < tensors.size(); ++j) {
      const auto m = min_margin(tensors[j], cone, sample_search(search, static_cast<int>(j)));
      if (m.margin < e.min_margin) {
        e.min_margin = m.margin;
        e.worst_tensor = static_cast<int>(j);
      }
    }
    if (tensors.empty()) e.min_margin = 0.0;
    e.all_member = e.min_margin >= -tol;
  });
  for (const auto& e : rep.entries) {
    if (e.all_member) rep.largest_passing = e.s;
    if (!e.all_member && !rep.first_failing) rep.first_failing = e.s;
  }
  return rep;
}

}  // namespace curvlab
