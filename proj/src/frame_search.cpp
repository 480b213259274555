#include "curvlab/frame_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvlab/simd.hpp"

namespace curvlab::frames {
namespace {

// w = a ^ b in lexicographic pair order.
void wedge(const Eigen::VectorXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& w) {
  const int n = static_cast<int>(a.size());
  w.resize(n * (n - 1) / 2);
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) w[p++] = a[i] * b[j] - a[j] * b[i];
}

// (Omega(v) a)_i = sum_j Omega_ij a_j, Omega the antisymmetric matrix of v.
Eigen::VectorXd omega_apply(const Eigen::VectorXd& v, const Eigen::VectorXd& a) {
  const int n = static_cast<int>(a.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      out[i] += v[p] * a[j];
      out[j] -= v[p] * a[i];
      ++p;
    }
  return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Objective::Objective(const CurvTensor& y, double tau, bool mu_fixed)
    : n_(y.dim()), op_(y.op()), tau_(tau), mu_fixed_(mu_fixed) {
  if (n_ < 4) throw DimensionError("four-frame cones need n >= 4");
}

Objective Objective::for_cone(const ConeSpec& cone, const CurvTensor& r) {
  const CurvTensor y = tested_tensor(cone, r);
  double tau = 0.0;
  if (cone.base == BaseCone::CTildeS) tau = scal(y) / cone.s;
  return Objective(y, tau, cone.base == BaseCone::CTilde);
}

FrameNumbers Objective::numbers(const Eigen::MatrixXd& x) const {
  const auto& kt = simd::active();
  const auto np = static_cast<std::size_t>(op_.rows());
  Eigen::VectorXd w, v(np);
  FrameNumbers k;
  auto quad = [&](int a, int b) {
    wedge(x.col(a), x.col(b), w);
    kt.matvec(op_.data(), np, np, w.data(), v.data());
    return kt.dot(w.data(), v.data(), np);
  };
  k.k13 = quad(0, 2);
  k.k14 = quad(0, 3);
  k.k23 = quad(1, 2);
  k.k24 = quad(1, 3);
  Eigen::VectorXd w12;
  wedge(x.col(0), x.col(1), w12);
  wedge(x.col(2), x.col(3), w);
  kt.matvec(op_.data(), np, np, w.data(), v.data());
  k.x = kt.dot(w12.data(), v.data(), np);
  return k;
}

double Objective::combine(const FrameNumbers& k, double lambda, double mu) const {
  if (mu_fixed_) mu = 1.0;
  const double l2 = lambda * lambda, m2 = mu * mu;
  return k.k13 + l2 * k.k14 + m2 * k.k23 + l2 * m2 * k.k24 - 2.0 * lambda * mu * k.x +
         tau_ * (1.0 - l2) * (1.0 - m2);
}

double Objective::value(const Eigen::MatrixXd& x, double lambda, double mu) const {
  return combine(numbers(x), lambda, mu);
}

Objective::Gradient Objective::gradient(const Eigen::MatrixXd& x, double lambda,
                                        double mu) const {
  if (mu_fixed_) mu = 1.0;
  const auto& kt = simd::active();
  const auto np = static_cast<std::size_t>(op_.rows());
  const Eigen::VectorXd e1 = x.col(0), e2 = x.col(1), e3 = x.col(2), e4 = x.col(3);

  Eigen::VectorXd w13, w14, w23, w24, w12, w34;
  wedge(e1, e3, w13);
  wedge(e1, e4, w14);
  wedge(e2, e3, w23);
  wedge(e2, e4, w24);
  wedge(e1, e2, w12);
  wedge(e3, e4, w34);
  auto apply = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd v(np);
    kt.matvec(op_.data(), np, np, w.data(), v.data());
    return v;
  };
  const Eigen::VectorXd v13 = apply(w13), v14 = apply(w14), v23 = apply(w23),
                        v24 = apply(w24), v12 = apply(w12), v34 = apply(w34);

  Gradient g;
  g.k.k13 = kt.dot(w13.data(), v13.data(), np);
  g.k.k14 = kt.dot(w14.data(), v14.data(), np);
  g.k.k23 = kt.dot(w23.data(), v23.data(), np);
  g.k.k24 = kt.dot(w24.data(), v24.data(), np);
  g.k.x = kt.dot(w12.data(), v34.data(), np);

  const double l2 = lambda * lambda, m2 = mu * mu, lm = lambda * mu;
  g.value = combine(g.k, lambda, mu);

  const Eigen::VectorXd o13_e3 = omega_apply(v13, e3), o13_e1 = omega_apply(v13, e1);
  const Eigen::VectorXd o14_e4 = omega_apply(v14, e4), o14_e1 = omega_apply(v14, e1);
  const Eigen::VectorXd o23_e3 = omega_apply(v23, e3), o23_e2 = omega_apply(v23, e2);
  const Eigen::VectorXd o24_e4 = omega_apply(v24, e4), o24_e2 = omega_apply(v24, e2);
  const Eigen::VectorXd o34_e2 = omega_apply(v34, e2), o34_e1 = omega_apply(v34, e1);
  const Eigen::VectorXd o12_e4 = omega_apply(v12, e4), o12_e3 = omega_apply(v12, e3);

  g.dx.resize(n_, 4);
  g.dx.col(0) = 2.0 * o13_e3 + 2.0 * l2 * o14_e4 - 2.0 * lm * o34_e2;
  g.dx.col(1) = 2.0 * m2 * o23_e3 + 2.0 * l2 * m2 * o24_e4 + 2.0 * lm * o34_e1;
  g.dx.col(2) = -2.0 * o13_e1 - 2.0 * m2 * o23_e2 - 2.0 * lm * o12_e4;
  g.dx.col(3) = -2.0 * l2 * o14_e1 - 2.0 * l2 * m2 * o24_e2 + 2.0 * lm * o12_e3;

  g.dlambda = 2.0 * lambda * g.k.k14 + 2.0 * lambda * m2 * g.k.k24 - 2.0 * mu * g.k.x -
              2.0 * lambda * tau_ * (1.0 - m2);
  g.dmu = mu_fixed_ ? 0.0
                    : 2.0 * mu * g.k.k23 + 2.0 * l2 * mu * g.k.k24 - 2.0 * lambda * g.k.x -
                          2.0 * mu * tau_ * (1.0 - l2);
  return g;
}

std::array<double, 2> Objective::best_lambda_mu(const FrameNumbers& k) const {
  // For fixed mu the quantity is A lambda^2 - 2 B lambda + C.
  auto best_lambda = [&](double mu) {
    const double m2 = mu * mu;
    const double a = k.k14 + m2 * k.k24 - tau_ * (1.0 - m2);
    const double b = mu * k.x;
    const double c = k.k13 + m2 * k.k23 + tau_ * (1.0 - m2);
    double lam = 0.0, val = c;
    if (a - 2.0 * b + c < val) {
      lam = 1.0;
      val = a - 2.0 * b + c;
    }
    if (a > 0.0) {
      const double l = clamp01(b / a);
      const double v = a * l * l - 2.0 * b * l + c;
      if (v < val) {
        lam = l;
        val = v;
      }
    }
    return std::pair{lam, val};
  };

  if (mu_fixed_) return {best_lambda(1.0).first, 1.0};

  constexpr int kGrid = 64;
  int best_j = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= kGrid; ++j) {
    const double v = best_lambda(static_cast<double>(j) / kGrid).second;
    if (v < best_v) {
      best_v = v;
      best_j = j;
    }
  }
  double lo = std::max(0.0, (best_j - 1.0) / kGrid);
  double hi = std::min(1.0, (best_j + 1.0) / kGrid);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
  double f1 = best_lambda(m1).second, f2 = best_lambda(m2).second;
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - gr * (hi - lo);
      f1 = best_lambda(m1).second;
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + gr * (hi - lo);
      f2 = best_lambda(m2).second;
    }
  }
  double mu = 0.5 * (lo + hi);
  if (best_lambda(mu).second > best_v) mu = static_cast<double>(best_j) / kGrid;
  return {best_lambda(mu).first, mu};
}

Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd q = a;
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      for (Eigen::Index p = 0; p < c; ++p) q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
      const double nrm = q.col(c).norm();
      if (!(nrm > 1e-300)) throw InputError("frame vectors are linearly dependent");
      q.col(c) /= nrm;
    }
  }
  return q;
}

Eigen::MatrixXd random_frame(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    Eigen::MatrixXd a(n, 4);
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 4; ++c) a(i, c) = g(rng);
    try {
      return orthonormalize_columns(a);
    } catch (const InputError&) {
    }
  }
}

LocalResult descend(const Objective& obj, Eigen::MatrixXd x, double lambda, double mu,
                    double scale, const SearchOptions& opts) {
  const bool mu_fixed = obj.mu_fixed();
  if (mu_fixed) mu = 1.0;
  lambda = clamp01(lambda);
  mu = clamp01(mu);
  const double gtol = opts.grad_tol * std::max(scale, 1e-300);

  LocalResult res;
  int total_iters = 0;
  bool converged = false;

  // Alternate descent with the exact (lambda, mu) search until the latter no
  // longer improves.
  for (int round = 0; round < 4; ++round) {
    {
      const auto lm = obj.best_lambda_mu(obj.numbers(x));
      if (obj.value(x, lm[0], lm[1]) < obj.value(x, lambda, mu)) {
        lambda = lm[0];
        mu = lm[1];
      }
    }

    auto g = obj.gradient(x, lambda, mu);
    double alpha = 1.0 / std::max(scale, 1e-300);
    Eigen::MatrixXd prev_x;
    Eigen::MatrixXd prev_gx;
    double prev_gl = 0.0, prev_gm = 0.0, prev_l = 0.0, prev_m = 0.0;
    bool have_prev = false;
    int stalled = 0;
    converged = false;

    for (int it = 0; it < opts.max_iter; ++it, ++total_iters) {
      const Eigen::Matrix4d s = x.transpose() * g.dx;
      const Eigen::MatrixXd gx = g.dx - x * (0.5 * (s + s.transpose()));
      double gl = g.dlambda, gm = mu_fixed ? 0.0 : g.dmu;
      if ((lambda <= 0.0 && gl > 0.0) || (lambda >= 1.0 && gl < 0.0)) gl = 0.0;
      if ((mu <= 0.0 && gm > 0.0) || (mu >= 1.0 && gm < 0.0)) gm = 0.0;
      const double gnorm2 = gx.squaredNorm() + gl * gl + gm * gm;
      if (std::sqrt(gnorm2) <= gtol) {
        converged = true;
        break;
      }

      if (have_prev) {
        const double sx = (x - prev_x).squaredNorm() + (lambda - prev_l) * (lambda - prev_l) +
                          (mu - prev_m) * (mu - prev_m);
        const double sy = (x - prev_x).cwiseProduct(gx - prev_gx).sum() +
                          (lambda - prev_l) * (gl - prev_gl) + (mu - prev_m) * (gm - prev_gm);
        if (sy > 0.0 && sx > 0.0) alpha = sx / sy;
        alpha = std::clamp(alpha, 1e-6 / scale, 1e3 / scale);
      }

      bool accepted = false;
      Eigen::MatrixXd xn;
      double ln = lambda, mn = mu, fn = g.value;
      for (int bt = 0; bt < 60; ++bt) {
        xn = orthonormalize_columns(x - alpha * gx);
        ln = clamp01(lambda - alpha * gl);
        mn = mu_fixed ? 1.0 : clamp01(mu - alpha * gm);
        fn = obj.value(xn, ln, mn);
        if (fn <= g.value - 1e-4 * alpha * gnorm2) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // No decrease representable at this precision: as stationary as we get.
        converged = true;
        break;
      }
      // Progress below rounding of the value for a while: stationary as well.
      stalled = (g.value - fn <= 1e-15 * scale) ? stalled + 1 : 0;
      if (stalled >= 20) {
        converged = true;
        break;
      }
      prev_x = x;
      prev_gx = gx;
      prev_gl = gl;
      prev_gm = gm;
      prev_l = lambda;
      prev_m = mu;
      have_prev = true;
      x = std::move(xn);
      lambda = ln;
      mu = mn;
      g = obj.gradient(x, lambda, mu);
    }

    const auto lm = obj.best_lambda_mu(obj.numbers(x));
    const double cur = obj.value(x, lambda, mu);
    const double alt = obj.value(x, lm[0], lm[1]);
    if (!(alt < cur - 1e-14 * scale)) break;
  }

  res.value = obj.value(x, lambda, mu);
  res.x = std::move(x);
  res.lambda = lambda;
  res.mu = mu;
  res.converged = converged;
  res.iterations = total_iters;
  return res;
}

}  // namespace curvlab::frames
