#include "curvlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "curvlab/simd.hpp"

namespace curvlab {
namespace {

void require_dim(int n) {
  if (n < 3) throw DimensionError("curvature tensors need n >= 3, got " + std::to_string(n));
}

std::size_t at4(int n, int i, int j, int k, int l) {
  return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
}

// Removes the totally antisymmetric (Lambda^4) part of a symmetric operator
// on 2-forms. For each 4-subset a<b<c<d the Bianchi sum is
// M(ab,cd) - M(ac,bd) + M(ad,bc); the correction is orthogonal.
void remove_bianchi_part(int n, Eigen::MatrixXd& m) {
  if (n < 4) return;
  const PairIndex pi(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          const int ab = pi.index(a, b), cd = pi.index(c, d);
          const int ac = pi.index(a, c), bd = pi.index(b, d);
          const int ad = pi.index(a, d), bc = pi.index(b, c);
          const double s = (m(ab, cd) - m(ac, bd) + m(ad, bc)) / 3.0;
          m(ab, cd) -= s;
          m(cd, ab) -= s;
          m(ac, bd) += s;
          m(bd, ac) += s;
          m(ad, bc) -= s;
          m(bc, ad) -= s;
        }
}

}  // namespace

PairIndex::PairIndex(int n) : n_(n), table_(static_cast<std::size_t>(n * n), -1) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      table_[static_cast<std::size_t>(i * n + j)] = static_cast<int>(first_.size());
      first_.push_back(i);
      second_.push_back(j);
    }
}

CurvTensor CurvTensor::zero(int n) {
  require_dim(n);
  const int np = pair_count(n);
  return CurvTensor(n, Eigen::MatrixXd::Zero(np, np));
}

CurvTensor CurvTensor::from_operator(int n, const Eigen::MatrixXd& op) {
  require_dim(n);
  const int np = pair_count(n);
  if (op.rows() != np || op.cols() != np)
    throw DimensionError("operator must be " + std::to_string(np) + "x" + std::to_string(np));
  if (!op.allFinite()) throw InputError("non-finite entry in curvature operator");
  Eigen::MatrixXd m = 0.5 * (op + op.transpose());
  remove_bianchi_part(n, m);
  return CurvTensor(n, std::move(m));
}

CurvTensor CurvTensor::from_canonical(int n, Eigen::MatrixXd op) {
  require_dim(n);
  return CurvTensor(n, std::move(op));
}

double CurvTensor::operator()(int i, int j, int k, int l) const {
  if (i == j || k == l) return 0.0;
  double sign = 1.0;
  if (i > j) {
    std::swap(i, j);
    sign = -sign;
  }
  if (k > l) {
    std::swap(k, l);
    sign = -sign;
  }
  // pair index inline: rows of the lexicographic enumeration
  auto idx = [n = n_](int a, int b) { return a * n - a * (a + 1) / 2 + (b - a - 1); };
  return sign * op_(idx(i, j), idx(k, l));
}

std::vector<double> CurvTensor::components() const {
  const int n = n_;
  std::vector<double> t(static_cast<std::size_t>(n) * n * n * n, 0.0);
  const PairIndex pi(n);
  for (int p = 0; p < pi.size(); ++p)
    for (int q = 0; q < pi.size(); ++q) {
      const int i = pi.first(p), j = pi.second(p), k = pi.first(q), l = pi.second(q);
      const double v = op_(p, q);
      t[at4(n, i, j, k, l)] = v;
      t[at4(n, j, i, k, l)] = -v;
      t[at4(n, i, j, l, k)] = -v;
      t[at4(n, j, i, l, k)] = v;
    }
  return t;
}

double CurvTensor::norm() const { return 2.0 * op_.norm(); }

CurvTensor& CurvTensor::operator+=(const CurvTensor& o) {
  if (o.n_ != n_) throw DimensionError("dimension mismatch in tensor sum");
  op_ += o.op_;
  return *this;
}

CurvTensor& CurvTensor::operator-=(const CurvTensor& o) {
  if (o.n_ != n_) throw DimensionError("dimension mismatch in tensor difference");
  op_ -= o.op_;
  return *this;
}

CurvTensor& CurvTensor::operator*=(double c) {
  op_ *= c;
  return *this;
}

CurvTensor make_curvature(int n, std::span<const double> raw) {
  require_dim(n);
  if (raw.size() != static_cast<std::size_t>(n) * n * n * n)
    throw InputError("raw table must have n^4 entries");
  for (double v : raw)
    if (!std::isfinite(v)) throw InputError("non-finite entry in raw curvature table");
  const PairIndex pi(n);
  const int np = pi.size();
  Eigen::MatrixXd m(np, np);
  auto t = [&](int i, int j, int k, int l) { return raw[at4(n, i, j, k, l)]; };
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) {
      const int i = pi.first(p), j = pi.second(p), k = pi.first(q), l = pi.second(q);
      m(p, q) = (t(i, j, k, l) - t(j, i, k, l) - t(i, j, l, k) + t(j, i, l, k) + t(k, l, i, j) -
                 t(l, k, i, j) - t(k, l, j, i) + t(l, k, j, i)) /
                8.0;
    }
  m = (0.5 * (m + m.transpose())).eval();
  remove_bianchi_part(n, m);
  return CurvTensor::from_canonical(n, std::move(m));
}

CurvTensor identity_tensor(int n) {
  require_dim(n);
  const int np = pair_count(n);
  return CurvTensor::from_canonical(n, Eigen::MatrixXd::Identity(np, np));
}

Contractions contractions(const CurvTensor& r) {
  const int n = r.dim();
  const PairIndex pi(n);
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  // ric_{jl} = sum_i R_{ijil}
  for (int j = 0; j < n; ++j)
    for (int l = j; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r(i, j, i, l);
      ric(j, l) = s;
      ric(l, j) = s;
    }
  Contractions c;
  c.scal = ric.trace();
  c.ric = Sym2{ric};
  c.ric0 = Sym2{ric - (c.scal / n) * Eigen::MatrixXd::Identity(n, n)};
  return c;
}

double scal(const CurvTensor& r) {
  // sum_{i,j} R_ijij = 2 * trace of the operator
  return 2.0 * r.op().trace();
}

CurvTensor kulkarni_nomizu(const Sym2& h, const Sym2& k) {
  const int n = h.dim();
  if (k.dim() != n) throw DimensionError("Kulkarni-Nomizu product of forms of different size");
  require_dim(n);
  const PairIndex pi(n);
  const int np = pi.size();
  Eigen::MatrixXd m(np, np);
  const auto& a = h.m;
  const auto& b = k.m;
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) {
      const int i = pi.first(p), j = pi.second(p), kk = pi.first(q), l = pi.second(q);
      m(p, q) = a(i, kk) * b(j, l) + a(j, l) * b(i, kk) - a(i, l) * b(j, kk) - a(j, kk) * b(i, l);
    }
  return CurvTensor::from_operator(n, m);
}

CurvTensor q_quadratic(const CurvTensor& r) {
  const int n = r.dim();
  const int n2 = n * n;
  const auto t = r.components();
  const auto& k = simd::active();

  // A((i,k),(p,q)) = R_{ipkq}; then B = A A^T holds sum_pq R_ipkq R_jplq.
  std::vector<double> a(static_cast<std::size_t>(n2) * n2);
  for (int i = 0; i < n; ++i)
    for (int kk = 0; kk < n; ++kk)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          a[static_cast<std::size_t>((i * n + kk) * n2 + p * n + q)] = t[at4(n, i, p, kk, q)];
  std::vector<double> b(static_cast<std::size_t>(n2) * n2);
  k.gram(a.data(), static_cast<std::size_t>(n2), static_cast<std::size_t>(n2), b.data());

  // sum_pq R_ijpq R_klpq = 2 (M M^T)(ij,kl) since each unordered pair appears twice.
  const int np = pair_count(n);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mrow = r.op();
  std::vector<double> msq(static_cast<std::size_t>(np) * np);
  k.gram(mrow.data(), static_cast<std::size_t>(np), static_cast<std::size_t>(np), msq.data());

  const PairIndex pi(n);
  Eigen::MatrixXd out(np, np);
  auto bb = [&](int i, int kk, int j, int l) {
    return b[static_cast<std::size_t>((i * n + kk) * n2 + j * n + l)];
  };
  for (int p = 0; p < np; ++p)
    for (int q = p; q < np; ++q) {
      const int i = pi.first(p), j = pi.second(p), kk = pi.first(q), l = pi.second(q);
      const double v = 2.0 * msq[static_cast<std::size_t>(p * np + q)] +
                       2.0 * (bb(i, kk, j, l) - bb(i, l, j, kk));
      out(p, q) = v;
      out(q, p) = v;
    }
  return CurvTensor::from_canonical(n, std::move(out));
}

double lab_b_max(int n) {
  const double nn = n;
  return (std::sqrt(2.0 * nn * (nn - 2.0) + 4.0) - 2.0) / (nn * (nn - 2.0));
}

LabParams lab_params(int n, double b) {
  require_dim(n);
  const double bmax = lab_b_max(n);
  if (!(b > 0.0) || b > bmax * (1.0 + 1e-15))
    throw ParameterError("l_ab parameter b=" + std::to_string(b) + " outside (0, " +
                         std::to_string(bmax) + "]");
  return {n, b + 0.5 * (n - 2) * b * b, b};
}

CurvTensor l_ab(const CurvTensor& r, double b) {
  const int n = r.dim();
  const LabParams lp = lab_params(n, b);
  const auto c = contractions(r);
  const Sym2 id = Sym2::identity(n);
  CurvTensor out = r;
  out += lp.b * kulkarni_nomizu(c.ric, id);
  out += ((lp.a - lp.b) * c.scal / n) * kulkarni_nomizu(id, id);
  return out;
}

CurvTensor l_ab_inverse(const CurvTensor& r, double b) {
  const int n = r.dim();
  const LabParams lp = lab_params(n, b);
  const auto c = contractions(r);
  const Sym2 id = Sym2::identity(n);
  // R = W + Ric0 (x) id / (n-2) + scal id (x) id / (2n(n-1)); l_ab scales the
  // last two parts by 1 + (n-2) b and 1 + 2(n-1) a.
  const CurvTensor traceless = (1.0 / (n - 2)) * kulkarni_nomizu(c.ric0, id);
  const CurvTensor scalar = (c.scal / (2.0 * n * (n - 1))) * kulkarni_nomizu(id, id);
  const CurvTensor weyl = r - traceless - scalar;
  return weyl + (1.0 / (1.0 + (n - 2) * lp.b)) * traceless +
         (1.0 / (1.0 + 2.0 * (n - 1) * lp.a)) * scalar;
}

CurvTensor sphere_product_tensor(int p, int q, double r1, double r2) {
  if (p < 1 || q < 1) throw ParameterError("sphere product factors need p, q >= 1");
  if (p + q < 4) throw ParameterError("sphere product needs p + q >= 4");
  if (!(r1 > 0.0) || !(r2 > 0.0) || !std::isfinite(r1) || !std::isfinite(r2))
    throw ParameterError("sphere product radii must be positive and finite");
  const int n = p + q;
  Eigen::MatrixXd p1 = Eigen::MatrixXd::Zero(n, n), p2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < p; ++i) p1(i, i) = 1.0;
  for (int i = p; i < n; ++i) p2(i, i) = 1.0;
  return (0.5 / (r1 * r1)) * kulkarni_nomizu({p1}, {p1}) +
         (0.5 / (r2 * r2)) * kulkarni_nomizu({p2}, {p2});
}

CurvTensor negative_plane_tensor(int n, double negative, double kappa) {
  require_dim(n);
  const int np = pair_count(n);
  Eigen::MatrixXd m = kappa * Eigen::MatrixXd::Identity(np, np);
  m(0, 0) = negative;
  return CurvTensor::from_canonical(n, std::move(m));
}

Eigen::MatrixXd wedge2(const Eigen::MatrixXd& o) {
  const int n = static_cast<int>(o.rows());
  const PairIndex pi(n);
  const int np = pi.size();
  Eigen::MatrixXd w(np, np);
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) {
      const int i = pi.first(p), j = pi.second(p), a = pi.first(q), b = pi.second(q);
      w(p, q) = o(i, a) * o(j, b) - o(i, b) * o(j, a);
    }
  return w;
}

CurvTensor rotate(const CurvTensor& r, const Eigen::MatrixXd& o) {
  if (o.rows() != r.dim() || o.cols() != r.dim())
    throw DimensionError("rotation size does not match tensor dimension");
  const Eigen::MatrixXd w = wedge2(o);
  return CurvTensor::from_operator(r.dim(), w * r.op() * w.transpose());
}

double SymmetryResidual::max() const { return std::max({antisymmetry, pair, bianchi}); }

SymmetryResidual symmetry_residual(int n, std::span<const double> t) {
  SymmetryResidual res;
  double norm2 = 0.0;
  for (double v : t) norm2 += v * v;
  const double scale = norm2 > 0.0 ? std::sqrt(norm2) : 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = t[at4(n, i, j, k, l)];
          res.antisymmetry = std::max({res.antisymmetry, std::abs(v + t[at4(n, j, i, k, l)]),
                                       std::abs(v + t[at4(n, i, j, l, k)])});
          res.pair = std::max(res.pair, std::abs(v - t[at4(n, k, l, i, j)]));
          res.bianchi = std::max(
              res.bianchi, std::abs(v + t[at4(n, i, k, l, j)] + t[at4(n, i, l, j, k)]));
        }
  res.antisymmetry /= scale;
  res.pair /= scale;
  res.bianchi /= scale;
  return res;
}

void write_tensor(std::ostream& os, const CurvTensor& r) {
  const auto& m = r.op();
  os << "curvtensor " << r.dim() << '\n' << std::setprecision(17);
  for (Eigen::Index p = 0; p < m.rows(); ++p) {
    for (Eigen::Index q = 0; q < m.cols(); ++q) os << (q ? " " : "") << m(p, q);
    os << '\n';
  }
}

CurvTensor read_tensor(std::istream& is) {
  std::string tag;
  int n = 0;
  if (!(is >> tag >> n) || tag != "curvtensor")
    throw InputError("tensor file must start with 'curvtensor <n>'");
  require_dim(n);
  const int np = pair_count(n);
  Eigen::MatrixXd m(np, np);
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) {
      std::string tok;
      if (!(is >> tok)) throw InputError("tensor file truncated");
      std::istringstream ts(tok);
      double v = 0.0;
      if (!(ts >> v)) throw InputError("unparseable tensor component '" + tok + "'");
      m(p, q) = v;
    }
  // Already canonical input (up to print rounding) is kept bit for bit.
  CurvTensor proj = CurvTensor::from_operator(n, m);
  if (m == m.transpose() && (proj.op() - m).norm() <= 1e-13 * std::max(1.0, m.norm()))
    return CurvTensor::from_canonical(n, std::move(m));
  return proj;
}

}  // namespace curvlab
