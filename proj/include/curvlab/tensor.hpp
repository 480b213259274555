#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "curvlab/errors.hpp"

namespace curvlab {

/// Index map between ordered pairs i < j of {0..n-1} and rows of the
/// operator on 2-forms. Pairs are enumerated lexicographically:
/// (0,1), (0,2), ..., (0,n-1), (1,2), ...
class PairIndex {
 public:
  explicit PairIndex(int n);
  int dim() const { return n_; }
  int size() const { return static_cast<int>(first_.size()); }
  int index(int i, int j) const { return table_[static_cast<std::size_t>(i * n_ + j)]; }
  int first(int p) const { return first_[static_cast<std::size_t>(p)]; }
  int second(int p) const { return second_[static_cast<std::size_t>(p)]; }

 private:
  int n_;
  std::vector<int> table_;
  std::vector<int> first_, second_;
};

inline int pair_count(int n) { return n * (n - 1) / 2; }

/// Symmetric bilinear form on R^n (Ric, id, ...).
struct Sym2 {
  Eigen::MatrixXd m;

  static Sym2 identity(int n) { return {Eigen::MatrixXd::Identity(n, n)}; }
  int dim() const { return static_cast<int>(m.rows()); }
  double trace() const { return m.trace(); }
  double norm() const { return m.norm(); }
};

/// An algebraic curvature tensor on R^n, n >= 3.
///
/// Stored as the symmetric operator on 2-forms, M(ij, kl) = R_{ijkl} for
/// i < j and k < l, with the Bianchi component removed. Every constructor
/// canonicalizes, so a CurvTensor always has the symmetries of a Riemannian
/// curvature tensor up to rounding.
class CurvTensor {
 public:
  CurvTensor() = default;

  static CurvTensor zero(int n);
  /// Projects an arbitrary N x N matrix onto the curvature tensors.
  static CurvTensor from_operator(int n, const Eigen::MatrixXd& op);
  /// Wraps an operator already known to be canonical (no projection).
  static CurvTensor from_canonical(int n, Eigen::MatrixXd op);

  int dim() const { return n_; }
  const Eigen::MatrixXd& op() const { return op_; }

  /// R_{ijkl}, zero-based indices.
  double operator()(int i, int j, int k, int l) const;
  /// Full n^4 component table, index ((i*n + j)*n + k)*n + l.
  std::vector<double> components() const;
  /// Frobenius norm over all four indices.
  double norm() const;

  CurvTensor& operator+=(const CurvTensor& o);
  CurvTensor& operator-=(const CurvTensor& o);
  CurvTensor& operator*=(double c);
  friend CurvTensor operator+(CurvTensor a, const CurvTensor& b) { return a += b; }
  friend CurvTensor operator-(CurvTensor a, const CurvTensor& b) { return a -= b; }
  friend CurvTensor operator*(double c, CurvTensor a) { return a *= c; }
  friend CurvTensor operator*(CurvTensor a, double c) { return a *= c; }
  friend CurvTensor operator-(CurvTensor a) { return a *= -1.0; }

 private:
  CurvTensor(int n, Eigen::MatrixXd op) : n_(n), op_(std::move(op)) {}
  int n_ = 0;
  Eigen::MatrixXd op_;
};

/// Orthogonal projection of a raw n^4 table onto the curvature tensors.
CurvTensor make_curvature(int n, std::span<const double> raw);
/// I_{ijkl} = d_ik d_jl - d_il d_jk.
CurvTensor identity_tensor(int n);

struct Contractions {
  double scal = 0.0;
  Sym2 ric;
  Sym2 ric0;
};
Contractions contractions(const CurvTensor& r);
double scal(const CurvTensor& r);

CurvTensor kulkarni_nomizu(const Sym2& h, const Sym2& k);
/// Q(R)_{ijkl} = sum R_ijpq R_klpq + 2 sum (R_ipkq R_jplq - R_iplq R_jpkq).
CurvTensor q_quadratic(const CurvTensor& r);

/// Parameters of the Bohm-Wilking map l_{a,b}; a is tied to b by
/// 2a = 2b + (n-2) b^2.
struct LabParams {
  int n;
  double a;
  double b;
};
double lab_b_max(int n);
/// Throws ParameterError unless 0 < b <= lab_b_max(n).
LabParams lab_params(int n, double b);
CurvTensor l_ab(const CurvTensor& r, double b);
CurvTensor l_ab_inverse(const CurvTensor& r, double b);

/// Curvature of S^p(r1) x S^q(r2) in R^{p+q}.
CurvTensor sphere_product_tensor(int p, int q, double r1, double r2);

/// Diagonal curvature operator: sectional curvature kappa on every
/// coordinate plane except e0^e1, which gets `negative`.
CurvTensor negative_plane_tensor(int n, double negative = -1.0, double kappa = 0.0);

/// O acting on all four indices: (O.R)_{ijkl} = O_ia O_jb O_kc O_ld R_abcd.
CurvTensor rotate(const CurvTensor& r, const Eigen::MatrixXd& o);
/// Second exterior power of O as an N x N matrix.
Eigen::MatrixXd wedge2(const Eigen::MatrixXd& o);

struct SymmetryResidual {
  double antisymmetry = 0.0;
  double pair = 0.0;
  double bianchi = 0.0;
  double max() const;
};
/// Largest violation of each symmetry over the n^4 table, divided by ||R||
/// (absolute when R = 0).
SymmetryResidual symmetry_residual(int n, std::span<const double> table);

/// Plain-text format: a header line "curvtensor <n>" followed by N rows of N
/// numbers, the operator on 2-forms in lexicographic pair order.
void write_tensor(std::ostream& os, const CurvTensor& r);
CurvTensor read_tensor(std::istream& is);

}  // namespace curvlab
