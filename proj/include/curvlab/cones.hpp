#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvlab/tensor.hpp"

namespace curvlab {

enum class BaseCone {
  CTilde,   // mu fixed at 1
  CHat,     // free lambda, mu in [0,1]
  CTildeS,  // CHat expression + (1/s)(1-lambda^2)(1-mu^2) scal
};

/// One of the four-frame curvature cones, optionally pushed through l_{a,b}
/// and optionally pinched. A tensor R belongs to the cone when
///   Y = l_{a,b}^{-1}(R - rho scal(R) I)
/// (each step only when configured) satisfies the base inequalities.
struct ConeSpec {
  BaseCone base = BaseCone::CHat;
  double s = 0.0;
  std::optional<double> b;
  double rho = 0.0;

  static ConeSpec chat() { return {BaseCone::CHat, 0.0, std::nullopt, 0.0}; }
  static ConeSpec ctilde() { return {BaseCone::CTilde, 0.0, std::nullopt, 0.0}; }
  static ConeSpec ctilde_s(double s) { return {BaseCone::CTildeS, s, std::nullopt, 0.0}; }
  ConeSpec transformed(double bb) const {
    ConeSpec c = *this;
    c.b = bb;
    return c;
  }
  ConeSpec shifted(double r) const {
    ConeSpec c = *this;
    c.rho = r;
    return c;
  }

  /// Throws ParameterError on s <= 0, inadmissible b, or rho < 0.
  void validate(int n) const;
  std::string name() const;
};

/// Parses "chat", "ctilde", "ctilde_s" (case-insensitive).
BaseCone parse_base_cone(const std::string& name);
std::string base_cone_name(BaseCone b);

/// The tensor that is tested against the base inequalities.
CurvTensor tested_tensor(const ConeSpec& cone, const CurvTensor& r);

/// Orthonormal four-frame in R^n, stored as the columns e1..e4 of an n x 4
/// matrix.
class Frame4 {
 public:
  Frame4() = default;
  /// Gram-Schmidt on the columns; throws InputError if they are dependent.
  static Frame4 orthonormalize(const Eigen::MatrixXd& columns);
  /// The first four coordinate vectors.
  static Frame4 standard(int n);
  /// Throws InputError when the Gram matrix is off the identity by > 1e-10.
  static Frame4 checked(const Eigen::MatrixXd& columns);

  int dim() const { return static_cast<int>(e_.rows()); }
  const Eigen::MatrixXd& vectors() const { return e_; }
  Eigen::VectorXd e(int k) const { return e_.col(k); }

 private:
  explicit Frame4(Eigen::MatrixXd e) : e_(std::move(e)) {}
  Eigen::MatrixXd e_;
};

/// R(e1,e3,e1,e3) + l^2 R(e1,e4,e1,e4) + m^2 R(e2,e3,e2,e3)
///   + l^2 m^2 R(e2,e4,e2,e4) - 2 l m R(e1,e2,e3,e4).
/// Throws ParameterError unless lambda, mu in [0,1].
double frame_quantity(const CurvTensor& r, const Frame4& f, double lambda, double mu);

/// frame_quantity evaluated with the rules of `cone` on the tested tensor:
/// mu forced to 1 for CTilde, the (1/s) scal term for CTildeS.
double cone_quantity(const ConeSpec& cone, const CurvTensor& r, const Frame4& f,
                     double lambda, double mu);

struct FrameChoice {
  Frame4 frame;
  double lambda = 0.0;
  double mu = 0.0;
};

struct SearchOptions {
  int restarts = 64;
  std::uint64_t seed = 1;
  int max_iter = 1500;
  /// Stationarity threshold on the projected gradient, relative to the scale.
  double grad_tol = 1e-9;
  /// Every restart first runs to this looser threshold (at most
  /// coarse_iter iterations); only the best `polish` are refined.
  double coarse_tol = 1e-5;
  int coarse_iter = 300;
  int polish = 4;
  /// Membership tolerance on the normalized margin.
  double tol = 1e-8;
  /// Extra starting points tried before the random restarts.
  std::vector<FrameChoice> warm_starts;
  /// Number of best local minima kept in the report for warm starting.
  int keep_minima = 4;
};

struct MembershipReport {
  double min_value = 0.0;  // unnormalized minimum of the cone quantity
  double scale = 0.0;      // max(scal(Y), ||Y||) of the tested tensor Y
  double margin = 0.0;     // min_value / scale
  FrameChoice argmin;
  bool member = true;
  int restarts_used = 0;
  bool low_confidence = false;
  std::vector<FrameChoice> minima;  // best local minima, ascending value
};

MembershipReport min_margin(const CurvTensor& r, const ConeSpec& cone,
                            const SearchOptions& opts = {});
bool is_member(const CurvTensor& r, const ConeSpec& cone, double tol = 1e-8,
               const SearchOptions& opts = {});
/// Tests R - rho scal(R) I against `cone` (any shift already set on `cone` is
/// replaced by rho).
bool pinched_member(const CurvTensor& r, double rho, const ConeSpec& cone,
                    const SearchOptions& opts = {});

struct TangentOptions {
  std::array<double, 3> ladder{1e-2, 1e-3, 1e-4};
  /// Interior verdict needs margin(R + hB) >= slope * h on every rung.
  double interior_slope = 1e-7;
  /// R_bd counts as an interior point of the cone above this margin.
  double interior_margin = 1e-6;
  /// Contained (not interior) when penetration at the finest rung is at
  /// most max(decay * penetration at the coarsest rung, penetration_tol).
  double decay = 0.2;
  double penetration_tol = 1e-6;
  /// Random restarts for the perturbed minimizations (warm starts come from
  /// the base point's minima).
  int perturbed_restarts = 8;
};

struct TangentReport {
  bool contained = false;
  bool interior = false;
  double base_margin = 0.0;
  std::array<double, 3> margins{};      // normalized margin(R + h B)
  std::array<double, 3> penetration{};  // max(0, -margin) / h
  double min_slope = 0.0;               // min over rungs of margin / h
};

/// Decides B in T_{R_bd} C numerically. B is rescaled to ||R_bd|| first,
/// which leaves the tangent cone question unchanged.
/// Throws PreconditionError if R_bd is outside the cone.
TangentReport tangent_cone_contains(const ConeSpec& cone, const CurvTensor& r_bd,
                                    const CurvTensor& b, const SearchOptions& search = {},
                                    const TangentOptions& topts = {});
/// Same, reusing an already computed membership report for R_bd.
TangentReport tangent_cone_contains(const ConeSpec& cone, const CurvTensor& r_bd,
                                    const MembershipReport& base, const CurvTensor& b,
                                    const SearchOptions& search = {},
                                    const TangentOptions& topts = {});

}  // namespace curvlab
