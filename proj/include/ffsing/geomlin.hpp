#pragma once

// Complex structures on the tangent plane of the base, obtained either from
// gluing differentials or from moment-map Hessians. Also the eigenvalue form
// of the first-order invariant.

#include <array>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "ffsing/germs.hpp"

namespace ffsing {

/// 2x2 real matrix J with J^2 = -I.
class ComplexStructure2 {
 public:
  // Throws NOT_COMPLEX_STRUCTURE when |J^2 + I| exceeds tol.
  explicit ComplexStructure2(const Eigen::Matrix2d& j, double tol = kDefaultTol);

  // Rotation by +90 degrees: multiplication by i on C = R^2.
  static ComplexStructure2 standard();

  const Eigen::Matrix2d& matrix() const noexcept { return j_; }
  ComplexStructure2 operator-() const { return ComplexStructure2(-j_); }
  // Sign of the orientation (v, J v): +1 for J_st.
  int orientation() const noexcept { return j_(1, 0) > 0.0 ? 1 : -1; }

 private:
  Eigen::Matrix2d j_;
};

// Real 2x2 matrix of x + i y -> a z + b zbar.
Eigen::Matrix2d real_matrix(Complex a, Complex b);

// D J_st D^{-1}, D the real matrix of the linear part of phi.
ComplexStructure2 j_from_gluing(const DiffeoJet& phi);

// tr(J2 J1^{-1}) after flipping J2 if needed so both induce one orientation.
// Always >= 2; throws ORIENTATION if the resolved value is below 2 - tol.
double trace_invariant(const ComplexStructure2& j1, const ComplexStructure2& j2,
                       double tol = 1e-8);

// Closed form 2 (1 + mu^2) / (1 - mu^2).
double trace_from_mu(double mu);
// Inverse of trace_from_mu.
double mu_from_trace(double trace);

/// Second derivative of F : R^4 -> R^2 at a point, one symmetric matrix per
/// component of the base chart.
struct HessianForm {
  Eigen::Matrix4d q1;
  Eigen::Matrix4d q2;

  // Component-wise: (sum_i m(0,i) q_i, sum_i m(1,i) q_i).
  HessianForm pushed_forward(const Eigen::Matrix2d& m) const;
  // x -> a x on the source: a^T q a.
  HessianForm pulled_back(const Eigen::Matrix4d& a) const;
};

struct StructurePair {
  ComplexStructure2 plus;
  ComplexStructure2 minus;
  // Isotropic planes found along the way, as orthonormal 4x2 bases.
  Eigen::Matrix<double, 4, 2> plane;
  Eigen::Matrix<double, 4, 2> other_plane;
};

struct HessianToJOptions {
  std::uint64_t seed = 1;
  int resamples = 20;
  double root_tol = 1e-8;
};

// The complex structure, up to sign, for which the Hessian is complex
// bilinear. Throws NOT_FOCUS for inputs without two transverse isotropic
// planes or with a non-elliptic operator R = D_eta D_xi^{-1}.
StructurePair hessian_to_j(const HessianForm& h, const HessianToJOptions& opts = {});

// (lambda_i - lambda_1) / (lambda_i + conj(lambda_1)).
Complex eigen_mu(Complex lambda1, Complex lambda_i);

/// How one eigenvalue is picked from a quadruple +-a +-bi.
struct EigenConvention {
  // Default: Re > 0 and Im >= 0. With a reference (an eigenvalue taken on the
  // +i eigenspace of the circle-action generator), Re > 0 and the sign of Im
  // follows the reference.
  std::optional<Complex> reference;
};

Complex select_eigenvalue(const std::array<Complex, 4>& quadruple,
                          const EigenConvention& convention = {},
                          double tol = 1e-9);

}  // namespace ffsing
