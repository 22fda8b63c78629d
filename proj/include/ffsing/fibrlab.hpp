#pragma once

// Numeric moment maps near focus-focus points. Hessians come from finite
// differences; rank-1 families are scanned for mu along the critical curve.

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ffsing/geomlin.hpp"

namespace ffsing {

/// F = g(u v) near a focus point. Model coordinates y = frame (x - center)
/// are (p1, p2, q1, q2) with u = p1 - i p2 and v = q1 + i q2, so that
/// u v = (p1 q1 + p2 q2) + i (p1 q2 - p2 q1).
struct LocalModelChart {
  Eigen::Vector4d center = Eigen::Vector4d::Zero();
  DiffeoJet chart = DiffeoJet::identity(1);
  Eigen::Matrix4d frame = Eigen::Matrix4d::Identity();
  double radius = 1.0;  // in model coordinates
};

// g evaluated on a complex number: sum c[p,q] w^p conj(w)^q.
Complex evaluate(const Jet2& g, Complex w);

// Throws OUT_OF_RADIUS outside the chart.
Eigen::Vector2d eval_model(const LocalModelChart& chart, const Eigen::Vector4d& x);

struct NumericMomentMap {
  std::function<Eigen::Vector2d(const Eigen::Vector4d&)> evaluator;
  std::vector<LocalModelChart> charts;  // known singular points

  static NumericMomentMap from_chart(const LocalModelChart& chart);
};

struct FdOptions {
  double step = 1e-4;        // times max(1, |P|_inf)
  bool richardson = true;    // one level: (4 H(h/2) - H(h)) / 3
  double critical_tol = 1e-6;
};

// Throws NOT_CRITICAL when |dF(P)| > critical_tol * max(1, |Hessian|).
HessianForm fd_hessian(const NumericMomentMap& map, const Eigen::Vector4d& p,
                       const FdOptions& opts = {});

/// FocusFocus when `structures` is set, NotFocus with `reason` otherwise.
struct FocusDetection {
  std::optional<StructurePair> structures;
  std::string reason;
  HessianForm hessian;

  bool is_focus() const noexcept { return structures.has_value(); }
};

FocusDetection detect_focus(const NumericMomentMap& map, const Eigen::Vector4d& p,
                            const FdOptions& opts = {},
                            const HessianToJOptions& jopts = {});

// Hessian of F3 : R^5 -> R^3 restricted to Ker dF3 x Ker dF3 with values
// in Coker dF3. The cokernel basis is the orthonormalized projection of a
// pair of standard basis vectors, so points with one image share one basis.
// Throws RANK unless dF3(P) has rank 1.
HessianForm rank1_restricted_hessian(
    const std::function<Eigen::Vector3d(const Eigen::Matrix<double, 5, 1>&)>& f3,
    const Eigen::Matrix<double, 5, 1>& p, const FdOptions& opts = {});

/// Polynomial in t, ascending coefficients.
template <typename T>
T eval_poly(const std::vector<T>& coeffs, double t) {
  using S = typename T::value_type;
  T r = coeffs.empty() ? T{} : coeffs.back();
  for (auto i = coeffs.size(); i-- > 1;) r = r * static_cast<S>(t) + coeffs[i - 1];
  return r;
}

/// Jet2 whose coefficients are polynomials in t.
class PolyJet {
 public:
  explicit PolyJet(int order = 1);
  static PolyJet constant(const Jet2& jet);

  int order() const noexcept { return order_; }
  // Ascending coefficients in t for c[p,q].
  std::vector<Complex>& at(int p, int q);
  const std::vector<Complex>& operator()(int p, int q) const;
  Jet2 at_time(double t) const;

 private:
  int order_;
  std::vector<std::vector<Complex>> coeffs_;
};

struct FocusPointSpec {
  std::vector<Eigen::Matrix4d> frame{Eigen::Matrix4d::Identity()};  // poly in t
  PolyJet chart;
  Eigen::Vector4d center = Eigen::Vector4d::Zero();
  double radius = 1.0;
};

/// t -> F_t on M^4 with two focus points, suspended as (F_t(x), t). The
/// circle factor is dropped: the invariants are constant along it.
struct Rank1Family {
  double t_min = 0.0;
  double t_max = 1.0;
  std::array<FocusPointSpec, 2> points;

  // Throws DEGENERATE_LINEAR_PART if the chart is singular at t.
  LocalModelChart chart_at(int point, double t) const;
  NumericMomentMap map_at(int point, double t) const;
  std::vector<double> sample_times(int samples) const;
};

enum class ProfileRoute {
  Slice4,       // 4-dim Hessian of F_t at each point
  Suspended5,   // rank-1 Hessian of (F_t(x), t) on R^5
};

struct ProfileRow {
  double t = 0.0;
  double trace = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // or the error code of the failed sample

  bool ok() const noexcept { return status == "ok"; }
};

struct Profile {
  std::vector<ProfileRow> rows;
};

// Critical values are (0, 0, t) in the base chart, so rows are indexed by t.
Profile mu_profile(const Rank1Family& family, int samples,
                   ProfileRoute route = ProfileRoute::Slice4,
                   const FdOptions& opts = {});

enum class ProductVerdict { ProductConsistent, NotAlmostDirectProduct };

const char* to_string(ProductVerdict v) noexcept;

struct ObstructionReport {
  ProductVerdict verdict;
  double spread;     // max |mu(t) - mu(t')|
  double threshold;  // 10 x numeric tolerance
  // Extremal pair (t, mu) realizing the spread.
  std::pair<double, double> low;
  std::pair<double, double> high;
  int valid_samples;
};

// Throws TOO_FEW_SAMPLES with fewer than two valid rows.
ObstructionReport product_obstruction_report(const Profile& profile,
                                             double numeric_tol = 1e-6);

// Eigenvalues of the linearization Omega * hess, Omega = [[0, -I], [I, 0]].
std::array<Complex, 4> hamiltonian_eigenvalues(const Eigen::Matrix4d& hess);

// Eigenvalue of the linearization of H on the +i eigenspace of the
// linearization of K (the circle-action generator), taken with Re > 0.
// Throws NOT_COMMUTING or NON_GENERIC.
Complex generator_branch_eigenvalue(const Eigen::Matrix4d& hess_h,
                                    const Eigen::Matrix4d& hess_k);

}  // namespace ffsing
