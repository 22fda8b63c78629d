#include "ffsing/jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ffsing/error.hpp"

namespace ffsing {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxOrder) {
    throw Error("BAD_ORDER", "jet order " + std::to_string(order) +
                                 " outside [0, " + std::to_string(kMaxOrder) +
                                 "]");
  }
}

void check_same_order(const Jet2& a, const Jet2& b) {
  if (a.order() != b.order()) {
    throw Error("ORDER_MISMATCH", "jet orders differ: " +
                                      std::to_string(a.order()) + " vs " +
                                      std::to_string(b.order()));
  }
}

using MatrixXc = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXc = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

double scale_of(const Jet2& f) { return std::max(1.0, f.max_abs()); }

// Linear part a z + b zbar and its inverse as the pair (A, B) with
// L^{-1}(h) = A h + B conj(h).
struct LinearInverse {
  Complex a;
  Complex b;
};

LinearInverse invert_linear(Complex a, Complex b, double tol) {
  const Real det = std::norm(a) - std::norm(b);
  const Real mag = std::max(std::norm(a), std::norm(b));
  if (mag == 0.0 || std::abs(det) <= tol * mag) {
    throw Error("DEGENERATE_LINEAR_PART",
                "linear part a z + b zbar has |a| = |b|; jet is not invertible");
  }
  return {std::conj(a) / det, -b / det};
}

Jet2 apply_linear(const LinearInverse& l, const Jet2& h) {
  return l.a * h + l.b * h.conj();
}

}  // namespace

Jet2::Jet2(int order) : order_(order) {
  check_order(order);
  coeffs_.assign(count(order), Complex{});
}

Jet2 Jet2::constant(int order, Complex c) { return monomial(order, 0, 0, c); }

Jet2 Jet2::monomial(int order, int p, int q, Complex c) {
  Jet2 j(order);
  if (p + q <= order) j.at(p, q) = c;
  return j;
}

Jet2 Jet2::linear(int order, Complex a, Complex b) {
  Jet2 j(order);
  if (order >= 1) {
    j.at(1, 0) = a;
    j.at(0, 1) = b;
  }
  return j;
}

Complex Jet2::operator()(int p, int q) const noexcept {
  if (p < 0 || q < 0 || p + q > order_) return {};
  return coeffs_[index(p, q)];
}

Complex& Jet2::at(int p, int q) {
  if (p < 0 || q < 0 || p + q > order_) {
    throw Error("INDEX_RANGE", "monomial (" + std::to_string(p) + "," +
                                   std::to_string(q) + ") exceeds order " +
                                   std::to_string(order_));
  }
  return coeffs_[index(p, q)];
}

Jet2 Jet2::conj() const {
  Jet2 r(order_);
  for (int d = 0; d <= order_; ++d) {
    for (int q = 0; q <= d; ++q) {
      const int p = d - q;
      r.coeffs_[index(q, p)] = std::conj(coeffs_[index(p, q)]);
    }
  }
  return r;
}

Jet2 Jet2::truncated(int order) const {
  if (order > order_) {
    throw Error("ORDER_MISMATCH", "cannot truncate to a higher order");
  }
  return resized(order);
}

Jet2 Jet2::resized(int order) const {
  Jet2 r(order);
  const auto n = std::min(r.coeffs_.size(), coeffs_.size());
  std::copy_n(coeffs_.begin(), n, r.coeffs_.begin());
  return r;
}

Jet2 Jet2::d_dz() const {
  Jet2 r(order_);
  for (int d = 1; d <= order_; ++d) {
    for (int q = 0; q < d; ++q) {
      const int p = d - q;
      r.coeffs_[index(p - 1, q)] = static_cast<Real>(p) * coeffs_[index(p, q)];
    }
  }
  return r;
}

Jet2 Jet2::d_dzbar() const {
  Jet2 r(order_);
  for (int d = 1; d <= order_; ++d) {
    for (int q = 1; q <= d; ++q) {
      const int p = d - q;
      r.coeffs_[index(p, q - 1)] = static_cast<Real>(q) * coeffs_[index(p, q)];
    }
  }
  return r;
}

Jet2 Jet2::degree_part(int d) const {
  Jet2 r(order_);
  if (d < 0 || d > order_) return r;
  for (int q = 0; q <= d; ++q) r.coeffs_[index(d - q, q)] = coeffs_[index(d - q, q)];
  return r;
}

double Jet2::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, static_cast<double>(std::abs(c)));
  return m;
}

bool Jet2::is_zero(double tol) const noexcept { return max_abs() <= tol; }

Jet2& Jet2::operator+=(const Jet2& rhs) {
  check_same_order(*this, rhs);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& rhs) {
  check_same_order(*this, rhs);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Jet2& Jet2::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  check_same_order(a, b);
  const int k = a.order();
  Jet2 r(k);
  for (int da = 0; da <= k; ++da) {
    for (int qa = 0; qa <= da; ++qa) {
      const Complex ca = a.coeffs_[Jet2::index(da - qa, qa)];
      if (ca == Complex{}) continue;
      for (int db = 0; db + da <= k; ++db) {
        for (int qb = 0; qb <= db; ++qb) {
          const Complex cb = b.coeffs_[Jet2::index(db - qb, qb)];
          if (cb == Complex{}) continue;
          r.coeffs_[Jet2::index(da - qa + db - qb, qa + qb)] += ca * cb;
        }
      }
    }
  }
  return r;
}

double sup_distance(const Jet2& a, const Jet2& b) { return (a - b).max_abs(); }

bool approx_equal(const Jet2& a, const Jet2& b, double tol) {
  const double scale = std::max({1.0, a.max_abs(), b.max_abs()});
  return sup_distance(a, b) <= tol * scale;
}

Jet2 compose(const Jet2& f, const Jet2& g) {
  check_same_order(f, g);
  const int k = f.order();
  if (std::abs(g.constant_term()) > kDefaultTol * scale_of(g)) {
    throw Error("NONZERO_CONSTANT",
                "inner jet of a composition must vanish at the origin");
  }
  Jet2 inner = g;
  inner.at(0, 0) = 0.0;
  const Jet2 inner_bar = inner.conj();

  // Powers of conj(g); f(g, gbar) = sum_p g^p * (sum_q c[p,q] gbar^q).
  std::vector<Jet2> bar_pow{Jet2::constant(k, 1.0)};
  for (int q = 1; q <= k; ++q) bar_pow.push_back(bar_pow.back() * inner_bar);

  Jet2 result(k);
  Jet2 g_pow = Jet2::constant(k, 1.0);
  for (int p = 0; p <= k; ++p) {
    Jet2 inner_sum(k);
    bool any = false;
    for (int q = 0; p + q <= k; ++q) {
      const Complex c = f(p, q);
      if (c == Complex{}) continue;
      inner_sum += c * bar_pow[static_cast<std::size_t>(q)];
      any = true;
    }
    if (any) result += g_pow * inner_sum;
    if (p < k) g_pow = g_pow * inner;
  }
  return result;
}

Jet2 invert(const Jet2& f) {
  const int k = f.order();
  if (std::abs(f.constant_term()) > kDefaultTol * scale_of(f)) {
    throw Error("NONZERO_CONSTANT", "only jets fixing the origin are invertible");
  }
  if (k == 0) return Jet2(0);
  const LinearInverse lin = invert_linear(f(1, 0), f(0, 1), kDefaultTol);

  Jet2 nonlinear = f;
  nonlinear.at(0, 0) = 0.0;
  nonlinear.at(1, 0) = 0.0;
  nonlinear.at(0, 1) = 0.0;

  // g = L^{-1}(z - N(g)); each pass fixes one more degree.
  const Jet2 id = Jet2::z(k);
  Jet2 g = apply_linear(lin, id);
  for (int pass = 2; pass <= k; ++pass) {
    g = apply_linear(lin, id - compose(nonlinear, g));
  }
  return g;
}

IdealQuotient ideal_divide(const Jet2& w, const Jet2& phi, double tol) {
  check_same_order(w, phi);
  const int k = w.order();
  if (std::abs(w.constant_term()) > tol * scale_of(w)) {
    throw Error("NONZERO_CONSTANT", "ideal_divide requires w(0) = 0");
  }
  if (std::abs(phi.constant_term()) > tol * scale_of(phi)) {
    throw Error("NONZERO_CONSTANT", "ideal_divide requires phi(0) = 0");
  }
  invert_linear(phi(1, 0), phi(0, 1), tol);  // validates the linear part

  IdealQuotient out{Jet2(k), Jet2(k), 0.0};
  if (k == 0) return out;

  // Unknowns: coefficients of u1 and u2 of degree <= k-1 (higher ones
  // only feed truncated monomials). Rows: coefficients of degree 1..k.
  const auto unknowns = Jet2::count(k - 1);
  const auto rows = Jet2::count(k) - 1;
  MatrixXc a = MatrixXc::Zero(static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(2 * unknowns));
  const Jet2 phi_bar = phi.conj();
  for (int d = 0; d < k; ++d) {
    for (int q = 0; q <= d; ++q) {
      const Jet2 m = Jet2::monomial(k, d - q, q);
      const Jet2 c1 = phi * m;
      const Jet2 c2 = phi_bar * m;
      const auto col = static_cast<Eigen::Index>(Jet2::index(d - q, q));
      for (std::size_t r = 1; r < Jet2::count(k); ++r) {
        a(static_cast<Eigen::Index>(r - 1), col) = c1.coeffs()[r];
        a(static_cast<Eigen::Index>(r - 1),
          col + static_cast<Eigen::Index>(unknowns)) = c2.coeffs()[r];
      }
    }
  }
  VectorXc rhs(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 1; r < Jet2::count(k); ++r) {
    rhs(static_cast<Eigen::Index>(r - 1)) = w.coeffs()[r];
  }

  const Eigen::CompleteOrthogonalDecomposition<MatrixXc> cod(a);
  VectorXc x = cod.solve(rhs);
  // Refinement recovers the accuracy lost when the linear part is close to
  // degenerate.
  for (int it = 0; it < 3; ++it) x += cod.solve(rhs - a * x);
  for (int d = 0; d < k; ++d) {
    for (int q = 0; q <= d; ++q) {
      const auto col = static_cast<Eigen::Index>(Jet2::index(d - q, q));
      out.u1.at(d - q, q) = x(col);
      out.u2.at(d - q, q) = x(col + static_cast<Eigen::Index>(unknowns));
    }
  }
  out.residual = sup_distance(phi * out.u1 + phi_bar * out.u2, w);
  if (out.residual > tol * scale_of(w)) {
    throw Error("IDEAL_DIVIDE_RESIDUAL",
                fmt::format("w is not in the ideal of (phi, conj phi): residual {:.3g}", out.residual));
  }
  return out;
}

Jet4 Jet4::monomial(int order, Index idx, Complex c) {
  Jet4 j(order);
  j.add(idx, c);
  return j;
}

Complex Jet4::operator()(const Index& idx) const {
  const auto it = terms_.find(idx);
  return it == terms_.end() ? Complex{} : it->second;
}

void Jet4::add(const Index& idx, Complex c) {
  if (idx[0] + idx[1] + idx[2] + idx[3] > order_) return;
  if (c == Complex{}) return;
  auto& slot = terms_[idx];
  slot += c;
}

Jet4& Jet4::operator-=(const Jet4& rhs) {
  if (order_ != rhs.order_) {
    throw Error("ORDER_MISMATCH", "Jet4 orders differ");
  }
  for (const auto& [idx, c] : rhs.terms_) add(idx, -c);
  return *this;
}

Jet4 operator*(const Jet4& a, const Jet4& b) {
  if (a.order_ != b.order_) {
    throw Error("ORDER_MISMATCH", "Jet4 orders differ");
  }
  Jet4 r(a.order_);
  for (const auto& [ia, ca] : a.terms_) {
    for (const auto& [ib, cb] : b.terms_) {
      r.add({ia[0] + ib[0], ia[1] + ib[1], ia[2] + ib[2], ia[3] + ib[3]}, ca * cb);
    }
  }
  return r;
}

double Jet4::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& [idx, c] : terms_) m = std::max(m, static_cast<double>(std::abs(c)));
  return m;
}

Jet4 substitute_uv(const Jet2& f) {
  Jet4 r(2 * f.order());
  for (int d = 0; d <= f.order(); ++d) {
    for (int q = 0; q <= d; ++q) {
      const int p = d - q;
      r.add({p, q, p, q}, f(p, q));
    }
  }
  return r;
}

Jet4 times_monomial(const Jet4& f, const Jet4::Index& idx, int order) {
  Jet4 r(order);
  for (const auto& [i, c] : f.terms()) {
    r.add({i[0] + idx[0], i[1] + idx[1], i[2] + idx[2], i[3] + idx[3]}, c);
  }
  return r;
}

}  // namespace ffsing
