#pragma once

// Truncated power series in z and z-bar (Jet2) and in u, u-bar, v, v-bar
// (Jet4). Beyond the ring operations, Jet2 supports composition with its
// inverse, and division in the ideal of a diffeomorphism jet and its conjugate.

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace ffsing {

// Extended precision: normal-form gauges at order 6 reach coefficients of
// 1e8 when mu is close to 1, which exhausts double precision.
using Real = long double;
using Complex = std::complex<Real>;

inline constexpr int kDefaultOrder = 6;
inline constexpr int kMaxOrder = 16;
inline constexpr double kDefaultTol = 1e-9;

/// Truncated series sum c[p,q] z^p zbar^q over p + q <= order.
///
/// Coefficients are stored densely in graded order: all monomials of total
/// degree d occupy a contiguous block, and inside the block the z-bar power q
/// runs from 0 to d. Every operation truncates to the order of its operands.
class Jet2 {
 public:
  Jet2() : Jet2(0) {}
  explicit Jet2(int order);

  static Jet2 constant(int order, Complex c);
  static Jet2 monomial(int order, int p, int q, Complex c = 1.0);
  static Jet2 z(int order) { return monomial(order, 1, 0); }
  static Jet2 zbar(int order) { return monomial(order, 0, 1); }
  // a z + b zbar
  static Jet2 linear(int order, Complex a, Complex b);

  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  static constexpr std::size_t index(int p, int q) noexcept {
    const auto d = static_cast<std::size_t>(p + q);
    return d * (d + 1) / 2 + static_cast<std::size_t>(q);
  }
  static constexpr std::size_t count(int order) noexcept {
    return index(0, order) + 1;
  }

  // Zero for indices beyond the truncation order.
  Complex operator()(int p, int q) const noexcept;
  // Mutable access for building jets; throws on out-of-range indices.
  Complex& at(int p, int q);

  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  Jet2 conj() const;
  Jet2 truncated(int order) const;
  Jet2 resized(int order) const;  // truncate or zero-extend
  Jet2 d_dz() const;
  Jet2 d_dzbar() const;
  // Homogeneous part of total degree d.
  Jet2 degree_part(int d) const;

  Complex constant_term() const noexcept { return coeffs_[0]; }
  double max_abs() const noexcept;
  bool is_zero(double tol = 0.0) const noexcept;

  Jet2& operator+=(const Jet2& rhs);
  Jet2& operator-=(const Jet2& rhs);
  Jet2& operator*=(Complex s);

  friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
  friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
  friend Jet2 operator*(Jet2 a, Complex s) { return a *= s; }
  friend Jet2 operator*(Complex s, Jet2 a) { return a *= s; }
  friend Jet2 operator-(Jet2 a) { return a *= -1.0; }
  friend Jet2 operator*(const Jet2& a, const Jet2& b);

  friend bool operator==(const Jet2&, const Jet2&) = default;

 private:
  int order_;
  std::vector<Complex> coeffs_;
};

// Sup-norm of the coefficient difference (orders must agree).
double sup_distance(const Jet2& a, const Jet2& b);

// Coefficient-wise comparison, absolute tol after dividing by the largest
// coefficient magnitude of either input (or 1 if both are small).
bool approx_equal(const Jet2& a, const Jet2& b, double tol = kDefaultTol);

// f(g, conj g) truncated at the common order. g must have zero constant term.
Jet2 compose(const Jet2& f, const Jet2& g);

// Two-sided compositional inverse; f(0) = 0 and |a| != |b| for the linear
// part a z + b zbar.
Jet2 invert(const Jet2& f);

struct IdealQuotient {
  Jet2 u1;
  Jet2 u2;
  double residual = 0.0;
};

// Minimum-norm solution of phi u1 + conj(phi) u2 = w modulo degree > order.
IdealQuotient ideal_divide(const Jet2& w, const Jet2& phi,
                           double tol = kDefaultTol);

/// Truncated series in u, u-bar, v, v-bar. Sparse: the lifts built from Jet2
/// data touch only a thin slice of the full monomial set.
class Jet4 {
 public:
  using Index = std::array<int, 4>;  // powers of u, ubar, v, vbar

  Jet4() : Jet4(0) {}
  explicit Jet4(int order) : order_(order) {}

  static Jet4 monomial(int order, Index idx, Complex c = 1.0);

  int order() const noexcept { return order_; }
  const std::map<Index, Complex>& terms() const noexcept { return terms_; }

  Complex operator()(const Index& idx) const;
  void add(const Index& idx, Complex c);

  Jet4& operator-=(const Jet4& rhs);
  friend Jet4 operator-(Jet4 a, const Jet4& b) { return a -= b; }
  friend Jet4 operator*(const Jet4& a, const Jet4& b);

  double max_abs() const noexcept;

 private:
  int order_;
  std::map<Index, Complex> terms_;
};

// f(uv, ubar vbar) as a Jet4 of order 2 * f.order().
Jet4 substitute_uv(const Jet2& f);

// Embed v * f(uv, ubar vbar) etc. Multiplies by a single monomial.
Jet4 times_monomial(const Jet4& f, const Jet4::Index& idx, int order);

}  // namespace ffsing
