#include "ffsing/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "ffsing/error.hpp"

namespace ffsing {

namespace {

void require_preserving(const DiffeoJet& phi, const char* what) {
  if (!phi.preserves_orientation()) {
    throw Error("ORIENTATION", std::string(what) + " must be orientation-preserving");
  }
}

// Polynomials in (x, y) share the Jet2 layout and truncated product, with
// index (i, j) read as x^i y^j. Only ring operations and coefficient access
// apply to them; conj() and compose() keep their z / zbar meaning.
Jet2 to_xy(const Jet2& f) {
  const int k = f.order();
  const Complex i1(0.0, 1.0);
  const Jet2 zp = Jet2::linear(k, 1.0, i1);    // x + i y
  const Jet2 zbp = Jet2::linear(k, 1.0, -i1);  // x - i y
  std::vector<Jet2> zbar_pow{Jet2::constant(k, 1.0)};
  for (int q = 1; q <= k; ++q) zbar_pow.push_back(zbar_pow.back() * zbp);
  Jet2 out(k);
  Jet2 z_pow = Jet2::constant(k, 1.0);
  for (int p = 0; p <= k; ++p) {
    for (int q = 0; p + q <= k; ++q) {
      if (f(p, q) != Complex{}) out += f(p, q) * (z_pow * zbar_pow[static_cast<std::size_t>(q)]);
    }
    z_pow = z_pow * zp;
  }
  return out;
}

Jet2 from_xy(const Jet2& poly) {
  const int k = poly.order();
  const Complex i1(0.0, 1.0);
  const Jet2 x = Jet2::linear(k, 0.5, 0.5);
  const Jet2 y = Jet2::linear(k, Complex(0.0, -0.5), Complex(0.0, 0.5));
  std::vector<Jet2> y_pow{Jet2::constant(k, 1.0)};
  for (int j = 1; j <= k; ++j) y_pow.push_back(y_pow.back() * y);
  Jet2 out(k);
  Jet2 x_pow = Jet2::constant(k, 1.0);
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; i + j <= k; ++j) {
      if (poly(i, j) != Complex{}) out += poly(i, j) * (x_pow * y_pow[static_cast<std::size_t>(j)]);
    }
    x_pow = x_pow * x;
  }
  return out;
}

using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// z-divisible (g1, g2) with g1 ∘ src ∘ g2^{-1} = target, for jets whose
// linear parts are both close to z + mu zbar. Degree d is fixed by
// P_i = z + z h_i with h_i homogeneous of degree d - 1; the linearized effect
// phi0 h1(phi0) - z h2 - mu zbar conj(h2) is inverted in the minimum-norm
// sense. A second sweep removes what the linearization left behind.
std::pair<Jet2, Jet2> match_pinched(const Jet2& src, const Jet2& target, double mu) {
  const int k = src.order();
  const Real m = static_cast<Real>(mu);
  const Jet2 z = Jet2::z(k);
  const Jet2 zbar = Jet2::zbar(k);
  const Jet2 phi0 = Jet2::linear(k, 1.0, m);
  const auto op = [&](const Jet2& h1, const Jet2& h2) {
    return phi0 * compose(h1, phi0) - z * h2 - m * (zbar * h2.conj());
  };

  std::vector<Eigen::CompleteOrthogonalDecomposition<RealMatrix>> solvers;
  for (int d = 1; d <= k; ++d) {
    RealMatrix a(2 * (d + 1), 4 * d);
    int col = 0;
    for (int which = 0; which < 2; ++which) {
      for (int q = 0; q < d; ++q) {
        for (const Complex unit : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
          const Jet2 h = Jet2::monomial(k, d - 1 - q, q, unit);
          const Jet2 t = which == 0 ? op(h, Jet2(k)) : op(Jet2(k), h);
          for (int r = 0; r <= d; ++r) {
            a(2 * r, col) = t(d - r, r).real();
            a(2 * r + 1, col) = t(d - r, r).imag();
          }
          ++col;
        }
      }
    }
    solvers.emplace_back(a);
  }

  Jet2 g1 = z;
  Jet2 g2 = z;
  for (int sweep = 0; sweep < 2; ++sweep) {
    Jet2 phi = compose(compose(g1, src), invert(g2));
    for (int d = 1; d <= k; ++d) {
      RealVector rhs(2 * (d + 1));
      for (int r = 0; r <= d; ++r) {
        const Complex e = phi(d - r, r) - target(d - r, r);
        rhs(2 * r) = -e.real();
        rhs(2 * r + 1) = -e.imag();
      }
      const RealVector x = solvers[static_cast<std::size_t>(d - 1)].solve(rhs);
      Jet2 h1(k);
      Jet2 h2(k);
      int col = 0;
      for (int which = 0; which < 2; ++which) {
        for (int q = 0; q < d; ++q, col += 2) {
          (which == 0 ? h1 : h2).at(d - 1 - q, q) = Complex(x(col), x(col + 1));
        }
      }
      const Jet2 p1 = z + z * h1;
      const Jet2 p2 = z + z * h2;
      phi = compose(compose(p1, phi), invert(p2));
      g1 = compose(p1, g1);
      g2 = compose(p2, g2);
    }
  }
  return {g1, g2};
}

}  // namespace

GluingTuple::GluingTuple(std::vector<DiffeoJet> maps) : maps_(std::move(maps)) {
  if (maps_.empty()) {
    throw Error("SIZE_MISMATCH", "a gluing tuple needs n >= 2 pinch points");
  }
  for (const auto& m : maps_) {
    if (m.order() != maps_.front().order()) {
      throw Error("ORDER_MISMATCH", "gluing maps must share one order");
    }
    require_preserving(m, "gluing map");
  }
}

DiffeoJet GluingTuple::cocycle(int i, int j) const {
  const int n = points();
  if (i < 1 || j < 1 || i > n || j > n) {
    throw Error("INDEX_RANGE", "cocycle index outside 1..n");
  }
  const auto phi1 = [&](int m) {
    return m == 1 ? DiffeoJet::identity(order()) : map(m);
  };
  return compose(phi1(i).inverse(), phi1(j));
}

GaugeTuple::GaugeTuple(std::vector<DiffeoJet> elems, double tol)
    : elems_(std::move(elems)), orientation_(Orientation::Preserving) {
  if (elems_.empty()) throw Error("SIZE_MISMATCH", "empty gauge tuple");
  bool first = true;
  for (const auto& e : elems_) {
    if (e.order() != elems_.front().order()) {
      throw Error("ORDER_MISMATCH", "gauge elements must share one order");
    }
    const LiftClass cls = classify_liftable(e, tol);
    if (!cls.liftable()) {
      throw Error("NOT_LIFTABLE", "gauge element is not liftable");
    }
    const Orientation o = cls.kind == LiftKind::DivisibleByZ ? Orientation::Preserving
                                                             : Orientation::Reversing;
    if (first) {
      orientation_ = o;
      first = false;
    } else if (o != orientation_) {
      throw Error("MIXED_ORIENTATION",
                  "gauge elements must be all z-divisible or all zbar-divisible");
    }
  }
}

GaugeTuple GaugeTuple::identity(int n, int order) {
  return GaugeTuple(std::vector<DiffeoJet>(static_cast<std::size_t>(n),
                                           DiffeoJet::identity(order)));
}

GaugeTuple compose(const GaugeTuple& eta, const GaugeTuple& eta2) {
  if (eta.size() != eta2.size()) throw Error("SIZE_MISMATCH", "gauge tuple sizes differ");
  std::vector<DiffeoJet> out;
  out.reserve(static_cast<std::size_t>(eta.size()));
  for (int i = 0; i < eta.size(); ++i) out.push_back(compose(eta[i], eta2[i]));
  return GaugeTuple(std::move(out));
}

GluingTuple gauge_act(const GaugeTuple& eta, const GluingTuple& phi) {
  if (eta.size() != phi.points()) {
    throw Error("SIZE_MISMATCH", "gauge tuple has " + std::to_string(eta.size()) +
                                     " entries for " + std::to_string(phi.points()) +
                                     " pinch points");
  }
  if (eta.order() != phi.order()) throw Error("ORDER_MISMATCH", "gauge/gluing orders differ");
  std::vector<DiffeoJet> out;
  out.reserve(phi.maps().size());
  for (int i = 2; i <= phi.points(); ++i) {
    out.push_back(compose(compose(eta[0], phi.map(i)), eta[i - 1].inverse()));
  }
  return GluingTuple(std::move(out));
}

FirstOrderInvariant first_order_invariants(const GluingTuple& phi) {
  FirstOrderInvariant out;
  for (const auto& m : phi.maps()) out.mu.push_back(m.b() / std::conj(m.a()));
  return out;
}

FirstOrderInvariant canonicalize_invariant(const FirstOrderInvariant& in, double tol) {
  FirstOrderInvariant out{in.mu, true};
  const auto lead = std::find_if(out.mu.begin(), out.mu.end(),
                                 [tol](Complex m) { return std::abs(m) > tol; });
  if (lead == out.mu.end()) return out;

  const Complex rot = std::conj(*lead) / std::abs(*lead);
  for (auto& m : out.mu) m *= rot;
  *lead = Complex(std::abs(*lead), 0.0);

  // Interleaved (Re, Im) comparison against the conjugate tuple.
  for (const auto& m : out.mu) {
    if (std::abs(m.imag()) > tol) {
      if (m.imag() > 0.0) {
        for (auto& x : out.mu) x = std::conj(x);
      }
      break;
    }
  }
  return out;
}

double mu_double(const DiffeoJet& phi) {
  require_preserving(phi, "mu is defined for jets that");
  return std::abs(phi.b()) / std::abs(phi.a());
}

LinearNormalization normalize_linear_part(const DiffeoJet& phi) {
  require_preserving(phi, "normalize_linear_part input");
  const int k = phi.order();
  const Complex ratio = phi.b() / std::conj(phi.a());
  const double theta = ratio == Complex{} ? 0.0 : -std::arg(ratio) / 2.0;
  const Complex c = std::polar(1.0, theta);
  GaugeTuple gauge({DiffeoJet(Jet2::monomial(k, 1, 0, c)),
                    DiffeoJet(Jet2::monomial(k, 1, 0, c * phi.a()))});
  GluingTuple acted = gauge_act(gauge, GluingTuple({phi}));
  return {std::move(gauge), acted.maps().front(), mu_double(phi)};
}

DoublePinchedNormalization normalize_double_pinched(const DiffeoJet& phi, double mu_tol) {
  require_preserving(phi, "normalize_double_pinched input");
  const int k = phi.order();
  const double mu = mu_double(phi);
  if (mu <= mu_tol) {
    throw Error("MU_ZERO", "level mu=0 is non-normalizable");
  }
  const LinearNormalization lin = normalize_linear_part(phi);
  const Jet2 normal = Jet2::linear(k, 1.0, static_cast<Real>(mu));
  const auto [g1, g2] = match_pinched(lin.normalized.jet(), normal, mu);
  DoublePinchedNormalization out{compose(DiffeoJet(g1), lin.gauge[0]),
                                 compose(DiffeoJet(g2), lin.gauge[1]), mu, 0.0};
  const Jet2 image = compose(compose(out.psi1.jet(), phi.jet()), invert(out.psi2.jet()));
  out.residual = sup_distance(image, normal);
  return out;
}

const char* to_string(Equivalence e) noexcept {
  switch (e) {
    case Equivalence::Equivalent:
      return "EQUIVALENT";
    case Equivalence::NotEquivalent:
      return "NOT_EQUIVALENT";
    case Equivalence::UndecidedMuZero:
      return "UNDECIDED_MU_ZERO";
  }
  return "?";
}

EquivalenceResult equivalent_double_pinched(const DiffeoJet& phi, const DiffeoJet& phi_other,
                                            double tol, double mu_tol) {
  if (phi.order() != phi_other.order()) {
    throw Error("ORDER_MISMATCH", "double-pinched comparison needs equal orders");
  }
  EquivalenceResult out{Equivalence::NotEquivalent, mu_double(phi), mu_double(phi_other),
                        std::nullopt, 0.0};
  const bool close = std::abs(out.mu - out.mu_other) <= tol;
  if ((out.mu <= mu_tol && out.mu_other <= mu_tol) ||
      (close && std::min(out.mu, out.mu_other) <= mu_tol)) {
    out.verdict = Equivalence::UndecidedMuZero;
    return out;
  }
  if (!close) return out;

  // Matching the two linear normal forms directly keeps the witness small;
  // going through z + mu zbar compounds two large gauges.
  const LinearNormalization l1 = normalize_linear_part(phi);
  const LinearNormalization l2 = normalize_linear_part(phi_other);
  const auto [g1, g2] = match_pinched(l1.normalized.jet(), l2.normalized.jet(), out.mu);
  DiffeoJet w1 = compose(l2.gauge[0].inverse(), compose(DiffeoJet(g1), l1.gauge[0]));
  DiffeoJet w2 = compose(l2.gauge[1].inverse(), compose(DiffeoJet(g2), l1.gauge[1]));
  const Jet2 image = compose(compose(w1.jet(), phi.jet()), invert(w2.jet()));
  out.residual = sup_distance(image, phi_other.jet());
  out.verdict = Equivalence::Equivalent;
  out.witness.emplace(std::move(w1), std::move(w2));
  return out;
}

DiffeoJet conj_by_scaling(const DiffeoJet& phi, double c) {
  if (!(c > 0.0)) throw Error("BAD_SCALE", "scaling factor must be positive");
  const int k = phi.order();
  const Jet2 outer = Jet2::monomial(k, 1, 0, c);
  const Jet2 inner = Jet2::monomial(k, 1, 0, 1.0 / c);
  return DiffeoJet(compose(outer, compose(phi.jet(), inner)));
}

Jet2 imag_part(const Jet2& f) {
  return (f - f.conj()) * Complex(0.0, -0.5);
}

DiffeoJet liftable_with_imag_part(const Jet2& f, double tol) {
  const int k = f.order();
  const double scale = std::max(1.0, f.max_abs());
  if (sup_distance(f, f.conj()) > tol * scale) {
    throw Error("NOT_REAL", "imaginary-part data must be a real-valued jet");
  }
  if (std::abs(f.constant_term()) > tol * scale) {
    throw Error("NONZERO_CONSTANT", "imaginary-part data must vanish at 0");
  }
  if (k < 1 || std::abs(f(1, 0)) <= tol * scale) {
    throw Error("DEGENERATE_DIFFERENTIAL", "df(0) = 0; no liftable jet has this imaginary part");
  }

  // f = x v + y u: monomials containing x feed v, the pure powers of y feed u.
  const Jet2 fxy = to_xy(f);
  Jet2 uxy(k);
  Jet2 vxy(k);
  for (int d = 1; d <= k; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int i = d - j;
      const Complex c(fxy(i, j).real(), 0.0);
      if (i >= 1) {
        vxy.at(i - 1, j) = c;
      } else {
        uxy.at(0, j - 1) = c;
      }
    }
  }
  const Complex i1(0.0, 1.0);
  const Jet2 x = Jet2::linear(k, 0.5, 0.5);
  const Jet2 y = Jet2::linear(k, Complex(0.0, -0.5), Complex(0.0, 0.5));
  Jet2 psi = x * from_xy(uxy) - y * from_xy(vxy) + i1 * f;
  psi.at(0, 0) = 0.0;
  return DiffeoJet(std::move(psi));
}

Symplectization symplectize_gluing(const GluingTuple& phi) {
  const int k = phi.order();
  std::vector<DiffeoJet> gauge{DiffeoJet::identity(k)};
  for (const auto& m : phi.maps()) gauge.push_back(liftable_with_imag_part(imag_part(m.jet())));
  GaugeTuple witness(std::move(gauge));
  GluingTuple out = gauge_act(witness, phi);
  const Jet2 target = imag_part(Jet2::z(k));
  double residual = 0.0;
  for (const auto& m : out.maps()) {
    residual = std::max(residual, sup_distance(imag_part(m.jet()), target));
  }
  return {std::move(out), std::move(witness), residual};
}

OrbitRank orbit_tangent_rank(const GluingTuple& phi, double rel_threshold) {
  const int n = phi.points();
  const int k = phi.order();
  OrbitRank out;
  out.group_dim = n * k * (k + 1);
  out.ambient_dim = (n - 1) * k * (k + 3);
  const int block = k * (k + 3);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(out.ambient_dim, out.group_dim);
  const auto put = [&](int comp, int col, const Jet2& t) {
    for (std::size_t r = 1; r < Jet2::count(k); ++r) {
      const int row = comp * block + 2 * static_cast<int>(r - 1);
      m(row, col) += t.coeffs()[r].real();
      m(row + 1, col) += t.coeffs()[r].imag();
    }
  };

  std::vector<Jet2> dz;
  std::vector<Jet2> dzbar;
  for (const auto& f : phi.maps()) {
    dz.push_back(f.jet().d_dz());
    dzbar.push_back(f.jet().d_dzbar());
  }

  int col = 0;
  for (int slot = 0; slot < n; ++slot) {
    for (int d = 0; d < k; ++d) {
      for (int q = 0; q <= d; ++q) {
        for (const Complex unit : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
          const Jet2 delta = Jet2::monomial(k, d - q + 1, q, unit);
          if (slot == 0) {
            for (int i = 0; i < n - 1; ++i) {
              put(i, col, compose(delta, phi.maps()[static_cast<std::size_t>(i)].jet()));
            }
          } else {
            const auto i = static_cast<std::size_t>(slot - 1);
            put(slot - 1, col, -(dz[i] * delta + dzbar[i] * delta.conj()));
          }
          ++col;
        }
      }
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  const double top = s.size() > 0 ? s(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_threshold * top) ++rank;
  }
  out.orbit_dim = rank;
  out.stab_dim = out.group_dim - rank;
  out.codim = out.ambient_dim - rank;
  if (rank == 0 || rank >= s.size()) {
    out.gap = std::numeric_limits<double>::infinity();
  } else {
    const double below = s(rank);
    out.gap = below > 0.0 ? s(rank - 1) / below : std::numeric_limits<double>::infinity();
  }
  return out;
}

int expected_stab_dim(int n, int k) {
  if (k < 2 * n - 1) return k * (k + 1) / 2;
  return k * k + (3 - 2 * n) * k + (n - 1) * (2 * n - 3);
}

int expected_codim(int n, int k) {
  if (k < 2 * n - 1) return (-k * k + (4 * n - 5) * k) / 2;
  return (n - 1) * (2 * n - 3);
}

}  // namespace ffsing
