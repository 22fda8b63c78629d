#include "ffsing/geomlin.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ffsing/error.hpp"

namespace ffsing {

namespace {

using Poly = std::vector<double>;  // ascending powers

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return r;
}

double poly_eval(const Poly& p, double x) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

// Roots of a real polynomial from the eigenvalues of its companion matrix.
std::vector<Complex> poly_roots(Poly p) {
  double mag = 0.0;
  for (double c : p) mag = std::max(mag, std::abs(c));
  while (p.size() > 1 && std::abs(p.back()) <= 1e-12 * mag) p.pop_back();
  const auto deg = static_cast<Eigen::Index>(p.size()) - 1;
  if (deg < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -p[static_cast<std::size_t>(i)] / p.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<Complex> roots;
  for (Eigen::Index i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

double form(const Eigen::Matrix4d& q, const Eigen::Vector4d& x, const Eigen::Vector4d& y) {
  return x.dot(q * y);
}

// Conic q(a + s b + t c) = 0 written as A t^2 + B(s) t + C(s).
struct Conic {
  Poly a;
  Poly b;
  Poly c;
};

Conic slice(const Eigen::Matrix4d& q, const Eigen::Vector4d& a, const Eigen::Vector4d& b,
            const Eigen::Vector4d& c) {
  return {{form(q, c, c)},
          {2.0 * form(q, a, c), 2.0 * form(q, b, c)},
          {form(q, a, a), 2.0 * form(q, a, b), form(q, b, b)}};
}

struct NullPlane {
  Eigen::Matrix<double, 4, 2> basis;
};

}  // namespace

ComplexStructure2::ComplexStructure2(const Eigen::Matrix2d& j, double tol) : j_(j) {
  const double scale = std::max(1.0, j.cwiseAbs().maxCoeff());
  if ((j * j + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > tol * scale * scale) {
    throw Error("NOT_COMPLEX_STRUCTURE", "matrix does not square to -I");
  }
}

ComplexStructure2 ComplexStructure2::standard() {
  Eigen::Matrix2d j;
  j << 0.0, -1.0, 1.0, 0.0;
  return ComplexStructure2(j);
}

Eigen::Matrix2d real_matrix(Complex a, Complex b) {
  Eigen::Matrix2d d;
  d << a.real() + b.real(), -a.imag() + b.imag(), a.imag() + b.imag(), a.real() - b.real();
  return d;
}

ComplexStructure2 j_from_gluing(const DiffeoJet& phi) {
  if (!phi.preserves_orientation()) {
    throw Error("ORIENTATION", "j_from_gluing expects an orientation-preserving jet");
  }
  const Eigen::Matrix2d d = real_matrix(phi.a(), phi.b());
  const Eigen::Matrix2d j = d * ComplexStructure2::standard().matrix() * d.inverse();
  return ComplexStructure2(j, 1e-8);
}

double trace_invariant(const ComplexStructure2& j1, const ComplexStructure2& j2, double tol) {
  // J1^{-1} = -J1
  double tr = -(j2.matrix() * j1.matrix()).trace();
  if (tr < 0.0) tr = -tr;
  if (tr < 2.0 - tol) {
    throw Error("ORIENTATION", "complex structures do not induce a common orientation");
  }
  return tr;
}

double trace_from_mu(double mu) { return 2.0 * (1.0 + mu * mu) / (1.0 - mu * mu); }

double mu_from_trace(double trace) {
  return std::sqrt(std::max(0.0, (trace - 2.0) / (trace + 2.0)));
}

HessianForm HessianForm::pushed_forward(const Eigen::Matrix2d& m) const {
  return {m(0, 0) * q1 + m(0, 1) * q2, m(1, 0) * q1 + m(1, 1) * q2};
}

HessianForm HessianForm::pulled_back(const Eigen::Matrix4d& a) const {
  return {a.transpose() * q1 * a, a.transpose() * q2 * a};
}

StructurePair hessian_to_j(const HessianForm& h, const HessianToJOptions& opts) {
  const double scale = std::max(h.q1.cwiseAbs().maxCoeff(), h.q2.cwiseAbs().maxCoeff());
  if (scale == 0.0) throw Error("NOT_FOCUS", "not focus-focus: Hessian vanishes");
  if ((h.q1 - h.q1.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale ||
      (h.q2 - h.q2.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw Error("NOT_SYMMETRIC", "Hessian components must be symmetric");
  }
  const Eigen::Matrix4d q1 = h.q1 / scale;
  const Eigen::Matrix4d q2 = h.q2 / scale;
  const double n1 = q1.norm();
  const double n2 = q2.norm();

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  const auto draw = [&] {
    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) v(i) = normal(rng);
    return v;
  };

  std::vector<NullPlane> planes;
  std::optional<std::pair<NullPlane, NullPlane>> pair;
  for (int attempt = 0; attempt < opts.resamples && !pair; ++attempt) {
    const Eigen::Vector4d a = draw();
    const Eigen::Vector4d b = draw();
    const Eigen::Vector4d c = draw();
    const Conic k1 = slice(q1, a, b, c);
    const Conic k2 = slice(q2, a, b, c);
    // Resultant in t of the two conics: a quartic in s.
    const Poly e = poly_sub(poly_mul(k1.a, k2.c), poly_mul(k2.a, k1.c));
    const Poly l = poly_sub(poly_mul(k1.a, k2.b), poly_mul(k2.a, k1.b));
    const Poly m = poly_sub(poly_mul(k1.b, k2.c), poly_mul(k2.b, k1.c));
    const Poly res = poly_sub(poly_mul(e, e), poly_mul(l, m));

    planes.clear();
    for (const Complex root : poly_roots(res)) {
      if (std::abs(root.imag()) > 1e-6L * std::max<Real>(1.0L, std::abs(root.real()))) continue;
      double s = static_cast<double>(root.real());
      double t = 0.0;
      const double lv = poly_eval(l, s);
      if (std::abs(lv) > 1e-12) {
        t = -poly_eval(e, s) / lv;
      } else {
        // Fall back to the roots of the first conic, keeping the better fit.
        const double qa = poly_eval(k1.a, s), qb = poly_eval(k1.b, s), qc = poly_eval(k1.c, s);
        const double disc = qb * qb - 4.0 * qa * qc;
        if (qa == 0.0 || disc < 0.0) continue;
        const double t1 = (-qb + std::sqrt(disc)) / (2.0 * qa);
        const double t2 = (-qb - std::sqrt(disc)) / (2.0 * qa);
        const auto r2 = [&](double tt) {
          const Eigen::Vector4d x = a + s * b + tt * c;
          return std::abs(form(q2, x, x));
        };
        t = r2(t1) < r2(t2) ? t1 : t2;
      }
      // Newton polish on (q1(x,x), q2(x,x)) = 0.
      Eigen::Vector4d x = a + s * b + t * c;
      for (int it = 0; it < 8; ++it) {
        Eigen::Vector2d g(form(q1, x, x), form(q2, x, x));
        Eigen::Matrix2d jac;
        jac << 2.0 * form(q1, x, b), 2.0 * form(q1, x, c), 2.0 * form(q2, x, b),
            2.0 * form(q2, x, c);
        if (std::abs(jac.determinant()) < 1e-14 * jac.squaredNorm()) break;
        const Eigen::Vector2d step = jac.inverse() * g;
        s -= step(0);
        t -= step(1);
        x = a + s * b + t * c;
      }
      const double xx = x.squaredNorm();
      if (std::abs(form(q1, x, x)) > opts.root_tol * n1 * xx ||
          std::abs(form(q2, x, x)) > opts.root_tol * n2 * xx) {
        continue;
      }
      // ker q1(x, .) ∩ ker q2(x, .)
      Eigen::Matrix<double, 2, 4> rows;
      rows.row(0) = (q1 * x).transpose();
      rows.row(1) = (q2 * x).transpose();
      Eigen::JacobiSVD<Eigen::Matrix<double, 2, 4>> svd(rows, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (sv(0) == 0.0 || sv(1) < 1e-6 * sv(0)) continue;
      NullPlane plane{svd.matrixV().rightCols<2>()};
      bool isotropic = true;
      for (int i = 0; i < 2 && isotropic; ++i) {
        for (int j = 0; j < 2; ++j) {
          const Eigen::Vector4d vi = plane.basis.col(i);
          const Eigen::Vector4d vj = plane.basis.col(j);
          if (std::abs(form(q1, vi, vj)) > 1e-6 * n1 || std::abs(form(q2, vi, vj)) > 1e-6 * n2) {
            isotropic = false;
            break;
          }
        }
      }
      if (!isotropic) continue;
      for (const auto& other : planes) {
        Eigen::Matrix4d both;
        both << plane.basis, other.basis;
        if (std::abs(both.determinant()) > 1e-3) {
          pair.emplace(other, plane);
          break;
        }
      }
      if (pair) break;
      planes.push_back(plane);
    }
  }
  if (!pair) {
    throw Error("NOT_FOCUS", "not focus-focus: no pair of transverse real isotropic planes after " +
                                 std::to_string(opts.resamples) + " hyperplane samples");
  }

  const auto& [v, vp] = *pair;
  const auto restricted = [&](const Eigen::Vector4d& zeta) {
    Eigen::Matrix2d d;
    for (int col = 0; col < 2; ++col) {
      const Eigen::Vector4d w = vp.basis.col(col);
      d(0, col) = form(q1, zeta, w);
      d(1, col) = form(q2, zeta, w);
    }
    return d;
  };
  const Eigen::Matrix2d d_xi = restricted(v.basis.col(0));
  const Eigen::Matrix2d d_eta = restricted(v.basis.col(1));
  if (std::abs(d_xi.determinant()) <= 1e-9 * std::max(d_xi.squaredNorm(), 1e-300)) {
    throw Error("NOT_FOCUS", "not focus-focus: D_xi is singular");
  }
  const Eigen::Matrix2d r = d_eta * d_xi.inverse();
  const Eigen::Matrix2d n = r - 0.5 * r.trace() * Eigen::Matrix2d::Identity();
  // n is traceless, so n^2 = -det(n) I.
  const double det_n = n.determinant();
  if (det_n <= 1e-9 * std::max(r.squaredNorm(), 1e-300)) {
    throw Error("NOT_FOCUS", "not focus-focus: N^2 is not a negative scalar");
  }
  const Eigen::Matrix2d j = n / std::sqrt(det_n);

  // The fiber structure induced through D_xi must also intertwine D_eta.
  const Eigen::Matrix2d j_fiber = d_xi.inverse() * j * d_xi;
  if ((d_eta * j_fiber - j * d_eta).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, d_eta.norm())) {
    throw Error("NOT_FOCUS", "not focus-focus: Hessian is not complex bilinear");
  }
  ComplexStructure2 plus(j, 1e-8);
  return {plus, -plus, v.basis, vp.basis};
}

Complex eigen_mu(Complex lambda1, Complex lambda_i) {
  const Complex den = lambda_i + std::conj(lambda1);
  const double scale = std::max(std::abs(lambda1), std::abs(lambda_i));
  if (std::abs(den) <= 1e-14 * scale || den == Complex{}) {
    throw Error("VANISHING_DENOMINATOR", "lambda_i + conj(lambda_1) = 0");
  }
  return (lambda_i - lambda1) / den;
}

Complex select_eigenvalue(const std::array<Complex, 4>& quadruple,
                          const EigenConvention& convention, double tol) {
  double scale = 0.0;
  double re = 0.0;
  for (const auto& l : quadruple) {
    scale = std::max(scale, static_cast<double>(std::abs(l)));
    re = std::max(re, static_cast<double>(std::abs(l.real())));
  }
  const double eps = tol * std::max(scale, 1.0);
  const auto has = [&](Complex target) {
    return std::any_of(quadruple.begin(), quadruple.end(),
                       [&](Complex l) { return std::abs(l - target) <= eps; });
  };
  for (const auto& l : quadruple) {
    if (!has(-l) || !has(std::conj(l))) {
      throw Error("NOT_QUADRUPLE", "eigenvalues do not have the +-a +-bi symmetry");
    }
  }
  if (re <= eps) {
    throw Error("NON_GENERIC", "Re lambda = 0: Hamiltonian is not generic");
  }
  double sign = 1.0;
  if (convention.reference && convention.reference->imag() < 0.0) sign = -1.0;
  Complex best{};
  bool found = false;
  for (const auto& l : quadruple) {
    if (l.real() <= 0.0) continue;
    if (!found || sign * l.imag() > sign * best.imag()) {
      best = l;
      found = true;
    }
  }
  return best;
}

}  // namespace ffsing
