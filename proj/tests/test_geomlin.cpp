#include <doctest.h>

#include "ffsing/error.hpp"
#include "ffsing/geomlin.hpp"
#include "ffsing/sampling.hpp"
#include "oracles.hpp"

using namespace ffsing;

namespace {

bool same_up_to_sign(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b, double tol) {
  return (a - b).norm() < tol || (a + b).norm() < tol;
}

}  // namespace

TEST_CASE("complex structures") {
  const ComplexStructure2 j = ComplexStructure2::standard();
  CHECK((j.matrix() * j.matrix() + Eigen::Matrix2d::Identity()).norm() == 0.0);
  CHECK(j.orientation() == 1);
  CHECK((-j).orientation() == -1);
  CHECK_THROWS_AS(ComplexStructure2(Eigen::Matrix2d::Identity()), Error);
}

TEST_CASE("real matrix of a z + b zbar") {
  const Complex a(1.0, 2.0);
  const Complex b(0.5, -0.25);
  const Eigen::Matrix2d m = real_matrix(a, b);
  const Complex w(0.3, -0.7);
  const Complex image = a * w + b * std::conj(w);
  const Eigen::Vector2d x = m * Eigen::Vector2d(static_cast<double>(w.real()), static_cast<double>(w.imag()));
  CHECK(std::abs(x(0) - static_cast<double>(image.real())) < 1e-15);
  CHECK(std::abs(x(1) - static_cast<double>(image.imag())) < 1e-15);
}

TEST_CASE("trace spot values") {
  CHECK(trace_from_mu(0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(trace_from_mu(0.5) == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
  for (const double mu : {0.0, 0.1, 0.5, 0.9}) CHECK(mu_from_trace(trace_from_mu(mu)) == doctest::Approx(mu));
}

TEST_CASE("trace of gluing-map structures follows the closed form") {
  Sampler s(51);
  for (int i = 0; i < 100; ++i) {
    const double mu = s.uniform(0.0, 0.95);
    const DiffeoJet phi = s.diffeo_with_mu(1, mu);
    const ComplexStructure2 j2 = j_from_gluing(phi);
    const double tr = trace_invariant(ComplexStructure2::standard(), j2);
    CHECK(std::abs(tr - 2.0 * (1.0 + mu * mu) / (1.0 - mu * mu)) < 1e-9);
    // The sign of either structure does not matter.
    CHECK(std::abs(trace_invariant(-ComplexStructure2::standard(), j2) - tr) < 1e-12);
    CHECK(std::abs(trace_invariant(j2, ComplexStructure2::standard()) - tr) < 1e-9);
  }
}

TEST_CASE("hessian_to_j recovers the structure of linear charts") {
  Sampler s(52);
  for (int i = 0; i < 30; ++i) {
    const DiffeoJet phi = s.diffeo_with_mu(1, s.uniform(0.0, 0.9));
    const HessianForm h = oracle::model_hessian(phi.a(), phi.b());
    HessianToJOptions opts;
    opts.seed = static_cast<std::uint64_t>(i + 1);
    const StructurePair p = hessian_to_j(h, opts);
    CHECK(same_up_to_sign(p.plus.matrix(), j_from_gluing(phi).matrix(), 1e-8));
    CHECK((p.plus.matrix() + p.minus.matrix()).norm() < 1e-15);
  }
}

TEST_CASE("hessian_to_j is equivariant under source changes") {
  Sampler s(53);
  const HessianForm h = oracle::model_hessian(1.0, 0.3);
  Eigen::Matrix4d a = Eigen::Matrix4d::Identity();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) a(r, c) += 0.2 * s.uniform(-1.0, 1.0);
  }
  const StructurePair p0 = hessian_to_j(h);
  const StructurePair p1 = hessian_to_j(h.pulled_back(a));
  CHECK(same_up_to_sign(p0.plus.matrix(), p1.plus.matrix(), 1e-8));
  // Pushing forward by D conjugates J by D.
  const Eigen::Matrix2d d = real_matrix(Complex(1.2, 0.3), Complex(0.1, -0.2));
  const StructurePair p2 = hessian_to_j(h.pushed_forward(d));
  CHECK(same_up_to_sign(p2.plus.matrix(), d * p0.plus.matrix() * d.inverse(), 1e-8));
}

TEST_CASE("hessian_to_j rejects non-focus Hessians") {
  HessianForm elliptic;
  elliptic.q1 = Eigen::Matrix4d::Identity();
  elliptic.q2 = Eigen::Matrix4d::Zero();
  CHECK_THROWS_AS(hessian_to_j(elliptic), Error);
  HessianForm zero{Eigen::Matrix4d::Zero(), Eigen::Matrix4d::Zero()};
  CHECK_THROWS_AS(hessian_to_j(zero), Error);
}

TEST_CASE("eigen_mu") {
  const Complex l1(1.0, 2.0);
  const Complex li(3.0, -1.0);
  const Complex mu = eigen_mu(l1, li);
  CHECK(std::abs(mu - (li - l1) / (li + std::conj(l1))) < 1e-18);
  CHECK(std::abs(eigen_mu(l1, l1)) == 0.0);
  // lambda -> a lambda + b i with real a, b.
  CHECK(std::abs(eigen_mu(2.5L * l1 + Complex(0.0, 0.7), 2.5L * li + Complex(0.0, 0.7)) - mu) < 1e-15);
  CHECK_THROWS_AS(eigen_mu(Complex(0.0, 1.0), Complex(0.0, 1.0)), Error);
}

TEST_CASE("select_eigenvalue") {
  const std::array<Complex, 4> q{Complex(-2.0, 1.0), Complex(2.0, -1.0), Complex(2.0, 1.0), Complex(-2.0, -1.0)};
  CHECK(select_eigenvalue(q) == Complex(2.0, 1.0));
  CHECK(select_eigenvalue(q, {Complex(5.0, -3.0)}) == Complex(2.0, -1.0));
  const std::array<Complex, 4> bad{Complex(1.0, 1.0), Complex(1.0, -1.0), Complex(-1.0, 1.0), Complex(-2.0, -1.0)};
  CHECK_THROWS_AS(select_eigenvalue(bad), Error);
  const std::array<Complex, 4> imaginary{Complex(0.0, 1.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, -1.0)};
  CHECK_THROWS_AS(select_eigenvalue(imaginary), Error);
}
