#include <doctest.h>

#include "ffsing/error.hpp"
#include "ffsing/jet.hpp"
#include "ffsing/sampling.hpp"
#include "oracles.hpp"

using namespace ffsing;

namespace {

const Complex I1(0.0, 1.0);

Jet2 random_jet(Sampler& s, int order, int min_degree) { return s.jet(order, min_degree, 1.0, 0.7); }

// Real inner product of coefficient vectors.
Real dot(const Jet2& a, const Jet2& b) {
  Real sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (std::conj(a.coeffs()[i]) * b.coeffs()[i]).real();
  return sum;
}

}  // namespace

TEST_CASE("graded index layout") {
  CHECK(Jet2::index(0, 0) == 0);
  CHECK(Jet2::index(1, 0) == 1);
  CHECK(Jet2::index(0, 1) == 2);
  CHECK(Jet2::index(2, 0) == 3);
  CHECK(Jet2::count(3) == 10);
  Jet2 f(2);
  CHECK_THROWS_AS(f.at(2, 1), Error);
  CHECK(f(5, 5) == Complex{});
}

TEST_CASE("conjugate swaps indices and conjugates coefficients") {
  const Jet2 f = Jet2::z(2) + Jet2::monomial(2, 0, 2, I1);
  const Jet2 expected = Jet2::zbar(2) + Jet2::monomial(2, 2, 0, -I1);
  CHECK(f.conj() == expected);
}

TEST_CASE("ring identities on random jets") {
  Sampler s(11);
  for (int i = 0; i < 20; ++i) {
    const Jet2 a = random_jet(s, 5, 0);
    const Jet2 b = random_jet(s, 5, 0);
    const Jet2 c = random_jet(s, 5, 0);
    CHECK(a.conj().conj() == a);
    CHECK(approx_equal((a * b).conj(), a.conj() * b.conj(), 1e-15));
    CHECK(approx_equal(a * (b + c), a * b + a * c, 1e-15));
    CHECK(approx_equal(a * b, b * a, 1e-15));
  }
}

TEST_CASE("compose matches monomial-by-monomial expansion") {
  Sampler s(12);
  for (int k = 1; k <= 6; ++k) {
    const Jet2 f = random_jet(s, k, 0);
    const Jet2 g = random_jet(s, k, 1);
    CHECK(approx_equal(compose(f, g), oracle::compose(f, g), 1e-14));
  }
}

TEST_CASE("compose agrees with pointwise evaluation for polynomial maps") {
  // Degrees low enough that nothing is truncated.
  const Jet2 f = Jet2::monomial(4, 2, 0, 1.5) + Jet2::monomial(4, 0, 2, I1) + Jet2::z(4);
  const Jet2 g = Jet2::linear(4, Complex(1.0, 0.5), 0.25) + Jet2::monomial(4, 1, 1, -0.5);
  const Jet2 fg = compose(f, g);
  for (const Complex w : {Complex(0.3, 0.1), Complex(-0.2, 0.4), Complex(0.05, -0.6)}) {
    CHECK(std::abs(oracle::eval(fg, w) - oracle::eval(f, oracle::eval(g, w))) < 1e-15);
  }
}

TEST_CASE("conjugation commutes with composition") {
  Sampler s(13);
  const Jet2 f = random_jet(s, 5, 0);
  const Jet2 g = random_jet(s, 5, 1);
  // As functions, conj(f(g)) = conj(f) evaluated at g.
  CHECK(approx_equal(compose(f, g).conj(), compose(f.conj(), g), 1e-14));
}

TEST_CASE("invert agrees with the fixed-point oracle") {
  Sampler s(14);
  for (int k = 1; k <= 7; ++k) {
    const Jet2 f = s.diffeo(k).jet();
    const Jet2 g = invert(f);
    CHECK(approx_equal(g, oracle::invert(f), 1e-12));
    CHECK(approx_equal(compose(f, g), Jet2::z(k), 1e-12));
    CHECK(approx_equal(compose(g, f), Jet2::z(k), 1e-12));
  }
}

TEST_CASE("invert rejects degenerate jets") {
  CHECK_THROWS_AS(invert(Jet2::linear(3, 1.0, 1.0)), Error);
  CHECK_THROWS_AS(invert(Jet2::constant(3, 1.0) + Jet2::z(3)), Error);
}

TEST_CASE("ideal_divide solves the equation with the minimum-norm solution") {
  Sampler s(15);
  for (int i = 0; i < 10; ++i) {
    const int k = 5;
    const Jet2 phi = s.diffeo(k).jet();
    const Jet2 w = random_jet(s, k, 1);
    const IdealQuotient q = ideal_divide(w, phi);
    CHECK(q.residual < 1e-12);
    CHECK(approx_equal(phi * q.u1 + phi.conj() * q.u2, w, 1e-12));
    // (conj(phi) t, -phi t) lies in the kernel; a minimum-norm solution is
    // orthogonal to it.
    for (int j = 0; j < 3; ++j) {
      const Jet2 t = random_jet(s, k, 0);
      const Jet2 d1 = phi.conj() * t;
      const Jet2 d2 = -(phi * t);
      if (!(phi * d1 + phi.conj() * d2).is_zero(1e-12)) continue;
      CHECK(std::abs(dot(q.u1, d1) + dot(q.u2, d2)) < 1e-10);
    }
  }
}

TEST_CASE("ideal_divide requires vanishing constant terms") {
  const Jet2 phi = Jet2::z(3);
  CHECK_THROWS_AS(ideal_divide(Jet2::constant(3, 1.0), phi), Error);
}

TEST_CASE("substitute_uv evaluates f at u v") {
  Sampler s(16);
  const Jet2 f = random_jet(s, 3, 0);
  const Jet4 g = substitute_uv(f);
  CHECK(g.order() == 6);
  const Complex u(0.3, -0.2);
  const Complex v(0.1, 0.4);
  CHECK(std::abs(oracle::eval(g, u, v) - oracle::eval(f, u * v)) < 1e-15);
}

TEST_CASE("Jet4 product truncates at its order") {
  const Jet4 u = Jet4::monomial(2, {1, 0, 0, 0});
  const Jet4 v = Jet4::monomial(2, {0, 0, 1, 0});
  const Jet4 uv = u * v;
  CHECK(uv({1, 0, 1, 0}) == Complex(1.0));
  CHECK((uv * u).max_abs() == 0.0);
}
