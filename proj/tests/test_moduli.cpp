#include <doctest.h>

#include "ffsing/error.hpp"
#include "ffsing/moduli.hpp"
#include "ffsing/sampling.hpp"
#include "oracles.hpp"

using namespace ffsing;

namespace {

const Complex I1(0.0, 1.0);

bool same_tuple(const std::vector<Complex>& a, const std::vector<Complex>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("first-order invariant of 2z + i zbar") {
  const GluingTuple phi({DiffeoJet(Jet2::linear(1, 2.0, I1))});
  const FirstOrderInvariant raw = first_order_invariants(phi);
  REQUIRE(raw.mu.size() == 1);
  CHECK(std::abs(raw.mu[0] - Complex(0.0, 0.5)) < 1e-15);
  const FirstOrderInvariant canon = canonicalize_invariant(raw);
  CHECK(canon.canonical);
  CHECK(canon.mu[0] == Complex(0.5, 0.0));
}

TEST_CASE("canonical form identifies a tuple with its conjugate") {
  const FirstOrderInvariant a{{Complex(0.3, 0.4), Complex(0.0, 0.1)}, false};
  const FirstOrderInvariant b{{Complex(0.3, -0.4), Complex(0.0, -0.1)}, false};
  CHECK(same_tuple(canonicalize_invariant(a).mu, canonicalize_invariant(b).mu, 1e-15));
}

TEST_CASE("canonicalization agrees with the brute-force orbit distance") {
  Sampler s(31);
  for (int i = 0; i < 40; ++i) {
    const int n = s.uniform_int(2, 4);
    std::vector<Complex> mu;
    for (int j = 2; j <= n; ++j) mu.push_back(static_cast<Real>(s.uniform(0.0, 0.9)) * s.phase());
    if (i % 4 == 0) mu.front() = 0.0;  // leading zero: the next entry decides the rotation
    const auto canon = canonicalize_invariant({mu, false}).mu;
    // The representative lies on the orbit of its input.
    CHECK(oracle::orbit_distance(mu, canon) < 1e-12);
    // A random orbit element has the same representative ...
    std::vector<Complex> moved = mu;
    const Complex r = s.phase();
    const bool flip = s.uniform_int(0, 1) == 1;
    for (auto& m : moved) m = r * (flip ? std::conj(m) : m);
    CHECK(same_tuple(canonicalize_invariant({moved, false}).mu, canon, 1e-12));
    // ... and a tuple off the orbit does not.
    std::vector<Complex> off = mu;
    off.back() += 0.05;
    if (oracle::orbit_distance(mu, off) > 1e-6) {
      CHECK_FALSE(same_tuple(canonicalize_invariant({off, false}).mu, canon, 1e-9));
    }
  }
}

TEST_CASE("gauge action is an action") {
  Sampler s(32);
  const GluingTuple phi = s.gluing_tuple(3, 4);
  const GaugeTuple e1 = s.gauge_tuple(3, 4);
  const GaugeTuple e2 = s.gauge_tuple(3, 4, LiftKind::DivisibleByZbar);
  const GluingTuple lhs = gauge_act(compose(e1, e2), phi);
  const GluingTuple rhs = gauge_act(e1, gauge_act(e2, phi));
  for (int i = 2; i <= 3; ++i) CHECK(approx_equal(lhs.map(i).jet(), rhs.map(i).jet(), 1e-12));
  const GluingTuple same = gauge_act(GaugeTuple::identity(3, 4), phi);
  for (int i = 2; i <= 3; ++i) CHECK(approx_equal(same.map(i).jet(), phi.map(i).jet(), 1e-15));
}

TEST_CASE("gauge tuples must share one divisibility pattern") {
  Sampler s(33);
  CHECK_THROWS_AS(GaugeTuple({s.liftable(3, LiftKind::DivisibleByZ), s.liftable(3, LiftKind::DivisibleByZbar)}),
                  Error);
  CHECK_THROWS_AS(GaugeTuple({s.liftable(3, LiftKind::DivisibleByZ), s.not_liftable(3)}), Error);
}

TEST_CASE("canonical invariants are constant along gauge orbits") {
  Sampler s(34);
  for (int n = 2; n <= 4; ++n) {
    const GluingTuple phi = s.gluing_tuple(n, 5);
    const auto base = canonicalize_invariant(first_order_invariants(phi)).mu;
    for (const LiftKind kind : {LiftKind::DivisibleByZ, LiftKind::DivisibleByZbar}) {
      const GluingTuple moved = gauge_act(s.gauge_tuple(n, 5, kind), phi);
      CHECK(same_tuple(canonicalize_invariant(first_order_invariants(moved)).mu, base, 1e-12));
    }
  }
}

TEST_CASE("cocycle relation") {
  Sampler s(35);
  const GluingTuple phi = s.gluing_tuple(4, 4);
  // phi_{2,4} = phi_{2,3} ∘ phi_{3,4}
  CHECK(approx_equal(phi.cocycle(2, 4).jet(), compose(phi.cocycle(2, 3), phi.cocycle(3, 4)).jet(), 1e-12));
  CHECK(approx_equal(phi.cocycle(1, 3).jet(), phi.map(3).jet(), 1e-15));
  CHECK_THROWS_AS(phi.cocycle(0, 2), Error);
}

TEST_CASE("linear normalization") {
  Sampler s(36);
  const DiffeoJet phi = s.diffeo_with_mu(4, 0.4);
  const LinearNormalization lin = normalize_linear_part(phi);
  CHECK(std::abs(lin.mu - 0.4) < 1e-14);
  CHECK(std::abs(lin.normalized.a() - Complex(1.0)) < 1e-14);
  CHECK(std::abs(lin.normalized.b() - Complex(0.4)) < 1e-14);
}

TEST_CASE("double-pinched normal form") {
  Sampler s(37);
  for (const double mu : {0.05, 0.3, 0.6, 0.9}) {
    const DiffeoJet phi = s.diffeo_with_mu(6, mu);
    const DoublePinchedNormalization n = normalize_double_pinched(phi);
    CHECK(n.residual < 1e-8);
    CHECK(classify_liftable(n.psi1).liftable());
    CHECK(classify_liftable(n.psi2).liftable());
    const Jet2 image = compose(compose(n.psi1.jet(), phi.jet()), invert(n.psi2.jet()));
    CHECK(sup_distance(image, Jet2::linear(6, 1.0, mu)) < 1e-8);
  }
  CHECK_THROWS_AS(normalize_double_pinched(s.diffeo_with_mu(4, 0.0)), Error);
}

TEST_CASE("double-pinched equivalence verdicts") {
  Sampler s(38);
  const DiffeoJet a = s.diffeo_with_mu(5, 0.5);
  const DiffeoJet b = s.diffeo_with_mu(5, 0.5);
  const EquivalenceResult eq = equivalent_double_pinched(a, b);
  CHECK(eq.verdict == Equivalence::Equivalent);
  REQUIRE(eq.witness);
  CHECK(classify_liftable(eq.witness->first).liftable());
  CHECK(classify_liftable(eq.witness->second).liftable());
  const Jet2 image = compose(compose(eq.witness->first.jet(), a.jet()), invert(eq.witness->second.jet()));
  CHECK(sup_distance(image, b.jet()) < 1e-8);

  CHECK(equivalent_double_pinched(a, s.diffeo_with_mu(5, 0.502)).verdict == Equivalence::NotEquivalent);
  CHECK(equivalent_double_pinched(s.diffeo_with_mu(5, 0.0), s.diffeo_with_mu(5, 0.0)).verdict ==
        Equivalence::UndecidedMuZero);
  CHECK(std::string(to_string(Equivalence::UndecidedMuZero)) == "UNDECIDED_MU_ZERO");
}

TEST_CASE("conjugation by scaling") {
  Sampler s(39);
  const DiffeoJet phi = s.diffeo(5);
  const DiffeoJet scaled = conj_by_scaling(phi, 4.0);
  // c phi(w / c), evaluated directly.
  for (const Complex w : {Complex(0.3, 0.2), Complex(-0.5, 0.1)}) {
    const Complex direct = 4.0L * oracle::eval(phi.jet(), w / 4.0L);
    CHECK(std::abs(oracle::eval(scaled.jet(), w) - direct) < 1e-14);
  }
  CHECK_THROWS_AS(conj_by_scaling(phi, 0.0), Error);
}

TEST_CASE("liftable jet with prescribed imaginary part") {
  Sampler s(40);
  for (int i = 0; i < 10; ++i) {
    const Jet2 m = s.diffeo(5).jet();
    const Jet2 f = imag_part(m);
    const DiffeoJet psi = liftable_with_imag_part(f);
    CHECK(classify_liftable(psi).liftable());
    CHECK(approx_equal(imag_part(psi.jet()), f, 1e-12));
  }
  CHECK_THROWS_AS(liftable_with_imag_part(Jet2::z(3)), Error);                  // not real-valued
  CHECK_THROWS_AS(liftable_with_imag_part(Jet2::constant(3, 1.0)), Error);     // f(0) != 0
  CHECK_THROWS_AS(liftable_with_imag_part(imag_part(Jet2::monomial(3, 2, 0))), Error);  // df(0) = 0
}

TEST_CASE("symplectization fixes Im z and keeps the first-order invariants") {
  Sampler s(41);
  const GluingTuple phi = s.gluing_tuple(3, 6);
  const Symplectization out = symplectize_gluing(phi);
  CHECK(out.residual < 1e-9);
  for (const auto& m : out.tuple.maps()) CHECK(approx_equal(imag_part(m.jet()), imag_part(Jet2::z(6)), 1e-9));
  CHECK(same_tuple(canonicalize_invariant(first_order_invariants(out.tuple)).mu,
                   canonicalize_invariant(first_order_invariants(phi)).mu, 1e-9));
  const GluingTuple again = gauge_act(out.witness, phi);
  for (int i = 2; i <= 3; ++i) CHECK(approx_equal(again.map(i).jet(), out.tuple.map(i).jet(), 1e-12));
}

TEST_CASE("orbit rank at generic linear tuples matches the closed forms") {
  Sampler s(42);
  for (int n = 2; n <= 3; ++n) {
    for (int k = 1; k <= 5; ++k) {
      const OrbitRank r = orbit_tangent_rank(s.linear_tuple(n, k));
      CHECK(r.group_dim == n * k * (k + 1));
      CHECK(r.ambient_dim == (n - 1) * k * (k + 3));
      CHECK(r.stab_dim == r.group_dim - r.orbit_dim);
      CHECK(r.codim == r.ambient_dim - r.orbit_dim);
      CHECK(r.stab_dim == expected_stab_dim(n, k));
      CHECK(r.codim == expected_codim(n, k));
    }
  }
  // Spot values: n = 2 stabilizes at codim 1 from k = 1 on.
  CHECK(expected_codim(2, 1) == 1);
  CHECK(expected_codim(2, 6) == 1);
  CHECK(expected_stab_dim(2, 1) == 1);
  CHECK(expected_codim(3, 8) == 6);
}

TEST_CASE("worked examples") {
  const int k = 3;
  const Jet2 z = Jet2::z(k);
  const Jet2 zb = Jet2::zbar(k);
  const auto lin = [&](Complex a, Complex b) { return Jet2::linear(k, a, b); };

  SUBCASE("gauge action") {
    const Complex a(1.5, -0.5);
    const Complex b(0.2, 0.3);
    const GluingTuple out = gauge_act(GaugeTuple({DiffeoJet(z), DiffeoJet(a * z)}), GluingTuple({DiffeoJet(lin(a, b))}));
    CHECK(approx_equal(out.map(2).jet(), lin(1.0, b / std::conj(a)), 1e-15));
    const GluingTuple flipped =
        gauge_act(GaugeTuple({DiffeoJet(zb), DiffeoJet(zb)}), GluingTuple({DiffeoJet(lin(1.0, Complex(0.3, 0.2)))}));
    CHECK(approx_equal(flipped.map(2).jet(), lin(1.0, Complex(0.3, -0.2)), 1e-15));
  }

  SUBCASE("first-order invariants ignore higher terms") {
    const auto mu = [&](const Jet2& f) { return first_order_invariants(GluingTuple({DiffeoJet(f)})).mu.at(0); };
    CHECK(mu(z) == Complex{});
    CHECK(std::abs(mu(lin(1.0, 0.4) + Jet2::monomial(k, 2, 0)) - Complex(0.4)) < 1e-15);
    CHECK(canonicalize_invariant({{Complex{}, Complex{}}, false}).mu == std::vector<Complex>{Complex{}, Complex{}});
  }

  SUBCASE("mu_double") {
    CHECK(mu_double(DiffeoJet(lin(3.0, 1.0))) == doctest::Approx(1.0 / 3.0));
    CHECK(mu_double(DiffeoJet(z)) == 0.0);
    CHECK(mu_double(DiffeoJet(lin(1.0, 0.5) + Jet2::monomial(k, 0, 3, 7.0))) == 0.5);
  }

  SUBCASE("linear normalization") {
    const LinearNormalization n = normalize_linear_part(DiffeoJet(lin(2.0, Complex(0.0, 1.0))));
    CHECK(std::abs(n.normalized.a() - Complex(1.0)) < 1e-15);
    CHECK(std::abs(n.normalized.b() - Complex(0.5)) < 1e-15);
    CHECK(approx_equal(normalize_linear_part(DiffeoJet(lin(1.0, 0.3))).normalized.jet(), lin(1.0, 0.3), 1e-15));
    CHECK(approx_equal(normalize_linear_part(DiffeoJet(lin(Complex(0.0, 2.0), 0.0))).normalized.jet(), z, 1e-15));
  }

  SUBCASE("double-pinched normalization") {
    const DoublePinchedNormalization already = normalize_double_pinched(DiffeoJet(lin(1.0, 0.5)));
    CHECK(approx_equal(already.psi1.jet(), z, 1e-15));
    CHECK(approx_equal(already.psi2.jet(), z, 1e-15));
    const DoublePinchedNormalization n =
        normalize_double_pinched(DiffeoJet(Jet2::linear(4, 1.0, 0.5) + Jet2::monomial(4, 0, 2)));
    CHECK(n.residual < 1e-8);
    CHECK_THROWS_WITH_AS(normalize_double_pinched(DiffeoJet(z + Jet2::monomial(k, 0, 2))),
                         "level mu=0 is non-normalizable", Error);
  }

  SUBCASE("equivalence") {
    const DiffeoJet base(lin(1.0, 0.5));
    const EquivalenceResult eq = equivalent_double_pinched(DiffeoJet(lin(1.0, 0.5) + Jet2::monomial(k, 0, 3)), base);
    CHECK(eq.verdict == Equivalence::Equivalent);
    CHECK(eq.residual < 1e-8);
    CHECK(equivalent_double_pinched(DiffeoJet(lin(1.0, 0.3)), base).verdict == Equivalence::NotEquivalent);
    CHECK(equivalent_double_pinched(DiffeoJet(z + Jet2::monomial(k, 0, 2)), DiffeoJet(z + Jet2::monomial(k, 0, 3)))
              .verdict == Equivalence::UndecidedMuZero);
  }

  SUBCASE("scaling") {
    CHECK(approx_equal(conj_by_scaling(DiffeoJet(z + Jet2::monomial(k, 0, 2)), 10.0).jet(),
                       z + Jet2::monomial(k, 0, 2, 0.1L), 1e-15));
    CHECK(approx_equal(conj_by_scaling(DiffeoJet(lin(1.0, 0.4)), 7.0).jet(), lin(1.0, 0.4), 1e-15));
    CHECK(approx_equal(conj_by_scaling(DiffeoJet(z + Jet2::monomial(k, 2, 0) + Jet2::monomial(k, 3, 0)), 2.0).jet(),
                       z + Jet2::monomial(k, 2, 0, 0.5L) + Jet2::monomial(k, 3, 0, 0.25L), 1e-15));
  }

  SUBCASE("prescribed imaginary part") {
    // x = (z + zbar) / 2, y = (z - zbar) / 2i as real-valued jets.
    const Jet2 x = lin(0.5, 0.5);
    const Jet2 y = lin(Complex(0.0, -0.5), Complex(0.0, 0.5));
    CHECK(approx_equal(liftable_with_imag_part(y).jet(), z, 1e-15));
    CHECK(approx_equal(liftable_with_imag_part(x).jet(), Complex(0.0, 1.0) * z, 1e-15));
    const DiffeoJet psi = liftable_with_imag_part(y + x * y);
    const Jet2 expected = z * (Jet2::constant(k, 1.0) + Complex(0.0, 1.0) * y);
    CHECK(approx_equal(psi.jet(), expected, 1e-15));
    CHECK(classify_liftable(psi).liftable());
  }

  SUBCASE("orbit dimensions") {
    const OrbitRank a = orbit_tangent_rank(GluingTuple({DiffeoJet(Jet2::linear(1, 1.0, 0.4))}));
    CHECK(a.stab_dim == 1);
    CHECK(a.codim == 1);
    Sampler s(43);
    const OrbitRank b = orbit_tangent_rank(GluingTuple({s.diffeo_with_mu(3, 0.5)}));
    CHECK(b.stab_dim == 7);
    CHECK(b.codim == 1);
    const OrbitRank c = orbit_tangent_rank(
        GluingTuple({DiffeoJet(Jet2::linear(2, 1.0, 0.3)), DiffeoJet(Jet2::linear(2, 1.0, Complex(0.0, 0.6)))}));
    CHECK(c.stab_dim == 3);
    CHECK(c.codim == 5);
  }
}
