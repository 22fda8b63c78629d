#include <doctest.h>

#include "ffsing/error.hpp"
#include "ffsing/fibrlab.hpp"
#include "ffsing/moduli.hpp"
#include "ffsing/sampling.hpp"
#include "ffsing/textio.hpp"
#include "oracles.hpp"

using namespace ffsing;

namespace {

LocalModelChart linear_chart(Complex a, Complex b) {
  LocalModelChart c;
  c.chart = DiffeoJet(Jet2::linear(1, a, b));
  return c;
}

Rank1Family family_file(const char* name) {
  return parse_family(read_file(std::string(FFSING_TEST_DATA) + "/" + name));
}

}  // namespace

TEST_CASE("evaluate matches direct powers") {
  Sampler s(61);
  const Jet2 g = s.jet(4, 0);
  const Complex w(0.2, -0.3);
  CHECK(std::abs(evaluate(g, w) - oracle::eval(g, w)) < 1e-15);
}

TEST_CASE("model coordinates") {
  LocalModelChart c;
  Eigen::Vector4d x(0.3, 0.2, -0.1, 0.4);
  // u v with u = p1 - i p2, v = q1 + i q2.
  const std::complex<double> uv = std::complex<double>(0.3, -0.2) * std::complex<double>(-0.1, 0.4);
  const Eigen::Vector2d f = eval_model(c, x);
  CHECK(f(0) == doctest::Approx(uv.real()));
  CHECK(f(1) == doctest::Approx(uv.imag()));
  CHECK_THROWS_AS(eval_model(c, Eigen::Vector4d(2.0, 0.0, 0.0, 0.0)), Error);
}

TEST_CASE("finite-difference Hessian matches the closed form") {
  Sampler s(62);
  for (int i = 0; i < 10; ++i) {
    const DiffeoJet phi = s.diffeo_with_mu(1, s.uniform(0.0, 0.9));
    const HessianForm fd = fd_hessian(NumericMomentMap::from_chart(linear_chart(phi.a(), phi.b())),
                                      Eigen::Vector4d::Zero());
    const HessianForm exact = oracle::model_hessian(phi.a(), phi.b());
    CHECK((fd.q1 - exact.q1).norm() < 1e-7);
    CHECK((fd.q2 - exact.q2).norm() < 1e-7);
  }
}

TEST_CASE("fd_hessian requires a critical point") {
  const NumericMomentMap map = NumericMomentMap::from_chart(LocalModelChart{});
  CHECK_THROWS_AS(fd_hessian(map, Eigen::Vector4d(0.3, 0.0, 0.1, 0.0)), Error);
}

TEST_CASE("detect_focus on a model and off it") {
  const NumericMomentMap map = NumericMomentMap::from_chart(linear_chart(1.0, 0.25));
  const FocusDetection yes = detect_focus(map, Eigen::Vector4d::Zero());
  CHECK(yes.is_focus());
  NumericMomentMap elliptic;
  elliptic.evaluator = [](const Eigen::Vector4d& x) { return Eigen::Vector2d(x.squaredNorm(), 0.0); };
  const FocusDetection no = detect_focus(elliptic, Eigen::Vector4d::Zero());
  CHECK_FALSE(no.is_focus());
  CHECK_FALSE(no.reason.empty());
}

TEST_CASE("rank-1 restricted Hessian of a suspension") {
  const LocalModelChart chart = linear_chart(Complex(1.0, 0.5), 0.3);
  const auto f3 = [&](const Eigen::Matrix<double, 5, 1>& x) {
    const Eigen::Vector2d f = eval_model(chart, x.head<4>());
    return Eigen::Vector3d(f(0), f(1), x(4));
  };
  const HessianForm h = rank1_restricted_hessian(f3, Eigen::Matrix<double, 5, 1>::Zero());
  const ComplexStructure2 j5 = hessian_to_j(h).plus;
  const ComplexStructure2 j4 = hessian_to_j(oracle::model_hessian(Complex(1.0, 0.5), 0.3)).plus;
  CHECK(std::abs(trace_invariant(j5, j4) - 2.0) < 1e-6);

  const auto rank2 = [](const Eigen::Matrix<double, 5, 1>& x) { return Eigen::Vector3d(x(0), x(1), 0.0); };
  CHECK_THROWS_AS(rank1_restricted_hessian(rank2, Eigen::Matrix<double, 5, 1>::Zero()), Error);
}

TEST_CASE("mu profile of the varying family follows mu_double at each sample") {
  const Rank1Family family = family_file("varying_family.txt");
  for (const ProfileRoute route : {ProfileRoute::Slice4, ProfileRoute::Suspended5}) {
    const Profile p = mu_profile(family, 11, route);
    REQUIRE(p.rows.size() == 11);
    for (const auto& row : p.rows) {
      REQUIRE(row.ok());
      const double expected = mu_double(family.chart_at(1, row.t).chart);
      CHECK(std::abs(row.mu - expected) < 1e-6);
      CHECK(std::abs(row.mu - (0.2 + 0.5 * row.t)) < 1e-6);
    }
    CHECK(product_obstruction_report(p).verdict == ProductVerdict::NotAlmostDirectProduct);
  }
}

TEST_CASE("constant family is product-consistent") {
  const Profile p = mu_profile(family_file("constant_family.txt"), 11);
  const ObstructionReport r = product_obstruction_report(p);
  CHECK(r.verdict == ProductVerdict::ProductConsistent);
  CHECK(r.valid_samples == 11);
  CHECK(r.spread < r.threshold);
}

TEST_CASE("obstruction report evidence and failures") {
  Profile p;
  p.rows.push_back({0.0, trace_from_mu(0.2), 0.2, "ok"});
  CHECK_THROWS_AS(product_obstruction_report(p), Error);
  p.rows.push_back({0.5, NAN, NAN, "NOT_FOCUS"});
  p.rows.push_back({1.0, trace_from_mu(0.7), 0.7, "ok"});
  const ObstructionReport r = product_obstruction_report(p);
  CHECK(r.verdict == ProductVerdict::NotAlmostDirectProduct);
  CHECK(r.valid_samples == 2);
  CHECK(r.spread == doctest::Approx(0.5));
  CHECK(r.low.second == doctest::Approx(0.2));
  CHECK(r.high.second == doctest::Approx(0.7));
}

TEST_CASE("failed samples keep their error code") {
  Rank1Family family = family_file("varying_family.txt");
  // A frame that degenerates at t = 1.
  family.points[1].frame = {Eigen::Matrix4d::Identity(), -Eigen::Matrix4d::Identity()};
  const Profile p = mu_profile(family, 3);
  CHECK(p.rows[0].ok());
  CHECK(p.rows[2].status == "BAD_FRAME");
}

TEST_CASE("Hamiltonian eigenvalues of a focus-focus Hessian form a quadruple") {
  const HessianForm h = oracle::model_hessian(1.0, 0.0);
  const auto q = hamiltonian_eigenvalues(2.0 * h.q1 + 0.5 * h.q2);
  const Complex l = select_eigenvalue(q);
  CHECK(l.real() > 0.0);
  CHECK(std::abs(std::abs(l) - std::abs(Complex(2.0, 0.5))) < 1e-9);
}
