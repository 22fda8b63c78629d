#include "ffsing/fibrlab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "ffsing/error.hpp"

namespace ffsing {

namespace {

template <int N, int M>
struct Derivatives {
  Eigen::Matrix<double, M, N> jac;
  std::array<Eigen::Matrix<double, N, N>, M> hess;
};

template <int N, int M, typename F>
Derivatives<N, M> central_differences(const F& f, const Eigen::Matrix<double, N, 1>& p,
                                      double h) {
  using Vec = Eigen::Matrix<double, N, 1>;
  Derivatives<N, M> d;
  const Eigen::Matrix<double, M, 1> f0 = f(p);
  const auto e = [](int i) { return Vec::Unit(i); };
  for (int i = 0; i < N; ++i) {
    const Eigen::Matrix<double, M, 1> fp = f(p + h * e(i));
    const Eigen::Matrix<double, M, 1> fm = f(p - h * e(i));
    d.jac.col(i) = (fp - fm) / (2.0 * h);
    for (int c = 0; c < M; ++c) d.hess[c](i, i) = (fp(c) - 2.0 * f0(c) + fm(c)) / (h * h);
  }
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const Eigen::Matrix<double, M, 1> v = f(p + h * e(i) + h * e(j)) - f(p + h * e(i) - h * e(j)) -
                                            f(p - h * e(i) + h * e(j)) + f(p - h * e(i) - h * e(j));
      for (int c = 0; c < M; ++c) {
        d.hess[c](i, j) = v(c) / (4.0 * h * h);
        d.hess[c](j, i) = d.hess[c](i, j);
      }
    }
  }
  return d;
}

template <int N, int M, typename F>
Derivatives<N, M> derivatives(const F& f, const Eigen::Matrix<double, N, 1>& p,
                              const FdOptions& opts) {
  const double h = opts.step * std::max(1.0, p.cwiseAbs().maxCoeff());
  Derivatives<N, M> coarse = central_differences<N, M>(f, p, h);
  if (!opts.richardson) return coarse;
  const Derivatives<N, M> fine = central_differences<N, M>(f, p, 0.5 * h);
  coarse.jac = (4.0 * fine.jac - coarse.jac) / 3.0;
  for (int c = 0; c < M; ++c) coarse.hess[c] = (4.0 * fine.hess[c] - coarse.hess[c]) / 3.0;
  return coarse;
}

}  // namespace

Complex evaluate(const Jet2& g, Complex w) {
  const int k = g.order();
  std::vector<Complex> pw(static_cast<std::size_t>(k) + 1, 1.0);
  std::vector<Complex> pwb(static_cast<std::size_t>(k) + 1, 1.0);
  for (int i = 1; i <= k; ++i) {
    pw[i] = pw[i - 1] * w;
    pwb[i] = pwb[i - 1] * std::conj(w);
  }
  Complex r = 0.0;
  for (int d = 0; d <= k; ++d) {
    for (int q = 0; q <= d; ++q) r += g(d - q, q) * pw[d - q] * pwb[q];
  }
  return r;
}

Eigen::Vector2d eval_model(const LocalModelChart& chart, const Eigen::Vector4d& x) {
  const Eigen::Vector4d y = chart.frame * (x - chart.center);
  if (y.norm() > chart.radius) {
    throw Error("OUT_OF_RADIUS", "point lies outside the chart radius");
  }
  const Complex u(y(0), -y(1));
  const Complex v(y(2), y(3));
  const Complex f = evaluate(chart.chart.jet(), u * v);
  return {f.real(), f.imag()};
}

NumericMomentMap NumericMomentMap::from_chart(const LocalModelChart& chart) {
  return {[chart](const Eigen::Vector4d& x) { return eval_model(chart, x); }, {chart}};
}

HessianForm fd_hessian(const NumericMomentMap& map, const Eigen::Vector4d& p,
                       const FdOptions& opts) {
  const auto d = derivatives<4, 2>(map.evaluator, p, opts);
  const double scale = std::max(d.hess[0].cwiseAbs().maxCoeff(), d.hess[1].cwiseAbs().maxCoeff());
  if (d.jac.cwiseAbs().maxCoeff() > opts.critical_tol * std::max(1.0, scale)) {
    throw Error("NOT_CRITICAL", "dF(P) does not vanish");
  }
  return {d.hess[0], d.hess[1]};
}

FocusDetection detect_focus(const NumericMomentMap& map, const Eigen::Vector4d& p,
                            const FdOptions& opts, const HessianToJOptions& jopts) {
  FocusDetection out;
  out.hessian = fd_hessian(map, p, opts);
  try {
    out.structures = hessian_to_j(out.hessian, jopts);
  } catch (const Error& e) {
    if (e.code() != "NOT_FOCUS") throw;
    out.reason = e.what();
  }
  return out;
}

HessianForm rank1_restricted_hessian(
    const std::function<Eigen::Vector3d(const Eigen::Matrix<double, 5, 1>&)>& f3,
    const Eigen::Matrix<double, 5, 1>& p, const FdOptions& opts) {
  const auto d = derivatives<5, 3>(f3, p, opts);
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 5>> svd(d.jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (!(sv(0) > 1e-4) || sv(1) >= 1e-6) {
    const int rank = static_cast<int>((sv.array() > 1e-6).count());
    throw Error("RANK", "dF3(P) has rank " + std::to_string(rank) + ", expected 1");
  }
  const Eigen::Matrix<double, 5, 4> ker = svd.matrixV().rightCols<4>();
  const Eigen::Vector3d img = svd.matrixU().col(0);

  // Drop the standard vector most aligned with the image; keep e1, e2 when
  // that choice is well conditioned.
  int drop = 2;
  if (img(2) * img(2) < 0.1) {
    img.cwiseAbs().maxCoeff(&drop);
  }
  Eigen::Matrix<double, 3, 2> coker;
  int col = 0;
  for (int a = 0; a < 3; ++a) {
    if (a == drop) continue;
    Eigen::Vector3d w = Eigen::Vector3d::Unit(a) - img(a) * img;
    for (int prev = 0; prev < col; ++prev) w -= coker.col(prev).dot(w) * coker.col(prev);
    coker.col(col++) = w.normalized();
  }

  HessianForm out{Eigen::Matrix4d::Zero(), Eigen::Matrix4d::Zero()};
  for (int c = 0; c < 3; ++c) {
    const Eigen::Matrix4d restricted = ker.transpose() * d.hess[c] * ker;
    out.q1 += coker(c, 0) * restricted;
    out.q2 += coker(c, 1) * restricted;
  }
  return out;
}

PolyJet::PolyJet(int order) : order_(order), coeffs_(Jet2::count(order)) {
  if (order < 0 || order > kMaxOrder) throw Error("BAD_ORDER", "jet order out of range");
}

PolyJet PolyJet::constant(const Jet2& jet) {
  PolyJet out(jet.order());
  for (int d = 0; d <= jet.order(); ++d) {
    for (int q = 0; q <= d; ++q) out.at(d - q, q) = {jet(d - q, q)};
  }
  return out;
}

std::vector<Complex>& PolyJet::at(int p, int q) {
  if (p < 0 || q < 0 || p + q > order_) throw Error("INDEX_RANGE", "monomial beyond jet order");
  return coeffs_[Jet2::index(p, q)];
}

const std::vector<Complex>& PolyJet::operator()(int p, int q) const {
  if (p < 0 || q < 0 || p + q > order_) throw Error("INDEX_RANGE", "monomial beyond jet order");
  return coeffs_[Jet2::index(p, q)];
}

Jet2 PolyJet::at_time(double t) const {
  Jet2 out(order_);
  for (int d = 0; d <= order_; ++d) {
    for (int q = 0; q <= d; ++q) out.at(d - q, q) = eval_poly((*this)(d - q, q), t);
  }
  return out;
}

LocalModelChart Rank1Family::chart_at(int point, double t) const {
  const FocusPointSpec& spec = points.at(static_cast<std::size_t>(point));
  if (spec.frame.empty()) throw Error("BAD_FRAME", "focus point has no frame");
  const Eigen::Matrix4d frame = eval_poly(spec.frame, t);
  if (std::abs(frame.determinant()) <= 1e-12) throw Error("BAD_FRAME", "frame is singular");
  return {spec.center, DiffeoJet(spec.chart.at_time(t)), frame, spec.radius};
}

NumericMomentMap Rank1Family::map_at(int point, double t) const {
  return NumericMomentMap::from_chart(chart_at(point, t));
}

std::vector<double> Rank1Family::sample_times(int samples) const {
  if (samples < 1) throw Error("BAD_SAMPLES", "need at least one sample");
  std::vector<double> ts;
  for (int i = 0; i < samples; ++i) {
    ts.push_back(samples == 1 ? t_min : t_min + (t_max - t_min) * i / (samples - 1));
  }
  return ts;
}

namespace {

ComplexStructure2 structure_slice4(const Rank1Family& family, int point, double t,
                                   const FdOptions& opts) {
  const LocalModelChart chart = family.chart_at(point, t);
  const FocusDetection det = detect_focus(NumericMomentMap::from_chart(chart), chart.center, opts);
  if (!det.is_focus()) throw Error("NOT_FOCUS", det.reason);
  return det.structures->plus;
}

ComplexStructure2 structure_suspended5(const Rank1Family& family, int point, double t,
                                       const FdOptions& opts) {
  const Eigen::Vector4d center = family.points.at(static_cast<std::size_t>(point)).center;
  const auto f3 = [&](const Eigen::Matrix<double, 5, 1>& x) {
    const Eigen::Vector2d f = eval_model(family.chart_at(point, x(4)), x.head<4>());
    return Eigen::Vector3d(f(0), f(1), x(4));
  };
  Eigen::Matrix<double, 5, 1> p;
  p << center, t;
  return hessian_to_j(rank1_restricted_hessian(f3, p, opts)).plus;
}

}  // namespace

Profile mu_profile(const Rank1Family& family, int samples, ProfileRoute route,
                   const FdOptions& opts) {
  Profile out;
  for (const double t : family.sample_times(samples)) {
    ProfileRow row;
    row.t = t;
    try {
      const auto j = [&](int point) {
        return route == ProfileRoute::Slice4 ? structure_slice4(family, point, t, opts)
                                             : structure_suspended5(family, point, t, opts);
      };
      row.trace = trace_invariant(j(0), j(1));
      row.mu = mu_from_trace(row.trace);
    } catch (const Error& e) {
      row.status = e.code();
    }
    out.rows.push_back(row);
  }
  return out;
}

const char* to_string(ProductVerdict v) noexcept {
  switch (v) {
    case ProductVerdict::ProductConsistent:
      return "PRODUCT_CONSISTENT";
    case ProductVerdict::NotAlmostDirectProduct:
      return "NOT_ALMOST_DIRECT_PRODUCT";
  }
  return "?";
}

ObstructionReport product_obstruction_report(const Profile& profile, double numeric_tol) {
  const ProfileRow* lo = nullptr;
  const ProfileRow* hi = nullptr;
  int valid = 0;
  for (const auto& row : profile.rows) {
    if (!row.ok()) continue;
    ++valid;
    if (!lo || row.mu < lo->mu) lo = &row;
    if (!hi || row.mu > hi->mu) hi = &row;
  }
  if (valid < 2) throw Error("TOO_FEW_SAMPLES", "need at least two valid samples");
  ObstructionReport r;
  r.spread = hi->mu - lo->mu;
  r.threshold = 10.0 * numeric_tol;
  r.verdict = r.spread > r.threshold ? ProductVerdict::NotAlmostDirectProduct
                                     : ProductVerdict::ProductConsistent;
  r.low = {lo->t, lo->mu};
  r.high = {hi->t, hi->mu};
  r.valid_samples = valid;
  return r;
}

namespace {

Eigen::Matrix4d linearization(const Eigen::Matrix4d& hess) {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega.topRightCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  omega.bottomLeftCorner<2, 2>() = Eigen::Matrix2d::Identity();
  return omega * hess;
}

}  // namespace

std::array<Complex, 4> hamiltonian_eigenvalues(const Eigen::Matrix4d& hess) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(linearization(hess), false);
  std::array<Complex, 4> out;
  for (int i = 0; i < 4; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

Complex generator_branch_eigenvalue(const Eigen::Matrix4d& hess_h, const Eigen::Matrix4d& hess_k) {
  const Eigen::Matrix4d ah = linearization(hess_h);
  const Eigen::Matrix4d ak = linearization(hess_k);
  if ((ah * ak - ak * ah).norm() > 1e-6 * std::max(1e-300, ah.norm() * ak.norm())) {
    throw Error("NOT_COMMUTING", "linearizations of H and K do not commute");
  }
  // Eigenvectors of a generic combination diagonalize both.
  Eigen::EigenSolver<Eigen::Matrix4d> es(ak + 0.37 * ah);
  using Cd = std::complex<double>;
  const Eigen::Matrix4cd ahc = ah.cast<Cd>();
  const Eigen::Matrix4cd akc = ak.cast<Cd>();
  std::optional<Complex> best;
  double scale = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector4cd v = es.eigenvectors().col(i);
    const double vv = v.squaredNorm();
    const Complex kappa(v.dot(akc * v) / vv);
    const Complex lambda(v.dot(ahc * v) / vv);
    scale = std::max(scale, static_cast<double>(std::abs(lambda)));
    if (kappa.imag() <= 1e-9L * std::max<Real>(1.0L, std::abs(kappa))) continue;
    if (!best || lambda.real() > best->real()) best = lambda;
  }
  if (!best) throw Error("NOT_GENERATOR", "K has no +i eigenspace");
  if (best->real() <= 1e-9 * std::max(1.0, scale)) {
    throw Error("NON_GENERIC", "Re lambda = 0: Hamiltonian is not generic");
  }
  return *best;
}

}  // namespace ffsing
