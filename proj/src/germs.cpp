#include "ffsing/germs.hpp"

#include <algorithm>
#include <cmath>

#include "ffsing/error.hpp"

namespace ffsing {

DiffeoJet::DiffeoJet(Jet2 jet, double tol) : jet_(std::move(jet)) {
  const double scale = std::max(1.0, jet_.max_abs());
  if (std::abs(jet_.constant_term()) > tol * scale) {
    throw Error("NONZERO_CONSTANT", "diffeomorphism jet must fix the origin");
  }
  jet_.at(0, 0) = 0.0;
  if (jet_.order() < 1) {
    throw Error("BAD_ORDER", "diffeomorphism jets need order >= 1");
  }
  a_ = jet_(1, 0);
  b_ = jet_(0, 1);
  const double mag = std::max(std::norm(a_), std::norm(b_));
  if (mag == 0.0 || std::abs(std::norm(a_) - std::norm(b_)) <= tol * mag) {
    throw Error("DEGENERATE_LINEAR_PART",
                "linear part a z + b zbar has |a| = |b|");
  }
}

DiffeoJet compose(const DiffeoJet& f, const DiffeoJet& g) {
  return DiffeoJet(compose(f.jet(), g.jet()));
}

const char* to_string(LiftKind kind) noexcept {
  switch (kind) {
    case LiftKind::DivisibleByZ:
      return "DIVISIBLE_BY_Z";
    case LiftKind::DivisibleByZbar:
      return "DIVISIBLE_BY_ZBAR";
    case LiftKind::NotLiftable:
      return "NOT_LIFTABLE";
  }
  return "?";
}

LiftClass classify_liftable(const DiffeoJet& psi, double tol) {
  const Jet2& f = psi.jet();
  const int k = f.order();
  const double zero = tol * std::max(f.max_abs(), 1e-300);

  bool no_pure_zbar = true;  // divisible by z
  bool no_pure_z = true;     // divisible by zbar
  for (int d = 1; d <= k; ++d) {
    if (std::abs(f(0, d)) > zero) no_pure_zbar = false;
    if (std::abs(f(d, 0)) > zero) no_pure_z = false;
  }

  LiftClass out;
  if (!no_pure_zbar && !no_pure_z) return out;

  out.ambiguous = no_pure_zbar && no_pure_z;
  Jet2 h(k - 1);
  if (no_pure_zbar) {
    out.kind = LiftKind::DivisibleByZ;
    for (int d = 1; d <= k; ++d) {
      for (int q = 0; q < d; ++q) h.at(d - q - 1, q) = f(d - q, q);
    }
  } else {
    out.kind = LiftKind::DivisibleByZbar;
    for (int d = 1; d <= k; ++d) {
      for (int q = 1; q <= d; ++q) h.at(d - q, q - 1) = f(d - q, q);
    }
  }
  out.cofactor = std::move(h);
  return out;
}

LiftPair lift_to_model(const DiffeoJet& psi, double tol) {
  const LiftClass cls = classify_liftable(psi, tol);
  if (!cls.liftable()) {
    throw Error("NOT_LIFTABLE", "jet is divisible by neither z nor zbar");
  }
  const int order4 = 2 * psi.order();
  const Jet4 h_uv = substitute_uv(cls.cofactor->resized(psi.order()));

  LiftPair lift;
  if (cls.kind == LiftKind::DivisibleByZ) {
    lift.first = Jet4::monomial(order4, {1, 0, 0, 0});
    lift.second = times_monomial(h_uv, {0, 0, 1, 0}, order4);
  } else {
    lift.first = Jet4::monomial(order4, {0, 1, 0, 0});
    lift.second = times_monomial(h_uv, {0, 0, 0, 1}, order4);
  }
  return lift;
}

double verify_lift(const DiffeoJet& psi, const LiftPair& lift) {
  const int order4 = 2 * psi.order();
  if (lift.first.order() != order4 || lift.second.order() != order4) {
    throw Error("ORDER_MISMATCH", "lift order must be twice the jet order");
  }
  return (lift.first * lift.second - substitute_uv(psi.jet())).max_abs();
}

}  // namespace ffsing
