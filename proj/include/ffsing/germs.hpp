#pragma once

// Diffeomorphism jets of the plane fixing the origin, and the liftable
// subgroup: jets that lift through the model fibration (u, v) -> uv.

#include <optional>

#include "ffsing/jet.hpp"

namespace ffsing {

enum class Orientation { Preserving, Reversing };

/// An invertible Jet2 with zero constant term. Caches the linear part
/// a z + b zbar; orientation is the sign of |a|^2 - |b|^2.
class DiffeoJet {
 public:
  // Throws NONZERO_CONSTANT or DEGENERATE_LINEAR_PART.
  explicit DiffeoJet(Jet2 jet, double tol = kDefaultTol);

  static DiffeoJet identity(int order) { return DiffeoJet(Jet2::z(order)); }

  const Jet2& jet() const noexcept { return jet_; }
  int order() const noexcept { return jet_.order(); }
  Complex a() const noexcept { return a_; }
  Complex b() const noexcept { return b_; }
  Orientation orientation() const noexcept {
    return std::norm(a_) > std::norm(b_) ? Orientation::Preserving
                                         : Orientation::Reversing;
  }
  bool preserves_orientation() const noexcept {
    return orientation() == Orientation::Preserving;
  }

  DiffeoJet inverse() const { return DiffeoJet(invert(jet_)); }

 private:
  Jet2 jet_;
  Complex a_;
  Complex b_;
};

// this ∘ other
DiffeoJet compose(const DiffeoJet& f, const DiffeoJet& g);

enum class LiftKind { DivisibleByZ, DivisibleByZbar, NotLiftable };

const char* to_string(LiftKind kind) noexcept;

struct LiftClass {
  LiftKind kind = LiftKind::NotLiftable;
  // psi = z * h or psi = zbar * h; h has order k-1 and h(0) != 0.
  std::optional<Jet2> cofactor;
  // Both divisibility patterns held; DivisibleByZ was reported.
  bool ambiguous = false;

  bool liftable() const noexcept { return kind != LiftKind::NotLiftable; }
};

// Coefficients below tol * (max coefficient magnitude) count as zero.
LiftClass classify_liftable(const DiffeoJet& psi, double tol = kDefaultTol);

/// Lift Psi = (first, second) of a liftable jet, so that
/// first * second = psi(uv, ubar vbar) up to order 2k.
struct LiftPair {
  Jet4 first;
  Jet4 second;
};

// (u, v h(uv)) for psi = z h; (ubar, vbar h(uv)) for psi = zbar h, which is
// the z-divisible lift precomposed with the conjugation lift (ubar, vbar).
LiftPair lift_to_model(const DiffeoJet& psi, double tol = kDefaultTol);

// Sup-norm of first * second - psi(uv, ubar vbar) over all Jet4 coefficients.
double verify_lift(const DiffeoJet& psi, const LiftPair& lift);

}  // namespace ffsing
