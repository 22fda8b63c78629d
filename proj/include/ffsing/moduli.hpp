#pragma once

// Gauge action of liftable-jet tuples on gluing-map tuples, and what it
// preserves. Orbit dimensions are found by numerical rank; the two-point case
// has a complete normal form.

#include <optional>
#include <utility>
#include <vector>

#include "ffsing/germs.hpp"

namespace ffsing {

inline constexpr double kMuZeroTol = 1e-6;
inline constexpr double kRankThreshold = 1e-8;

/// Gluing maps (phi_{1,2}, ..., phi_{1,n}) of an n-pinched singularity; all
/// entries orientation-preserving and of one common order.
class GluingTuple {
 public:
  explicit GluingTuple(std::vector<DiffeoJet> maps);

  int points() const noexcept { return static_cast<int>(maps_.size()) + 1; }
  int order() const noexcept { return maps_.front().order(); }
  const std::vector<DiffeoJet>& maps() const noexcept { return maps_; }
  const DiffeoJet& map(int i) const { return maps_.at(static_cast<std::size_t>(i - 2)); }

  // phi_{i,j} = phi_{1,i}^{-1} ∘ phi_{1,j}; indices are 1-based.
  DiffeoJet cocycle(int i, int j) const;

 private:
  std::vector<DiffeoJet> maps_;
};

/// (psi_1, ..., psi_n): liftable jets, all z-divisible or all zbar-divisible.
class GaugeTuple {
 public:
  explicit GaugeTuple(std::vector<DiffeoJet> elems, double tol = kDefaultTol);

  static GaugeTuple identity(int n, int order);

  int size() const noexcept { return static_cast<int>(elems_.size()); }
  int order() const noexcept { return elems_.front().order(); }
  Orientation orientation() const noexcept { return orientation_; }
  const std::vector<DiffeoJet>& elems() const noexcept { return elems_; }
  const DiffeoJet& operator[](int i) const { return elems_.at(static_cast<std::size_t>(i)); }

 private:
  std::vector<DiffeoJet> elems_;
  Orientation orientation_;
};

// Componentwise composition eta ∘ eta'.
GaugeTuple compose(const GaugeTuple& eta, const GaugeTuple& eta2);

// Entry i becomes psi_1 ∘ phi_{1,i} ∘ psi_i^{-1}.
GluingTuple gauge_act(const GaugeTuple& eta, const GluingTuple& phi);

struct FirstOrderInvariant {
  std::vector<Complex> mu;  // (mu_2, ..., mu_n)
  bool canonical = false;
};

// mu_i = b_i / conj(a_i) from the linear part of phi_{1,i}.
FirstOrderInvariant first_order_invariants(const GluingTuple& phi);

// Orbit representative under mu -> e^{i theta} mu and mu -> conj(mu): the
// first entry above tol is rotated onto the positive real axis, then the
// lexicographically smaller of the tuple and its conjugate is kept.
FirstOrderInvariant canonicalize_invariant(const FirstOrderInvariant& mu,
                                           double tol = kDefaultTol);

// |b / a| for an orientation-preserving jet.
double mu_double(const DiffeoJet& phi);

struct LinearNormalization {
  GaugeTuple gauge;  // (c z, c a z)
  DiffeoJet normalized;
  double mu;
};

LinearNormalization normalize_linear_part(const DiffeoJet& phi);

struct DoublePinchedNormalization {
  DiffeoJet psi1;
  DiffeoJet psi2;
  double mu;
  double residual;  // sup |psi1 ∘ phi ∘ psi2^{-1} - (z + mu zbar)|
};

// Liftable (psi1, psi2) with psi1 ∘ phi ∘ psi2^{-1} = z + mu zbar.
// Throws MU_ZERO when mu <= mu_tol.
DoublePinchedNormalization normalize_double_pinched(const DiffeoJet& phi,
                                                    double mu_tol = kMuZeroTol);

enum class Equivalence { Equivalent, NotEquivalent, UndecidedMuZero };

const char* to_string(Equivalence e) noexcept;

struct EquivalenceResult {
  Equivalence verdict;
  double mu;
  double mu_other;
  // phi_other = witness.first ∘ phi ∘ witness.second^{-1} for Equivalent.
  std::optional<std::pair<DiffeoJet, DiffeoJet>> witness;
  double residual = 0.0;
};

EquivalenceResult equivalent_double_pinched(const DiffeoJet& phi,
                                            const DiffeoJet& phi_other,
                                            double tol = kDefaultTol,
                                            double mu_tol = kMuZeroTol);

// c z ∘ phi ∘ (z / c), computed by composition.
DiffeoJet conj_by_scaling(const DiffeoJet& phi, double c);

// Liftable psi = x u - y v + i f with Im psi = f, where f = x v + y u.
// f must be real-valued (c[q,p] = conj c[p,q]) with f(0) = 0 and df(0) != 0.
DiffeoJet liftable_with_imag_part(const Jet2& f, double tol = kDefaultTol);

// Im of a jet as a real-valued jet: (f - conj f) / 2i.
Jet2 imag_part(const Jet2& f);

struct Symplectization {
  GluingTuple tuple;
  GaugeTuple witness;  // tuple = gauge_act(witness, input)
  double residual;     // sup |Im phi~_{1,i} - Im z|
};

Symplectization symplectize_gluing(const GluingTuple& phi);

struct OrbitRank {
  int orbit_dim = 0;
  int stab_dim = 0;
  int codim = 0;
  int group_dim = 0;    // n k (k + 1)
  int ambient_dim = 0;  // (n - 1) k (k + 3)
  // sigma_r / sigma_{r+1} at the detected rank r; +inf when r is full.
  double gap = 0.0;
  std::vector<double> singular_values;
};

// Numerical rank of the infinitesimal gauge action at phi.
OrbitRank orbit_tangent_rank(const GluingTuple& phi,
                             double rel_threshold = kRankThreshold);

// Closed-form stabilizer and codimension of generic orbits.
int expected_stab_dim(int n, int k);
int expected_codim(int n, int k);

}  // namespace ffsing
