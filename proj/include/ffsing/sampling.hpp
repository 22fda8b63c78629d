#pragma once

// Seeded generators of random jets and of the tuples built from them.

#include <cstdint>
#include <random>

#include "ffsing/moduli.hpp"

namespace ffsing {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() noexcept { return rng_; }

  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive
  Complex normal();                 // standard complex normal
  Complex phase();                  // uniform on the unit circle

  // Random coefficients in degrees [min_degree, order]; degree d is scaled by
  // scale * decay^(d - 1).
  Jet2 jet(int order, int min_degree = 0, double scale = 1.0, double decay = 0.5);

  // Orientation-preserving jet with |b / a| = mu and |a| in [0.5, 2].
  DiffeoJet diffeo_with_mu(int order, double mu, double higher_scale = 0.5);
  // mu drawn uniformly from [0, 0.9].
  DiffeoJet diffeo(int order, double higher_scale = 0.5);

  // psi = z h (DivisibleByZ) or zbar h (DivisibleByZbar), |h(0)| in [0.5, 2].
  DiffeoJet liftable(int order, LiftKind kind, double higher_scale = 0.5);

  // Contains some z^p and some zbar^q monomial; still a diffeomorphism jet.
  DiffeoJet not_liftable(int order);

  GluingTuple gluing_tuple(int n, int order, double higher_scale = 0.5);
  // Generic first-order part: every mu_i nonzero and pairwise distinct.
  GluingTuple linear_tuple(int n, int order);
  GaugeTuple gauge_tuple(int n, int order, LiftKind kind = LiftKind::DivisibleByZ,
                         double higher_scale = 0.5);

 private:
  std::mt19937_64 rng_;
};

}  // namespace ffsing
