#include "ffsing/sampling.hpp"

#include <cmath>
#include <numbers>

#include "ffsing/error.hpp"

namespace ffsing {

double Sampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

int Sampler::uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

Complex Sampler::normal() {
  std::normal_distribution<double> n;
  const double re = n(rng_);
  return {re, n(rng_)};
}

Complex Sampler::phase() {
  return std::polar<Real>(1.0L, static_cast<Real>(uniform(0.0, 2.0 * std::numbers::pi)));
}

Jet2 Sampler::jet(int order, int min_degree, double scale, double decay) {
  Jet2 out(order);
  for (int d = std::max(min_degree, 0); d <= order; ++d) {
    const double s = scale * std::pow(decay, d - 1);
    for (int q = 0; q <= d; ++q) out.at(d - q, q) = static_cast<Real>(s) * normal();
  }
  return out;
}

DiffeoJet Sampler::diffeo_with_mu(int order, double mu, double higher_scale) {
  if (!(mu >= 0.0 && mu < 1.0)) throw Error("BAD_MU", "mu must lie in [0, 1)");
  const Complex a = static_cast<Real>(uniform(0.5, 2.0)) * phase();
  const Complex b = static_cast<Real>(mu) * std::conj(a) * phase();
  Jet2 f = jet(order, 2, higher_scale);
  f.at(1, 0) = a;
  f.at(0, 1) = b;
  return DiffeoJet(std::move(f));
}

DiffeoJet Sampler::diffeo(int order, double higher_scale) {
  const double mu = uniform(0.0, 0.9);
  return diffeo_with_mu(order, mu, higher_scale);
}

DiffeoJet Sampler::liftable(int order, LiftKind kind, double higher_scale) {
  if (kind == LiftKind::NotLiftable) throw Error("NOT_LIFTABLE", "liftable kind required");
  Jet2 h = jet(order - 1, 1, higher_scale);
  h.at(0, 0) = static_cast<Real>(uniform(0.5, 2.0)) * phase();
  const Jet2 factor = kind == LiftKind::DivisibleByZ ? Jet2::z(order) : Jet2::zbar(order);
  return DiffeoJet(factor * h.resized(order));
}

DiffeoJet Sampler::not_liftable(int order) {
  if (order < 2) {
    // a z + b zbar with both nonzero.
    const Complex a = static_cast<Real>(uniform(1.0, 2.0)) * phase();
    return DiffeoJet(Jet2::linear(order, a, static_cast<Real>(uniform(0.1, 0.9)) * std::abs(a) * phase()));
  }
  DiffeoJet base = diffeo(order);
  Jet2 f = base.jet();
  // Force a pure-z and a pure-zbar monomial somewhere in degrees >= 2.
  const int dz = uniform_int(2, order);
  const int dzb = uniform_int(2, order);
  f.at(dz, 0) += static_cast<Real>(uniform(0.2, 1.0)) * phase();
  f.at(0, dzb) += static_cast<Real>(uniform(0.2, 1.0)) * phase();
  return DiffeoJet(std::move(f));
}

GluingTuple Sampler::gluing_tuple(int n, int order, double higher_scale) {
  std::vector<DiffeoJet> maps;
  for (int i = 2; i <= n; ++i) maps.push_back(diffeo_with_mu(order, uniform(0.05, 0.9), higher_scale));
  return GluingTuple(std::move(maps));
}

GluingTuple Sampler::linear_tuple(int n, int order) {
  std::vector<DiffeoJet> maps;
  for (int i = 2; i <= n; ++i) {
    const Complex a = static_cast<Real>(uniform(0.5, 2.0)) * phase();
    const Complex b = static_cast<Real>(uniform(0.1, 0.9)) * std::conj(a) * phase();
    maps.emplace_back(Jet2::linear(order, a, b));
  }
  return GluingTuple(std::move(maps));
}

GaugeTuple Sampler::gauge_tuple(int n, int order, LiftKind kind, double higher_scale) {
  std::vector<DiffeoJet> elems;
  for (int i = 0; i < n; ++i) elems.push_back(liftable(order, kind, higher_scale));
  return GaugeTuple(std::move(elems));
}

}  // namespace ffsing
