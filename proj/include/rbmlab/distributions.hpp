#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rbmlab/random.hpp"
#include "rbmlab/statespace.hpp"

namespace rbmlab {

inline constexpr double normalization_tol = 1e-12;

/// Dense probability vector over {0,1}^n, indexed by state.
struct Distribution {
  int n = 0;
  std::vector<double> probs;

  Distribution() = default;
  Distribution(int dim_n, std::vector<double> p)
      : n(dim_n), probs(std::move(p)) {
    check_dim(n);
    if (probs.size() != cube_size(n))
      throw std::invalid_argument("probability vector has wrong length");
  }

  static Distribution uniform(int n) {
    check_dim(n);
    return Distribution(
        n, std::vector<double>(cube_size(n), 1.0 / double(cube_size(n))));
  }

  static Distribution delta(int n, state_t x) {
    check_dim(n);
    if (x >= cube_size(n)) throw std::invalid_argument("state out of range");
    std::vector<double> p(cube_size(n), 0.0);
    p[x] = 1.0;
    return Distribution(n, std::move(p));
  }

  double operator[](state_t v) const { return probs[v]; }
  std::size_t size() const { return probs.size(); }

  double total_mass() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
  }

  void validate(double tol = normalization_tol) const {
    for (double p : probs)
      if (!(p >= 0.0)) throw std::invalid_argument("negative probability");
    if (std::abs(total_mass() - 1.0) > tol)
      throw std::invalid_argument("probabilities do not sum to 1");
  }
};

inline double max_abs_diff(const Distribution& a, const Distribution& b) {
  if (a.n != b.n) throw std::invalid_argument("dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i)
    worst = std::max(worst, std::abs(a.probs[i] - b.probs[i]));
  return worst;
}

/// Entropy in bits; 0 log 0 = 0.
inline double entropy_bits(const Distribution& p) {
  double h = 0.0;
  for (double v : p.probs)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

/// Product of Bernoulli coordinates on a face: theta[j] is the probability
/// that the j-th free coordinate (ascending order) equals 1. States outside
/// the support face have probability zero.
struct ProductDistribution {
  Face support;
  std::vector<double> theta;

  ProductDistribution() = default;
  ProductDistribution(Face f, std::vector<double> t)
      : support(f), theta(std::move(t)) {
    if (theta.size() != static_cast<std::size_t>(support.dim()))
      throw std::invalid_argument("theta size must equal face dimension");
    for (double th : theta)
      if (!(th >= 0.0 && th <= 1.0))
        throw std::invalid_argument("theta outside [0,1]");
  }

  static ProductDistribution uniform_on(const Face& f) {
    return ProductDistribution(f, std::vector<double>(f.dim(), 0.5));
  }
};

/// Convex combination of product distributions on pairwise disjoint cubical
/// supports (the class realized by the mixture construction).
struct MixtureOfProducts {
  int n = 0;
  struct Component {
    double weight = 0.0;
    ProductDistribution product;
  };
  std::vector<Component> components;

  void validate(double tol = 1e-9) const {
    if (components.empty()) throw std::invalid_argument("empty mixture");
    double total = 0.0;
    for (const auto& c : components) {
      if (c.product.support.n != n)
        throw std::invalid_argument("component dimension mismatch");
      if (!(c.weight >= 0.0)) throw std::invalid_argument("negative weight");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > tol)
      throw std::invalid_argument("mixture weights do not sum to 1");
    for (std::size_t i = 0; i < components.size(); ++i)
      for (std::size_t j = i + 1; j < components.size(); ++j)
        if (!components[i].product.support.disjoint_with(
                components[j].product.support))
          throw std::invalid_argument("component supports overlap");
  }
};

inline Distribution densify(const ProductDistribution& p) {
  const Face& f = p.support;
  std::vector<double> dense(cube_size(f.n), 0.0);
  const auto coords = f.free_coords();
  for (state_t v : f.members()) {
    double prob = 1.0;
    for (std::size_t j = 0; j < coords.size(); ++j)
      prob *= (v >> coords[j] & 1) ? p.theta[j] : 1.0 - p.theta[j];
    dense[v] = prob;
  }
  return Distribution(f.n, std::move(dense));
}

inline Distribution densify(const MixtureOfProducts& mix) {
  mix.validate();
  std::vector<double> dense(cube_size(mix.n), 0.0);
  for (const auto& c : mix.components) {
    const Distribution part = densify(c.product);
    for (std::size_t v = 0; v < dense.size(); ++v)
      dense[v] += c.weight * part.probs[v];
  }
  return Distribution(mix.n, std::move(dense));
}

/// Uniform distribution on the even-parity states; mass 2^-(n-1) each.
inline Distribution parity_distribution(int n) {
  check_dim(n);
  std::vector<double> p(cube_size(n), 0.0);
  const double mass = 1.0 / double(cube_size(n - 1));
  for (state_t v = 0; v < cube_size(n); ++v)
    if (std::popcount(v) % 2 == 0) p[v] = mass;
  return Distribution(n, std::move(p));
}

/// Flat-Dirichlet draw on the full simplex; deterministic per seed.
inline Distribution random_distribution(int n, std::uint64_t seed) {
  check_dim(n);
  Rng rng(seed);
  return Distribution(n, rng.dirichlet_flat(cube_size(n)));
}

/// Random mixture over the blocks of a cubical (possibly partial) partition:
/// thetas uniform in [0,1], weights flat-Dirichlet. Deterministic per seed.
inline MixtureOfProducts random_mixture(const Partition& xi,
                                        std::uint64_t seed) {
  if (!xi.is_cubical)
    throw std::invalid_argument("mixture requires cubical blocks");
  Rng rng(seed);
  MixtureOfProducts mix;
  mix.n = xi.n;
  const auto weights = rng.dirichlet_flat(xi.faces.size());
  for (std::size_t i = 0; i < xi.faces.size(); ++i) {
    std::vector<double> theta(xi.faces[i].dim());
    for (auto& t : theta) t = rng.uniform();
    mix.components.push_back(
        {weights[i], ProductDistribution(xi.faces[i], std::move(theta))});
  }
  mix.validate();
  return mix;
}

/// Mass and conditional distribution of p on one partition block.
struct BlockConditional {
  double mass = 0.0;
  Distribution conditional;
};

/// Decomposes p along the blocks of xi: p(x) = mass_i * conditional_i(x) on
/// block i. Zero-mass blocks get the uniform conditional so downstream
/// projections stay total.
inline std::vector<BlockConditional> block_conditionals(const Distribution& p,
                                                        const Partition& xi) {
  if (p.n != xi.n) throw std::invalid_argument("dimension mismatch");
  std::vector<BlockConditional> out;
  out.reserve(xi.blocks.size());
  for (const auto& block : xi.blocks) {
    double mass = 0.0;
    for (state_t v : block) mass += p.probs[v];
    std::vector<double> cond(cube_size(p.n), 0.0);
    if (mass > 0.0) {
      for (state_t v : block) cond[v] = p.probs[v] / mass;
    } else {
      for (state_t v : block) cond[v] = 1.0 / double(block.size());
    }
    out.push_back({mass, Distribution(p.n, std::move(cond))});
  }
  return out;
}

}  // namespace rbmlab
