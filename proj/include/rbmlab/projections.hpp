#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "rbmlab/distributions.hpp"
#include "rbmlab/statespace.hpp"

namespace rbmlab {

/// Kullback-Leibler divergence in bits. Terms with p(x) = 0 contribute 0;
/// the result is +infinity when supp(p) is not contained in supp(q). The
/// sum is clamped at zero so near-equal inputs cannot round below it.
inline double kl_bits(const Distribution& p, const Distribution& q) {
  if (p.n != q.n) throw std::invalid_argument("dimension mismatch");
  double d = 0.0;
  for (std::size_t v = 0; v < p.probs.size(); ++v) {
    const double pv = p.probs[v];
    if (pv <= 0.0) continue;
    const double qv = q.probs[v];
    if (qv <= 0.0) return std::numeric_limits<double>::infinity();
    d += pv * std::log2(pv / qv);
  }
  return std::max(d, 0.0);
}

/// rI-projection of p onto a model, together with the divergence it attains.
struct ProjectionResult {
  Distribution projection;
  double divergence_bits = 0.0;
};

/// Projection onto the independence model of a face: the product of the
/// single-coordinate marginals of p over the face's free coordinates.
/// Requires supp(p) inside the face. The divergence is the multiinformation.
inline ProjectionResult project_independence(const Distribution& p,
                                             const Face& support) {
  if (p.n != support.n) throw std::invalid_argument("dimension mismatch");
  for (state_t v = 0; v < cube_size(p.n); ++v)
    if (p.probs[v] > 0.0 && !support.contains(v))
      throw std::invalid_argument("distribution not supported on the face");
  const auto coords = support.free_coords();
  std::vector<double> theta(coords.size(), 0.0);
  for (state_t v : support.members())
    for (std::size_t j = 0; j < coords.size(); ++j)
      if (v >> coords[j] & 1) theta[j] += p.probs[v];
  for (auto& t : theta) t = std::min(1.0, std::max(0.0, t));
  Distribution proj = densify(ProductDistribution(support, std::move(theta)));
  const double d = kl_bits(p, proj);
  return {std::move(proj), d};
}

inline ProjectionResult project_independence(const Distribution& p) {
  return project_independence(p, Face::full_cube(p.n));
}

/// Projection onto the partition model of xi: constant value p(X_i)/|X_i| on
/// each block.
inline ProjectionResult project_partition(const Distribution& p,
                                          const Partition& xi) {
  if (p.n != xi.n) throw std::invalid_argument("dimension mismatch");
  if (!xi.covers_all)
    throw std::invalid_argument("partition model needs a covering partition");
  std::vector<double> proj(cube_size(p.n), 0.0);
  for (const auto& block : xi.blocks) {
    double mass = 0.0;
    for (state_t v : block) mass += p.probs[v];
    const double value = mass / double(block.size());
    for (state_t v : block) proj[v] = value;
  }
  Distribution q(p.n, std::move(proj));
  const double d = kl_bits(p, q);
  return {std::move(q), d};
}

/// Projection onto the mixture of the independence models of the (cubical)
/// blocks of xi: project each block conditional onto the block's
/// independence model and scale by the block mass.
inline ProjectionResult project_disjoint_mixture(const Distribution& p,
                                                 const Partition& xi) {
  if (p.n != xi.n) throw std::invalid_argument("dimension mismatch");
  if (!xi.covers_all)
    throw std::invalid_argument("mixture model needs a covering partition");
  if (!xi.is_cubical)
    throw std::invalid_argument("mixture model needs cubical blocks");
  const auto parts = block_conditionals(p, xi);
  std::vector<double> proj(cube_size(p.n), 0.0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto block_proj =
        project_independence(parts[i].conditional, xi.faces[i]);
    for (state_t v : xi.blocks[i])
      proj[v] = parts[i].mass * block_proj.projection.probs[v];
  }
  Distribution q(p.n, std::move(proj));
  const double d = kl_bits(p, q);
  return {std::move(q), d};
}

/// The model classes with closed-form maximal divergence.
struct ModelClass {
  enum class Kind { independence, partition_model, disjoint_product_mixture };
  Kind kind = Kind::independence;
  Face support;         // independence only
  Partition partition;  // partition_model / disjoint_product_mixture

  static ModelClass independence(const Face& f) {
    ModelClass m;
    m.kind = Kind::independence;
    m.support = f;
    return m;
  }
  static ModelClass independence(int n) {
    return independence(Face::full_cube(n));
  }
  static ModelClass partition_model(Partition xi) {
    if (!xi.covers_all)
      throw std::invalid_argument("partition model needs a covering partition");
    ModelClass m;
    m.kind = Kind::partition_model;
    m.partition = std::move(xi);
    return m;
  }
  static ModelClass disjoint_product_mixture(Partition xi) {
    if (!xi.covers_all || !xi.is_cubical)
      throw std::invalid_argument(
          "mixture model needs a covering cubical partition");
    ModelClass m;
    m.kind = Kind::disjoint_product_mixture;
    m.partition = std::move(xi);
    return m;
  }
};

/// Projection dispatcher. For the independence kind the input must be
/// supported on the model's face.
inline ProjectionResult project(const Distribution& p, const ModelClass& m) {
  switch (m.kind) {
    case ModelClass::Kind::independence:
      return project_independence(p, m.support);
    case ModelClass::Kind::partition_model:
      return project_partition(p, m.partition);
    case ModelClass::Kind::disjoint_product_mixture:
      return project_disjoint_mixture(p, m.partition);
  }
  throw std::logic_error("unreachable");
}

struct MaxDivergence {
  double value_bits = 0.0;
  Distribution witness;
};

/// Maximal KL divergence to the model and a distribution attaining it.
///   independence on k free coordinates: max(k-1, 0), witness the half-half
///     pair of complementary states of the face;
///   partition model: max_i log2 |X_i|, witness a Dirac delta in a largest
///     block;
///   disjoint product mixture: max_i max(log2 |X_i| - 1, 0), witness the
///     complementary pair inside a largest block.
/// For a face-restricted independence model the maximum is taken over
/// distributions supported on the face (anything else diverges to infinity).
inline MaxDivergence max_divergence(const ModelClass& m) {
  switch (m.kind) {
    case ModelClass::Kind::independence: {
      const Face& f = m.support;
      const state_t lo = f.anchor();
      const state_t hi = f.anchor() | f.free_mask();
      std::vector<double> w(cube_size(f.n), 0.0);
      w[lo] += 0.5;
      w[hi] += 0.5;
      const double value = std::max(0, f.dim() - 1);
      return {value, Distribution(f.n, std::move(w))};
    }
    case ModelClass::Kind::partition_model: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < m.partition.blocks.size(); ++i)
        if (m.partition.blocks[i].size() > m.partition.blocks[best].size())
          best = i;
      const auto& block = m.partition.blocks[best];
      const double value = std::log2(double(block.size()));
      return {value, Distribution::delta(m.partition.n, block.front())};
    }
    case ModelClass::Kind::disjoint_product_mixture: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < m.partition.faces.size(); ++i)
        if (m.partition.faces[i].dim() > m.partition.faces[best].dim())
          best = i;
      const Face& f = m.partition.faces[best];
      std::vector<double> w(cube_size(f.n), 0.0);
      w[f.anchor()] += 0.5;
      w[f.anchor() | f.free_mask()] += 0.5;
      const double value = std::max(0, f.dim() - 1);
      return {value, Distribution(f.n, std::move(w))};
    }
  }
  throw std::logic_error("unreachable");
}

/// Exhaustive search for the cubical partition with at most max_blocks
/// blocks minimizing the partition-model divergence from p. Ties keep the
/// first partition in canonical enumeration order.
inline std::pair<Partition, ProjectionResult> best_partition_projection(
    const Distribution& p, int max_blocks) {
  check_dim(p.n, max_enumeration_dim);
  bool found = false;
  Partition best;
  ProjectionResult best_result;
  enumerate_cubical_partitions(p.n, max_blocks, [&](const Partition& xi) {
    ProjectionResult r = project_partition(p, xi);
    if (!found || r.divergence_bits < best_result.divergence_bits) {
      found = true;
      best = xi;
      best_result = std::move(r);
    }
    return true;
  });
  if (!found) throw std::logic_error("no partition found");
  return {std::move(best), std::move(best_result)};
}

}  // namespace rbmlab
