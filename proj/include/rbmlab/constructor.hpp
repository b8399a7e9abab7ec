#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rbmlab/distributions.hpp"
#include "rbmlab/rbm.hpp"
#include "rbmlab/statespace.hpp"

namespace rbmlab {

/// One hidden unit to append: place mixture weight alpha on a product
/// distribution over `face` with natural parameters beta (one per free
/// coordinate). sharpness controls how hard the unit saturates off the face;
/// the realized distribution converges to the exact mixture as it grows.
struct AppendSpec {
  Face face;
  std::vector<double> beta;
  double alpha = 0.5;
  double sharpness = 30.0;
};

namespace detail {

inline constexpr double lambda_c_cap = 500.0;
inline constexpr double logit_cap = 40.0;
inline constexpr double product_fit_tol = 1e-8;

inline double clamp_logit(double theta) {
  if (theta <= 0.0) return -logit_cap;
  if (theta >= 1.0) return logit_cap;
  return std::clamp(std::log(theta / (1.0 - theta)), -logit_cap, logit_cap);
}

/// Affine fit of the current log marginal on a face: log p(v) ~ c0 + eta.v
/// over the free coordinates. The centered free coordinates are orthogonal
/// over a full face, so the least-squares solution is a difference of
/// conditional means. Returns the max-abs residual of the fit.
struct FaceFit {
  double c0 = 0.0;              // log K
  std::vector<double> eta;      // per free coordinate
  double residual = 0.0;
};

inline FaceFit fit_face_log_probs(const std::vector<double>& log_probs,
                                  const Face& face) {
  const auto members = face.members();
  const auto coords = face.free_coords();
  FaceFit fit;
  fit.eta.assign(coords.size(), 0.0);
  double mean = 0.0;
  for (state_t v : members) mean += log_probs[v];
  mean /= double(members.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    double mean1 = 0.0;
    for (state_t v : members)
      if (v >> coords[j] & 1) mean1 += log_probs[v];
    mean1 /= double(members.size() / 2);
    fit.eta[j] = 2.0 * (mean1 - mean);  // mean1 - mean0
  }
  fit.c0 = mean;
  for (double e : fit.eta) fit.c0 -= 0.5 * e;
  for (state_t v : members) {
    double predicted = fit.c0;
    for (std::size_t j = 0; j < coords.size(); ++j)
      if (v >> coords[j] & 1) predicted += fit.eta[j];
    fit.residual = std::max(fit.residual, std::abs(log_probs[v] - predicted));
  }
  return fit;
}

/// Core append step. Appends one hidden unit whose weights pin the
/// face (cost `sharpness` per mismatched fixed coordinate) and whose free
/// components shift the face restriction from its current natural parameters
/// eta to beta; the bias places mixture weight alpha on the face.
inline RbmParams append_product_unit(const RbmParams& params, const Face& face,
                                     const std::vector<double>& beta,
                                     double alpha, double sharpness,
                                     bool enforce_product_precondition) {
  if (face.n != params.n) throw std::invalid_argument("dimension mismatch");
  if (beta.size() != static_cast<std::size_t>(face.dim()))
    throw std::invalid_argument("beta size must equal face dimension");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must be in [0,1]");
  if (!(sharpness > 0.0))
    throw std::invalid_argument("sharpness must be positive");
  if (params.m >= max_hidden_units)
    throw std::invalid_argument("hidden unit budget exhausted");

  const auto log_probs = visible_log_probs(params);
  const FaceFit fit = fit_face_log_probs(log_probs, face);
  if (enforce_product_precondition && fit.residual >= product_fit_tol)
    throw std::invalid_argument(
        "current marginal restricted to the face is not a product "
        "distribution");

  const auto coords = face.free_coords();
  double log_z_beta;  // log sum over face members of exp(beta . v)
  {
    const auto members = face.members();
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> dots(members.size(), 0.0);
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (std::size_t j = 0; j < coords.size(); ++j)
        if (members[k] >> coords[j] & 1) dots[k] += beta[j];
      peak = std::max(peak, dots[k]);
    }
    double z = 0.0;
    for (double d : dots) z += std::exp(d - peak);
    log_z_beta = peak + std::log(z);
  }

  double lambda_c = std::log(alpha) - std::log1p(-alpha) - fit.c0 - log_z_beta;
  lambda_c = std::clamp(lambda_c, -lambda_c_cap, lambda_c_cap);

  // Off the face the unit input is -penalty * mismatches + lambda.v +
  // lambda_c. The bias terms can be large and positive (lambda_c grows with
  // the saturation of the current marginal on the face), so the penalty is
  // raised until every off-face state sits at least `sharpness` below zero.
  double lambda_plus = 0.0;
  std::vector<double> lambda(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    lambda[j] = beta[j] - fit.eta[j];
    lambda_plus += std::max(0.0, lambda[j]);
  }
  const double penalty = sharpness + std::max(0.0, lambda_c + lambda_plus);

  RbmParams out = params;
  out.m += 1;
  out.W.resize(std::size_t(out.m) * out.n, 0.0);
  out.C.resize(out.m, 0.0);
  double* row = out.W.data() + std::size_t(params.m) * out.n;
  for (int i = 0; i < out.n; ++i) {
    if (face.fixed_mask >> i & 1)
      row[i] = (face.fixed_values >> i & 1) ? penalty : -penalty;
    else
      row[i] = 0.0;
  }
  for (std::size_t j = 0; j < coords.size(); ++j)
    row[coords[j]] = lambda[j];
  out.C[params.m] =
      -penalty * double(std::popcount(face.fixed_values)) + lambda_c;
  return out;
}

}  // namespace detail

/// Appends one hidden unit realizing one mixture step. Precondition: the current visible marginal restricted to the face,
/// renormalized, is a product distribution (affine log-prob fit residual
/// below 1e-8).
inline RbmParams append_component(const RbmParams& params,
                                  const AppendSpec& spec) {
  return detail::append_product_unit(params, spec.face, spec.beta, spec.alpha,
                                     spec.sharpness,
                                     /*enforce_product_precondition=*/true);
}

/// Builds an RBM whose visible distribution approximates a mixture of m+1
/// product distributions on pairwise disjoint cubical supports, using m
/// hidden units. The base component becomes the m = 0 RBM; the others are
/// appended largest face first, with step weights chosen so the final
/// mixture weights match the target. The approximation error vanishes as
/// sharpness grows; at the default 30 the KL divergence is far below 1e-3.
///
/// Inside the chain the face restrictions are product distributions only up
/// to terms of order exp(-sharpness), so the appends skip the hard
/// precondition gate and use the fitted parameters directly.
inline RbmParams build_mixture_rbm(const MixtureOfProducts& target,
                                   std::size_t base_index, double sharpness) {
  target.validate();
  if (!(sharpness > 0.0))
    throw std::invalid_argument("sharpness must be positive");
  if (base_index >= target.components.size())
    throw std::invalid_argument("base index out of range");
  if (target.components.size() > std::size_t(max_hidden_units) + 1)
    throw std::invalid_argument("too many components");

  const auto& base = target.components[base_index].product;
  RbmParams params = RbmParams::zeros(target.n, 0);
  {
    const auto coords = base.support.free_coords();
    for (int i = 0; i < target.n; ++i)
      if (base.support.fixed_mask >> i & 1)
        params.B[i] =
            (base.support.fixed_values >> i & 1) ? sharpness : -sharpness;
    for (std::size_t j = 0; j < coords.size(); ++j)
      params.B[coords[j]] = detail::clamp_logit(base.theta[j]);
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < target.components.size(); ++i)
    if (i != base_index) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return target.components[a].product.support.dim() >
           target.components[b].product.support.dim();
  });

  // suffix[j] = total weight of components appended after position j
  std::vector<double> suffix(order.size() + 1, 0.0);
  for (std::size_t j = order.size(); j-- > 0;)
    suffix[j] = suffix[j + 1] + target.components[order[j]].weight;

  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto& comp = target.components[order[j]];
    const double remaining = 1.0 - suffix[j + 1];
    const double step =
        remaining > 0.0 ? std::clamp(comp.weight / remaining, 0.0, 1.0) : 0.0;
    std::vector<double> beta(comp.product.theta.size());
    for (std::size_t t = 0; t < beta.size(); ++t)
      beta[t] = detail::clamp_logit(comp.product.theta[t]);
    params = detail::append_product_unit(params, comp.product.support, beta,
                                         step, sharpness,
                                         /*enforce_product_precondition=*/false);
  }
  return params;
}

/// Disjoint edges (1-faces, degenerating to single vertices where the
/// support has no adjacent pairs) covering the given support states. Greedy
/// matching on the Hamming-distance-1 graph with smallest-index tie-breaks.
inline std::vector<Face> find_edge_cover(int n,
                                         const std::vector<state_t>& support) {
  check_dim(n);
  std::vector<char> in_support(cube_size(n), 0);
  for (state_t v : support) {
    if (v >= cube_size(n)) throw std::invalid_argument("state out of range");
    in_support[v] = 1;
  }
  std::vector<char> used(cube_size(n), 0);
  std::vector<Face> cover;
  for (state_t v = 0; v < cube_size(n); ++v) {
    if (!in_support[v] || used[v]) continue;
    state_t best_partner = 0;
    bool found = false;
    for (int c = 0; c < n; ++c) {
      const state_t u = v ^ (state_t{1} << c);
      if (in_support[u] && !used[u] && (!found || u < best_partner)) {
        best_partner = u;
        found = true;
      }
    }
    if (found) {
      used[v] = used[best_partner] = 1;
      cover.push_back(
          Face::edge(n, v, std::countr_zero(v ^ best_partner)));
    } else {
      used[v] = 1;
      cover.push_back(Face::singleton(n, v));
    }
  }
  std::sort(cover.begin(), cover.end(), [](const Face& a, const Face& b) {
    return a.members().front() < b.members().front();
  });
  return cover;
}

/// Builds an RBM for an arbitrary target whose support is covered by
/// disjoint edges: the target decomposes into per-edge conditionals (always
/// product distributions on 1-faces) weighted by the edge masses, and the
/// mixture construction does the rest. Uses cover.size() - 1 hidden units.
inline RbmParams build_support_cover_rbm(const Distribution& target,
                                         const std::vector<Face>& cover,
                                         double sharpness) {
  target.validate();
  if (cover.empty()) throw std::invalid_argument("empty edge cover");
  for (const auto& f : cover) {
    if (f.n != target.n) throw std::invalid_argument("dimension mismatch");
    if (f.dim() > 1)
      throw std::invalid_argument("cover faces must be edges or vertices");
  }
  for (std::size_t i = 0; i < cover.size(); ++i)
    for (std::size_t j = i + 1; j < cover.size(); ++j)
      if (!cover[i].disjoint_with(cover[j]))
        throw std::invalid_argument("cover edges overlap");
  {
    std::vector<char> covered(cube_size(target.n), 0);
    for (const auto& f : cover)
      for (state_t v : f.members()) covered[v] = 1;
    for (state_t v = 0; v < cube_size(target.n); ++v)
      if (target.probs[v] > 0.0 && !covered[v])
        throw std::invalid_argument("cover does not contain the support");
  }

  MixtureOfProducts mix;
  mix.n = target.n;
  for (const auto& f : cover) {
    double mass = 0.0;
    for (state_t v : f.members()) mass += target.probs[v];
    std::vector<double> theta;
    if (f.dim() == 1) {
      const state_t hi = f.anchor() | f.free_mask();
      theta.push_back(mass > 0.0 ? target.probs[hi] / mass : 0.5);
    }
    mix.components.push_back({mass, ProductDistribution(f, std::move(theta))});
  }

  std::size_t base_index = 0;
  for (std::size_t i = 1; i < mix.components.size(); ++i) {
    const auto& a = mix.components[i];
    const auto& b = mix.components[base_index];
    const int da = a.product.support.dim();
    const int db = b.product.support.dim();
    if (da > db || (da == db && a.weight > b.weight)) base_index = i;
  }
  return build_mixture_rbm(mix, base_index, sharpness);
}

}  // namespace rbmlab
