#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rbmlab/distributions.hpp"
#include "rbmlab/projections.hpp"
#include "rbmlab/random.hpp"
#include "rbmlab/statespace.hpp"

namespace rbmlab {

inline constexpr int max_hidden_units = 25;

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// RBM parameters: weight matrix W (m x n, row-major), visible bias B,
/// hidden bias C.
struct RbmParams {
  int n = 0;
  int m = 0;
  std::vector<double> W;
  std::vector<double> B;
  std::vector<double> C;

  static RbmParams zeros(int n, int m) {
    check_dim(n);
    if (m < 0 || m > max_hidden_units)
      throw std::invalid_argument("hidden count out of range");
    RbmParams p;
    p.n = n;
    p.m = m;
    p.W.assign(std::size_t(m) * n, 0.0);
    p.B.assign(n, 0.0);
    p.C.assign(m, 0.0);
    return p;
  }

  double w(int j, int i) const { return W[std::size_t(j) * n + i]; }
  double& w(int j, int i) { return W[std::size_t(j) * n + i]; }

  /// Input to hidden unit j given visible state v: W_j . v + C_j.
  double hidden_input(int j, state_t v) const {
    double s = C[j];
    const double* row = W.data() + std::size_t(j) * n;
    for (state_t bits = v; bits; bits &= bits - 1)
      s += row[std::countr_zero(bits)];
    return s;
  }

  void validate() const {
    if (B.size() != std::size_t(n) || C.size() != std::size_t(m) ||
        W.size() != std::size_t(m) * n)
      throw std::invalid_argument("parameter array sizes inconsistent");
    for (double x : W)
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite weight");
    for (double x : B)
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite bias");
    for (double x : C)
      if (!std::isfinite(x)) throw std::invalid_argument("non-finite bias");
  }
};

/// Entries i.i.d. uniform in [-range, range]; order W row-major, then B,
/// then C, so a seed pins down the parameters exactly.
inline RbmParams random_init(int n, int m, double range, std::uint64_t seed) {
  if (!(range > 0.0)) throw std::invalid_argument("range must be positive");
  RbmParams p = RbmParams::zeros(n, m);
  Rng rng(seed);
  for (auto& x : p.W) x = rng.uniform(-range, range);
  for (auto& x : p.B) x = rng.uniform(-range, range);
  for (auto& x : p.C) x = rng.uniform(-range, range);
  return p;
}

/// Natural-log probabilities of the visible marginal, hidden units summed
/// out analytically: log p(v) = B.v + sum_j softplus(W_j.v + C_j) - log Z.
/// Accumulation stays in the log domain, so saturated parameters (the
/// mixture construction drives exponents to +-500) do not overflow. The
/// per-state softplus terms are added in sorted order, which makes the
/// result exactly invariant under permuting hidden units.
inline std::vector<double> visible_log_probs(const RbmParams& params) {
  check_dim(params.n);
  if (params.m < 0 || params.m > max_hidden_units)
    throw std::invalid_argument("hidden count out of range");
  params.validate();
  const std::size_t states = cube_size(params.n);
  std::vector<double> logp(states, 0.0);
  std::vector<double> terms(params.m);
  for (state_t v = 0; v < states; ++v) {
    double s = 0.0;
    for (state_t bits = v; bits; bits &= bits - 1)
      s += params.B[std::countr_zero(bits)];
    for (int j = 0; j < params.m; ++j)
      terms[j] = softplus(params.hidden_input(j, v));
    std::sort(terms.begin(), terms.end());
    for (double t : terms) s += t;
    logp[v] = s;
  }
  double peak = logp[0];
  for (double x : logp) peak = std::max(peak, x);
  double z = 0.0;
  for (double x : logp) z += std::exp(x - peak);
  const double log_z = peak + std::log(z);
  for (double& x : logp) x -= log_z;
  return logp;
}

inline Distribution visible_distribution(const RbmParams& params) {
  auto logp = visible_log_probs(params);
  for (double& x : logp) x = std::exp(x);
  return Distribution(params.n, std::move(logp));
}

/// Expected log-likelihood (natural log) of the model under the target:
/// sum_v target(v) ln p_model(v).
inline double log_likelihood(const RbmParams& params,
                             const Distribution& target) {
  if (target.n != params.n) throw std::invalid_argument("dimension mismatch");
  const auto logp = visible_log_probs(params);
  double ll = 0.0;
  for (std::size_t v = 0; v < logp.size(); ++v)
    if (target.probs[v] > 0.0) ll += target.probs[v] * logp[v];
  return ll;
}

struct RbmGradient {
  std::vector<double> W;
  std::vector<double> B;
  std::vector<double> C;

  double max_abs() const {
    double worst = 0.0;
    for (double x : W) worst = std::max(worst, std::abs(x));
    for (double x : B) worst = std::max(worst, std::abs(x));
    for (double x : C) worst = std::max(worst, std::abs(x));
    return worst;
  }
};

/// Exact gradient of log_likelihood: expectation differences
/// E_target - E_model of sigma_j(v) v_i (for W), v_i (for B) and
/// sigma_j(v) (for C), computed by enumeration over the 2^n visible states.
inline RbmGradient ml_gradient(const RbmParams& params,
                               const Distribution& target) {
  if (target.n != params.n) throw std::invalid_argument("dimension mismatch");
  const Distribution model = visible_distribution(params);
  RbmGradient g;
  g.W.assign(params.W.size(), 0.0);
  g.B.assign(params.B.size(), 0.0);
  g.C.assign(params.C.size(), 0.0);
  for (state_t v = 0; v < cube_size(params.n); ++v) {
    const double diff = target.probs[v] - model.probs[v];
    if (diff == 0.0) continue;
    for (int i = 0; i < params.n; ++i)
      if (v >> i & 1) g.B[i] += diff;
    for (int j = 0; j < params.m; ++j) {
      const double sj = sigmoid(params.hidden_input(j, v));
      g.C[j] += diff * sj;
      for (int i = 0; i < params.n; ++i)
        if (v >> i & 1) g.W[std::size_t(j) * params.n + i] += diff * sj;
    }
  }
  return g;
}

/// Training configuration shared by exact ML ascent and CD. CD draws
/// batch_size fresh target samples per epoch; finite_sample_count > 0
/// switches to a fixed sample list drawn once up front.
struct TrainConfig {
  double learning_rate = 1.0;
  int epochs = 500;
  int cd_steps = 1;
  double init_range = 10.0;
  std::uint64_t seed = 0;
  int batch_size = 8;
  int finite_sample_count = 0;

  void validate() const {
    if (!(learning_rate >= 0.0))
      throw std::invalid_argument("learning rate must be non-negative");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (cd_steps < 1) throw std::invalid_argument("cd_steps must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  }
};

struct TrainResult {
  RbmParams params;
  std::vector<double> kl_trajectory_bits;  // one entry per epoch
};

/// Plain fixed-step gradient ascent on the exact log-likelihood. Records
/// kl(target || model) after every epoch.
inline TrainResult train_ml(RbmParams params, const Distribution& target,
                            const TrainConfig& config) {
  config.validate();
  TrainResult result;
  result.kl_trajectory_bits.reserve(config.epochs);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const RbmGradient g = ml_gradient(params, target);
    for (std::size_t i = 0; i < params.W.size(); ++i)
      params.W[i] += config.learning_rate * g.W[i];
    for (std::size_t i = 0; i < params.B.size(); ++i)
      params.B[i] += config.learning_rate * g.B[i];
    for (std::size_t i = 0; i < params.C.size(); ++i)
      params.C[i] += config.learning_rate * g.C[i];
    result.kl_trajectory_bits.push_back(
        kl_bits(target, visible_distribution(params)));
  }
  result.params = std::move(params);
  return result;
}

namespace detail {

/// One CD-k update from a batch of visible starting states. Positive and
/// negative statistics use hidden activation probabilities; visible states
/// are sampled.
inline void cd_update(RbmParams& params, const std::vector<state_t>& batch,
                      const TrainConfig& config, Rng& rng) {
  const int n = params.n;
  const int m = params.m;
  std::vector<double> gw(params.W.size(), 0.0);
  std::vector<double> gb(params.B.size(), 0.0);
  std::vector<double> gc(params.C.size(), 0.0);
  std::vector<double> hidden_prob(m);
  for (state_t v0 : batch) {
    state_t v = v0;
    for (int step = 0; step < config.cd_steps; ++step) {
      state_t h = 0;
      for (int j = 0; j < m; ++j)
        if (rng.bernoulli(sigmoid(params.hidden_input(j, v))))
          h |= state_t{1} << j;
      state_t next = 0;
      for (int i = 0; i < n; ++i) {
        double s = params.B[i];
        for (int j = 0; j < m; ++j)
          if (h >> j & 1) s += params.w(j, i);
        if (rng.bernoulli(sigmoid(s))) next |= state_t{1} << i;
      }
      v = next;
    }
    for (int j = 0; j < m; ++j) {
      const double p0 = sigmoid(params.hidden_input(j, v0));
      const double pk = sigmoid(params.hidden_input(j, v));
      gc[j] += p0 - pk;
      for (int i = 0; i < n; ++i) {
        const double d = p0 * double(v0 >> i & 1) - pk * double(v >> i & 1);
        gw[std::size_t(j) * n + i] += d;
      }
    }
    for (int i = 0; i < n; ++i)
      gb[i] += double(v0 >> i & 1) - double(v >> i & 1);
  }
  const double step = config.learning_rate / double(batch.size());
  for (std::size_t i = 0; i < gw.size(); ++i) params.W[i] += step * gw[i];
  for (std::size_t i = 0; i < gb.size(); ++i) params.B[i] += step * gb[i];
  for (std::size_t i = 0; i < gc.size(); ++i) params.C[i] += step * gc[i];
}

/// Inverse-CDF sampler over a dense distribution.
class TargetSampler {
 public:
  explicit TargetSampler(const Distribution& target) : cdf_(target.probs) {
    double run = 0.0;
    for (double& c : cdf_) {
      run += c;
      c = run;
    }
  }
  state_t sample(Rng& rng) const {
    const double u = rng.uniform() * cdf_.back();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<state_t>(std::min<std::size_t>(
        std::distance(cdf_.begin(), it), cdf_.size() - 1));
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace detail

/// CD-k training on an explicit sample list; every epoch sweeps the full
/// list as one batch. Deterministic per seed.
inline RbmParams train_cd(RbmParams params, const std::vector<state_t>& samples,
                          const TrainConfig& config) {
  config.validate();
  if (samples.empty()) throw std::invalid_argument("empty sample list");
  Rng rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch)
    detail::cd_update(params, samples, config, rng);
  return params;
}

/// CD-k training against a target distribution used as an infinite training
/// set: each epoch draws a fresh batch from the target. With
/// finite_sample_count > 0 a fixed list is drawn once instead.
inline RbmParams train_cd(RbmParams params, const Distribution& target,
                          const TrainConfig& config) {
  config.validate();
  if (target.n != params.n) throw std::invalid_argument("dimension mismatch");
  Rng rng(config.seed);
  const detail::TargetSampler sampler(target);
  if (config.finite_sample_count > 0) {
    std::vector<state_t> samples(config.finite_sample_count);
    for (auto& s : samples) s = sampler.sample(rng);
    for (int epoch = 0; epoch < config.epochs; ++epoch)
      detail::cd_update(params, samples, config, rng);
    return params;
  }
  std::vector<state_t> batch(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (auto& s : batch) s = sampler.sample(rng);
    detail::cd_update(params, batch, config, rng);
  }
  return params;
}

}  // namespace rbmlab
