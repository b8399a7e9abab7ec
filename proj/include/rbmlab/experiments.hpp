#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbmlab/bounds.hpp"
#include "rbmlab/constructor.hpp"
#include "rbmlab/distributions.hpp"
#include "rbmlab/parallel.hpp"
#include "rbmlab/projections.hpp"
#include "rbmlab/random.hpp"
#include "rbmlab/rbm.hpp"
#include "rbmlab/statespace.hpp"

namespace rbmlab {

/// A verification run failed one of its built-in checks.
struct assertion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Configuration of the parity training study. Every restart runs the full
/// chain: CD at the phase-1 rate, CD again at the reduced phase-2 rate, then
/// exact ML ascent. Worker count only affects wall time, never results.
struct ExperimentConfig {
  int n = 3;
  int m_max = 4;
  int restarts = 20;
  std::uint64_t seed = 0;
  double cd_lr = 1.0;
  int cd_epochs = 500;
  int cd_steps = 1;
  double init_range = 10.0;
  double cd_lr2 = 0.1;
  int cd_epochs2 = 500;
  double ml_lr = 2.0;
  int ml_epochs = 8000;
  int threads = 1;

  void validate() const {
    if (n < 1 || n > max_enumeration_dim)
      throw std::invalid_argument("parity experiment needs 1 <= n <= 6");
    const int m_cap =
        std::min<int>(static_cast<int>(cube_size(n - 1)), max_hidden_units);
    if (m_max < 0 || m_max > m_cap)
      throw std::invalid_argument("m_max out of range");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (!(cd_lr > 0.0) || !(cd_lr2 > 0.0) || !(ml_lr > 0.0))
      throw std::invalid_argument("learning rates must be positive");
    if (cd_epochs < 0 || cd_epochs2 < 0 || ml_epochs < 0)
      throw std::invalid_argument("epoch counts must be >= 0");
    if (cd_steps < 1) throw std::invalid_argument("cd_steps must be >= 1");
    if (!(init_range > 0.0))
      throw std::invalid_argument("init_range must be positive");
  }
};

/// One measurement of the parity study. phase is "init", "cd1", "cd2" or
/// "ml"; the last two carry the index of the restart they continued from.
struct ParityRow {
  int m = 0;
  int restart = 0;
  std::string phase;
  double kl_bits = 0.0;
  double bound_bits = 0.0;
};

inline std::vector<ParityRow> run_parity_experiment(
    const ExperimentConfig& cfg) {
  cfg.validate();
  const Distribution target = parity_distribution(cfg.n);
  std::vector<ParityRow> rows;

  for (int m = 0; m <= cfg.m_max; ++m) {
    const double bound = theorem2_bound(cfg.n, m);

    struct RestartOut {
      double kl_init = 0.0;
      double kl_cd1 = 0.0;
      double kl_cd2 = 0.0;
      double kl_ml = 0.0;
    };
    std::vector<RestartOut> outs(cfg.restarts);
    parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) {
      const std::uint64_t task = derive_seed(cfg.seed, m, r);
      RbmParams p = random_init(cfg.n, m, cfg.init_range, derive_seed(task, 0));
      outs[r].kl_init = kl_bits(target, visible_distribution(p));

      TrainConfig cd1;
      cd1.learning_rate = cfg.cd_lr;
      cd1.epochs = cfg.cd_epochs;
      cd1.cd_steps = cfg.cd_steps;
      cd1.seed = derive_seed(task, 1);
      cd1.batch_size = static_cast<int>(cube_size(cfg.n - 1));
      p = train_cd(std::move(p), target, cd1);
      outs[r].kl_cd1 = kl_bits(target, visible_distribution(p));

      TrainConfig cd2 = cd1;
      cd2.learning_rate = cfg.cd_lr2;
      cd2.epochs = cfg.cd_epochs2;
      cd2.seed = derive_seed(task, 2);
      p = train_cd(std::move(p), target, cd2);
      outs[r].kl_cd2 = kl_bits(target, visible_distribution(p));

      TrainConfig ml;
      ml.learning_rate = cfg.ml_lr;
      ml.epochs = cfg.ml_epochs;
      const TrainResult result = train_ml(std::move(p), target, ml);
      outs[r].kl_ml = kl_bits(target, visible_distribution(result.params));
    });

    for (int r = 0; r < cfg.restarts; ++r) {
      rows.push_back({m, r, "init", outs[r].kl_init, bound});
      rows.push_back({m, r, "cd1", outs[r].kl_cd1, bound});
      rows.push_back({m, r, "cd2", outs[r].kl_cd2, bound});
      rows.push_back({m, r, "ml", outs[r].kl_ml, bound});
    }
  }
  return rows;
}

/// One point of the two-block partition error curve.
struct PartitionCurveRow {
  int k = 0;
  double kl_bits = 0.0;
  double relative_error = 0.0;
};

/// Projects p = (delta_{0...0} + delta_{1...1})/2 onto partition models whose
/// two distinguished cubical blocks of size 2^k contain the two support
/// points (block placement random per seed, remaining states carved into
/// filler faces). The relative error D(p||q)/D(p||uniform) equals k/(n-1).
inline std::vector<PartitionCurveRow> run_partition_error_curve(
    int n, std::uint64_t seed) {
  if (n < 2 || n > 12)
    throw std::invalid_argument("partition curve needs 2 <= n <= 12");
  const state_t ones = cube_mask(n);
  std::vector<double> pv(cube_size(n), 0.0);
  pv[0] = 0.5;
  pv[ones] = 0.5;
  const Distribution p(n, std::move(pv));
  const Distribution uni = Distribution::uniform(n);
  const double kl_uniform = kl_bits(p, uni);

  std::vector<PartitionCurveRow> rows;
  for (int k = 0; k < n; ++k) {
    Rng rng(derive_seed(seed, k));
    auto random_free_set = [&]() {
      std::vector<int> coords(n);
      for (int i = 0; i < n; ++i) coords[i] = i;
      for (int i = n - 1; i > 0; --i)
        std::swap(coords[i], coords[rng.below(i + 1)]);
      state_t free_bits = 0;
      for (int i = 0; i < k; ++i) free_bits |= state_t{1} << coords[i];
      return free_bits;
    };
    state_t free_a = random_free_set();
    state_t free_b = (k == n - 1) ? free_a : random_free_set();
    while ((~free_a & ~free_b & ones) == 0) free_b = random_free_set();
    const Face block_a(n, ones & ~free_a, 0);      // contains 0...0
    const Face block_b(n, ones & ~free_b, ones & ~free_b);  // contains 1...1
    std::vector<char> uncovered(cube_size(n), 1);
    for (state_t v : block_a.members()) uncovered[v] = 0;
    for (state_t v : block_b.members()) uncovered[v] = 0;
    std::vector<Face> faces = {block_a, block_b};
    for (const Face& f : carve_into_faces(n, uncovered)) faces.push_back(f);
    const Partition xi = Partition::from_faces(n, faces);
    const double kl = project_partition(p, xi).divergence_bits;
    rows.push_back({k, kl, kl / kl_uniform});
  }
  return rows;
}

/// One (trial, sharpness) measurement of the construction harness.
struct ConstructionRow {
  int trial = 0;
  int components = 0;
  double sharpness = 0.0;
  double kl_bits = 0.0;
};

struct ConstructionVerification {
  std::vector<ConstructionRow> rows;
  bool all_pass = true;
  std::string first_failure;
};

/// Absolute resolution of the dense KL sum in double precision; divergences
/// closer than this are indistinguishable.
inline constexpr double kl_resolution = 1e-13;

/// Draws random disjoint-support mixtures, runs the mixture construction
/// across the sharpness sweep and checks that the divergence is monotone
/// non-increasing (at the resolution of the KL sum), ending below 1e-3
/// wherever sharpness >= 30.
inline ConstructionVerification run_construction_verification(
    int n, int components, const std::vector<double>& sharpness_sweep,
    int trials, std::uint64_t seed, int threads = 1) {
  check_dim(n, 8);
  if (components < 1 || components > max_hidden_units + 1)
    throw std::invalid_argument("component count out of range");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (sharpness_sweep.empty())
    throw std::invalid_argument("empty sharpness sweep");

  struct TrialOut {
    std::vector<double> kls;
    bool pass = true;
    std::string failure;
  };
  std::vector<TrialOut> outs(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t, 0));
    const Partition xi = random_cubical_partial_partition(n, components, rng);
    const MixtureOfProducts mix = random_mixture(xi, derive_seed(seed, t, 1));
    std::size_t base = 0;
    for (std::size_t i = 1; i < mix.components.size(); ++i)
      if (mix.components[i].product.support.dim() >
          mix.components[base].product.support.dim())
        base = i;
    const Distribution dense = densify(mix);
    auto& out = outs[t];
    for (double a : sharpness_sweep) {
      const RbmParams rbm = build_mixture_rbm(mix, base, a);
      const double kl = kl_bits(dense, visible_distribution(rbm));
      if (!out.kls.empty() && kl > out.kls.back() + kl_resolution && out.pass) {
        out.pass = false;
        out.failure = "trial " + std::to_string(t) +
                      ": divergence increased along the sharpness sweep";
      }
      if (a >= 30.0 && kl >= 1e-3 && out.pass) {
        out.pass = false;
        out.failure = "trial " + std::to_string(t) +
                      ": divergence not below 1e-3 at sharpness " +
                      std::to_string(a);
      }
      out.kls.push_back(kl);
    }
  });

  ConstructionVerification result;
  for (int t = 0; t < trials; ++t) {
    for (std::size_t s = 0; s < sharpness_sweep.size(); ++s)
      result.rows.push_back(
          {t, components, sharpness_sweep[s], outs[t].kls[s]});
    if (!outs[t].pass && result.all_pass) {
      result.all_pass = false;
      result.first_failure = outs[t].failure;
    }
  }
  return result;
}

}  // namespace rbmlab
