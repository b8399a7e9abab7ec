#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbmlab/bounds.hpp"
#include "rbmlab/distributions.hpp"
#include "rbmlab/experiments.hpp"
#include "rbmlab/projections.hpp"
#include "rbmlab/rbm.hpp"
#include "rbmlab/statespace.hpp"

namespace rbmlab {

/// Round-trippable decimal rendering shared by all CSV output, so runs with
/// identical seeds produce byte-identical files.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON bindings
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const Face& f) {
  j = {{"n", f.n}, {"fixed_mask", f.fixed_mask}, {"fixed_values", f.fixed_values}};
}

inline void from_json(const nlohmann::json& j, Face& f) {
  f = Face(j.at("n").get<int>(), j.at("fixed_mask").get<state_t>(),
           j.at("fixed_values").get<state_t>());
}

/// Partitions serialize as {"n": ..., "blocks": [...]} where cubical blocks
/// are face objects and general blocks are explicit state lists.
inline void to_json(nlohmann::json& j, const Partition& xi) {
  nlohmann::json blocks = nlohmann::json::array();
  if (xi.is_cubical) {
    for (const Face& f : xi.faces) blocks.push_back(f);
  } else {
    for (const auto& block : xi.blocks) blocks.push_back(block);
  }
  j = {{"n", xi.n}, {"blocks", blocks}, {"covers_all", xi.covers_all}};
}

inline void from_json(const nlohmann::json& j, Partition& xi) {
  const int n = j.at("n").get<int>();
  const bool require_cover = j.value("covers_all", true);
  std::vector<std::vector<state_t>> blocks;
  for (const auto& entry : j.at("blocks")) {
    if (entry.is_array()) {
      blocks.push_back(entry.get<std::vector<state_t>>());
    } else {
      Face f = entry.get<Face>();
      if (f.n != n) throw std::invalid_argument("face dimension mismatch");
      blocks.push_back(f.members());
    }
  }
  xi = Partition::from_blocks(n, std::move(blocks), require_cover);
}

inline void to_json(nlohmann::json& j, const Distribution& p) {
  j = {{"n", p.n}, {"probs", p.probs}};
}

inline void from_json(const nlohmann::json& j, Distribution& p) {
  p = Distribution(j.at("n").get<int>(), j.at("probs").get<std::vector<double>>());
  p.validate();
}

inline void to_json(nlohmann::json& j, const ProductDistribution& p) {
  j = {{"face", p.support}, {"theta", p.theta}};
}

inline void from_json(const nlohmann::json& j, ProductDistribution& p) {
  p = ProductDistribution(j.at("face").get<Face>(),
                          j.at("theta").get<std::vector<double>>());
}

inline void to_json(nlohmann::json& j, const MixtureOfProducts& mix) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : mix.components)
    comps.push_back({{"weight", c.weight}, {"product", c.product}});
  j = {{"n", mix.n}, {"components", comps}};
}

inline void from_json(const nlohmann::json& j, MixtureOfProducts& mix) {
  mix = MixtureOfProducts{};
  mix.n = j.at("n").get<int>();
  for (const auto& entry : j.at("components"))
    mix.components.push_back({entry.at("weight").get<double>(),
                              entry.at("product").get<ProductDistribution>()});
  mix.validate();
}

inline void to_json(nlohmann::json& j, const RbmParams& p) {
  j = {{"n", p.n}, {"m", p.m}, {"W", p.W}, {"B", p.B}, {"C", p.C}};
}

inline void from_json(const nlohmann::json& j, RbmParams& p) {
  p.n = j.at("n").get<int>();
  p.m = j.at("m").get<int>();
  p.W = j.at("W").get<std::vector<double>>();
  p.B = j.at("B").get<std::vector<double>>();
  p.C = j.at("C").get<std::vector<double>>();
  check_dim(p.n);
  if (p.m < 0 || p.m > max_hidden_units)
    throw std::invalid_argument("hidden count out of range");
  p.validate();
}

inline void to_json(nlohmann::json& j, const ProjectionResult& r) {
  j = {{"divergence_bits", r.divergence_bits}, {"projection", r.projection}};
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

inline std::string distribution_csv(const Distribution& p) {
  std::string out = "state_index,probability\n";
  for (std::size_t v = 0; v < p.probs.size(); ++v)
    out += std::to_string(v) + "," + format_double(p.probs[v]) + "\n";
  return out;
}

inline std::string bound_table_csv(const std::vector<BoundReport>& rows) {
  std::string out = "n,m,theorem2,lower_envelope,upper_envelope,universal\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.m) + "," +
           format_double(r.theorem2) + "," + format_double(r.lower_envelope) +
           "," + format_double(r.upper_envelope) + "," +
           (r.universal ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string parity_csv(const std::vector<ParityRow>& rows) {
  std::string out = "m,restart,phase,kl_bits,bound_bits\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m) + "," + std::to_string(r.restart) + "," +
           r.phase + "," + format_double(r.kl_bits) + "," +
           format_double(r.bound_bits) + "\n";
  }
  return out;
}

inline std::string partition_curve_csv(
    const std::vector<PartitionCurveRow>& rows) {
  std::string out = "k,kl_bits,relative_error\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + format_double(r.kl_bits) + "," +
           format_double(r.relative_error) + "\n";
  }
  return out;
}

inline std::string construction_csv(const std::vector<ConstructionRow>& rows) {
  std::string out = "trial,components,sharpness,kl_bits\n";
  for (const auto& r : rows) {
    out += std::to_string(r.trial) + "," + std::to_string(r.components) + "," +
           format_double(r.sharpness) + "," + format_double(r.kl_bits) + "\n";
  }
  return out;
}

/// Training trajectory rows (restart, epoch, kl_bits); epochs count from 1.
inline std::string trajectory_csv(int restart,
                                  const std::vector<double>& kl_per_epoch,
                                  bool header = true) {
  std::string out = header ? "restart,epoch,kl_bits\n" : "";
  for (std::size_t e = 0; e < kl_per_epoch.size(); ++e) {
    out += std::to_string(restart) + "," + std::to_string(e + 1) + "," +
           format_double(kl_per_epoch[e]) + "\n";
  }
  return out;
}

}  // namespace rbmlab
