// Command-line front-end: bound tables, the parity training study, the
// two-block partition error curve, the mixture construction and the
// closed-form projections. All subcommands write CSV or JSON; runs with the
// same seed are byte-identical regardless of --threads.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rbmlab/rbmlab.hpp"

namespace {

constexpr int exit_validation = 2;
constexpr int exit_assertion = 3;

/// Relative output paths resolve against RBMLAB_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("RBMLAB_OUTPUT_DIR"))
    return std::filesystem::path(dir) / p;
  return p;
}

void emit(const std::string& output, const std::string& content) {
  if (output.empty()) {
    std::cout << content;
    return;
  }
  const auto path = resolve_output(output);
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file " + path.string());
  out << content;
}

nlohmann::json load_json(const std::string& input) {
  std::ifstream in(resolve_output(input));
  if (!in) throw std::invalid_argument("cannot open input file " + input);
  nlohmann::json j;
  in >> j;
  return j;
}

template <typename Rows, typename CsvFn>
std::string render(const Rows& rows, const std::string& format, CsvFn csv) {
  if (format == "csv") return csv(rows);
  if (format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) j.push_back(r);
    return j.dump(2) + "\n";
  }
  throw std::invalid_argument("format must be csv or json");
}

}  // namespace

namespace rbmlab {

void to_json(nlohmann::json& j, const ParityRow& r) {
  j = {{"m", r.m},
       {"restart", r.restart},
       {"phase", r.phase},
       {"kl_bits", r.kl_bits},
       {"bound_bits", r.bound_bits}};
}

void to_json(nlohmann::json& j, const PartitionCurveRow& r) {
  j = {{"k", r.k},
       {"kl_bits", r.kl_bits},
       {"relative_error", r.relative_error}};
}

void to_json(nlohmann::json& j, const ConstructionRow& r) {
  j = {{"trial", r.trial},
       {"components", r.components},
       {"sharpness", r.sharpness},
       {"kl_bits", r.kl_bits}};
}

void to_json(nlohmann::json& j, const BoundReport& r) {
  j = {{"n", r.n},
       {"m", r.m},
       {"theorem2", r.theorem2},
       {"lower_envelope", r.lower_envelope},
       {"upper_envelope", r.upper_envelope},
       {"universal", r.universal}};
}

}  // namespace rbmlab

int main(int argc, char** argv) {
  using namespace rbmlab;

  CLI::App app{"Exact desk-scale RBM expressivity lab"};
  app.require_subcommand(1);
  app.fallthrough();  // global --output/--format may follow the subcommand

  std::string output;
  std::string format = "csv";
  app.add_option("--output", output,
                 "Output file (default stdout; relative paths resolve "
                 "against RBMLAB_OUTPUT_DIR)");
  app.add_option("--format", format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // bound-table
  auto* bound_cmd = app.add_subcommand(
      "bound-table", "Divergence upper bound with envelopes for m = 0..m-max");
  int bt_n = 4;
  int bt_m_max = -1;
  bound_cmd->add_option("--n", bt_n, "Visible units")->required();
  bound_cmd->add_option("--m-max", bt_m_max,
                        "Largest hidden count (default 2^(n-1))");

  // parity
  auto* parity_cmd = app.add_subcommand(
      "parity", "Parity-target training study: CD, reduced-rate CD, exact ML");
  ExperimentConfig pc;
  parity_cmd->add_option("--n", pc.n, "Visible units");
  parity_cmd->add_option("--m-max", pc.m_max, "Largest hidden count");
  parity_cmd->add_option("--restarts", pc.restarts, "Random restarts per m");
  parity_cmd->add_option("--seed", pc.seed, "Master seed");
  parity_cmd->add_option("--epochs", pc.cd_epochs, "CD epochs (phase 1)");
  parity_cmd->add_option("--lr", pc.cd_lr, "CD learning rate (phase 1)");
  parity_cmd->add_option("--cd-k", pc.cd_steps, "Gibbs steps per CD update");
  parity_cmd->add_option("--lr2", pc.cd_lr2, "CD learning rate (phase 2)");
  parity_cmd->add_option("--epochs2", pc.cd_epochs2, "CD epochs (phase 2)");
  parity_cmd->add_option("--ml-lr", pc.ml_lr, "Exact ML learning rate");
  parity_cmd->add_option("--ml-epochs", pc.ml_epochs, "Exact ML epochs");
  parity_cmd->add_option("--init-range", pc.init_range,
                         "Uniform init half-width");
  parity_cmd->add_option("--threads", pc.threads, "Worker threads");

  // partition-curve
  auto* curve_cmd = app.add_subcommand(
      "partition-curve",
      "Relative projection error of the half-half delta pair per block size");
  int curve_n = 10;
  std::uint64_t curve_seed = 0;
  curve_cmd->add_option("--n", curve_n, "Visible units (2..12)");
  curve_cmd->add_option("--seed", curve_seed, "Block placement seed");

  // construct
  auto* construct_cmd = app.add_subcommand(
      "construct", "Build RBM parameters for a mixture-of-products target");
  std::string construct_input;
  double construct_sharpness = 30.0;
  int construct_base = -1;
  construct_cmd->add_option("--input", construct_input, "Mixture JSON file")
      ->required();
  construct_cmd->add_option("--sharpness", construct_sharpness,
                            "Saturation scale of the construction");
  construct_cmd->add_option("--base", construct_base,
                            "Base component index (default largest face)");

  // verify-construction
  auto* verify_cmd = app.add_subcommand(
      "verify-construction",
      "Random-mixture construction harness with sharpness sweep checks");
  int vc_n = 4, vc_components = 4, vc_trials = 50, vc_threads = 1;
  std::uint64_t vc_seed = 0;
  std::vector<double> vc_sweep = {5.0, 10.0, 20.0, 30.0};
  verify_cmd->add_option("--n", vc_n, "Visible units");
  verify_cmd->add_option("--components", vc_components, "Mixture components");
  verify_cmd->add_option("--trials", vc_trials, "Random targets");
  verify_cmd->add_option("--seed", vc_seed, "Master seed");
  verify_cmd->add_option("--sharpness", vc_sweep, "Sharpness sweep values");
  verify_cmd->add_option("--threads", vc_threads, "Worker threads");

  // project
  auto* project_cmd = app.add_subcommand(
      "project", "Closed-form rI-projection of a distribution");
  std::string project_input, project_model = "independence", project_partition_file;
  project_cmd->add_option("--input", project_input, "Distribution JSON file")
      ->required();
  project_cmd
      ->add_option("--model", project_model,
                   "Model class: independence, partition or mixture")
      ->check(CLI::IsMember({"independence", "partition", "mixture"}));
  project_cmd->add_option("--partition", project_partition_file,
                          "Partition JSON file (partition/mixture models)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_validation;
  }

  try {
    if (*bound_cmd) {
      if (bt_m_max < 0) bt_m_max = static_cast<int>(cube_size(bt_n - 1));
      std::vector<BoundReport> rows;
      for (int m = 0; m <= bt_m_max; ++m) rows.push_back(bound_report(bt_n, m));
      emit(output, render(rows, format, bound_table_csv));
    } else if (*parity_cmd) {
      const auto rows = run_parity_experiment(pc);
      emit(output, render(rows, format, parity_csv));
    } else if (*curve_cmd) {
      const auto rows = run_partition_error_curve(curve_n, curve_seed);
      emit(output, render(rows, format, partition_curve_csv));
    } else if (*construct_cmd) {
      const auto mixture = load_json(construct_input).get<MixtureOfProducts>();
      std::size_t base = 0;
      if (construct_base >= 0) {
        base = static_cast<std::size_t>(construct_base);
      } else {
        for (std::size_t i = 1; i < mixture.components.size(); ++i)
          if (mixture.components[i].product.support.dim() >
              mixture.components[base].product.support.dim())
            base = i;
      }
      const RbmParams params =
          build_mixture_rbm(mixture, base, construct_sharpness);
      const double kl =
          kl_bits(densify(mixture), visible_distribution(params));
      nlohmann::json j = {{"sharpness", construct_sharpness},
                          {"kl_bits", kl},
                          {"params", params}};
      emit(output, j.dump(2) + "\n");
    } else if (*verify_cmd) {
      const auto result = run_construction_verification(
          vc_n, vc_components, vc_sweep, vc_trials, vc_seed, vc_threads);
      emit(output, render(result.rows, format, construction_csv));
      if (!result.all_pass) {
        std::cerr << "verification failed: " << result.first_failure << "\n";
        return exit_assertion;
      }
    } else if (*project_cmd) {
      const auto dist = load_json(project_input).get<Distribution>();
      ProjectionResult result;
      if (project_model == "independence") {
        result = project_independence(dist);
      } else {
        if (project_partition_file.empty())
          throw std::invalid_argument(
              "--partition is required for partition/mixture models");
        const auto xi = load_json(project_partition_file).get<Partition>();
        result = project_model == "partition"
                     ? project_partition(dist, xi)
                     : project_disjoint_mixture(dist, xi);
      }
      nlohmann::json j = result;
      emit(output, j.dump(2) + "\n");
    }
  } catch (const assertion_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_assertion;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_assertion;
  }
  return 0;
}
