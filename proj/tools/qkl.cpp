// Command-line front end: dataset synthesis, WAV feature extraction, kernel
// evaluation, single-SVM runs, and the table1/table2 experiment runners.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cdqkl/harness.hpp"
#include "cdqkl/qkernel.hpp"
#include "cdqkl/rng.hpp"
#include "cdqkl/runners.hpp"
#include "cdqkl/svm.hpp"

namespace {

using cdqkl::harness::ExperimentConfig;
using cdqkl::harness::json;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file (defaults used when omitted)");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--out", opts.out, "output path (overrides config.output)");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg =
      opts.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.out.empty()) cfg.output = opts.out;
  return cfg;
}

void write_text(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
}

void emit_json(const ExperimentConfig& cfg, const json& j) {
  if (cfg.output.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(cfg.output, j.dump(2) + "\n");
    std::cout << "wrote " << cfg.output << "\n";
  }
}

cdqkl::qkernel::ThetaVector resolve_theta(const ExperimentConfig& cfg,
                                          const cdqkl::qkernel::AnsatzSpec& spec) {
  if (!cfg.ansatz.theta.empty()) {
    if (static_cast<int>(cfg.ansatz.theta.size()) != spec.n_params()) {
      throw std::invalid_argument("config ansatz.theta has wrong length for the ansatz");
    }
    return cfg.ansatz.theta;
  }
  auto gen = cdqkl::rng::make_rng(cdqkl::rng::seed_for(cfg.seed, "init"));
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
  cdqkl::qkernel::ThetaVector theta(spec.n_params());
  for (double& v : theta) v = angle(gen);
  return theta;
}

int run_data_synth(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto ds = cdqkl::harness::synth_dataset(cfg.data.kind, cfg.data.m, cfg.data.noise,
                                                cdqkl::rng::seed_for(cfg.seed, "data"));
  const std::string path = cfg.output.empty() ? "synth.csv" : cfg.output;
  cdqkl::harness::save_csv(ds, path);
  std::cout << "wrote " << ds.size() << " rows to " << path << "\n";
  return 0;
}

int run_features_extract(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto ds = cdqkl::harness::extract_features(cfg.data.wav_dir, cfg.data.label_map,
                                                   cfg.data.augment,
                                                   cdqkl::rng::seed_for(cfg.seed, "data"));
  const std::string path = cfg.output.empty() ? "features.csv" : cfg.output;
  cdqkl::harness::save_csv(ds, path);
  std::cout << "wrote " << ds.size() << " rows to " << path << "\n";
  return 0;
}

int run_kernel_compute(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  auto ds = cdqkl::harness::load_dataset(cfg.data, cfg.seed);
  const auto scaler = cdqkl::harness::fit_scaler(ds.features);
  ds = cdqkl::harness::apply_scaler(scaler, ds);
  const auto spec = cdqkl::qkernel::AnsatzSpec::make(cfg.ansatz.n_qubits, cfg.ansatz.n_layers,
                                                     static_cast<int>(ds.feature_dim()));
  const auto theta = resolve_theta(cfg, spec);
  const auto k = cdqkl::qkernel::kernel_matrix(spec, ds.features, theta);
  const auto check = cdqkl::qkernel::check_kernel_matrix(k);

  json matrix = json::array();
  for (std::size_t i = 0; i < k.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < k.cols(); ++j) row.push_back(k(i, j));
    matrix.push_back(row);
  }
  json j;
  j["report"] = "kernel";
  j["seed"] = cfg.seed;
  j["size"] = k.rows();
  j["theta"] = theta;
  j["kernel"] = matrix;
  j["checks"] = {{"max_asymmetry", check.max_asymmetry},
                 {"max_diag_deviation", check.max_diag_deviation},
                 {"min_eigenvalue", check.min_eigenvalue}};
  emit_json(cfg, j);
  return 0;
}

int run_svm(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  auto [train, test] = cdqkl::harness::load_split_dataset(cfg);
  const auto scaler = cdqkl::harness::fit_scaler(train.features);
  train = cdqkl::harness::apply_scaler(scaler, train);
  test = cdqkl::harness::apply_scaler(scaler, test);

  cdqkl::Matrix k_train;
  cdqkl::Matrix k_cross;
  if (cfg.svm.kernel == "linear") {
    k_train = cdqkl::svm::linear_kernel(train.features);
    k_cross = cdqkl::svm::linear_cross(train.features, test.features);
  } else if (cfg.svm.kernel == "gaussian") {
    const double gamma =
        cfg.svm.gamma > 0 ? cfg.svm.gamma : 1.0 / static_cast<double>(train.feature_dim());
    k_train = cdqkl::svm::gaussian_kernel(train.features, gamma);
    k_cross = cdqkl::svm::gaussian_cross(train.features, test.features, gamma);
  } else if (cfg.svm.kernel == "quantum") {
    const auto spec = cdqkl::qkernel::AnsatzSpec::make(cfg.ansatz.n_qubits, cfg.ansatz.n_layers,
                                                       static_cast<int>(train.feature_dim()));
    const auto theta = resolve_theta(cfg, spec);
    k_train = cdqkl::qkernel::kernel_matrix(spec, train.features, theta);
    k_cross = cdqkl::qkernel::cross_kernel(spec, train.features, test.features, theta);
  } else {
    throw std::invalid_argument("svm.kernel must be linear, gaussian, or quantum");
  }

  const auto model = cdqkl::svm::smo_train(k_train, train.labels, cfg.svm.c, cfg.svm.tol);
  json j;
  j["report"] = "svm";
  j["seed"] = cfg.seed;
  j["kernel"] = cfg.svm.kernel;
  j["C"] = cfg.svm.c;
  j["train_accuracy"] =
      cdqkl::svm::accuracy(cdqkl::svm::predict(model, k_train), train.labels);
  j["test_accuracy"] = cdqkl::svm::accuracy(cdqkl::svm::predict(model, k_cross), test.labels);
  j["support_vectors"] = model.support_indices().size();
  emit_json(cfg, j);
  return 0;
}

int run_table1_cmd(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto report = cdqkl::harness::run_table1(cfg);
  std::cout << cdqkl::harness::table1_to_text(report);
  emit_json(cfg, cdqkl::harness::table1_to_json(report));
  return 0;
}

int run_table2_cmd(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const auto report = cdqkl::harness::run_table2(cfg);
  std::cout << cdqkl::harness::table2_to_text(report);
  emit_json(cfg, cdqkl::harness::table2_to_json(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus-based distributed quantum kernel learning simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  int (*action)(const CommonOpts&) = nullptr;
  auto bind = [&action](int (*fn)(const CommonOpts&)) {
    return [&action, fn]() { action = fn; };
  };

  auto* data = app.add_subcommand("data", "dataset utilities");
  auto* synth = data->add_subcommand("synth", "generate a synthetic dataset as CSV");
  add_common(synth, opts);
  synth->callback(bind(&run_data_synth));

  auto* features = app.add_subcommand("features", "audio feature utilities");
  auto* extract = features->add_subcommand("extract", "extract WAV features to CSV");
  add_common(extract, opts);
  extract->callback(bind(&run_features_extract));

  auto* kernel = app.add_subcommand("kernel", "kernel utilities");
  auto* compute = kernel->add_subcommand("compute", "evaluate the quantum kernel matrix");
  add_common(compute, opts);
  compute->callback(bind(&run_kernel_compute));

  auto* svm_cmd = app.add_subcommand("svm", "kernel SVM utilities");
  auto* svm_run = svm_cmd->add_subcommand("run", "train and evaluate one SVM");
  add_common(svm_run, opts);
  svm_run->callback(bind(&run_svm));

  auto* table1 = app.add_subcommand("table1", "five-model SVM/QSVM comparison");
  add_common(table1, opts);
  table1->callback(bind(&run_table1_cmd));

  auto* cdqkl_cmd = app.add_subcommand("cdqkl", "distributed training");
  auto* cdqkl_run = cdqkl_cmd->add_subcommand("run", "run the consensus experiment");
  add_common(cdqkl_run, opts);
  cdqkl_run->callback(bind(&run_table2_cmd));

  auto* table2 = app.add_subcommand("table2", "alias for `cdqkl run`");
  add_common(table2, opts);
  table2->callback(bind(&run_table2_cmd));

  try {
    app.parse(argc, argv);
    if (action == nullptr) {
      std::cerr << app.help();
      return 1;
    }
    return action(opts);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    const json err = {{"error", {{"type", "runtime"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
