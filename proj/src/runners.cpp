#include "cdqkl/runners.hpp"

#include <chrono>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cdqkl/rng.hpp"
#include "cdqkl/svm.hpp"

namespace cdqkl::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double resolve_gamma(const ExperimentConfig& cfg, std::size_t feature_dim) {
  return cfg.svm.gamma > 0.0 ? cfg.svm.gamma : 1.0 / static_cast<double>(feature_dim);
}

qkernel::ThetaVector seeded_theta(int n_params, std::uint64_t seed) {
  auto gen = rng::make_rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
  qkernel::ThetaVector theta(n_params);
  for (double& v : theta) v = angle(gen);
  return theta;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * v);
  return buf;
}

consensus::NetworkGraph graph_from_config(const NetworkConfig& net) {
  if (net.topology == "explicit") {
    return consensus::build_graph_explicit(net.n_nodes, net.edges);
  }
  return consensus::build_graph(consensus::topology_from_string(net.topology), net.n_nodes);
}

json metrics_to_json(const consensus::NodeMetrics& m) {
  return {{"local_train", m.local_train},
          {"local_test", m.local_test},
          {"whole_train", m.whole_train},
          {"whole_test", m.whole_test}};
}

}  // namespace

Table1Report run_table1(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  Table1Report report;
  report.config = cfg;

  auto [train, test] = load_split_dataset(cfg);
  if (train.size() == 0 || test.size() == 0) {
    throw std::invalid_argument("table1: split produced an empty train or test set");
  }
  const FeatureScaler scaler = fit_scaler(train.features);
  train = apply_scaler(scaler, train);
  test = apply_scaler(scaler, test);

  const double gamma = resolve_gamma(cfg, train.feature_dim());

  auto evaluate = [&](const Matrix& k_train, const Matrix& k_cross, double c) -> Table1Row {
    const svm::SvmModel model = svm::smo_train(k_train, train.labels, c, cfg.svm.tol);
    Table1Row row;
    row.train_accuracy = svm::accuracy(svm::predict(model, k_train), train.labels);
    row.test_accuracy = svm::accuracy(svm::predict(model, k_cross), test.labels);
    return row;
  };

  {
    const Matrix k = svm::linear_kernel(train.features);
    const Matrix kx = svm::linear_cross(train.features, test.features);
    Table1Row row = evaluate(k, kx, cfg.svm.c);
    row.method = "Linear SVM";
    report.rows.push_back(row);
  }
  {
    const Matrix k = svm::gaussian_kernel(train.features, gamma);
    const Matrix kx = svm::gaussian_cross(train.features, test.features, gamma);
    Table1Row row1 = evaluate(k, kx, 1.0);
    row1.method = "Gaussian SVM (C = 1)";
    report.rows.push_back(row1);
    Table1Row row2 = evaluate(k, kx, 1000.0);
    row2.method = "Gaussian SVM (C = 1000)";
    report.rows.push_back(row2);
  }
  {
    const auto spec =
        qkernel::AnsatzSpec::make(cfg.ansatz.n_qubits, cfg.ansatz.n_layers,
                                  static_cast<int>(train.feature_dim()));
    qkernel::ThetaVector theta = seeded_theta(spec.n_params(), rng::seed_for(cfg.seed, "init"));
    theta = qkernel::descend_alignment(spec, train, std::move(theta), cfg.optimizer.eta,
                                       cfg.optimizer.iterations);
    report.trained_theta = theta;
    const Matrix k = qkernel::kernel_matrix(spec, train.features, theta);
    const Matrix kx = qkernel::cross_kernel(spec, train.features, test.features, theta);
    Table1Row row1 = evaluate(k, kx, 1.0);
    row1.method = "Central QSVM (C = 1)";
    report.rows.push_back(row1);
    Table1Row row2 = evaluate(k, kx, 1000.0);
    row2.method = "Central QSVM (C = 1000)";
    report.rows.push_back(row2);
  }

  report.wall_time_s = seconds_since(start);
  return report;
}

json table1_to_json(const Table1Report& report) {
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"method", row.method},
                    {"train_accuracy", row.train_accuracy},
                    {"test_accuracy", row.test_accuracy}});
  }
  json j;
  j["report"] = "table1";
  j["seed"] = report.config.seed;
  j["config"] = report.config.to_json();
  j["rows"] = rows;
  j["trained_theta"] = report.trained_theta;
  j["wall_time_s"] = report.wall_time_s;
  return j;
}

std::string table1_to_text(const Table1Report& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-26s %16s %16s\n", "Method", "Train Accuracy",
                "Test Accuracy");
  out << line;
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof(line), "%-26s %16s %16s\n", row.method.c_str(),
                  percent(row.train_accuracy).c_str(), percent(row.test_accuracy).c_str());
    out << line;
  }
  return out.str();
}

MetricsReport run_table2(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  MetricsReport report;
  report.config = cfg;

  auto [train, test] = load_split_dataset(cfg);
  if (train.size() == 0 || test.size() == 0) {
    throw std::invalid_argument("table2: split produced an empty train or test set");
  }
  const FeatureScaler scaler = fit_scaler(train.features);
  train = apply_scaler(scaler, train);
  test = apply_scaler(scaler, test);

  const int n = cfg.network.n_nodes;
  const auto train_shards = shard_dataset(train, n, cfg.sharding.mode, cfg.sharding.alpha,
                                          rng::seed_for(cfg.seed, "shard"));
  const auto test_shards =
      shard_dataset(test, n, "iid", cfg.sharding.alpha, rng::seed_for(cfg.seed, "shard_test"));

  const auto graph = graph_from_config(cfg.network);
  const auto spec = qkernel::AnsatzSpec::make(cfg.ansatz.n_qubits, cfg.ansatz.n_layers,
                                              static_cast<int>(train.feature_dim()));

  consensus::RunOptions options;
  options.eta = cfg.optimizer.eta;
  options.eta_per_node = cfg.optimizer.eta_per_node;
  options.iterations = cfg.optimizer.iterations;
  if (cfg.optimizer.grad_mode == "full") {
    options.grad_mode = consensus::GradMode::Full;
  } else if (cfg.optimizer.grad_mode == "stochastic") {
    options.grad_mode = consensus::GradMode::Stochastic;
  } else {
    throw std::invalid_argument("optimizer.grad_mode must be full or stochastic");
  }
  options.stochastic_q = cfg.optimizer.q;
  options.eval_every = cfg.optimizer.eval_every;
  options.svm_c = cfg.svm.c;
  options.svm_tol = cfg.svm.tol;
  options.seed = cfg.seed;
  if (cfg.optimizer.init == "per_node") {
    options.per_node_init = true;
  } else if (cfg.optimizer.init != "shared") {
    throw std::invalid_argument("optimizer.init must be shared or per_node");
  }

  report.history = consensus::run_cdqkl(spec, train_shards, test_shards, graph, options);
  report.sigma2 = consensus::sigma2(consensus::metropolis_weights(graph));
  report.wall_time_s = seconds_since(start);
  return report;
}

json table2_to_json(const MetricsReport& report) {
  const auto& h = report.history;
  json nodes = json::array();
  for (std::size_t i = 0; i < h.before.size(); ++i) {
    nodes.push_back({{"node", i + 1},
                     {"before", metrics_to_json(h.before[i])},
                     {"after", metrics_to_json(h.after[i])}});
  }
  json iterations = json::array();
  json disagreement = json::array();
  json node_loss = json::array();
  for (const auto& point : h.points) {
    iterations.push_back(point.iteration);
    disagreement.push_back(point.disagreement);
    node_loss.push_back(point.node_loss);
  }
  json j;
  j["report"] = "table2";
  j["seed"] = report.config.seed;
  j["config"] = report.config.to_json();
  j["sigma2"] = report.sigma2;
  j["nodes"] = nodes;
  j["history"] = {{"iterations", iterations},
                  {"disagreement", disagreement},
                  {"node_loss", node_loss}};
  j["theta_initial"] = h.theta_initial;
  j["theta_final"] = h.theta_final;
  j["wall_time_s"] = report.wall_time_s;
  return j;
}

std::string table2_to_text(const MetricsReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %-12s %16s %16s\n", "Node", "Metric",
                "Before Training", "After Training");
  out << line;
  const char* metric_names[4] = {"Local Train", "Local Test", "Whole Train", "Whole Test"};
  for (std::size_t i = 0; i < report.history.before.size(); ++i) {
    const auto& b = report.history.before[i];
    const auto& a = report.history.after[i];
    const double before_vals[4] = {b.local_train, b.local_test, b.whole_train, b.whole_test};
    const double after_vals[4] = {a.local_train, a.local_test, a.whole_train, a.whole_test};
    for (int k = 0; k < 4; ++k) {
      const std::string label = k == 0 ? "CDQKL Node " + std::to_string(i + 1) : "";
      std::snprintf(line, sizeof(line), "%-14s %-12s %16s %16s\n", label.c_str(), metric_names[k],
                    percent(before_vals[k]).c_str(), percent(after_vals[k]).c_str());
      out << line;
    }
  }
  return out.str();
}

}  // namespace cdqkl::harness
