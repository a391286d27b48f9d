#pragma once

#include <string>
#include <vector>

#include "cdqkl/consensus.hpp"
#include "cdqkl/harness.hpp"
#include "cdqkl/qkernel.hpp"

namespace cdqkl::harness {

struct Table1Row {
  std::string method;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Five-model comparison on one train/test split: linear and Gaussian
// baselines plus the quantum kernel at an alignment-trained theta.
struct Table1Report {
  std::vector<Table1Row> rows;
  qkernel::ThetaVector trained_theta;
  ExperimentConfig config;
  double wall_time_s = 0.0;
};

Table1Report run_table1(const ExperimentConfig& cfg);
json table1_to_json(const Table1Report& report);
std::string table1_to_text(const Table1Report& report);

// Full distributed experiment: shard, mix, descend, and report per-node
// before/after accuracy plus loss and disagreement series.
struct MetricsReport {
  consensus::TrainingHistory history;
  double sigma2 = 0.0;
  ExperimentConfig config;
  double wall_time_s = 0.0;
};

MetricsReport run_table2(const ExperimentConfig& cfg);
json table2_to_json(const MetricsReport& report);
std::string table2_to_text(const MetricsReport& report);

}  // namespace cdqkl::harness
