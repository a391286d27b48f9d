#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdqkl/dataset.hpp"
#include "cdqkl/matrix.hpp"

namespace cdqkl::harness {

// ordered_json keeps insertion order so serialized reports are byte-stable.
using json = nlohmann::ordered_json;

struct AnsatzConfig {
  int n_qubits = 4;
  int n_layers = 2;
  std::vector<double> theta;  // optional explicit angles for kernel/svm runs
};

struct NetworkConfig {
  std::string topology = "ring";  // ring | complete | star | line | explicit
  int n_nodes = 4;
  std::vector<std::pair<int, int>> edges;  // used when topology == "explicit"
};

struct OptimizerConfig {
  double eta = 0.2;
  std::vector<double> eta_per_node;  // optional per-node override
  int iterations = 300;
  std::string grad_mode = "full";  // full | stochastic
  int q = 10;
  int eval_every = 10;
  std::string init = "shared";  // shared | per_node
};

struct SvmSection {
  double c = 1.0;
  double tol = 1e-3;
  double gamma = 0.0;             // 0 -> 1/feature_dim
  std::string kernel = "quantum";  // for `svm run`: linear | gaussian | quantum
};

struct LabelPattern {
  std::string pattern;
  int label = 0;
};

struct DataConfig {
  std::string source = "synthetic";  // synthetic | csv | wav
  std::string kind = "xor_blobs";    // xor_blobs | two_gaussians | ring_vs_core
  int m = 200;
  double noise = 0.25;
  std::string csv_path;
  std::string wav_dir;
  std::vector<LabelPattern> label_map;
  bool augment = false;
};

struct SplitConfig {
  double test_fraction = 0.2;
};

struct ShardingConfig {
  std::string mode = "iid";  // iid | label_skew
  double alpha = 0.3;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  AnsatzConfig ansatz;
  NetworkConfig network;
  OptimizerConfig optimizer;
  SvmSection svm;
  DataConfig data;
  SplitConfig split;
  ShardingConfig sharding;
  std::string output;

  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig load(const std::string& path);
  json to_json() const;
};

// CSV with header f1,...,fd,label. Labels -1/+1; "Sad" and "Surprise" are
// accepted as -1 and +1. Features serialize at 17 significant digits so a
// save/load round trip is exact.
LabeledDataset load_csv(const std::string& path);
void save_csv(const LabeledDataset& ds, const std::string& path);

// Deterministic two-class generators in the plane, labels balanced within 1.
LabeledDataset synth_dataset(const std::string& kind, int m, double noise_sigma,
                             std::uint64_t seed);

std::vector<std::string> list_wav_files(const std::string& dir);

// parse -> trim(0.6, 2.5) -> feature_vector per file; labels from the first
// matching filename pattern (unmatched files are skipped with a warning).
// With augment, each of the four techniques adds one extra row per file.
LabeledDataset extract_features(const std::vector<std::string>& files,
                                const std::vector<LabelPattern>& label_map, bool augment,
                                std::uint64_t seed);
LabeledDataset extract_features(const std::string& wav_dir,
                                const std::vector<LabelPattern>& label_map, bool augment,
                                std::uint64_t seed);

// Per-dimension min/max fitted on training rows; transform maps into
// [0, pi], constant dimensions to pi/2, out-of-range values clamped.
struct FeatureScaler {
  std::vector<double> lo;
  std::vector<double> hi;
};

FeatureScaler fit_scaler(const Matrix& train_features);
Matrix apply_scaler(const FeatureScaler& s, const Matrix& features);
LabeledDataset apply_scaler(const FeatureScaler& s, const LabeledDataset& ds);

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed);

// Disjoint cover of the dataset. iid: seeded shuffle + contiguous split;
// label_skew: Dirichlet(alpha) label proportions per node. Every shard is
// kept non-empty by rebalancing from the largest shard if needed.
std::vector<LabeledDataset> shard_dataset(const LabeledDataset& ds, int n_nodes,
                                          const std::string& mode, double alpha,
                                          std::uint64_t seed);

LabeledDataset load_dataset(const DataConfig& data, std::uint64_t root_seed);

// Train/test per config; for wav sources with augmentation the split happens
// at file level so augmented copies never leak into the test set.
std::pair<LabeledDataset, LabeledDataset> load_split_dataset(const ExperimentConfig& cfg);

}  // namespace cdqkl::harness
