#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdqkl/dataset.hpp"
#include "cdqkl/matrix.hpp"
#include "cdqkl/qkernel.hpp"

namespace cdqkl::consensus {

// Undirected connected communication graph. Edges stored normalized (a < b),
// no self-loops; neighborhoods implicitly include the node itself.
struct NetworkGraph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<int> degrees() const;
};

enum class Topology { Ring, Complete, Star, Line };

Topology topology_from_string(const std::string& name);

NetworkGraph build_graph(Topology topology, int n_nodes);

// Explicit edge list; throws naming the components if disconnected.
NetworkGraph build_graph_explicit(int n_nodes, std::vector<std::pair<int, int>> edges);

// Metropolis-Hastings weights: w_ij = 1/(1 + max(d_i, d_j)) on edges,
// w_ii = 1 - sum_j w_ij. Symmetric, hence doubly stochastic.
Matrix metropolis_weights(const NetworkGraph& g);

// Second-largest eigenvalue magnitude of W.
double sigma2(const Matrix& w);

// lambda_i = sum_j w_ij theta_j, computed in diffusion form
// theta_i + sum_{j != i} w_ij (theta_j - theta_i) so the all-equal fixed
// point is exact in floating point.
std::vector<qkernel::ThetaVector> consensus_mix(const std::vector<qkernel::ThetaVector>& thetas,
                                                const Matrix& w);

// sum_i ||theta_i - mean||_2.
double disagreement(const std::vector<qkernel::ThetaVector>& thetas);

enum class GradMode { Full, Stochastic };

struct NodeState {
  int id = 0;
  qkernel::ThetaVector theta;
  LabeledDataset shard;
  double eta = 0.1;
  qkernel::ThetaVector lambda;  // last mixed point
};

// One synchronous round: every lambda_i is mixed from round-(k-1) thetas,
// then theta_i = lambda_i - eta_i * g_i with the gradient evaluated AT
// lambda_i (combine-then-adapt). Throws with diagnostics on a non-finite
// gradient.
void cdqkl_step(const qkernel::AnsatzSpec& spec, std::vector<NodeState>& states, const Matrix& w,
                GradMode mode, int stochastic_q, std::uint64_t root_seed, int iteration);

struct NodeMetrics {
  double local_train = 0.0;
  double local_test = 0.0;
  double whole_train = 0.0;
  double whole_test = 0.0;
};

struct EvalPoint {
  int iteration = 0;
  std::vector<double> node_loss;
  double disagreement = 0.0;
};

struct TrainingHistory {
  std::vector<EvalPoint> points;
  std::vector<NodeMetrics> before;
  std::vector<NodeMetrics> after;
  std::vector<qkernel::ThetaVector> theta_initial;
  std::vector<qkernel::ThetaVector> theta_final;
};

struct RunOptions {
  double eta = 0.2;
  std::vector<double> eta_per_node;  // empty -> uniform eta
  int iterations = 300;
  GradMode grad_mode = GradMode::Full;
  int stochastic_q = 10;
  int eval_every = 10;
  double svm_c = 1.0;
  double svm_tol = 1e-3;
  std::uint64_t seed = 0;
  // Default: one seeded theta shared by every node. per_node_init draws a
  // distinct seeded theta per node instead.
  bool per_node_init = false;
  // Test override for experiments that need a specific starting point.
  std::optional<std::vector<qkernel::ThetaVector>> initial_thetas;
};

// K synchronous rounds. Records per-eval-point local losses and
// disagreement, and the four per-node accuracies (local/whole x train/test)
// before and after, each node's SVM trained on its own shard's kernel at its
// current theta. iterations == 0 evaluates only.
TrainingHistory run_cdqkl(const qkernel::AnsatzSpec& spec,
                          const std::vector<LabeledDataset>& train_shards,
                          const std::vector<LabeledDataset>& test_shards, const NetworkGraph& g,
                          const RunOptions& options);

}  // namespace cdqkl::consensus
