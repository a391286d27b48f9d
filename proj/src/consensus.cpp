#include "cdqkl/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "cdqkl/linalg.hpp"
#include "cdqkl/rng.hpp"
#include "cdqkl/svm.hpp"

namespace cdqkl::consensus {

namespace {

std::vector<std::vector<int>> components_of(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> stack{start};
    comp[start] = static_cast<int>(out.size());
    std::vector<int> members;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (int w : adj[v]) {
        if (comp[w] < 0) {
          comp[w] = comp[start];
          stack.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

NetworkGraph finish_graph(int n, std::vector<std::pair<int, int>> edges) {
  const auto comps = components_of(n, edges);
  if (comps.size() > 1) {
    std::string msg = "graph is disconnected: components";
    for (const auto& c : comps) {
      msg += " {";
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) msg += ",";
        msg += std::to_string(c[i]);
      }
      msg += "}";
    }
    throw std::invalid_argument(msg);
  }
  std::sort(edges.begin(), edges.end());
  return NetworkGraph{n, std::move(edges)};
}

struct EvalData {
  const std::vector<LabeledDataset>* train_shards;
  const std::vector<LabeledDataset>* test_shards;
  LabeledDataset whole_train;
  LabeledDataset whole_test;
};

std::vector<NodeMetrics> evaluate_nodes(const qkernel::AnsatzSpec& spec,
                                        const std::vector<NodeState>& states, const EvalData& data,
                                        double svm_c, double svm_tol) {
  std::vector<NodeMetrics> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& shard = (*data.train_shards)[i];
    const auto& theta = states[i].theta;
    const Matrix k_local = qkernel::kernel_matrix(spec, shard.features, theta);
    const svm::SvmModel model = svm::smo_train(k_local, shard.labels, svm_c, svm_tol);

    NodeMetrics m;
    m.local_train = svm::accuracy(svm::predict(model, k_local), shard.labels);
    const auto& local_test = (*data.test_shards)[i];
    m.local_test = svm::accuracy(
        svm::predict(model, qkernel::cross_kernel(spec, shard.features, local_test.features,
                                                  theta)),
        local_test.labels);
    m.whole_train = svm::accuracy(
        svm::predict(model, qkernel::cross_kernel(spec, shard.features,
                                                  data.whole_train.features, theta)),
        data.whole_train.labels);
    m.whole_test = svm::accuracy(
        svm::predict(model, qkernel::cross_kernel(spec, shard.features, data.whole_test.features,
                                                  theta)),
        data.whole_test.labels);
    out.push_back(m);
  }
  return out;
}

}  // namespace

std::vector<int> NetworkGraph::degrees() const {
  std::vector<int> deg(n_nodes, 0);
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

Topology topology_from_string(const std::string& name) {
  if (name == "ring") return Topology::Ring;
  if (name == "complete") return Topology::Complete;
  if (name == "star") return Topology::Star;
  if (name == "line") return Topology::Line;
  throw std::invalid_argument("unknown topology '" + name + "'");
}

NetworkGraph build_graph(Topology topology, int n_nodes) {
  if (n_nodes < 2) throw std::invalid_argument("build_graph: need at least 2 nodes");
  std::set<std::pair<int, int>> edges;
  auto add = [&edges](int a, int b) { edges.insert({std::min(a, b), std::max(a, b)}); };
  switch (topology) {
    case Topology::Ring:
      for (int i = 0; i < n_nodes; ++i) add(i, (i + 1) % n_nodes);
      break;
    case Topology::Complete:
      for (int i = 0; i < n_nodes; ++i) {
        for (int j = i + 1; j < n_nodes; ++j) add(i, j);
      }
      break;
    case Topology::Star:
      for (int i = 1; i < n_nodes; ++i) add(0, i);
      break;
    case Topology::Line:
      for (int i = 0; i + 1 < n_nodes; ++i) add(i, i + 1);
      break;
  }
  return finish_graph(n_nodes, {edges.begin(), edges.end()});
}

NetworkGraph build_graph_explicit(int n_nodes, std::vector<std::pair<int, int>> edges) {
  if (n_nodes < 2) throw std::invalid_argument("build_graph: need at least 2 nodes");
  std::set<std::pair<int, int>> normalized;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("build_graph: self-loop on node " + std::to_string(a));
    if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes) {
      throw std::invalid_argument("build_graph: edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ") out of range");
    }
    normalized.insert({std::min(a, b), std::max(a, b)});
  }
  return finish_graph(n_nodes, {normalized.begin(), normalized.end()});
}

Matrix metropolis_weights(const NetworkGraph& g) {
  const auto deg = g.degrees();
  const int n = g.n_nodes;
  Matrix w(n, n, 0.0);
  for (const auto& [a, b] : g.edges) {
    const double v = 1.0 / (1.0 + std::max(deg[a], deg[b]));
    w(a, b) = v;
    w(b, a) = v;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) off += w(i, j);
    }
    w(i, i) = 1.0 - off;
  }
  return w;
}

double sigma2(const Matrix& w) { return linalg::second_largest_abs_eigenvalue(w); }

std::vector<qkernel::ThetaVector> consensus_mix(const std::vector<qkernel::ThetaVector>& thetas,
                                                const Matrix& w) {
  const std::size_t n = thetas.size();
  if (w.rows() != n || w.cols() != n) {
    throw std::invalid_argument("consensus_mix: W is " + std::to_string(w.rows()) + "x" +
                                std::to_string(w.cols()) + " for " + std::to_string(n) + " nodes");
  }
  if (n == 0) return {};
  const std::size_t p = thetas.front().size();
  for (const auto& t : thetas) {
    if (t.size() != p) throw std::invalid_argument("consensus_mix: theta dimension mismatch");
  }
  // Diffusion form: exact fixed point when all thetas are equal, and
  // equivalent to sum_j w_ij theta_j for any row-stochastic W.
  std::vector<qkernel::ThetaVector> mixed = thetas;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      for (std::size_t t = 0; t < p; ++t) mixed[i][t] += wij * (thetas[j][t] - thetas[i][t]);
    }
  }
  return mixed;
}

double disagreement(const std::vector<qkernel::ThetaVector>& thetas) {
  const std::size_t n = thetas.size();
  if (n == 0) return 0.0;
  const std::size_t p = thetas.front().size();
  std::vector<double> mean(p, 0.0);
  for (const auto& t : thetas) {
    if (t.size() != p) throw std::invalid_argument("disagreement: theta dimension mismatch");
    for (std::size_t i = 0; i < p; ++i) mean[i] += t[i];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  double total = 0.0;
  for (const auto& t : thetas) {
    double sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double d = t[i] - mean[i];
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total;
}

void cdqkl_step(const qkernel::AnsatzSpec& spec, std::vector<NodeState>& states, const Matrix& w,
                GradMode mode, int stochastic_q, std::uint64_t root_seed, int iteration) {
  const std::size_t n = states.size();
  std::vector<qkernel::ThetaVector> thetas;
  thetas.reserve(n);
  for (const auto& s : states) thetas.push_back(s.theta);
  const auto mixed = consensus_mix(thetas, w);

  for (std::size_t i = 0; i < n; ++i) {
    NodeState& node = states[i];
    node.lambda = mixed[i];
    qkernel::ThetaVector grad;
    if (node.eta == 0.0) {
      grad.assign(node.lambda.size(), 0.0);
    } else if (mode == GradMode::Full) {
      grad = qkernel::grad_param_shift(spec, node.shard, node.lambda);
    } else {
      grad = qkernel::grad_stochastic(spec, node.shard, node.lambda, stochastic_q,
                                      rng::seed_for(root_seed, "sgd", iteration, i));
    }
    for (std::size_t t = 0; t < grad.size(); ++t) {
      if (!std::isfinite(grad[t])) {
        throw std::runtime_error("cdqkl_step: non-finite gradient at iteration " +
                                 std::to_string(iteration) + ", node " + std::to_string(node.id) +
                                 ", component " + std::to_string(t));
      }
    }
    for (std::size_t t = 0; t < node.theta.size(); ++t) {
      node.theta[t] = node.lambda[t] - node.eta * grad[t];
    }
  }
}

TrainingHistory run_cdqkl(const qkernel::AnsatzSpec& spec,
                          const std::vector<LabeledDataset>& train_shards,
                          const std::vector<LabeledDataset>& test_shards, const NetworkGraph& g,
                          const RunOptions& options) {
  spec.validate();
  const std::size_t n = static_cast<std::size_t>(g.n_nodes);
  if (train_shards.size() != n || test_shards.size() != n) {
    throw std::invalid_argument("run_cdqkl: shard count does not match node count");
  }
  for (const auto& s : train_shards) {
    if (s.size() == 0) throw std::invalid_argument("run_cdqkl: empty training shard");
  }
  for (const auto& s : test_shards) {
    if (s.size() == 0) throw std::invalid_argument("run_cdqkl: empty test shard");
  }
  if (options.iterations < 0) throw std::invalid_argument("run_cdqkl: negative iteration count");
  if (options.eval_every < 1) throw std::invalid_argument("run_cdqkl: eval_every must be >= 1");
  if (!options.eta_per_node.empty() && options.eta_per_node.size() != n) {
    throw std::invalid_argument("run_cdqkl: eta_per_node size mismatch");
  }

  const Matrix w = metropolis_weights(g);
  const int p = spec.n_params();

  std::vector<qkernel::ThetaVector> init;
  if (options.initial_thetas) {
    init = *options.initial_thetas;
    if (init.size() != n) throw std::invalid_argument("run_cdqkl: initial_thetas count mismatch");
    for (const auto& t : init) {
      if (static_cast<int>(t.size()) != p) {
        throw std::invalid_argument("run_cdqkl: initial theta dimension mismatch");
      }
    }
  } else {
    auto gen = rng::make_rng(rng::seed_for(options.seed, "init"));
    std::uniform_real_distribution<double> angle(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
    if (options.per_node_init) {
      for (std::size_t i = 0; i < n; ++i) {
        qkernel::ThetaVector t(p);
        for (double& v : t) v = angle(gen);
        init.push_back(std::move(t));
      }
    } else {
      qkernel::ThetaVector shared(p);
      for (double& v : shared) v = angle(gen);
      init.assign(n, shared);
    }
  }

  std::vector<NodeState> states;
  states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    NodeState node;
    node.id = static_cast<int>(i);
    node.theta = init[i];
    node.shard = train_shards[i];
    node.eta = options.eta_per_node.empty() ? options.eta : options.eta_per_node[i];
    node.lambda = init[i];
    states.push_back(std::move(node));
  }

  EvalData data{&train_shards, &test_shards, concat_datasets(train_shards),
                concat_datasets(test_shards)};

  TrainingHistory history;
  history.theta_initial = init;

  auto record = [&](int iteration) {
    EvalPoint point;
    point.iteration = iteration;
    std::vector<qkernel::ThetaVector> thetas;
    thetas.reserve(n);
    for (const auto& s : states) thetas.push_back(s.theta);
    point.disagreement = disagreement(thetas);
    point.node_loss.reserve(n);
    for (const auto& s : states) {
      point.node_loss.push_back(qkernel::local_loss(spec, s.shard, s.theta));
    }
    history.points.push_back(std::move(point));
  };

  record(0);
  history.before = evaluate_nodes(spec, states, data, options.svm_c, options.svm_tol);

  for (int k = 1; k <= options.iterations; ++k) {
    cdqkl_step(spec, states, w, options.grad_mode, options.stochastic_q, options.seed, k);
    if (k % options.eval_every == 0 || k == options.iterations) record(k);
  }

  history.after = evaluate_nodes(spec, states, data, options.svm_c, options.svm_tol);
  history.theta_final.reserve(n);
  for (const auto& s : states) history.theta_final.push_back(s.theta);
  return history;
}

}  // namespace cdqkl::consensus
