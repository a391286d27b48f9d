#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cdqkl/consensus.hpp"
#include "cdqkl/rng.hpp"

using namespace cdqkl;
using namespace cdqkl::consensus;

namespace {

LabeledDataset tiny_shard(std::uint64_t seed, std::size_t m = 4) {
  auto gen = rng::make_rng(seed);
  std::uniform_real_distribution<double> value(0.0, 3.14);
  LabeledDataset ds;
  ds.features = Matrix(m, 2);
  for (std::size_t r = 0; r < m; ++r) {
    ds.features(r, 0) = value(gen);
    ds.features(r, 1) = value(gen);
  }
  ds.labels.resize(m);
  for (std::size_t r = 0; r < m; ++r) ds.labels[r] = r % 2 == 0 ? 1 : -1;
  return ds;
}

qkernel::ThetaVector random_theta(int n, std::uint64_t seed) {
  auto gen = rng::make_rng(seed);
  std::uniform_real_distribution<double> value(-0.8, 0.8);
  qkernel::ThetaVector t(n);
  for (double& v : t) v = value(gen);
  return t;
}

}  // namespace

TEST_CASE("graph construction") {
  const auto ring = build_graph(Topology::Ring, 4);
  CHECK(ring.edges.size() == 4);
  CHECK(ring.degrees() == std::vector<int>{2, 2, 2, 2});

  const auto complete = build_graph(Topology::Complete, 4);
  CHECK(complete.edges.size() == 6);

  const auto star = build_graph(Topology::Star, 5);
  CHECK(star.edges.size() == 4);
  CHECK(star.degrees()[0] == 4);
  CHECK(star.degrees()[1] == 1);

  const auto line = build_graph(Topology::Line, 3);
  CHECK(line.edges.size() == 2);

  CHECK_THROWS_AS(build_graph(Topology::Ring, 1), std::invalid_argument);
  CHECK(topology_from_string("ring") == Topology::Ring);
  CHECK_THROWS_AS(topology_from_string("mesh"), std::invalid_argument);
}

TEST_CASE("explicit graphs must be connected") {
  CHECK_NOTHROW(build_graph_explicit(3, {{0, 1}, {1, 2}}));
  CHECK_THROWS_WITH_AS(build_graph_explicit(4, {{0, 1}, {2, 3}}),
                       "graph is disconnected: components {0,1} {2,3}", std::invalid_argument);
  CHECK_THROWS_AS(build_graph_explicit(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph_explicit(3, {{0, 5}}), std::invalid_argument);
}

TEST_CASE("metropolis weights") {
  SUBCASE("ring(4)") {
    const auto w = metropolis_weights(build_graph(Topology::Ring, 4));
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(w(i, i) - 1.0 / 3.0) <= 1e-15);
      CHECK(std::abs(w(i, (i + 1) % 4) - 1.0 / 3.0) <= 1e-15);
      CHECK(w(i, (i + 2) % 4) == 0.0);
    }
    CHECK(sigma2(w) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  }
  SUBCASE("complete(4)") {
    const auto w = metropolis_weights(build_graph(Topology::Complete, 4));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) CHECK(std::abs(w(i, j) - 0.25) <= 1e-15);
    }
  }
  SUBCASE("star(5)") {
    const auto w = metropolis_weights(build_graph(Topology::Star, 5));
    CHECK(std::abs(w(0, 0) - 0.2) <= 1e-15);
    for (int leaf = 1; leaf < 5; ++leaf) {
      CHECK(std::abs(w(0, leaf) - 0.2) <= 1e-15);
      CHECK(std::abs(w(leaf, leaf) - 0.8) <= 1e-15);
    }
  }
  SUBCASE("doubly stochastic with sigma2 < 1 on every family") {
    for (auto topology : {Topology::Ring, Topology::Complete, Topology::Star, Topology::Line}) {
      const auto g = build_graph(topology, 5);
      const auto w = metropolis_weights(g);
      for (int i = 0; i < 5; ++i) {
        double row = 0.0, col = 0.0;
        for (int j = 0; j < 5; ++j) {
          CHECK(w(i, j) >= 0.0);
          row += w(i, j);
          col += w(j, i);
        }
        CHECK(std::abs(row - 1.0) <= 1e-12);
        CHECK(std::abs(col - 1.0) <= 1e-12);
      }
      CHECK(sigma2(w) < 1.0);
    }
  }
}

TEST_CASE("consensus_mix") {
  const auto w4 = metropolis_weights(build_graph(Topology::Complete, 4));

  SUBCASE("consensus fixed point is exact") {
    const qkernel::ThetaVector v{0.3, -1.7, 2.2};
    const std::vector<qkernel::ThetaVector> thetas(4, v);
    const auto mixed = consensus_mix(thetas, w4);
    for (const auto& t : mixed) CHECK(t == v);
  }
  SUBCASE("unit vectors on complete(4) average exactly") {
    std::vector<qkernel::ThetaVector> thetas(4, qkernel::ThetaVector(4, 0.0));
    for (int i = 0; i < 4; ++i) thetas[i][i] = 1.0;
    const auto mixed = consensus_mix(thetas, w4);
    for (const auto& t : mixed) {
      for (double v : t) CHECK(v == 0.25);
    }
  }
  SUBCASE("node-average is preserved") {
    std::vector<qkernel::ThetaVector> thetas;
    for (int i = 0; i < 4; ++i) thetas.push_back(random_theta(6, 100 + i));
    const auto w = metropolis_weights(build_graph(Topology::Ring, 4));
    const auto mixed = consensus_mix(thetas, w);
    for (int p = 0; p < 6; ++p) {
      double before = 0.0, after = 0.0;
      for (int i = 0; i < 4; ++i) {
        before += thetas[i][p];
        after += mixed[i][p];
      }
      CHECK(std::abs(after - before) <= 1e-13);
    }
  }
  SUBCASE("dimension mismatch") {
    std::vector<qkernel::ThetaVector> bad{{0.0}, {0.0, 1.0}, {0.0}, {0.0}};
    CHECK_THROWS_AS(consensus_mix(bad, w4), std::invalid_argument);
    std::vector<qkernel::ThetaVector> three(3, qkernel::ThetaVector{0.0});
    CHECK_THROWS_AS(consensus_mix(three, w4), std::invalid_argument);
  }
}

TEST_CASE("disagreement") {
  CHECK(disagreement({{1.0, 2.0}, {1.0, 2.0}}) == 0.0);

  const qkernel::ThetaVector v{0.6, -0.8};  // norm 1
  qkernel::ThetaVector neg = v;
  for (double& x : neg) x = -x;
  CHECK(disagreement({v, neg}) == doctest::Approx(2.0).epsilon(1e-12));

  std::vector<qkernel::ThetaVector> thetas;
  for (int i = 0; i < 5; ++i) thetas.push_back(random_theta(3, 50 + i));
  std::vector<double> mean(3, 0.0);
  for (const auto& t : thetas) {
    for (int p = 0; p < 3; ++p) mean[p] += t[p] / 5.0;
  }
  double expect = 0.0;
  for (const auto& t : thetas) {
    double sq = 0.0;
    for (int p = 0; p < 3; ++p) sq += (t[p] - mean[p]) * (t[p] - mean[p]);
    expect += std::sqrt(sq);
  }
  CHECK(disagreement(thetas) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("cdqkl_step matches the hand-computed update") {
  const auto spec = qkernel::AnsatzSpec::make(2, 1, 2);
  const auto w = metropolis_weights(build_graph(Topology::Complete, 2));
  std::vector<NodeState> states;
  for (int i = 0; i < 2; ++i) {
    NodeState node;
    node.id = i;
    node.theta = random_theta(spec.n_params(), 200 + i);
    node.shard = tiny_shard(300 + i);
    node.eta = 0.3;
    node.lambda = node.theta;
    states.push_back(node);
  }

  std::vector<qkernel::ThetaVector> thetas{states[0].theta, states[1].theta};
  const auto mixed = consensus_mix(thetas, w);
  std::vector<qkernel::ThetaVector> expected;
  for (int i = 0; i < 2; ++i) {
    const auto g = qkernel::grad_param_shift(spec, states[i].shard, mixed[i]);
    qkernel::ThetaVector t(mixed[i].size());
    for (std::size_t p = 0; p < t.size(); ++p) t[p] = mixed[i][p] - 0.3 * g[p];
    expected.push_back(t);
  }

  cdqkl_step(spec, states, w, GradMode::Full, 0, 1, 1);
  for (int i = 0; i < 2; ++i) {
    CHECK(states[i].lambda == mixed[i]);
    CHECK(states[i].theta == expected[i]);
  }
}

TEST_CASE("cdqkl_step aborts on a non-finite gradient") {
  const auto spec = qkernel::AnsatzSpec::make(2, 1, 2);
  const auto w = metropolis_weights(build_graph(Topology::Complete, 2));
  std::vector<NodeState> states;
  for (int i = 0; i < 2; ++i) {
    NodeState node;
    node.id = i;
    node.theta = qkernel::ThetaVector(spec.n_params(), 0.1);
    node.shard = tiny_shard(400 + i);
    node.eta = 0.1;
    node.lambda = node.theta;
    states.push_back(node);
  }
  states[0].theta[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(cdqkl_step(spec, states, w, GradMode::Full, 0, 1, 1), std::runtime_error);
}

TEST_CASE("zero step size contracts disagreement at sigma2 on ring(4)") {
  const auto spec = qkernel::AnsatzSpec::make(2, 1, 2);
  const auto g = build_graph(Topology::Ring, 4);

  // Mean-zero initial thetas (+a, -a, +b, -b) keep every iterate's scale
  // tied to the deviation itself, so the 1/3 contraction is visible all the
  // way down instead of drowning in absolute rounding.
  const auto a = random_theta(spec.n_params(), 501);
  const auto b = random_theta(spec.n_params(), 502);
  qkernel::ThetaVector na = a, nb = b;
  for (double& v : na) v = -v;
  for (double& v : nb) v = -v;

  RunOptions options;
  options.eta = 0.0;
  options.iterations = 50;
  options.eval_every = 1;
  options.seed = 7;
  options.initial_thetas = std::vector<qkernel::ThetaVector>{a, na, b, nb};

  std::vector<LabeledDataset> train_shards, test_shards;
  for (int i = 0; i < 4; ++i) {
    train_shards.push_back(tiny_shard(600 + i));
    test_shards.push_back(tiny_shard(700 + i, 2));
  }
  const auto history = run_cdqkl(spec, train_shards, test_shards, g, options);

  REQUIRE(history.points.size() == 51);
  const double initial = history.points.front().disagreement;
  REQUIRE(initial > 0.0);
  for (std::size_t k = 1; k < history.points.size(); ++k) {
    const double prev = history.points[k - 1].disagreement;
    const double cur = history.points[k].disagreement;
    CHECK(cur <= (1.0 / 3.0 + 1e-10) * prev);
  }
  const double target = std::pow(1.0 / 3.0, 50) * initial;
  CHECK(history.points.back().disagreement <= target * (1.0 + 1e-9));
  CHECK(history.points.back().disagreement >= target * (1.0 - 1e-9));
}

TEST_CASE("identical shards and init follow centralized gradient descent bitwise") {
  const auto spec = qkernel::AnsatzSpec::make(2, 1, 2);
  const auto g = build_graph(Topology::Ring, 4);
  const auto w = metropolis_weights(g);
  const auto shard = tiny_shard(801);
  const auto theta0 = random_theta(spec.n_params(), 802);
  const double eta = 0.2;

  std::vector<NodeState> states;
  for (int i = 0; i < 4; ++i) {
    NodeState node;
    node.id = i;
    node.theta = theta0;
    node.shard = shard;
    node.eta = eta;
    node.lambda = theta0;
    states.push_back(node);
  }

  qkernel::ThetaVector reference = theta0;
  double worst = 0.0;
  for (int k = 1; k <= 100; ++k) {
    cdqkl_step(spec, states, w, GradMode::Full, 0, 1, k);
    const auto grad = qkernel::grad_param_shift(spec, shard, reference);
    for (std::size_t p = 0; p < reference.size(); ++p) reference[p] -= eta * grad[p];
    for (const auto& node : states) {
      for (std::size_t p = 0; p < reference.size(); ++p) {
        worst = std::max(worst, std::abs(node.theta[p] - reference[p]));
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("run_cdqkl bookkeeping") {
  const auto spec = qkernel::AnsatzSpec::make(2, 1, 2);
  const auto g = build_graph(Topology::Ring, 4);
  std::vector<LabeledDataset> train_shards, test_shards;
  for (int i = 0; i < 4; ++i) {
    train_shards.push_back(tiny_shard(900 + i, 6));
    test_shards.push_back(tiny_shard(950 + i, 3));
  }

  RunOptions options;
  options.eta = 0.2;
  options.iterations = 4;
  options.eval_every = 2;
  options.seed = 42;

  SUBCASE("evaluation-only run reports before == after") {
    RunOptions eval_only = options;
    eval_only.iterations = 0;
    const auto history = run_cdqkl(spec, train_shards, test_shards, g, eval_only);
    REQUIRE(history.before.size() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(history.before[i].local_train == history.after[i].local_train);
      CHECK(history.before[i].whole_test == history.after[i].whole_test);
    }
    CHECK(history.points.size() == 1);
  }

  SUBCASE("before metrics equal the evaluation-only run") {
    RunOptions eval_only = options;
    eval_only.iterations = 0;
    const auto h0 = run_cdqkl(spec, train_shards, test_shards, g, eval_only);
    const auto h4 = run_cdqkl(spec, train_shards, test_shards, g, options);
    for (int i = 0; i < 4; ++i) {
      CHECK(h4.before[i].local_train == h0.before[i].local_train);
      CHECK(h4.before[i].local_test == h0.before[i].local_test);
      CHECK(h4.before[i].whole_train == h0.before[i].whole_train);
      CHECK(h4.before[i].whole_test == h0.before[i].whole_test);
    }
  }

  SUBCASE("fixed seed is bit-deterministic") {
    const auto h1 = run_cdqkl(spec, train_shards, test_shards, g, options);
    const auto h2 = run_cdqkl(spec, train_shards, test_shards, g, options);
    CHECK(h1.theta_final == h2.theta_final);
    REQUIRE(h1.points.size() == h2.points.size());
    for (std::size_t k = 0; k < h1.points.size(); ++k) {
      CHECK(h1.points[k].disagreement == h2.points[k].disagreement);
      CHECK(h1.points[k].node_loss == h2.points[k].node_loss);
    }
  }

  SUBCASE("stochastic mode is seeded and deterministic") {
    RunOptions stochastic = options;
    stochastic.grad_mode = GradMode::Stochastic;
    stochastic.stochastic_q = 3;
    const auto h1 = run_cdqkl(spec, train_shards, test_shards, g, stochastic);
    const auto h2 = run_cdqkl(spec, train_shards, test_shards, g, stochastic);
    CHECK(h1.theta_final == h2.theta_final);
  }

  SUBCASE("shared init starts all nodes at the same theta") {
    const auto h = run_cdqkl(spec, train_shards, test_shards, g, options);
    CHECK(h.theta_initial[0] == h.theta_initial[1]);
    CHECK(h.points.front().disagreement == 0.0);
  }

  SUBCASE("per-node init starts nodes apart") {
    RunOptions spread = options;
    spread.per_node_init = true;
    const auto h = run_cdqkl(spec, train_shards, test_shards, g, spread);
    CHECK(h.points.front().disagreement > 0.0);
  }

  SUBCASE("shard count must match the graph") {
    std::vector<LabeledDataset> three(train_shards.begin(), train_shards.begin() + 3);
    CHECK_THROWS_AS(run_cdqkl(spec, three, test_shards, g, options), std::invalid_argument);
  }

  SUBCASE("per-node step sizes") {
    RunOptions per_node = options;
    per_node.eta_per_node = {0.0, 0.0, 0.0, 0.0};
    const auto frozen = run_cdqkl(spec, train_shards, test_shards, g, per_node);
    // All-zero per-node steps plus shared init means nothing ever moves.
    CHECK(frozen.theta_final == frozen.theta_initial);

    per_node.eta_per_node = {0.1, 0.2};
    CHECK_THROWS_AS(run_cdqkl(spec, train_shards, test_shards, g, per_node),
                    std::invalid_argument);
  }
}
