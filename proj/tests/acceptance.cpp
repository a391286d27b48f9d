// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cdqkl/audiofeat.hpp"
#include "cdqkl/consensus.hpp"
#include "cdqkl/harness.hpp"
#include "cdqkl/linalg.hpp"
#include "cdqkl/qkernel.hpp"
#include "cdqkl/rng.hpp"
#include "cdqkl/runners.hpp"
#include "cdqkl/statevec.hpp"
#include "cdqkl/svm.hpp"
#include "support/fixtures.hpp"
#include "support/qp_oracle.hpp"

using namespace cdqkl;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  void require_le(double value, double bound, const std::string& what) {
    if (!(value <= bound)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: %.3e > %.3e", what.c_str(), value, bound);
      problems.push_back(buf);
    }
  }
  void require_ge(double value, double bound, const std::string& what) {
    if (!(value >= bound)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: %.3e < %.3e", what.c_str(), value, bound);
      problems.push_back(buf);
    }
  }
};

int g_failures = 0;

void run_criterion(int id, const std::string& name, double budget_s,
                   const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.problems.push_back(std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0 && elapsed >= budget_s) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "runtime %.2fs exceeded budget %.0fs", elapsed, budget_s);
    c.problems.push_back(buf);
  }
  if (c.problems.empty()) {
    std::printf("[PASS] criterion %2d: %s (%.2fs)\n", id, name.c_str(), elapsed);
  } else {
    ++g_failures;
    std::printf("[FAIL] criterion %2d: %s (%.2fs)\n", id, name.c_str(), elapsed);
    for (const auto& p : c.problems) std::printf("        - %s\n", p.c_str());
  }
  std::fflush(stdout);
}

statevec::Gate random_gate(std::mt19937_64& gen, int n_qubits) {
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> qubit(0, n_qubits - 1);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  switch (kind(gen)) {
    case 0: return statevec::Gate::h(qubit(gen));
    case 1: return statevec::Gate::rx(qubit(gen), angle(gen));
    case 2: return statevec::Gate::ry(qubit(gen), angle(gen));
    case 3: return statevec::Gate::rz(qubit(gen), angle(gen));
    case 4: {
      int a = qubit(gen), b = qubit(gen);
      while (b == a) b = qubit(gen);
      return statevec::Gate::rzz(a, b, angle(gen));
    }
    default: {
      int a = qubit(gen), b = qubit(gen);
      while (b == a) b = qubit(gen);
      return statevec::Gate::cnot(a, b);
    }
  }
}

Matrix random_angles(std::size_t m, std::size_t d, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> value(0.0, kPi);
  Matrix x(m, d);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < d; ++c) x(r, c) = value(gen);
  }
  return x;
}

qkernel::ThetaVector random_theta(int n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> value(-kPi / 2, kPi / 2);
  qkernel::ThetaVector t(n);
  for (double& v : t) v = value(gen);
  return t;
}

void criterion_simulator(Criterion& c) {
  using namespace statevec;
  const auto z1 = zero_state(1);
  c.require(z1.amplitudes()[0] == cplx{1.0, 0.0} && z1.amplitudes()[1] == cplx{0.0, 0.0},
            "zero_state(1) amplitudes");
  const auto z2 = zero_state(2);
  c.require(z2.amplitudes()[0] == cplx{1.0, 0.0}, "zero_state(2) amplitude 0");
  bool threw = false;
  try {
    zero_state(21);
  } catch (const std::out_of_range&) {
    threw = true;
  }
  c.require(threw, "zero_state(21) must raise a capacity error");

  const double s = 1.0 / std::sqrt(2.0);
  const auto plus = apply_gate(zero_state(1), Gate::h(0));
  c.require_le(std::abs(plus.amplitudes()[0] - cplx{s, 0}), 1e-12, "H|0> amplitude 0");
  c.require_le(std::abs(plus.amplitudes()[1] - cplx{s, 0}), 1e-12, "H|0> amplitude 1");
  const auto flipped = apply_gate(zero_state(1), Gate::ry(0, kPi));
  c.require_le(std::abs(flipped.amplitudes()[0]), 1e-12, "RY(pi)|0> amplitude 0");
  c.require_le(std::abs(flipped.amplitudes()[1] - cplx{1, 0}), 1e-12, "RY(pi)|0> amplitude 1");

  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 30; ++trial) {
    StateVector state = zero_state(3);
    for (int i = 0; i < 50; ++i) state.apply(random_gate(gen, 3));
    c.require_le(std::abs(state.norm() - 1.0), 1e-12, "random-circuit norm");
  }

  // Involutions and composition.
  StateVector state = zero_state(2);
  for (int i = 0; i < 10; ++i) state.apply(random_gate(gen, 2));
  auto copy = state;
  copy.apply(Gate::h(0));
  copy.apply(Gate::h(0));
  double dev = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    dev = std::max(dev, std::abs(copy.amplitudes()[i] - state.amplitudes()[i]));
  }
  c.require_le(dev, 1e-12, "H twice is the identity");

  copy = state;
  copy.apply(Gate::cnot(0, 1));
  copy.apply(Gate::cnot(0, 1));
  dev = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    dev = std::max(dev, std::abs(copy.amplitudes()[i] - state.amplitudes()[i]));
  }
  c.require_le(dev, 1e-12, "CNOT twice is the identity");

  copy = state;
  copy.apply(Gate::rzz(0, 1, 0.0));
  dev = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    dev = std::max(dev, std::abs(copy.amplitudes()[i] - state.amplitudes()[i]));
  }
  c.require_le(dev, 1e-12, "RZZ(0) is the identity");

  auto lhs = apply_gate(zero_state(1), Gate::h(0));
  auto rhs = lhs;
  lhs.apply(Gate::rz(0, 0.7));
  lhs.apply(Gate::rz(0, -1.9));
  rhs.apply(Gate::rz(0, 0.7 - 1.9));
  c.require_le(std::abs(std::abs(inner_product(lhs, rhs)) - 1.0), 1e-12,
               "RZ(a)RZ(b) = RZ(a+b) up to phase");

  c.require_le(std::abs(inner_product(plus, zero_state(1)) - cplx{s, 0}), 1e-12,
               "<+|0> = 1/sqrt(2)");
  c.require_le(std::abs(prob_zero(plus) - 0.5), 1e-12, "prob_zero(H|0>)");
  c.require_le(prob_zero(flipped), 1e-12, "prob_zero(RY(pi)|0>)");
  c.require(prob_zero(zero_state(4)) == 1.0, "prob_zero(zero_state)");
}

void criterion_kernel_validity(Criterion& c) {
  std::mt19937_64 gen(555);
  std::uniform_int_distribution<int> qubits(1, 4);
  std::uniform_int_distribution<int> points(2, 12);
  for (int instance = 0; instance < 20; ++instance) {
    const int n = qubits(gen);
    const int m = points(gen);
    const auto spec = qkernel::AnsatzSpec::make(n, 2, n);
    const auto x = random_angles(m, n, gen);
    const auto theta = random_theta(spec.n_params(), gen);
    const auto k = qkernel::kernel_matrix(spec, x, theta);
    const auto check = qkernel::check_kernel_matrix(k);
    c.require_le(check.max_asymmetry, 1e-10, "kernel symmetry");
    c.require_le(check.max_diag_deviation, 1e-10, "kernel unit diagonal");
    c.require_ge(check.min_eigenvalue, -1e-9, "kernel PSD");
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double inverted = qkernel::kernel_entry_inversion(spec, x.row(i), x.row(j), theta);
        c.require_le(std::abs(k(i, j) - inverted), 1e-10, "overlap vs inverted-circuit form");
      }
    }
  }
}

void criterion_closed_form(Criterion& c) {
  const auto spec = qkernel::AnsatzSpec::make(1, 1, 1);
  const qkernel::ThetaVector theta{0.0};
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double a = kPi * i / 49.0;
      const double b = kPi * ((i * 7 + j * 17) % 50) / 49.0;
      const double xa[] = {a};
      const double xb[] = {b};
      const double expected = std::pow(std::cos(0.5 * (a - b)), 2);
      c.require_le(std::abs(qkernel::kernel_entry(spec, xa, xb, theta) - expected), 1e-10,
                   "closed-form kernel value");
    }
  }
}

void criterion_gradients(Criterion& c) {
  std::mt19937_64 gen(808);
  for (int instance = 0; instance < 10; ++instance) {
    const auto spec = qkernel::AnsatzSpec::make(2, 2, 2);
    LabeledDataset ds;
    ds.features = random_angles(6, 2, gen);
    ds.labels.resize(6);
    for (int i = 0; i < 6; ++i) ds.labels[i] = i % 2 == 0 ? 1 : -1;
    const auto theta = random_theta(spec.n_params(), gen);
    const auto exact = qkernel::grad_param_shift(spec, ds, theta);
    const auto fd = qkernel::grad_fd(spec, ds, theta, 1e-5);
    double worst = 0.0;
    for (std::size_t p = 0; p < exact.size(); ++p) {
      worst = std::max(worst, std::abs(exact[p] - fd[p]));
    }
    c.require_le(worst, 1e-6, "param-shift vs central FD");
  }
}

void criterion_smo(Criterion& c) {
  {
    const Matrix k = Matrix::identity(2);
    const std::vector<int> y{1, -1};
    const auto model = svm::smo_train(k, y, 1.0, 1e-6);
    c.require_le(std::abs(model.alphas[0] - 1.0), 1e-8, "identity fixture alpha_1");
    c.require_le(std::abs(model.alphas[1] - 1.0), 1e-8, "identity fixture alpha_2");
    c.require_le(std::abs(model.bias), 1e-8, "identity fixture bias");
    const auto best = oracle::qp_best(k, y, 1.0);
    c.require_le(std::abs(svm::dual_objective(k, y, model.alphas) - best.objective), 1e-6,
                 "identity fixture dual objective");
    c.require_le(svm::kkt_violation(model, k, 1e-3), 1e-9, "identity fixture KKT");
  }

  std::mt19937_64 gen(4242);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> size(3, 6);
  for (int instance = 0; instance < 12; ++instance) {
    const std::size_t m = size(gen);
    Matrix x(m, 2);
    for (std::size_t r = 0; r < m; ++r) {
      x(r, 0) = value(gen);
      x(r, 1) = value(gen);
    }
    std::vector<int> y(m);
    bool pos = false, neg = false;
    for (auto& v : y) {
      v = coin(gen) ? 1 : -1;
      (v == 1 ? pos : neg) = true;
    }
    if (!pos) y[0] = 1;
    if (!neg) y[m - 1] = -1;
    const auto k = svm::gaussian_kernel(x, 1.0);
    const double cpar = instance % 2 == 0 ? 1.0 : 1000.0;
    const auto model = svm::smo_train(k, y, cpar, 1e-6);
    const auto best = oracle::qp_best(k, y, cpar);
    c.require_le(std::abs(svm::dual_objective(k, y, model.alphas) - best.objective), 1e-6,
                 "dual objective vs QP oracle");
    c.require_le(svm::kkt_violation(model, k, 1e-3), 1e-9, "KKT at tol 1e-3");
  }
}

void criterion_consensus_matrix(Criterion& c) {
  using namespace consensus;
  // Entries are checked to 1e-15: the construction computes w_ii = 1 - sum,
  // which lands within a couple of ulps of the exact rationals.
  {
    const auto w = metropolis_weights(build_graph(Topology::Ring, 4));
    for (int i = 0; i < 4; ++i) {
      c.require_le(std::abs(w(i, i) - 1.0 / 3.0), 1e-15, "ring(4) diagonal");
      c.require_le(std::abs(w(i, (i + 1) % 4) - 1.0 / 3.0), 1e-15, "ring(4) neighbor weight");
      c.require(w(i, (i + 2) % 4) == 0.0, "ring(4) non-edge weight is zero");
    }
    c.require_le(std::abs(sigma2(w) - 1.0 / 3.0), 1e-10, "sigma2(ring(4)) = 1/3");
  }
  {
    const auto w = metropolis_weights(build_graph(Topology::Complete, 4));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        c.require_le(std::abs(w(i, j) - 0.25), 1e-15, "complete(4) entry");
      }
    }
  }
  {
    const auto w = metropolis_weights(build_graph(Topology::Star, 5));
    c.require_le(std::abs(w(0, 0) - 0.2), 1e-15, "star(5) center diagonal");
    for (int leaf = 1; leaf < 5; ++leaf) {
      c.require_le(std::abs(w(0, leaf) - 0.2), 1e-15, "star(5) center-leaf weight");
      c.require_le(std::abs(w(leaf, leaf) - 0.8), 1e-15, "star(5) leaf diagonal");
    }
  }
  for (auto topology : {Topology::Ring, Topology::Complete, Topology::Star}) {
    const int n = topology == Topology::Star ? 5 : 4;
    const auto w = metropolis_weights(build_graph(topology, n));
    for (int i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < n; ++j) {
        row += w(i, j);
        col += w(j, i);
      }
      c.require_le(std::abs(row - 1.0), 1e-12, "row sum");
      c.require_le(std::abs(col - 1.0), 1e-12, "column sum");
    }
  }
}

void criterion_contraction(Criterion& c) {
  using namespace consensus;
  const auto spec = qkernel::AnsatzSpec::make(2, 1, 2);
  auto gen = rng::make_rng(31337);
  std::uniform_real_distribution<double> value(-0.8, 0.8);
  qkernel::ThetaVector a(spec.n_params()), b(spec.n_params());
  for (double& v : a) v = value(gen);
  for (double& v : b) v = value(gen);
  qkernel::ThetaVector na = a, nb = b;
  for (double& v : na) v = -v;
  for (double& v : nb) v = -v;

  RunOptions options;
  options.eta = 0.0;
  options.iterations = 50;
  options.eval_every = 1;
  options.seed = 1;
  options.initial_thetas = std::vector<qkernel::ThetaVector>{a, na, b, nb};

  std::vector<LabeledDataset> train_shards, test_shards;
  for (int i = 0; i < 4; ++i) {
    LabeledDataset ds;
    ds.features = random_angles(4, 2, gen);
    ds.labels = {1, -1, 1, -1};
    train_shards.push_back(ds);
    LabeledDataset ts;
    ts.features = random_angles(2, 2, gen);
    ts.labels = {1, -1};
    test_shards.push_back(ts);
  }

  const auto history =
      run_cdqkl(spec, train_shards, test_shards, build_graph(Topology::Ring, 4), options);
  c.require(history.points.size() == 51, "one record per iteration");
  for (std::size_t k = 1; k < history.points.size(); ++k) {
    const double prev = history.points[k - 1].disagreement;
    const double cur = history.points[k].disagreement;
    c.require_le(cur, (1.0 / 3.0 + 1e-10) * prev, "per-step contraction factor");
  }
}

void criterion_centralized_equivalence(Criterion& c) {
  using namespace consensus;
  const auto spec = qkernel::AnsatzSpec::make(2, 1, 2);
  auto gen = rng::make_rng(9090);
  LabeledDataset shard;
  shard.features = random_angles(4, 2, gen);
  shard.labels = {1, -1, 1, -1};
  const auto theta0 = random_theta(spec.n_params(), gen);
  const double eta = 0.2;

  const auto g = build_graph(Topology::Ring, 4);
  const auto w = metropolis_weights(g);
  std::vector<NodeState> states;
  for (int i = 0; i < 4; ++i) {
    states.push_back(NodeState{i, theta0, shard, eta, theta0});
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
  c.require_le(worst, 1e-12, "max per-step deviation from centralized descent");
}

harness::ExperimentConfig table1_config() {
  harness::ExperimentConfig cfg;
  cfg.seed = 42;
  cfg.ansatz.n_qubits = 2;
  cfg.ansatz.n_layers = 2;
  cfg.optimizer.eta = 0.3;
  cfg.optimizer.iterations = 120;
  cfg.data.source = "synthetic";
  cfg.data.kind = "xor_blobs";
  cfg.data.m = 200;
  cfg.data.noise = 0.25;
  cfg.split.test_fraction = 0.2;
  return cfg;
}

void criterion_table1(Criterion& c) {
  const auto report = harness::run_table1(table1_config());
  c.require(report.rows.size() == 5, "five rows");
  const double linear_test = report.rows[0].test_accuracy;
  const double gauss1_test = report.rows[1].test_accuracy;
  const double gauss1000_test = report.rows[2].test_accuracy;
  const double qsvm1000_test = report.rows[4].test_accuracy;
  c.require_le(linear_test, 0.60, "Linear SVM test accuracy <= 0.60");
  c.require_ge(gauss1000_test, 0.95, "Gaussian SVM (C = 1000) test accuracy >= 0.95");
  c.require_ge(qsvm1000_test, gauss1_test - 0.05,
               "Central QSVM (C = 1000) within 0.05 of Gaussian SVM (C = 1)");
}

harness::ExperimentConfig table2_config() {
  harness::ExperimentConfig cfg;
  cfg.seed = 7103;
  cfg.ansatz.n_qubits = 4;
  cfg.ansatz.n_layers = 2;
  cfg.network.topology = "ring";
  cfg.network.n_nodes = 4;
  cfg.optimizer.eta = 0.2;
  cfg.optimizer.iterations = 300;  // paper-shaped preset scaled down 10x
  cfg.optimizer.eval_every = 10;
  cfg.optimizer.init = "per_node";
  cfg.svm.c = 1.0;
  cfg.data.source = "synthetic";
  cfg.data.kind = "xor_blobs";
  cfg.data.m = 200;
  cfg.data.noise = 0.25;
  cfg.split.test_fraction = 0.2;
  return cfg;
}

void criterion_table2(Criterion& c) {
  const auto report = harness::run_table2(table2_config());
  const auto& h = report.history;
  c.require(h.before.size() == 4, "four nodes");

  double before_mean = 0.0, after_mean = 0.0;
  for (int i = 0; i < 4; ++i) {
    before_mean += h.before[i].whole_test / 4.0;
    after_mean += h.after[i].whole_test / 4.0;
  }
  c.require_ge(after_mean, before_mean, "mean whole-test accuracy after >= before");

  const double d0 = h.points.front().disagreement;
  const double dK = h.points.back().disagreement;
  c.require(d0 > 0.0, "per-node init gives nonzero initial disagreement");
  c.require_le(dK, 0.1 * d0, "final disagreement <= 0.1 x initial");

  double loss_before = 0.0, loss_after = 0.0;
  for (double v : h.points.front().node_loss) loss_before += v / 4.0;
  for (double v : h.points.back().node_loss) loss_after += v / 4.0;
  c.require_le(loss_after, loss_before, "mean local alignment loss after <= before");
}

void criterion_audio(Criterion& c) {
  using namespace audiofeat;
  {
    const auto bytes = fixtures::wav_bytes_mono({0, 16384, -16384, -32768}, 8000);
    const auto a = parse_wav(bytes);
    c.require(a.samples.size() == 4 && a.sample_rate == 8000.0, "fixture parse shape");
    c.require(a.samples[3] == -1.0, "0x8000 scales to -1.0");
    c.require(std::abs(a.samples[1] - 0.5) == 0.0, "16384 scales to 0.5");
    bool threw = false;
    auto bad = bytes;
    bad[3] = 'X';
    try {
      parse_wav(bad);
    } catch (const std::runtime_error&) {
      threw = true;
    }
    c.require(threw, "RIFX rejected");
  }
  {
    AudioBuffer a;
    a.sample_rate = 1000.0;
    a.samples.resize(2000, 0.25);
    const auto t = trim(a, 0.6, 2.5);
    c.require(t.samples.size() == 2500, "trim output length");
    c.require(t.samples[1399] == 0.25 && t.samples[1400] == 0.0, "trim pad boundary");
  }
  {
    const auto constant = fixtures::constant(0.5, 4096, 8000.0);
    for (double z : zcr_frames(constant)) c.require(z == 0.0, "constant ZCR");
    for (double r : rms_frames(constant)) {
      c.require_le(std::abs(r - 0.5), 1e-12, "constant RMS");
    }
    AudioBuffer alt;
    alt.sample_rate = 8000.0;
    alt.samples.resize(4096);
    for (std::size_t i = 0; i < alt.samples.size(); ++i) alt.samples[i] = i % 2 ? -1.0 : 1.0;
    for (double z : zcr_frames(alt)) c.require(z == 1.0, "alternating ZCR");
    for (double r : rms_frames(alt)) c.require_le(std::abs(r - 1.0), 1e-12, "alternating RMS");

    const auto wave = fixtures::sine(200.0, 1.0, 8000.0);
    const auto z = zcr_frames(wave);
    double mean = 0.0;
    for (double v : z) mean += v / z.size();
    c.require_le(std::abs(mean - 0.05) / 0.05, 0.05, "sine ZCR within 5%");
  }
  {
    auto gen = rng::make_rng(13);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    std::vector<std::complex<double>> frame(2048);
    double time_energy = 0.0;
    for (auto& v : frame) {
      const double x = value(gen);
      v = {x, 0.0};
      time_energy += x * x;
    }
    auto spectrum = frame;
    fft_inplace(spectrum);
    double freq_energy = 0.0;
    for (const auto& v : spectrum) freq_energy += std::norm(v);
    freq_energy /= frame.size();
    c.require_le(std::abs(freq_energy - time_energy), 1e-9 * time_energy, "FFT Parseval");
  }
  {
    const auto d = dct2_matrix(26, 26);
    double worst = 0.0;
    for (int i = 0; i < 26; ++i) {
      for (int j = 0; j < 26; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 26; ++k) acc += d(k, i) * d(k, j);
        worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
      }
    }
    c.require_le(worst, 1e-10, "DCT orthonormality");
  }
  {
    const auto fb = make_mel_filterbank(26, 2048, 16000.0);
    for (int m : {4, 8, 13, 18, 23}) {
      std::vector<std::complex<double>> frame(2048);
      for (int t = 0; t < 2048; ++t) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * t / 2048);
        frame[t] = {w * std::sin(2.0 * kPi * fb.center_hz[m] * t / 16000.0), 0.0};
      }
      fft_inplace(frame);
      std::vector<double> power(1025);
      for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(frame[k]);
      const auto energies = fb.apply(power);
      int best = 0;
      for (int i = 1; i < 26; ++i) {
        if (energies[i] > energies[best]) best = i;
      }
      c.require(best == m, "pure-tone mel argmax at filter " + std::to_string(m));
    }
  }
}

void criterion_reproducibility(Criterion& c) {
  {
    auto cfg = table1_config();
    cfg.optimizer.iterations = 40;
    cfg.data.m = 80;
    auto j1 = harness::table1_to_json(harness::run_table1(cfg));
    auto j2 = harness::table1_to_json(harness::run_table1(cfg));
    j1.erase("wall_time_s");
    j2.erase("wall_time_s");
    c.require(j1.dump() == j2.dump(), "table1 reports byte-identical");
  }
  {
    auto cfg = table2_config();
    cfg.optimizer.iterations = 50;
    cfg.data.m = 80;
    auto j1 = harness::table2_to_json(harness::run_table2(cfg));
    auto j2 = harness::table2_to_json(harness::run_table2(cfg));
    j1.erase("wall_time_s");
    j2.erase("wall_time_s");
    c.require(j1.dump() == j2.dump(), "table2 reports byte-identical");
  }
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  run_criterion(1, "simulator correctness", 5.0, criterion_simulator);
  run_criterion(2, "kernel validity (symmetry, diagonal, PSD, two forms)", 20.0,
                criterion_kernel_validity);
  run_criterion(3, "closed-form single-qubit kernel", 5.0, criterion_closed_form);
  run_criterion(4, "param-shift vs finite-difference gradients", 30.0, criterion_gradients);
  run_criterion(5, "SMO vs brute-force QP oracle + KKT", 10.0, criterion_smo);
  run_criterion(6, "Metropolis consensus matrices", 5.0, criterion_consensus_matrix);
  run_criterion(7, "averaging contraction at sigma2", 10.0, criterion_contraction);
  run_criterion(8, "centralized equivalence", 30.0, criterion_centralized_equivalence);
  run_criterion(9, "qualitative five-model comparison", 120.0, criterion_table1);
  run_criterion(10, "qualitative distributed-node improvement", 60.0, criterion_table2);
  run_criterion(11, "audio pipeline", 10.0, criterion_audio);
  run_criterion(12, "reproducibility", 120.0, criterion_reproducibility);
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", g_failures);
  }
  return g_failures;
}
