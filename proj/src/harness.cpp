#include "cdqkl/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cdqkl/audiofeat.hpp"
#include "cdqkl/rng.hpp"

namespace cdqkl::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

int parse_label_token(const std::string& token, const std::string& where) {
  if (token == "Sad") return -1;
  if (token == "Surprise") return 1;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || (v != -1.0 && v != 1.0)) {
    throw std::runtime_error("csv: invalid label '" + token + "' " + where);
  }
  return static_cast<int>(v);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void get_if_present(const json& j, const char* key, auto& target) {
  if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  get_if_present(j, "seed", cfg.seed);
  get_if_present(j, "output", cfg.output);
  if (j.contains("ansatz")) {
    const auto& a = j.at("ansatz");
    get_if_present(a, "n_qubits", cfg.ansatz.n_qubits);
    get_if_present(a, "n_layers", cfg.ansatz.n_layers);
    get_if_present(a, "theta", cfg.ansatz.theta);
  }
  if (j.contains("network")) {
    const auto& n = j.at("network");
    get_if_present(n, "topology", cfg.network.topology);
    get_if_present(n, "n_nodes", cfg.network.n_nodes);
    if (n.contains("edges")) {
      for (const auto& e : n.at("edges")) {
        cfg.network.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
    }
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    get_if_present(o, "eta", cfg.optimizer.eta);
    get_if_present(o, "eta_per_node", cfg.optimizer.eta_per_node);
    get_if_present(o, "iterations", cfg.optimizer.iterations);
    get_if_present(o, "grad_mode", cfg.optimizer.grad_mode);
    get_if_present(o, "q", cfg.optimizer.q);
    get_if_present(o, "eval_every", cfg.optimizer.eval_every);
    get_if_present(o, "init", cfg.optimizer.init);
  }
  if (j.contains("svm")) {
    const auto& s = j.at("svm");
    get_if_present(s, "C", cfg.svm.c);
    get_if_present(s, "tol", cfg.svm.tol);
    get_if_present(s, "gamma", cfg.svm.gamma);
    get_if_present(s, "kernel", cfg.svm.kernel);
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    get_if_present(d, "source", cfg.data.source);
    get_if_present(d, "kind", cfg.data.kind);
    get_if_present(d, "m", cfg.data.m);
    get_if_present(d, "noise", cfg.data.noise);
    get_if_present(d, "csv_path", cfg.data.csv_path);
    get_if_present(d, "wav_dir", cfg.data.wav_dir);
    get_if_present(d, "augment", cfg.data.augment);
    if (d.contains("label_map")) {
      for (const auto& entry : d.at("label_map")) {
        LabelPattern p;
        p.pattern = entry.at("pattern").get<std::string>();
        const auto& lab = entry.at("label");
        p.label = lab.is_string() ? parse_label_token(lab.get<std::string>(), "in label_map")
                                  : lab.get<int>();
        if (p.label != -1 && p.label != 1) {
          throw std::runtime_error("config: label_map label must be -1 or +1");
        }
        cfg.data.label_map.push_back(std::move(p));
      }
    }
  }
  if (j.contains("split")) {
    get_if_present(j.at("split"), "test_fraction", cfg.split.test_fraction);
  }
  if (j.contains("sharding")) {
    const auto& s = j.at("sharding");
    get_if_present(s, "mode", cfg.sharding.mode);
    get_if_present(s, "alpha", cfg.sharding.alpha);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["ansatz"] = {{"n_qubits", ansatz.n_qubits}, {"n_layers", ansatz.n_layers}};
  if (!ansatz.theta.empty()) j["ansatz"]["theta"] = ansatz.theta;
  json edges = json::array();
  for (const auto& [a, b] : network.edges) edges.push_back({a, b});
  j["network"] = {{"topology", network.topology}, {"n_nodes", network.n_nodes}, {"edges", edges}};
  j["optimizer"] = {{"eta", optimizer.eta},
                    {"eta_per_node", optimizer.eta_per_node},
                    {"iterations", optimizer.iterations},
                    {"grad_mode", optimizer.grad_mode},
                    {"q", optimizer.q},
                    {"eval_every", optimizer.eval_every},
                    {"init", optimizer.init}};
  j["svm"] = {{"C", svm.c}, {"tol", svm.tol}, {"gamma", svm.gamma}, {"kernel", svm.kernel}};
  json label_map = json::array();
  for (const auto& p : data.label_map) {
    label_map.push_back({{"pattern", p.pattern}, {"label", p.label}});
  }
  j["data"] = {{"source", data.source},   {"kind", data.kind},
               {"m", data.m},             {"noise", data.noise},
               {"csv_path", data.csv_path}, {"wav_dir", data.wav_dir},
               {"label_map", label_map},  {"augment", data.augment}};
  j["split"] = {{"test_fraction", split.test_fraction}};
  j["sharding"] = {{"mode", sharding.mode}, {"alpha", sharding.alpha}};
  j["output"] = output;
  return j;
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_fields(line);
  if (header.size() < 2 || header.back() != "label") {
    throw std::runtime_error("csv: header must be f1,...,fd,label");
  }
  const std::size_t d = header.size() - 1;

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != d + 1) {
      throw std::runtime_error("csv: ragged row at line " + std::to_string(line_no) +
                               ": expected " + std::to_string(d + 1) + " fields, got " +
                               std::to_string(fields.size()));
    }
    std::vector<double> row(d);
    for (std::size_t c = 0; c < d; ++c) {
      char* end = nullptr;
      row[c] = std::strtod(fields[c].c_str(), &end);
      if (end == fields[c].c_str() || *end != '\0') {
        throw std::runtime_error("csv: invalid number '" + fields[c] + "' at line " +
                                 std::to_string(line_no));
      }
    }
    labels.push_back(parse_label_token(fields[d], "at line " + std::to_string(line_no)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("csv: no data rows in " + path);

  LabeledDataset ds;
  ds.features = Matrix(rows.size(), d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) ds.features(r, c) = rows[r][c];
  }
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

void save_csv(const LabeledDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open for writing " + path);
  for (std::size_t c = 0; c < ds.feature_dim(); ++c) out << "f" << (c + 1) << ",";
  out << "label\n";
  char buf[64];
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < ds.feature_dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(r, c));
      out << buf << ",";
    }
    out << ds.labels[r] << "\n";
  }
}

LabeledDataset synth_dataset(const std::string& kind, int m, double noise_sigma,
                             std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("synth_dataset: m must be >= 1");
  if (noise_sigma < 0) throw std::invalid_argument("synth_dataset: negative noise");
  auto gen = rng::make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  LabeledDataset ds;
  ds.features = Matrix(static_cast<std::size_t>(m), 2);
  ds.labels.resize(m);

  if (kind == "xor_blobs") {
    // Quadrant clouds labeled by the sign product, drawn as mirrored pairs
    // so the classes stay exactly balanced. noise_sigma is the half-width of
    // the gap pushed open around the axes: a single linear cut stays near
    // chance while a smooth kernel can follow the quadrant boundary.
    double zx = 0.0, zy = 0.0;
    for (int i = 0; i < m; ++i) {
      if (i % 2 == 0) {
        zx = gauss(gen);
        zy = gauss(gen);
        if (zx == 0.0) zx = 0.5;
        if (zy == 0.0) zy = 0.5;
      } else {
        zy = -zy;  // mirror across the x-axis, flipping the label
      }
      ds.features(i, 0) = zx + (zx > 0 ? noise_sigma : -noise_sigma);
      ds.features(i, 1) = zy + (zy > 0 ? noise_sigma : -noise_sigma);
      ds.labels[i] = zx * zy > 0 ? 1 : -1;
    }
  } else if (kind == "two_gaussians") {
    for (int i = 0; i < m; ++i) {
      const int lab = (i % 2 == 0) ? 1 : -1;
      const double mu = lab == 1 ? 1.0 : -1.0;
      ds.features(i, 0) = mu + noise_sigma * gauss(gen);
      ds.features(i, 1) = mu + noise_sigma * gauss(gen);
      ds.labels[i] = lab;
    }
  } else if (kind == "ring_vs_core") {
    for (int i = 0; i < m; ++i) {
      if (i % 2 == 0) {
        const double phi = angle(gen);
        const double r = 1.0 + noise_sigma * gauss(gen);
        ds.features(i, 0) = r * std::cos(phi);
        ds.features(i, 1) = r * std::sin(phi);
        ds.labels[i] = 1;
      } else {
        ds.features(i, 0) = noise_sigma * gauss(gen);
        ds.features(i, 1) = noise_sigma * gauss(gen);
        ds.labels[i] = -1;
      }
    }
  } else {
    throw std::invalid_argument("synth_dataset: unknown kind '" + kind + "'");
  }
  return ds;
}

std::vector<std::string> list_wav_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .wav files in " + dir);
  return files;
}

LabeledDataset extract_features(const std::vector<std::string>& files,
                                const std::vector<LabelPattern>& label_map, bool augment,
                                std::uint64_t seed) {
  if (label_map.empty()) throw std::invalid_argument("extract_features: empty label map");
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t fi = 0; fi < files.size(); ++fi) {
    const std::string name = fs::path(files[fi]).filename().string();
    int label = 0;
    bool matched = false;
    for (const auto& p : label_map) {
      if (name.find(p.pattern) != std::string::npos) {
        label = p.label;
        matched = true;
        break;
      }
    }
    if (!matched) {
      std::cerr << "extract_features: warning: '" << name << "' matches no label pattern, skipped\n";
      continue;
    }
    const auto clip = audiofeat::trim(audiofeat::load_wav(files[fi]));
    rows.push_back(audiofeat::feature_vector(clip));
    labels.push_back(label);
    if (augment) {
      auto gen = rng::make_rng(rng::seed_for(seed, "augment", fi));
      const audiofeat::AudioBuffer variants[4] = {
          audiofeat::augment_noise(clip, 0.035, gen),
          audiofeat::augment_stretch(clip, 0.8),
          audiofeat::augment_shift(clip, 0.25, gen),
          audiofeat::augment_pitch(clip, 0.7),
      };
      for (const auto& v : variants) {
        rows.push_back(audiofeat::feature_vector(v));
        labels.push_back(label);
      }
    }
  }
  if (rows.empty()) throw std::runtime_error("extract_features: no files matched the label map");

  LabeledDataset ds;
  ds.features = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) ds.features(r, c) = rows[r][c];
  }
  ds.labels = std::move(labels);
  return ds;
}

LabeledDataset extract_features(const std::string& wav_dir,
                                const std::vector<LabelPattern>& label_map, bool augment,
                                std::uint64_t seed) {
  return extract_features(list_wav_files(wav_dir), label_map, augment, seed);
}

FeatureScaler fit_scaler(const Matrix& train_features) {
  if (train_features.rows() == 0) throw std::invalid_argument("fit_scaler: no rows");
  FeatureScaler s;
  s.lo.assign(train_features.cols(), 0.0);
  s.hi.assign(train_features.cols(), 0.0);
  for (std::size_t c = 0; c < train_features.cols(); ++c) {
    double lo = train_features(0, c);
    double hi = lo;
    for (std::size_t r = 1; r < train_features.rows(); ++r) {
      lo = std::min(lo, train_features(r, c));
      hi = std::max(hi, train_features(r, c));
    }
    s.lo[c] = lo;
    s.hi[c] = hi;
  }
  return s;
}

Matrix apply_scaler(const FeatureScaler& s, const Matrix& features) {
  if (features.cols() != s.lo.size()) throw std::invalid_argument("apply_scaler: dim mismatch");
  Matrix out(features.rows(), features.cols());
  for (std::size_t c = 0; c < features.cols(); ++c) {
    const double span = s.hi[c] - s.lo[c];
    for (std::size_t r = 0; r < features.rows(); ++r) {
      if (span <= 0.0) {
        out(r, c) = kPi / 2.0;
      } else {
        out(r, c) = std::clamp((features(r, c) - s.lo[c]) / span * kPi, 0.0, kPi);
      }
    }
  }
  return out;
}

LabeledDataset apply_scaler(const FeatureScaler& s, const LabeledDataset& ds) {
  return LabeledDataset{apply_scaler(s, ds.features), ds.labels};
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0) {
    throw std::invalid_argument("train_test_split: test_fraction must be in [0, 1)");
  }
  const std::size_t m = ds.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * m));
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto gen = rng::make_rng(seed);
  std::shuffle(idx.begin(), idx.end(), gen);
  const std::vector<std::size_t> train_idx(idx.begin(), idx.end() - n_test);
  const std::vector<std::size_t> test_idx(idx.end() - n_test, idx.end());
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

std::vector<LabeledDataset> shard_dataset(const LabeledDataset& ds, int n_nodes,
                                          const std::string& mode, double alpha,
                                          std::uint64_t seed) {
  if (n_nodes < 1) throw std::invalid_argument("shard: n_nodes must be >= 1");
  const std::size_t m = ds.size();
  if (static_cast<std::size_t>(n_nodes) > m) {
    throw std::invalid_argument("shard: more nodes (" + std::to_string(n_nodes) +
                                ") than samples (" + std::to_string(m) + ")");
  }
  auto gen = rng::make_rng(seed);
  std::vector<std::vector<std::size_t>> assign(n_nodes);

  if (mode == "iid") {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), gen);
    const std::size_t base = m / n_nodes;
    const std::size_t extra = m % n_nodes;
    std::size_t at = 0;
    for (int node = 0; node < n_nodes; ++node) {
      const std::size_t take = base + (static_cast<std::size_t>(node) < extra ? 1 : 0);
      assign[node].assign(idx.begin() + at, idx.begin() + at + take);
      at += take;
    }
  } else if (mode == "label_skew") {
    if (alpha <= 0) throw std::invalid_argument("shard: alpha must be positive");
    std::gamma_distribution<double> gamma(alpha, 1.0);
    for (int label : {-1, 1}) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < m; ++i) {
        if (ds.labels[i] == label) idx.push_back(i);
      }
      std::shuffle(idx.begin(), idx.end(), gen);
      std::vector<double> prop(n_nodes);
      double total = 0.0;
      for (double& v : prop) {
        v = std::max(gamma(gen), 1e-12);
        total += v;
      }
      std::size_t at = 0;
      double cum = 0.0;
      for (int node = 0; node < n_nodes; ++node) {
        cum += prop[node] / total;
        const auto upto = node + 1 == n_nodes
                              ? idx.size()
                              : std::min(idx.size(), static_cast<std::size_t>(
                                                         std::llround(cum * idx.size())));
        for (; at < upto; ++at) assign[node].push_back(idx[at]);
      }
    }
  } else {
    throw std::invalid_argument("shard: unknown mode '" + mode + "'");
  }

  // No shard may be empty: steal from the largest until all are populated.
  for (int node = 0; node < n_nodes; ++node) {
    while (assign[node].empty()) {
      auto largest = std::max_element(assign.begin(), assign.end(),
                                      [](const auto& a, const auto& b) { return a.size() < b.size(); });
      assign[node].push_back(largest->back());
      largest->pop_back();
    }
  }

  std::vector<LabeledDataset> shards;
  shards.reserve(n_nodes);
  for (int node = 0; node < n_nodes; ++node) {
    std::sort(assign[node].begin(), assign[node].end());
    shards.push_back(ds.subset(assign[node]));
  }
  return shards;
}

LabeledDataset load_dataset(const DataConfig& data, std::uint64_t root_seed) {
  if (data.source == "synthetic") {
    return synth_dataset(data.kind, data.m, data.noise, rng::seed_for(root_seed, "data"));
  }
  if (data.source == "csv") {
    return load_csv(data.csv_path);
  }
  if (data.source == "wav") {
    return extract_features(data.wav_dir, data.label_map, data.augment,
                            rng::seed_for(root_seed, "data"));
  }
  throw std::invalid_argument("data source must be synthetic, csv, or wav; got '" + data.source +
                              "'");
}

std::pair<LabeledDataset, LabeledDataset> load_split_dataset(const ExperimentConfig& cfg) {
  if (cfg.data.source == "wav" && cfg.data.augment) {
    // Split at file level so augmented copies of a clip stay in training.
    auto files = list_wav_files(cfg.data.wav_dir);
    auto gen = rng::make_rng(rng::seed_for(cfg.seed, "split"));
    std::shuffle(files.begin(), files.end(), gen);
    const auto n_test =
        static_cast<std::size_t>(std::llround(cfg.split.test_fraction * files.size()));
    std::vector<std::string> train_files(files.begin(), files.end() - n_test);
    std::vector<std::string> test_files(files.end() - n_test, files.end());
    std::sort(train_files.begin(), train_files.end());
    std::sort(test_files.begin(), test_files.end());
    const auto data_seed = rng::seed_for(cfg.seed, "data");
    return {extract_features(train_files, cfg.data.label_map, true, data_seed),
            extract_features(test_files, cfg.data.label_map, false, data_seed)};
  }
  const LabeledDataset ds = load_dataset(cfg.data, cfg.seed);
  return train_test_split(ds, cfg.split.test_fraction, rng::seed_for(cfg.seed, "split"));
}

}  // namespace cdqkl::harness
