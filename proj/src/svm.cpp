#include "cdqkl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdqkl/linalg.hpp"

namespace cdqkl::svm {

namespace {

void check_labels(std::span<const int> y) {
  for (int v : y) {
    if (v != -1 && v != 1) {
      throw std::invalid_argument("svm: label " + std::to_string(v) + " is not -1 or +1");
    }
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

std::vector<std::size_t> SvmModel::support_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] > 0.0) idx.push_back(i);
  }
  return idx;
}

Matrix linear_cross(const Matrix& x_train, const Matrix& x_eval) {
  if (x_train.cols() != x_eval.cols()) {
    throw std::invalid_argument("linear_cross: feature_dim mismatch");
  }
  Matrix k(x_eval.rows(), x_train.rows());
  for (std::size_t r = 0; r < x_eval.rows(); ++r) {
    for (std::size_t c = 0; c < x_train.rows(); ++c) {
      double acc = 0.0;
      for (std::size_t f = 0; f < x_train.cols(); ++f) acc += x_eval(r, f) * x_train(c, f);
      k(r, c) = acc;
    }
  }
  return k;
}

Matrix linear_kernel(const Matrix& x) { return linear_cross(x, x); }

Matrix gaussian_cross(const Matrix& x_train, const Matrix& x_eval, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("gaussian kernel: gamma must be positive");
  if (x_train.cols() != x_eval.cols()) {
    throw std::invalid_argument("gaussian_cross: feature_dim mismatch");
  }
  Matrix k(x_eval.rows(), x_train.rows());
  for (std::size_t r = 0; r < x_eval.rows(); ++r) {
    for (std::size_t c = 0; c < x_train.rows(); ++c) {
      k(r, c) = std::exp(-gamma * squared_distance(x_eval.row(r), x_train.row(c)));
    }
  }
  return k;
}

Matrix gaussian_kernel(const Matrix& x, double gamma) { return gaussian_cross(x, x, gamma); }

SvmModel smo_train(const Matrix& k, const std::vector<int>& y, double c, double tol,
                   int max_passes) {
  const std::size_t m = y.size();
  if (m == 0) throw std::invalid_argument("smo_train: empty training set");
  if (k.rows() != m || k.cols() != m) {
    throw std::invalid_argument("smo_train: kernel is " + std::to_string(k.rows()) + "x" +
                                std::to_string(k.cols()) + ", expected " + std::to_string(m) +
                                "x" + std::to_string(m));
  }
  check_labels(y);
  if (c <= 0.0) throw std::invalid_argument("smo_train: C must be positive");
  if (tol <= 0.0) throw std::invalid_argument("smo_train: tol must be positive");

  double asym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) asym = std::max(asym, std::abs(k(i, j) - k(j, i)));
  }
  if (asym > 1e-8) {
    std::cerr << "smo_train: warning: kernel asymmetry " << asym << " exceeds 1e-8, proceeding\n";
  }
  if (m <= 256) {
    const double min_eig = linalg::min_eigenvalue(k);
    if (min_eig < -1e-9) {
      std::cerr << "smo_train: warning: kernel min eigenvalue " << min_eig
                << " below -1e-9, proceeding\n";
    }
  }

  SvmModel model;
  model.labels = y;
  model.c = c;
  model.alphas.assign(m, 0.0);

  const std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (positives == 0 || positives == m) {
    model.bias = static_cast<double>(y.front());
    return model;
  }

  // Working tolerance is half the contract tolerance so the final threshold
  // re-estimate cannot push margins past it.
  const double work_tol = 0.5 * tol;

  std::vector<double>& alpha = model.alphas;
  double b = 0.0;
  std::vector<double> err(m);  // f(i) - y_i
  for (std::size_t i = 0; i < m; ++i) err[i] = -static_cast<double>(y[i]);

  auto take_step = [&](std::size_t i1, std::size_t i2) -> bool {
    if (i1 == i2) return false;
    const double a1 = alpha[i1];
    const double a2 = alpha[i2];
    const int y1 = y[i1];
    const int y2 = y[i2];
    const double e1 = err[i1];
    const double e2 = err[i2];
    const double s = static_cast<double>(y1 * y2);

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c, c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c);
      hi = std::min(c, a1 + a2);
    }
    if (lo >= hi) return false;

    const double k11 = k(i1, i1);
    const double k12 = k(i1, i2);
    const double k22 = k(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2new;
    if (eta > 0.0) {
      a2new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Flat or concave direction: evaluate the dual along the constraint
      // line at both box ends and take the better one.
      const double g1 = e1 + y1 - b;  // sum_j alpha_j y_j K(i1, j)
      const double g2 = e2 + y2 - b;
      const double r1 = g1 - y1 * a1 * k11 - y2 * a2 * k12;
      const double r2 = g2 - y1 * a1 * k12 - y2 * a2 * k22;
      auto line_obj = [&](double a2p) {
        const double a1p = a1 + s * (a2 - a2p);
        return a1p + a2p - 0.5 * k11 * a1p * a1p - 0.5 * k22 * a2p * a2p -
               s * k12 * a1p * a2p - y1 * a1p * r1 - y2 * a2p * r2;
      };
      const double obj_lo = line_obj(lo);
      const double obj_hi = line_obj(hi);
      if (obj_lo > obj_hi + 1e-12) {
        a2new = lo;
      } else if (obj_hi > obj_lo + 1e-12) {
        a2new = hi;
      } else {
        return false;
      }
    }
    if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) return false;

    double a1new = a1 + s * (a2 - a2new);
    if (a1new < 0.0) {
      a2new += s * a1new;
      a1new = 0.0;
    } else if (a1new > c) {
      a2new += s * (a1new - c);
      a1new = c;
    }

    const double b1 = b - e1 - y1 * (a1new - a1) * k11 - y2 * (a2new - a2) * k12;
    const double b2 = b - e2 - y1 * (a1new - a1) * k12 - y2 * (a2new - a2) * k22;
    const bool free1 = a1new > 0.0 && a1new < c;
    const bool free2 = a2new > 0.0 && a2new < c;
    const double bnew = free1 ? b1 : (free2 ? b2 : 0.5 * (b1 + b2));

    const double d1 = y1 * (a1new - a1);
    const double d2 = y2 * (a2new - a2);
    const double db = bnew - b;
    for (std::size_t i = 0; i < m; ++i) err[i] += d1 * k(i1, i) + d2 * k(i2, i) + db;
    alpha[i1] = a1new;
    alpha[i2] = a2new;
    b = bnew;
    return true;
  };

  auto examine = [&](std::size_t i2) -> int {
    const double e2 = err[i2];
    const double r2 = e2 * y[i2];  // = y_i f(i) - 1
    const double a2 = alpha[i2];
    const bool violated = (r2 < -work_tol && a2 < c) || (r2 > work_tol && a2 > 0.0);
    if (!violated) return 0;

    // First-order choice: the partner with the largest |E1 - E2| among the
    // non-bound points.
    std::size_t best = m;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (alpha[i] > 0.0 && alpha[i] < c) {
        const double gap = std::abs(err[i] - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = i;
        }
      }
    }
    if (best < m && take_step(best, i2)) return 1;
    for (std::size_t off = 1; off < m; ++off) {
      const std::size_t i = (i2 + off) % m;
      if (alpha[i] > 0.0 && alpha[i] < c && take_step(i, i2)) return 1;
    }
    for (std::size_t off = 1; off < m; ++off) {
      if (take_step((i2 + off) % m, i2)) return 1;
    }
    return 0;
  };

  bool examine_all = true;
  int num_changed = 0;
  int passes_without_progress = 0;
  long sweeps = 0;
  const long sweep_cap = 1000L * static_cast<long>(m) + 100000L;
  while ((num_changed > 0 || examine_all) && passes_without_progress < max_passes &&
         sweeps < sweep_cap) {
    num_changed = 0;
    if (examine_all) {
      for (std::size_t i = 0; i < m; ++i) num_changed += examine(i);
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        if (alpha[i] > 0.0 && alpha[i] < c) num_changed += examine(i);
      }
    }
    ++sweeps;
    if (examine_all) {
      examine_all = false;
    } else if (num_changed == 0) {
      examine_all = true;
    }
    if (num_changed == 0) {
      ++passes_without_progress;
    } else {
      passes_without_progress = 0;
    }
  }

  // Final threshold: average over free support vectors, otherwise the
  // midpoint of the interval the bound points allow.
  std::vector<double> g(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += alpha[j] * y[j] * k(i, j);
    g[i] = acc;
  }
  double bsum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (alpha[i] > 0.0 && alpha[i] < c) {
      bsum += static_cast<double>(y[i]) - g[i];
      ++free_count;
    }
  }
  if (free_count > 0) {
    model.bias = bsum / static_cast<double>(free_count);
  } else {
    double b_lo = -std::numeric_limits<double>::infinity();
    double b_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const bool at_zero = alpha[i] <= 0.0;
      // alpha == 0 wants y(g + b) >= 1, alpha == C wants y(g + b) <= 1.
      if (y[i] == 1) {
        if (at_zero) {
          b_lo = std::max(b_lo, 1.0 - g[i]);
        } else {
          b_hi = std::min(b_hi, 1.0 - g[i]);
        }
      } else {
        if (at_zero) {
          b_hi = std::min(b_hi, -1.0 - g[i]);
        } else {
          b_lo = std::max(b_lo, -1.0 - g[i]);
        }
      }
    }
    if (std::isfinite(b_lo) && std::isfinite(b_hi)) {
      model.bias = 0.5 * (b_lo + b_hi);
    } else if (std::isfinite(b_lo)) {
      model.bias = b_lo;
    } else if (std::isfinite(b_hi)) {
      model.bias = b_hi;
    } else {
      model.bias = b;
    }
  }
  return model;
}

std::vector<double> decision(const SvmModel& model, const Matrix& k_cross) {
  const std::size_t m = model.alphas.size();
  if (k_cross.cols() != m) {
    throw std::invalid_argument("decision: K_cross has " + std::to_string(k_cross.cols()) +
                                " columns, model has " + std::to_string(m) + " training points");
  }
  std::vector<double> scores(k_cross.rows(), 0.0);
  for (std::size_t r = 0; r < k_cross.rows(); ++r) {
    double acc = model.bias;
    for (std::size_t j = 0; j < m; ++j) {
      acc += model.alphas[j] * model.labels[j] * k_cross(r, j);
    }
    scores[r] = acc;
  }
  return scores;
}

std::vector<int> predict(const SvmModel& model, const Matrix& k_cross) {
  const auto scores = decision(model, k_cross);
  std::vector<int> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= 0.0 ? 1 : -1;
  return out;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("accuracy: length mismatch");
  }
  if (predictions.empty()) throw std::invalid_argument("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double dual_objective(const Matrix& k, std::span<const int> y, std::span<const double> alphas) {
  const std::size_t m = y.size();
  if (alphas.size() != m || k.rows() != m || k.cols() != m) {
    throw std::invalid_argument("dual_objective: shape mismatch");
  }
  double lin = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    lin += alphas[i];
    for (std::size_t j = 0; j < m; ++j) {
      quad += alphas[i] * alphas[j] * y[i] * y[j] * k(i, j);
    }
  }
  return lin - 0.5 * quad;
}

double kkt_violation(const SvmModel& model, const Matrix& k, double tol) {
  const std::size_t m = model.alphas.size();
  if (k.rows() != m || k.cols() != m) throw std::invalid_argument("kkt_violation: shape mismatch");
  double worst = 0.0;
  double alpha_dot_y = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = model.alphas[i];
    worst = std::max(worst, -a);
    worst = std::max(worst, a - model.c);
    alpha_dot_y += a * model.labels[i];

    double f = model.bias;
    for (std::size_t j = 0; j < m; ++j) f += model.alphas[j] * model.labels[j] * k(i, j);
    const double margin = model.labels[i] * f;
    if (a <= 0.0) {
      worst = std::max(worst, (1.0 - tol) - margin);
    } else if (a >= model.c) {
      worst = std::max(worst, margin - (1.0 + tol));
    } else {
      worst = std::max(worst, std::abs(margin - 1.0) - tol);
    }
  }
  worst = std::max(worst, std::abs(alpha_dot_y) - 1e-8);
  return std::max(0.0, worst);
}

}  // namespace cdqkl::svm
