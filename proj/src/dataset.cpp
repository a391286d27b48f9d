#include "cdqkl/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cdqkl {

void LabeledDataset::validate() const {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("dataset: feature rows (" + std::to_string(features.rows()) +
                                ") != label count (" + std::to_string(labels.size()) + ")");
  }
  for (int y : labels) {
    if (y != -1 && y != 1) {
      throw std::invalid_argument("dataset: label " + std::to_string(y) + " is not -1 or +1");
    }
  }
  for (double v : features.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature value");
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.features = Matrix(indices.size(), features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t src = indices[r];
    if (src >= size()) throw std::out_of_range("dataset subset: index out of range");
    for (std::size_t c = 0; c < features.cols(); ++c) out.features(r, c) = features(src, c);
    out.labels.push_back(labels[src]);
  }
  return out;
}

LabeledDataset concat_datasets(std::span<const LabeledDataset> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_datasets: no parts");
  const std::size_t d = parts.front().feature_dim();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.feature_dim() != d) throw std::invalid_argument("concat_datasets: feature_dim mismatch");
    total += p.size();
  }
  LabeledDataset out;
  out.features = Matrix(total, d);
  out.labels.reserve(total);
  std::size_t r = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.size(); ++i, ++r) {
      for (std::size_t c = 0; c < d; ++c) out.features(r, c) = p.features(i, c);
      out.labels.push_back(p.labels[i]);
    }
  }
  return out;
}

}  // namespace cdqkl
