#pragma once

#include <span>
#include <vector>

#include "cdqkl/matrix.hpp"

namespace cdqkl {

// Feature rows plus binary labels in {-1, +1}.
struct LabeledDataset {
  Matrix features;           // M x d
  std::vector<int> labels;   // M entries, each -1 or +1

  std::size_t size() const { return labels.size(); }
  std::size_t feature_dim() const { return features.cols(); }

  // Throws std::invalid_argument on row/label count mismatch, labels outside
  // {-1, +1}, or non-finite features.
  void validate() const;

  // Rows selected by index, in the given order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

LabeledDataset concat_datasets(std::span<const LabeledDataset> parts);

}  // namespace cdqkl
