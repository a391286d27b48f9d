#include "cdqkl/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cdqkl::rng {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t q,
                                                    std::mt19937_64& gen) {
  if (q > n) throw std::invalid_argument("sample_without_replacement: q exceeds population");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates, then sort so the subset keeps source order.
  for (std::size_t i = 0; i < q; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(gen)]);
  }
  idx.resize(q);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace cdqkl::rng
