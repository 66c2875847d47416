#include <algorithm>
#include <numeric>

#include "sag/primitives.hpp"

namespace sag {

ExchangeTable::ExchangeTable(BlockShape shape) : shape_(shape) {
  space_ = &oracle::config_space(rows(), cols());
  const int n = rows() * cols();
  oracle::Arrangement arr(static_cast<std::size_t>(n));
  std::iota(arr.begin(), arr.end(), 0);
  do {
    auto path = space_->shortest_path(arr);
    diameter_ = std::max(diameter_, static_cast<int>(path.size()));
    plans_.emplace(arr, std::move(path));
  } while (std::next_permutation(arr.begin(), arr.end()));

  // Products of disjoint adjacent transpositions inside the block.
  std::vector<std::pair<int, int>> block_edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const int ru = u / cols(), cu = u % cols(), rv = v / cols(), cv = v % cols();
      if (std::abs(ru - rv) + std::abs(cu - cv) == 1) block_edges.emplace_back(u, v);
    }
  }
  const auto m = static_cast<unsigned>(block_edges.size());
  for (unsigned subset = 1; subset < (1u << m); ++subset) {
    unsigned used = 0;
    bool disjoint = true;
    oracle::Arrangement target(static_cast<std::size_t>(n));
    std::iota(target.begin(), target.end(), 0);
    for (unsigned i = 0; i < m && disjoint; ++i) {
      if (!(subset & (1u << i))) continue;
      const auto [u, v] = block_edges[i];
      if (used & ((1u << u) | (1u << v))) disjoint = false;
      used |= (1u << u) | (1u << v);
      std::swap(target[u], target[v]);
    }
    if (disjoint) flip_diameter_ = std::max(flip_diameter_, static_cast<int>(plan(target).size()));
  }
}

const std::vector<int>& ExchangeTable::plan(const oracle::Arrangement& target) const {
  return plans_.at(target);
}

Plan ExchangeTable::fragment(const oracle::Arrangement& target) const {
  GridGraph block(rows(), cols());
  std::vector<RobotId> occ(static_cast<std::size_t>(rows() * cols()));
  std::iota(occ.begin(), occ.end(), 0);
  return oracle::realize(*space_, plan(target), block, block.bounds(), occ);
}

ExchangeTable build_exchange_table() { return ExchangeTable(BlockShape::kTall); }

const ExchangeTable& exchange_table(BlockShape shape) {
  static const ExchangeTable wide(BlockShape::kWide);
  static const ExchangeTable tall(BlockShape::kTall);
  return shape == BlockShape::kWide ? wide : tall;
}

}  // namespace sag
