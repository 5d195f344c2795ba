#pragma once

#include <bit>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace spk {

// In-place ascending bitonic network over a power-of-two span. The
// compare-exchange schedule is data independent.
template <class Key, class Val>
void bitonic_network(std::span<std::pair<Key, Val>> data) {
  const std::size_t n = data.size();
  for (std::size_t k = 2; k <= n; k <<= 1) {
    for (std::size_t j = k >> 1; j > 0; j >>= 1) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t partner = i ^ j;
        if (partner <= i) continue;
        const bool ascending = (i & k) == 0;
        if ((data[i].first > data[partner].first) == ascending) {
          std::swap(data[i], data[partner]);
        }
      }
    }
  }
}

// Sorts by key; pads to the next power of two with +inf keys.
template <class Key, class Val>
void bitonic_sort(std::vector<std::pair<Key, Val>>& data) {
  const std::size_t n = data.size();
  if (n < 2) return;
  data.resize(std::bit_ceil(n), {std::numeric_limits<Key>::max(), Val{}});
  bitonic_network(std::span<std::pair<Key, Val>>(data));
  data.resize(n);
}

}  // namespace spk
