#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "core/errors.hpp"

namespace mcsim {

// Comparator stages of a bitonic sorting network over n (power of two)
// inputs: (log2 n)(log2 n + 1)/2.
inline uint64_t bitonic_stage_count(uint64_t n) {
  if (n <= 1) return 0;
  uint64_t k = std::bit_width(n) - 1;
  return k * (k + 1) / 2;
}

struct BitonicRunStats {
  uint64_t stages = 0;
  uint64_t comparators = 0;
};

// Fixed-topology bitonic sort. The network only exists for power-of-two
// input sizes; anything else must be padded by the caller.
template <typename T, typename Less>
BitonicRunStats bitonic_sort(std::span<T> data, Less less) {
  const size_t n = data.size();
  if (n == 0 || !std::has_single_bit(n))
    throw internal_error("bitonic network requires a power-of-two input size, got " +
                         std::to_string(n));
  BitonicRunStats stats;
  for (size_t k = 2; k <= n; k <<= 1) {
    for (size_t j = k >> 1; j > 0; j >>= 1) {
      ++stats.stages;
      for (size_t i = 0; i < n; ++i) {
        size_t l = i ^ j;
        if (l <= i) continue;
        ++stats.comparators;
        bool ascending = (i & k) == 0;
        if (ascending ? less(data[l], data[i]) : less(data[i], data[l]))
          std::swap(data[i], data[l]);
      }
    }
  }
  return stats;
}

}  // namespace mcsim
