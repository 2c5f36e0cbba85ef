#pragma once

#include <array>
#include <span>

#include "nscbf/types.hpp"

namespace nscbf::detail {

// Calls fn(span of k ascending indices) for every k-subset of [0, n) in
// lexicographic order. fn returns false to stop early.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::array<int, kMaxDim + 1> idx{};
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!fn(std::span<const int>(idx.data(), static_cast<std::size_t>(k)))) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace nscbf::detail
