#pragma once

// Strictly increasing multi-indices over {0..d-1} in lexicographic order,
// the flattening convention shared by every form-valued module, and the
// merge sign used by the wedge product.

#include <vector>

#include "diffgeo/types.hpp"

namespace diffgeo {

inline long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int t = 0; t < k; ++t) r = r * (n - t) / (t + 1);
  return r;
}

// All C(d,k) strictly increasing k-tuples in lexicographic order.
inline std::vector<std::vector<int>> multi_indices(int d, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > d) return out;
  std::vector<int> J(static_cast<size_t>(k));
  for (int t = 0; t < k; ++t) J[static_cast<size_t>(t)] = t;
  while (true) {
    out.push_back(J);
    if (k == 0) break;
    int t = k - 1;
    while (t >= 0 && J[static_cast<size_t>(t)] == d - k + t) --t;
    if (t < 0) break;
    ++J[static_cast<size_t>(t)];
    for (int s = t + 1; s < k; ++s) {
      J[static_cast<size_t>(s)] = J[static_cast<size_t>(s - 1)] + 1;
    }
  }
  return out;
}

// Lexicographic rank of a strictly increasing tuple.
inline int mi_rank(const std::vector<int>& J, int d) {
  int k = static_cast<int>(J.size());
  long rank = 0;
  int prev = -1;
  for (int t = 0; t < k; ++t) {
    for (int v = prev + 1; v < J[static_cast<size_t>(t)]; ++v) {
      rank += binom(d - 1 - v, k - 1 - t);
    }
    prev = J[static_cast<size_t>(t)];
  }
  return static_cast<int>(rank);
}

// Merges two strictly increasing tuples. Returns the sign of the
// permutation sorting their concatenation, or 0 when they overlap.
inline int merge_sign(const std::vector<int>& J1, const std::vector<int>& J2,
                      std::vector<int>& out) {
  out.clear();
  out.reserve(J1.size() + J2.size());
  size_t a = 0, b = 0;
  int inversions = 0;
  while (a < J1.size() && b < J2.size()) {
    if (J1[a] == J2[b]) return 0;
    if (J1[a] < J2[b]) {
      out.push_back(J1[a++]);
    } else {
      // J2[b] jumps over the remaining entries of J1.
      inversions += static_cast<int>(J1.size() - a);
      out.push_back(J2[b++]);
    }
  }
  while (a < J1.size()) out.push_back(J1[a++]);
  while (b < J2.size()) out.push_back(J2[b++]);
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace diffgeo
