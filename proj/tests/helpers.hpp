#pragma once

// Shared helpers for the test suites: relative error, random vectors, and
// brute-force oracles used to freeze expected values.

#include <algorithm>
#include <random>
#include <vector>

#include "diffgeo/types.hpp"

namespace testutil {

using diffgeo::Index;
using diffgeo::MatX;
using diffgeo::VecX;

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

inline VecX random_vec(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  VecX v(n);
  for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

inline MatX random_mat(Index r, Index c, std::mt19937_64& rng,
                       double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  MatX m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = gauss(rng);
  return m;
}

// Brute-force oracle: distance from point i to its rank-th nearest other
// point, by sorting all pairwise distances.
inline double knn_distance_oracle(const MatX& pts, Index i, int rank) {
  std::vector<double> d;
  d.reserve(static_cast<size_t>(pts.rows()) - 1);
  for (Index j = 0; j < pts.rows(); ++j) {
    if (j == i) continue;
    d.push_back((pts.row(i) - pts.row(j)).norm());
  }
  std::sort(d.begin(), d.end());
  return d[static_cast<size_t>(rank - 1)];
}

// Brute-force oracle: the dense variable-bandwidth kernel.
inline MatX dense_kernel_oracle(const MatX& pts, const VecX& rho) {
  const Index n = pts.rows();
  MatX K(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
      K(i, j) = std::exp(-d2 / (rho[i] * rho[j]));
    }
  }
  return K;
}

// Median of a copy.
inline double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace testutil
