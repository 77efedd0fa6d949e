#pragma once

// Variable-bandwidth kernel and Markov chain construction.
//
// Pipeline: merge exact duplicates (multiplicity folded into the measure),
// compute bandwidths rho_i as the distance to the neighbor_rank-th nearest
// neighbor, build the sparse kernel K_ij = exp(-|x_i - x_j|^2 / (rho_i
// rho_j)) over k-nearest-neighbor rows, symmetrize with an elementwise max,
// and row-normalize into a reversible chain P with stationary measure mu.

#include <vector>

#include "diffgeo/types.hpp"

namespace diffgeo {

struct BandwidthOptions {
  int neighbor_rank = 8;
  // Optional density-power refinement rho = q^power with q a kernel density
  // estimate from a pilot pass; off by default.
  bool density_power = false;
  double power = -0.5;
};

// Distance from each point to its neighbor_rank-th nearest neighbor.
// Throws "degenerate bandwidth" when that distance is zero (duplicates).
VecX build_bandwidths(const PointCloud& cloud, int neighbor_rank = 8);
VecX build_bandwidths(const PointCloud& cloud, const BandwidthOptions& opt);

// Sparse symmetric kernel over self + knn nearest others per row,
// symmetrized by K <- max(K, K^T); at most 2*knn off-diagonal nonzeros
// per row afterwards.
SpMat build_kernel(const PointCloud& cloud, const VecX& rho, int knn = 32);

// Row-normalizes a symmetric kernel into a Markov chain. With point
// multiplicities m: D_i = sum_j K_ij m_j, P_ij = m_j K_ij / D_i,
// mu_i = m_i D_i / sum_k m_k D_k, preserving detailed balance.
// Throws "isolated point" on a zero row sum.
MarkovModel build_markov(const SpMat& K);
MarkovModel build_markov(const SpMat& K, const VecX& mult);

struct MergedCloud {
  PointCloud cloud;           // distinct points, first-occurrence order
  VecX mult;                  // multiplicity per distinct point
  std::vector<Index> origin;  // original index -> distinct index
};

// Groups exactly equal rows. When there are no duplicates the point order
// is unchanged and mult is all ones.
MergedCloud merge_duplicates(const PointCloud& cloud);

struct BuiltModel {
  PointCloud cloud;  // distinct points the model lives on
  MarkovModel model;
  std::vector<Index> origin;  // original index -> model index
};

// Full pipeline: merge duplicates, bandwidths, kernel, chain.
BuiltModel build_model(const PointCloud& cloud, int knn = 32,
                       int neighbor_rank = 8);

}  // namespace diffgeo
