#pragma once

// Core linear-algebra aliases and domain types shared by every module.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace diffgeo {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Index = Eigen::Index;

// Thrown on contract violations: bad inputs, degenerate data, solver failure.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A finite set of points in R^d, one point per row.
struct PointCloud {
  MatX points;  // n x d

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

// Row-stochastic diffusion chain built from a symmetric kernel, with its
// stationary measure, the bandwidth function, and point multiplicities
// (exact duplicates folded in by the pipeline).
struct MarkovModel {
  SpMat P;      // n x n, every row sums to 1
  VecX mu;      // stationary probability measure, sums to 1
  VecX rho;     // strictly positive bandwidths
  VecX mult;    // point multiplicities, default all ones
  int knn = 0;  // sparsity parameter used to build P, 0 if unknown

  Index size() const { return P.rows(); }
};

}  // namespace diffgeo
