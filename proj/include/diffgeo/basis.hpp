#pragma once

// Compressed eigenfunction basis of the Markov chain.
//
// The chain P is similar to the symmetric S = D(sqrt mu) P D(sqrt mu)^-1,
// so its spectrum is real and its top eigenvectors are computed either
// densely (small n) or by Lanczos iteration with full reorthogonalization.
// The constant eigenfunction (eigenvalue exactly 1) is deflated explicitly
// and stored as column 0, so column 0 is exactly constant in both paths.

#include "diffgeo/types.hpp"

namespace diffgeo {

struct FunctionBasis {
  MatX U;       // n x n0; column i samples eigenfunction phi_i
  VecX lambda;  // length n0, descending, lambda[0] = 1
  VecX mu;      // measure the basis is orthonormal under
  int n0 = 0;

  Index size() const { return U.rows(); }
};

struct EigOptions {
  int dense_threshold = 512;  // dense solver at or below this n
  int max_lanczos = 600;      // Krylov dimension cap
  double tol = 1e-9;          // Ritz residual target
};

// Top-n0 eigenpairs of P, orthonormal under mu. Throws with iteration
// diagnostics when the Lanczos path fails to converge.
FunctionBasis eigenbasis(const MarkovModel& model, int n0,
                         const EigOptions& opt = {});

// Coefficients of the L2(mu)-orthogonal projection: U^T diag(mu) f.
VecX project(const FunctionBasis& basis, const VecX& f_pointwise);

// Pointwise reconstruction U * coeffs.
VecX evaluate(const FunctionBasis& basis, const VecX& coeffs);

// Coefficients of the re-projected pointwise product of two reconstructions.
VecX multiply(const FunctionBasis& basis, const VecX& f_coeffs,
              const VecX& h_coeffs);

}  // namespace diffgeo
