#pragma once

#include "diffgeo/gamma.hpp"
#include "diffgeo/types.hpp"

namespace diffgeo {

/* Regularized inversion of Gram matrices.
 *
 * Weak-form operators are represented against a finite function frame, so
 * every solve reduces to a symmetric positive semidefinite Gram system.
 * The inverse is stabilized either by a spectral cutoff at
 * lambda_max / condition_target (default) or by Tikhonov shift G + eps I
 * when tikhonov > 0.
 */

struct GramOperator {
  MatX G;
  double condition_target = 1e5;
  double tikhonov = 0.0;  // > 0 switches cutoff inversion to (G + eps I)^-1

  // Filled by factor():
  bool factored = false;
  VecX eigvals;  // descending
  MatX eigvecs;  // columns matching eigvals
  double cutoff = 0.0;
  int rank = 0;
};

struct FrameReport {
  double upper = 0.0;        // largest Gram eigenvalue (upper frame bound)
  double eps = 0.0;          // regularization threshold actually used
  int rank = 0;              // retained spectral rank
  double condition = 0.0;    // upper / eps
  double trace_bound = 0.0;  // max_p sum_a Gamma_p(x_a, x_a), if supplied
};

GramOperator make_gram(MatX G, double condition_target = 1e5,
                       double tikhonov = 0.0);

// Symmetric eigendecomposition plus cutoff/rank bookkeeping. Idempotent.
void factor(GramOperator& g);

// Regularized pseudoinverse as a dense matrix.
MatX gram_pinv(GramOperator& g);

// Regularized solve G^+ W without materializing the pseudoinverse.
MatX gram_solve(GramOperator& g, const MatX& W);
VecX gram_solve(GramOperator& g, const VecX& w);

FrameReport frame_report(GramOperator& g, double trace_bound = 0.0);

// max_p sum_a Gamma_p(x_a, x_a): pointwise energy ceiling for the
// coordinate frame, an a priori bound on the upper frame constant.
double coord_trace_bound(const GammaTensors& gt);

/* A weak-form operator: the matrix of inner products of the operator's
 * images against the codomain frame. The strong (coefficient-space) form
 * is recovered by applying the regularized inverse of the codomain Gram.
 * The adjoint's weak matrix is the transpose, so one weak matrix serves
 * both directions.
 */
struct WeakOperator {
  MatX W;
  GramOperator codomain_gram;
};

// Strong matrix codomain_gram^+ W.
MatX solve_strong(WeakOperator& op);

}  // namespace diffgeo
