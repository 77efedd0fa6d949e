#pragma once

// Metric geometry: geodesic distance by convex maximization of a
// 1-Lipschitz distance model, and Riemann / sectional curvature assembled
// from the Levi-Civita connection.

#include <utility>
#include <vector>

#include "diffgeo/gamma.hpp"
#include "diffgeo/operators.hpp"
#include "diffgeo/weak.hpp"

namespace diffgeo {

struct GeodesicOptions {
  int max_iters = 4000;         // gradient ascent iteration cap
  double violation_tol = 1e-6;  // constraint slack enforced between steps
  double stall_tol = 1e-8;      // stop once objective gains drop below this
};

struct GeodesicResult {
  VecX distance;    // length n, >= ambient Euclidean distance from source
  VecX correction;  // coefficients of the non-negative correction term
  VecX total;       // coefficients of the full 1-Lipschitz distance model
  double objective = 0.0;       // mean-value coefficient of the correction
  double max_constraint = 0.0;  // largest Lipschitz quadratic form at exit
  bool converged = true;        // false when the iteration cap was hit
};

// Distance from one source point to every point. The model writes
// d(p, q) = |q - p| + f(q) with a correction f vanishing at p; the combined
// function must have carre du champ at most 1 at every point (the shift is
// folded into the constraint right-hand sides, leaving centred ellipsoids),
// and the mean-value coefficient of f is maximized by projected gradient
// ascent with worst-violator scaling-projection. Clamping f at zero during
// reconstruction keeps the output at or above the ambient distance.
GeodesicResult geodesic_distance(Index source, const GammaTensors& gt,
                                 const GeodesicOptions& opt = {});

// Curvature tensor R(X, Y, Z, W) evaluated pointwise through the
// Levi-Civita connection as the (0,2)-tensor combination
//   nabla(nabla_Y Z)(X, W) - nabla(nabla_X Z)(Y, W) - nabla(Z)([X, Y], W).
// Antisymmetric in (X, Y) by construction and multilinear over constants.
VecX riemann(const VectorField& X, const VectorField& Y,
             const VectorField& Z, const VectorField& W, GammaTensors& gt,
             GramOperator& g1, GramOperator& g_full);

struct SectionalResult {
  VecX K;                     // length n, curvature of the spanned plane
  std::vector<char> defined;  // 0 where the plane degenerates numerically
};

// K(X, Y) = R(X, Y, X, Y) / (|X|^2 |Y|^2 - g(X, Y)^2) with the denominator
// floored at 1e-6 times the median of |X|^2 |Y|^2; points at the floor are
// flagged undefined.
SectionalResult sectional_curvature(const VectorField& X,
                                    const VectorField& Y, GammaTensors& gt,
                                    GramOperator& g1, GramOperator& g_full);

// Spanning pair for curvature on bare point data: per point the top two
// eigenvectors of the coordinate metric, rotated by orthogonal Procrustes
// onto the two ambient axes with the largest total metric trace, then
// projected to the field basis. Results depend on this choice of frame.
std::pair<VectorField, VectorField> default_curvature_fields(
    GammaTensors& gt, GramOperator& g1);

}  // namespace diffgeo
