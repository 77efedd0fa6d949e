#pragma once

#include <vector>

#include "diffgeo/gamma.hpp"
#include "diffgeo/operators.hpp"

namespace diffgeo {

/* Linear evolution equations in coefficient space.
 *
 * First order solves u' = T u, second order u'' = T u + S u' through the
 * block companion system. Trajectories are sampled at the requested
 * instants only. Symmetric generators and diagonalizable generators with
 * well-conditioned eigenvectors go through the matrix exponential;
 * everything else falls back to adaptive fixed-base RK4.
 */

struct EvolutionProblem {
  int order = 1;
  MatX T;      // generator
  MatX S;      // damping term (order 2 only)
  VecX f0;     // initial value
  VecX h0;     // initial velocity (order 2; empty means zero)
  VecX times;  // ascending sample instants
};

// Columns are u(times[j]).
MatX solve_first_order(const EvolutionProblem& prob);

// Projection of the companion solve back to the value block.
MatX solve_second_order(const EvolutionProblem& prob);

struct SecondOrderTrajectory {
  MatX u;     // values, one column per instant
  MatX udot;  // velocities
};

SecondOrderTrajectory solve_second_order_full(const EvolutionProblem& prob);

// Forced RK4 path, bypassing the spectral shortcut; used to cross-check
// the exponential path and to integrate non-normal generators.
MatX rk4_trajectory(const MatX& T, const VecX& f0, const VecX& times);

// Flow of a function along a vector field: u' = X^op u.
MatX vf_flow(const VectorField& X, const GammaTensors& gt, const VecX& f0,
             const VecX& times);

// Evolves every coordinate function along X at once and reconstructs
// pointwise positions; one n x d array per requested instant.
std::vector<MatX> integral_curves(const VectorField& X,
                                  const GammaTensors& gt, const VecX& times);

}  // namespace diffgeo
