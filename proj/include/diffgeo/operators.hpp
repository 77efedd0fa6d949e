#pragma once

// Strong differential operators assembled from carre du champ blocks.
//
// Every operator is first computed weakly (inner products of its images
// against the coordinate frame phi_i dx_J), summing over sample points
// before any frame index, then lifted to coefficient space through the
// regularized inverse of the codomain Gram matrix. Second-order operators
// (hessian, levi_civita, lie_bracket) should be fed blocks built from
// Markov-smoothed coordinates.

#include "diffgeo/gamma.hpp"
#include "diffgeo/types.hpp"
#include "diffgeo/weak.hpp"

namespace diffgeo {

// Vector field coefficients over phi_i grad x_j, flattened as i*d + j.
// Raising and lowering against the 1-form layout is the identity map.
struct VectorField {
  VecX coeffs;
};

// Ambient velocity samples: n x d matrix with row p the evaluated field at
// point p, the component functions contracted against the coordinate
// gradient metric (entry (p, b) = sum_{i,a} X_ia U_pi Gamma_p(x_a, x_b)).
// On embedded data this is tangent to the sampled manifold.
MatX pointwise_field(const GammaTensors& gt, const VectorField& X);

// Weak gradient, (n1*d) x n0: entry ((i',j'), i) is the inner product of
// phi_i' grad x_j' with grad phi_i.
MatX weak_gradient(const GammaTensors& gt);

// Strong gradient g1^+ weak_gradient, (n1*d) x n0.
MatX gradient(const GammaTensors& gt, GramOperator& g1);

// Divergence, n0 x (n1*d): the negative adjoint of the gradient. The
// function basis is orthonormal, so this is just -weak_gradient^T.
MatX divergence(const GammaTensors& gt);

// Laplacian on functions, n0 x n0, positive semidefinite: equals
// -divergence(gradient(f)) = weak_gradient^T g1^+ weak_gradient.
MatX laplacian0(const GammaTensors& gt, GramOperator& g1);

// Weak exterior derivative of degree-k forms, n1*C(d,k+1) x n1*C(d,k).
// Entries are first-column Laplace expansions of (k+1) x (k+1) frame
// determinants; the k x k minors are shared across basis indices.
// Degree 0 reproduces the first n1 columns of weak_gradient.
MatX weak_exterior_derivative(const GammaTensors& gt, int k);

// Strong exterior derivative g_{k+1}^+ weak_d_k. Requires k+1 <= d.
MatX exterior_derivative(const GammaTensors& gt, int k, GramOperator& g_k1);

// Codifferential (adjoint of d_{k-1}), n1*C(d,k-1) x n1*C(d,k):
// g_{k-1}^+ weak_d_{k-1}^T. Requires k >= 1. Degree 1 is the negative
// divergence restricted to the field basis.
MatX codifferential(const GammaTensors& gt, int k, GramOperator& g_km1);

// Curl of a vector field in ambient dimension 3: the degree-2 derivative
// of the flat 1-form, reindexed through the coordinate duality
// {0,1}->2, {0,2}->-1, {1,2}->0. Throws unless d == 3.
VectorField curl(const VectorField& X, const GammaTensors& gt,
                 GramOperator& g2);

// Directional-derivative operator of a field, n0 x n0:
// entry (s,t) = <phi_s, X(phi_t)>. Orthonormal basis, so weak == strong.
MatX vf_operator(const VectorField& X, const GammaTensors& gt);

// Least-squares field coefficients for pointwise velocity samples
// (n x d ambient components, assumed tangent).
VectorField field_from_samples(const GammaTensors& gt, const MatX& velocities,
                               GramOperator& g1);

// Lie bracket [X, Y]: the commutator of the two directional derivatives,
// contracted on demand so the full coefficient 3-tensor never exists.
VectorField lie_bracket(const VectorField& X, const VectorField& Y,
                        const GammaTensors& gt, GramOperator& g1);

// Weak Hessian into symmetric 2-tensors, (n1*d(d+1)/2) x n0. Entry
// ((i',(j1<=j2)), i) integrates phi_i' times the second derivative of
// phi_i along grad x_j1, grad x_j2, written with nested carre du champ
// blocks; rows for j1 < j2 carry the double multiplicity of the
// symmetric layout.
MatX weak_hessian(GammaTensors& gt);

// Strong Hessian g_sym^+ weak_hessian; g_sym is the symmetric 2-tensor
// Gram from gram_2tensor(gt, true).
MatX hessian(GammaTensors& gt, GramOperator& g_sym);

// Pointwise action a(X, Y): length-n function values.
VecX tensor02_action(const Tensor02& a, const VectorField& X,
                     const VectorField& Y, const GammaTensors& gt);

// Weak operator form of a (0,2)-tensor, (n1*d) x (n1*d): entry
// ((s1,t1),(s2,t2)) integrates a against the pair of frame fields with
// the first tensor slot fed by the (s2,t2) input field.
MatX weak_tensor02_operator(const Tensor02& a, const GammaTensors& gt);

// Strong operator form g1^+ weak form: X |-> a(X, .) raised.
MatX tensor02_operator(const Tensor02& a, const GammaTensors& gt,
                       GramOperator& g1);

// Total covariant derivative of a field as a full (0,2)-tensor:
// nabla X = sum_ij (d phi_i (x) dx_j + phi_i Hess(x_j)) X_ij, lifted
// through the full 2-tensor Gram from gram_2tensor(gt, false).
Tensor02 levi_civita(const VectorField& X, GammaTensors& gt,
                     GramOperator& g_full);

// Directional covariant derivative nabla_X Y: the operator form of
// nabla Y applied to X.
VectorField covariant(const VectorField& X, const VectorField& Y,
                      GammaTensors& gt, GramOperator& g1,
                      GramOperator& g_full);

}  // namespace diffgeo
