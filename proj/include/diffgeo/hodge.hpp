#pragma once

#include "diffgeo/gamma.hpp"
#include "diffgeo/weak.hpp"

namespace diffgeo {

/* Hodge Laplacians on k-form frames and the induced decomposition.
 *
 * All spectra are generalized: the weak Laplacian is paired with the
 * degree-k Gram, and eigenpairs live on the Gram's retained spectral
 * subspace. The up energy is assembled per point with a Schur split of
 * the (k+1) x (k+1) pointwise metric minor, so the frame-pair sum needs
 * only coordinate blocks and one streamed pass over basis pairs.
 */

// Weak up energy <d(e_m), d(e_l)> on the degree-k frame, (n1*C) square.
// Near-singular pointwise minors are ridged by 1e-12 * trace before the
// adjugate split.
MatX up_laplacian_weak(const GammaTensors& gt, int k);

// Weak down energy <del(e_m), del(e_l)>; zero at k = 0.
MatX down_laplacian_weak(const GammaTensors& gt, int k);

struct HodgePair {
  MatX weak;          // down + up energy matrix
  GramOperator gram;  // degree-k Gram
};

HodgePair hodge_laplacian(const GammaTensors& gt, int k);

struct Spectrum {
  VecX eigvals;  // ascending
  MatX eigvecs;  // coefficient-space columns, G-orthonormal
};

// Solves weak x = lambda G x restricted to the retained Gram subspace.
Spectrum generalized_spectrum(const MatX& weak, GramOperator& gram);

/* Splitting of a k-form into exact + harmonic + coexact parts. The
 * potentials solve the least-squares normal equations through the
 * pseudoinverses of the adjacent-degree weak Laplacian energies; the
 * harmonic part is the remainder. Boundary degrees drop the impossible
 * part (k = 0 has no exact part, k = d no coexact part); the dropped
 * potential comes back with empty coefficients.
 */
struct HodgeParts {
  KForm exact;     // degree k
  KForm harmonic;  // degree k
  KForm coexact;   // degree k
  KForm beta;      // degree k-1 potential of the exact part
  KForm delta;     // degree k+1 potential of the coexact part
};

HodgeParts hodge_decomposition(const KForm& a, const GammaTensors& gt);

}  // namespace diffgeo
