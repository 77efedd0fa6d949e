#pragma once

// Topology from the form Laplacians: near-harmonic spectra with Betti
// counts, cup products, circular coordinates, and Morse critical points.

#include <complex>
#include <vector>

#include "diffgeo/gamma.hpp"
#include "diffgeo/hodge.hpp"
#include "diffgeo/operators.hpp"
#include "diffgeo/weak.hpp"

namespace diffgeo {

struct HarmonicSpectrum {
  int degree = 0;
  VecX eigvals;                 // ascending, length m
  std::vector<KForm> eigforms;  // Gram-orthonormal eigenform coefficients
  int gap_index = 0;            // eigenvalue count below the detected gap
};

// Smallest-m generalized eigenpairs of the degree-k form Laplacian against
// the degree-k Gram, restricted to the retained Gram subspace. gap_index is
// the largest j such that eigvals[j] / max(eigvals[j-1], eps) >= gap_ratio,
// with eps = 1e-9 * eigvals[m-1] guarding ratios inside the numerical-zero
// floor; zero when no consecutive ratio reaches gap_ratio.
HarmonicSpectrum harmonic_forms(GammaTensors& gt, int degree, int m,
                                double gap_ratio = 5.0);

struct CupProduct {
  KForm form;                // wedge projected onto the near-harmonic span
  double correlation = 0.0;  // harmonic mass of the wedge of unit inputs
};

// Wedge of a and b projected Gram-orthogonally onto the span of the
// near-harmonic eigenforms (the first gap_index) of the target spectrum.
// The correlation unit-normalizes a and b first and reports the Gram norm
// of the projected wedge. Degrees must satisfy deg a + deg b = target.
CupProduct cup_product(const KForm& a, const KForm& b,
                       const HarmonicSpectrum& target, GammaTensors& gt);

struct CircularCoords {
  VecX theta;                  // length n, angle in (-pi, pi]
  std::complex<double> eigval; // selected rotational eigenvalue
  bool coclosed = true;        // false when the input form fails the check
};

// Phase of the dominant rotational mode of the operator X_a - eps * Delta,
// where X_a is the derivation of the field raised from a. The smallest
// genuinely complex eigenvalue (|Im| > 1e-6 |lambda|) is selected and the
// angle is the pointwise argument of its reconstructed eigenfunction.
// Throws "no rotational mode" when the spectrum is entirely real. The
// input should be approximately coclosed (|del a| <= 0.2 |a|, else the
// coclosed flag is cleared).
CircularCoords circular_coordinates(const KForm& a, GammaTensors& gt,
                                    GramOperator& g1, double eps = 1.0);

struct CriticalPoint {
  Index index_in_cloud = 0;
  int morse_index = 0;    // negative eigenvalue count at 1e-2 relative tol
  VecX hessian_eigvals;   // ascending, intrinsic directions only
  bool degenerate = false;  // some |eigval| under tolerance
};

// Critical points of a function given by basis coefficients: candidates are
// strict local minima of the gradient norm over the neighbor graph, kept
// only below the 5th percentile of the norm. At each candidate the Hessian
// is evaluated pointwise, restricted to the numerical range of the
// coordinate metric (relative rank threshold 1e-2), and solved as a
// generalized eigenproblem against that metric; the Morse index counts the
// negative eigenvalues. Needs the symmetric 2-tensor Gram.
std::vector<CriticalPoint> morse_analysis(const VecX& f, GammaTensors& gt,
                                          GramOperator& g_sym);

}  // namespace diffgeo
