#pragma once

// Carre du champ tensor blocks, pointwise k-form and 2-tensor metrics,
// global Gram matrices, the wedge product, and visualization tensors.
//
// The pointwise operator on two sampled functions is the covariance of
// the pair under each kernel row,
//   Gamma_i(f,h) = (2 / rho_i^2) * ( P(fh) - (Pf)(Ph) )_i,
// positive semidefinite by construction; the prefactor matches the
// diffusion time of the kernel exp(-r^2 / rho^2) so that Gamma(f,h)
// estimates grad f . grad h.

#include <functional>
#include <vector>

#include "diffgeo/basis.hpp"
#include "diffgeo/types.hpp"

namespace diffgeo {

struct GammaOptions {
  bool centred = true;        // mean-centred covariance (default)
  bool smooth_coords = false; // use P-smoothed immersion coordinates
};

// Degree-k form: coefficients over phi_i dx_(J), index (i, J) flattened as
// i * C(d,k) + rank(J) with J strictly increasing, lexicographic.
struct KForm {
  int degree = 0;
  VecX coeffs;
};

// (0,2)-tensor: coefficients over phi_i dx_{j1} (x) dx_{j2}, flattened as
// i * d^2 + j1 * d + j2; the symmetric variant stores j1 <= j2 flattened
// over the d(d+1)/2 pairs in lexicographic order.
struct Tensor02 {
  VecX coeffs;
  bool symmetric = false;
};

// All carre du champ blocks over one model/basis pair. Nested blocks are
// built on demand by the ensure_* helpers.
struct GammaTensors {
  const MarkovModel* model = nullptr;
  const FunctionBasis* basis = nullptr;
  int n1 = 0;  // field basis size
  int d = 0;
  bool centred = true;

  VecX pref;     // 2 / rho^2
  MatX coords;   // n x d immersion coordinates actually used
  MatX p_coords; // n x d smoothed coordinates P x
  MatX p_basis;  // n x n0 smoothed basis P U
  MatX cc;       // n x d^2,        (p, a*d + b)            = Gamma_p(x_a, x_b)
  MatX cb;       // n x d*n0,       (p, a*n0 + i)           = Gamma_p(x_a, phi_i)
  MatX c_cb;     // n x d^2*n0,     (p, (a*d+b)*n0 + i)     = Gamma_p(x_a, Gamma(x_b, phi_i))
  MatX b_cc;     // n x n0*d^2,     (p, i*d^2 + a*d + b)    = Gamma_p(phi_i, Gamma(x_a, x_b))
  MatX c_cc;     // n x d^3,        (p, (a*d+b)*d + c)      = Gamma_p(x_a, Gamma(x_b, x_c))

  Index size() const { return cc.rows(); }
  // Copies the pointwise d x d matrix Gamma_p(x_a, x_b).
  MatX cc_at(Index p) const;
};

// Pointwise carre du champ of two sampled functions.
VecX cdc_pair(const MarkovModel& model, const VecX& f, const VecX& h,
              bool centred = true);

// Builds pref, coords, smoothed companions, cc, and cb.
GammaTensors gamma_blocks(const MarkovModel& model, const FunctionBasis& basis,
                          const PointCloud& cloud, int n1,
                          const GammaOptions& opt = {});

// Nested blocks (built lazily; no-ops when already present).
void ensure_c_cb(GammaTensors& gt);
void ensure_b_cc(GammaTensors& gt);
void ensure_c_cc(GammaTensors& gt);

// Gamma of every used coordinate against each column of H: result is
// n x (d * H.cols()), entry (p, a*cols + c) = Gamma_p(x_a, H_c).
MatX cdc_coords_batch(const GammaTensors& gt, const MatX& H);

// Gamma of basis functions phi_i (i < n0) against each column of H:
// n x (n0 * cols), entry (p, i*cols + c) = Gamma_p(phi_i, H_c).
MatX cdc_basis_batch(const GammaTensors& gt, const MatX& H);

// Streams the on-demand block Gamma_p(phi_i, phi_i') for i' < n1 in column
// blocks over i; fn(i_begin, i_count, data) receives data sized
// n x (i_count * n1), entry (p, t*n1 + i') for i = i_begin + t.
void stream_bb(const GammaTensors& gt, int block,
               const std::function<void(int, int, const MatX&)>& fn);

// Per-point k-th compound matrix of cc: n x (C*C) with C = C(d,k), column
// (Jrow * C + Jcol). k = 0 gives all ones (n x 1).
MatX kform_metric(const GammaTensors& gt, int k);

// Gram matrix of the degree-k spanning set, side n1 * C(d,k):
// G[(i,J),(i',J')] = sum_p U_pi U_pi' comp_p(J,J') mu_p.
MatX gram(const GammaTensors& gt, int k);

// Gram of (0,2)-tensors; full side n1*d^2 or symmetric side n1*d(d+1)/2.
MatX gram_2tensor(const GammaTensors& gt, bool symmetric);

// Embeds symmetric-variant coefficients into the full tensor layout
// (off-diagonal entries copied to both orders).
VecX sym_to_full(const GammaTensors& gt, const VecX& sym_coeffs);

// Wedge product of two forms; coefficient functions are multiplied
// pointwise and re-projected onto the n1 field basis.
KForm wedge(const KForm& a, const KForm& b, const GammaTensors& gt);

// Per-point visualization tensors: entries g(alpha, dx_(J'))(p).
struct FormVisual {
  int degree = 0;
  MatX vectors;    // k = 1: n x d arrow components
  MatX skew;       // k = 2: n x d^2 per-point skew matrix, row-major pairs
  MatX plane_u;    // k = 2: n x d dominant plane, first axis
  MatX plane_v;    // k = 2: n x d dominant plane, second axis
  VecX magnitude;  // k = 2: signed magnitude; k = 3 (d = 3): scalar value
};

// Supports k = 1 (any d), k = 2 (any d), k = 3 only at d = 3; throws
// "no visual reduction" otherwise.
FormVisual visualize_form(const KForm& a, const GammaTensors& gt);

}  // namespace diffgeo
