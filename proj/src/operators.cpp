#include "diffgeo/operators.hpp"

#include <cmath>

#include "diffgeo/multiindex.hpp"

namespace diffgeo {

namespace {

/* Determinant of a small dense block. The degenerate 0 x 0 case is the
 * empty product, which the Laplace recursion below relies on.
 */
double det_small(const MatX& m) {
  switch (m.rows()) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default:
      return m.determinant();
  }
}

/* Shared weak-derivative core. Rows run over the degree-(k+1) layout
 * (i', J') -> i'*C(d,k+1) + rank(J'); columns over (i, J) -> i*C(d,k) +
 * rank(J) with i below dom (n0 for the gradient, n1 for forms). For each
 * (J', J) pair the entry is a first-column Laplace expansion
 *   sum_r (-1)^r Gamma_p(x_{J'[r]}, phi_i) * minor_r(p)
 * integrated against phi_i' mu; the k x k minors depend only on the
 * coordinate pair, so each expansion row costs one n1 x n x dom product.
 */
MatX weak_derivative(const GammaTensors& gt, int k, Index dom) {
  const Index n = gt.size();
  const int d = gt.d;
  const int n1 = gt.n1;
  const int n0 = gt.basis->n0;
  const long ck = binom(d, k);
  const long ck1 = binom(d, k + 1);
  const auto Js = multi_indices(d, k);
  const auto J1s = multi_indices(d, k + 1);
  const VecX& mu = gt.basis->mu;
  const auto U1 = gt.basis->U.leftCols(n1);

  MatX W(Index(n1) * ck1, dom * ck);
  MatX minors(n, k + 1);
  MatX g(k, k);
  for (size_t rj1 = 0; rj1 < J1s.size(); ++rj1) {
    const auto& J1 = J1s[rj1];
    for (size_t rj = 0; rj < Js.size(); ++rj) {
      const auto& J = Js[rj];
      if (k == 0) {
        minors.col(0).setOnes();
      } else {
        for (Index p = 0; p < n; ++p) {
          for (int r = 0; r <= k; ++r) {
            int s2 = 0;
            for (int s = 0; s <= k; ++s) {
              if (s == r) continue;
              for (int m = 0; m < k; ++m) {
                g(s2, m) = gt.cc(p, Index(J1[size_t(s)]) * d + J[size_t(m)]);
              }
              ++s2;
            }
            minors(p, r) = det_small(g);
          }
        }
      }
      MatX block = MatX::Zero(n1, dom);
      for (int r = 0; r <= k; ++r) {
        const double sgn = (r % 2 == 0) ? 1.0 : -1.0;
        VecX w = mu.array() * minors.col(r).array();
        MatX uw = U1.transpose() * w.asDiagonal();
        block.noalias() +=
            sgn * (uw * gt.cb.middleCols(Index(J1[size_t(r)]) * n0, dom));
      }
      for (int i1 = 0; i1 < n1; ++i1) {
        for (Index i = 0; i < dom; ++i) {
          W(Index(i1) * ck1 + Index(rj1), i * ck + Index(rj)) = block(i1, i);
        }
      }
    }
  }
  return W;
}

/* Pointwise (0,2)-tensor coefficients: n x d^2 with column j1*d + j2.
 * Symmetric coefficient layouts are first expanded to both orders.
 */
MatX pointwise_tensor(const GammaTensors& gt, const Tensor02& a) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const Index full_len = Index(n1) * d * d;
  const Index sym_len = Index(n1) * d * (d + 1) / 2;
  if (a.symmetric) {
    if (a.coeffs.size() != sym_len) {
      throw Error("tensor coefficient length mismatch");
    }
    VecX full = sym_to_full(gt, a.coeffs);
    Eigen::Map<const MatX> am(full.data(), Index(d) * d, n1);
    return gt.basis->U.leftCols(n1) * am.transpose();
  }
  if (a.coeffs.size() != full_len) {
    throw Error("tensor coefficient length mismatch");
  }
  Eigen::Map<const MatX> am(a.coeffs.data(), Index(d) * d, n1);
  return gt.basis->U.leftCols(n1) * am.transpose();
}

// Per-axis component functions psi_a = sum_i c_ia phi_i of the coefficient
// representation; the raw ingredient of every weak contraction below.
static MatX component_functions(const GammaTensors& gt, const VectorField& X) {
  const int d = gt.d;
  const int n1 = gt.n1;
  if (X.coeffs.size() != Index(n1) * d) {
    throw Error("vector field coefficient length mismatch");
  }
  Eigen::Map<const MatX> xm(X.coeffs.data(), d, n1);
  return gt.basis->U.leftCols(n1) * xm.transpose();
}

}  // namespace

MatX pointwise_field(const GammaTensors& gt, const VectorField& X) {
  // ambient velocity of the spanning-set expansion: the component functions
  // contracted against the coordinate gradients, (p,b) -> sum_a psi_a(p)
  // Gamma_p(x_a, x_b); on embedded data this projects onto the tangent space
  const int d = gt.d;
  MatX psi = component_functions(gt, X);
  MatX out = MatX::Zero(psi.rows(), d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      out.col(b).array() +=
          psi.col(a).array() * gt.cc.col(Index(a) * d + b).array();
    }
  }
  return out;
}

MatX weak_gradient(const GammaTensors& gt) {
  return weak_derivative(gt, 0, gt.basis->n0);
}

MatX gradient(const GammaTensors& gt, GramOperator& g1) {
  return gram_solve(g1, weak_gradient(gt));
}

MatX divergence(const GammaTensors& gt) {
  return -weak_gradient(gt).transpose();
}

MatX laplacian0(const GammaTensors& gt, GramOperator& g1) {
  MatX w = weak_gradient(gt);
  return MatX(w.transpose() * gram_solve(g1, w));
}

MatX weak_exterior_derivative(const GammaTensors& gt, int k) {
  if (k < 0 || k + 1 > gt.d) {
    throw Error("exterior derivative degree exceeds ambient dimension");
  }
  return weak_derivative(gt, k, gt.n1);
}

MatX exterior_derivative(const GammaTensors& gt, int k, GramOperator& g_k1) {
  return gram_solve(g_k1, weak_exterior_derivative(gt, k));
}

MatX codifferential(const GammaTensors& gt, int k, GramOperator& g_km1) {
  if (k < 1) throw Error("codifferential requires degree >= 1");
  if (k > gt.d) throw Error("codifferential degree exceeds ambient dimension");
  MatX w = weak_derivative(gt, k - 1, gt.n1);
  return gram_solve(g_km1, MatX(w.transpose()));
}

VectorField curl(const VectorField& X, const GammaTensors& gt,
                 GramOperator& g2) {
  if (gt.d != 3) throw Error("curl requires ambient dimension 3");
  MatX d1 = exterior_derivative(gt, 1, g2);
  VecX two = d1 * X.coeffs;
  const int n1 = gt.n1;
  VecX out(Index(n1) * 3);
  // component ranks {0,1} -> z, {0,2} -> -y, {1,2} -> x
  for (int i = 0; i < n1; ++i) {
    out[Index(i) * 3 + 0] = two[Index(i) * 3 + 2];
    out[Index(i) * 3 + 1] = -two[Index(i) * 3 + 1];
    out[Index(i) * 3 + 2] = two[Index(i) * 3 + 0];
  }
  return {out};
}

MatX vf_operator(const VectorField& X, const GammaTensors& gt) {
  const int d = gt.d;
  const int n0 = gt.basis->n0;
  MatX xpt = component_functions(gt, X);
  MatX m = MatX::Zero(gt.size(), n0);
  for (int a = 0; a < d; ++a) {
    m.noalias() +=
        xpt.col(a).asDiagonal() * gt.cb.middleCols(Index(a) * n0, n0);
  }
  return gt.basis->U.transpose() * (gt.basis->mu.asDiagonal() * m);
}

VectorField field_from_samples(const GammaTensors& gt, const MatX& velocities,
                               GramOperator& g1) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const Index n = gt.size();
  if (velocities.rows() != n || velocities.cols() != d) {
    throw Error("velocity samples must be n x d");
  }
  // <phi_i grad x_a, V> = sum_p mu_p U_pi sum_b v_b(p) Gamma_p(x_a, x_b)
  MatX proj(n, d);
  for (int a = 0; a < d; ++a) {
    VecX acc = VecX::Zero(n);
    for (int b = 0; b < d; ++b) {
      acc.array() +=
          velocities.col(b).array() * gt.cc.col(Index(a) * d + b).array();
    }
    proj.col(a) = acc;
  }
  MatX wm = gt.basis->U.leftCols(n1).transpose() *
            (gt.basis->mu.asDiagonal() * proj);
  VecX w(Index(n1) * d);
  for (int i = 0; i < n1; ++i) {
    for (int a = 0; a < d; ++a) w[Index(i) * d + a] = wm(i, a);
  }
  return {gram_solve(g1, w)};
}

VectorField lie_bracket(const VectorField& X, const VectorField& Y,
                        const GammaTensors& gt, GramOperator& g1) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const Index n = gt.size();
  MatX xpt = component_functions(gt, X);
  MatX ypt = component_functions(gt, Y);
  const VecX& mu = gt.basis->mu;
  MatX wcols(n1, d);
  MatX h(n, 2);
  for (int jp = 0; jp < d; ++jp) {
    // h0 = sum_b Y_b Gamma(x_b, x_jp) and likewise for X: the inner
    // directional derivatives of x_jp, contracted before any nesting
    h.setZero();
    for (int b = 0; b < d; ++b) {
      h.col(0).array() +=
          ypt.col(b).array() * gt.cc.col(Index(b) * d + jp).array();
      h.col(1).array() +=
          xpt.col(b).array() * gt.cc.col(Index(b) * d + jp).array();
    }
    MatX nest = cdc_coords_batch(gt, h);  // (p, a*2 + c) = Gamma_p(x_a, h_c)
    VecX s = VecX::Zero(n);
    for (int a = 0; a < d; ++a) {
      s.array() += xpt.col(a).array() * nest.col(Index(a) * 2 + 0).array() -
                   ypt.col(a).array() * nest.col(Index(a) * 2 + 1).array();
    }
    wcols.col(jp) =
        gt.basis->U.leftCols(n1).transpose() * (mu.array() * s.array()).matrix();
  }
  VecX w(Index(n1) * d);
  for (int i = 0; i < n1; ++i) {
    for (int a = 0; a < d; ++a) w[Index(i) * d + a] = wcols(i, a);
  }
  return {gram_solve(g1, w)};
}

MatX weak_hessian(GammaTensors& gt) {
  ensure_c_cb(gt);
  ensure_b_cc(gt);
  const int d = gt.d;
  const int n1 = gt.n1;
  const int n0 = gt.basis->n0;
  const Index n = gt.size();
  const int half = d * (d + 1) / 2;
  const VecX& mu = gt.basis->mu;
  const auto U1 = gt.basis->U.leftCols(n1);
  MatX W(Index(n1) * half, n0);
  int s = 0;
  for (int j1 = 0; j1 < d; ++j1) {
    for (int j2 = j1; j2 < d; ++j2, ++s) {
      MatX tmp = 0.5 * (gt.c_cb.middleCols(Index(j1 * d + j2) * n0, n0) +
                        gt.c_cb.middleCols(Index(j2 * d + j1) * n0, n0));
      Eigen::Map<const MatX, 0, Eigen::OuterStride<>> bcc(
          gt.b_cc.data() + Index(j1 * d + j2) * n, n, n0,
          Eigen::OuterStride<>(n * Index(d) * d));
      tmp -= 0.5 * bcc;
      // off-diagonal rows carry both index orders of the full layout
      const double scale = (j1 == j2) ? 1.0 : 2.0;
      MatX block = scale * (U1.transpose() * (mu.asDiagonal() * tmp));
      for (int i1 = 0; i1 < n1; ++i1) {
        W.row(Index(i1) * half + s) = block.row(i1);
      }
    }
  }
  return W;
}

MatX hessian(GammaTensors& gt, GramOperator& g_sym) {
  return gram_solve(g_sym, weak_hessian(gt));
}

VecX tensor02_action(const Tensor02& a, const VectorField& X,
                     const VectorField& Y, const GammaTensors& gt) {
  const int d = gt.d;
  const Index n = gt.size();
  MatX at = pointwise_tensor(gt, a);
  MatX xpt = component_functions(gt, X);
  MatX ypt = component_functions(gt, Y);
  VecX out(n);
  MatX cp(d, d), ap(d, d);
  VecX u(d), v(d);
  for (Index p = 0; p < n; ++p) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        cp(i, j) = gt.cc(p, Index(i) * d + j);
        ap(i, j) = at(p, Index(i) * d + j);
      }
    }
    u.noalias() = cp * xpt.row(p).transpose();
    v.noalias() = cp * ypt.row(p).transpose();
    out[p] = u.dot(ap * v);
  }
  return out;
}

MatX weak_tensor02_operator(const Tensor02& a, const GammaTensors& gt) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const Index n = gt.size();
  MatX at = pointwise_tensor(gt, a);
  const VecX& mu = gt.basis->mu;
  const auto U1 = gt.basis->U.leftCols(n1);
  // b_p = C_p a_p^T C_p pairs the first tensor slot with the input field
  MatX b(n, Index(d) * d);
  MatX cp(d, d), ap(d, d), tmp(d, d);
  for (Index p = 0; p < n; ++p) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        cp(i, j) = gt.cc(p, Index(i) * d + j);
        ap(i, j) = at(p, Index(i) * d + j);
      }
    }
    tmp.noalias() = cp * ap.transpose() * cp;
    for (int t1 = 0; t1 < d; ++t1) {
      for (int t2 = 0; t2 < d; ++t2) b(p, Index(t1) * d + t2) = tmp(t1, t2);
    }
  }
  MatX W(Index(n1) * d, Index(n1) * d);
  for (int t1 = 0; t1 < d; ++t1) {
    for (int t2 = 0; t2 < d; ++t2) {
      VecX w = mu.array() * b.col(Index(t1) * d + t2).array();
      MatX blk = U1.transpose() * (w.asDiagonal() * U1);
      for (int s1 = 0; s1 < n1; ++s1) {
        for (int s2 = 0; s2 < n1; ++s2) {
          W(Index(s1) * d + t1, Index(s2) * d + t2) = blk(s1, s2);
        }
      }
    }
  }
  return W;
}

MatX tensor02_operator(const Tensor02& a, const GammaTensors& gt,
                       GramOperator& g1) {
  return gram_solve(g1, weak_tensor02_operator(a, gt));
}

Tensor02 levi_civita(const VectorField& X, GammaTensors& gt,
                     GramOperator& g_full) {
  ensure_c_cc(gt);
  const int d = gt.d;
  const int n1 = gt.n1;
  const Index n = gt.size();
  MatX xpt = component_functions(gt, X);  // column j samples psi_j = sum_i X_ij phi_i
  const VecX& mu = gt.basis->mu;
  MatX psi = cdc_coords_batch(gt, xpt);  // (p, a*d + j) = Gamma_p(x_a, psi_j)
  VecX w(Index(n1) * d * d);
  for (int j1 = 0; j1 < d; ++j1) {
    for (int j2 = 0; j2 < d; ++j2) {
      VecX s = VecX::Zero(n);
      for (int j = 0; j < d; ++j) {
        // d psi (x) dx term, then the curvature correction from Hess(x_j)
        s.array() += psi.col(Index(j1) * d + j).array() *
                     gt.cc.col(Index(j2) * d + j).array();
        s.array() += 0.5 * xpt.col(j).array() *
                     (gt.c_cc.col(Index(j1 * d + j2) * d + j).array() +
                      gt.c_cc.col(Index(j2 * d + j1) * d + j).array() -
                      gt.c_cc.col(Index(j * d + j1) * d + j2).array());
      }
      VecX col = gt.basis->U.leftCols(n1).transpose() *
                 (mu.array() * s.array()).matrix();
      for (int i = 0; i < n1; ++i) {
        w[Index(i) * d * d + Index(j1) * d + j2] = col[i];
      }
    }
  }
  return {gram_solve(g_full, w), false};
}

VectorField covariant(const VectorField& X, const VectorField& Y,
                      GammaTensors& gt, GramOperator& g1,
                      GramOperator& g_full) {
  Tensor02 nabla_y = levi_civita(Y, gt, g_full);
  MatX op = tensor02_operator(nabla_y, gt, g1);
  return {op * X.coeffs};
}

}  // namespace diffgeo
