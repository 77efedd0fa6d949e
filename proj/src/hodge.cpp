#include "diffgeo/hodge.hpp"

#include <cmath>

#include "diffgeo/multiindex.hpp"
#include "diffgeo/operators.hpp"

namespace diffgeo {

namespace {

double det_by_cofactors(const MatX& m) {
  const Index k = m.rows();
  if (k == 0) return 1.0;
  if (k == 1) return m(0, 0);
  if (k == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (k == 3) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
  return m.determinant();
}

/* Adjugate adj(D)(c, r) = (-1)^{r+c} det(D with row r, col c removed),
 * so D^{-1} det(D) = adj(D) without ever dividing. k stays tiny (the
 * form degree), so cofactor expansion is the fast path.
 */
void adjugate(const MatX& d, MatX& adj) {
  const Index k = d.rows();
  adj.resize(k, k);
  if (k == 1) {
    adj(0, 0) = 1.0;
    return;
  }
  if (k == 2) {
    adj(0, 0) = d(1, 1);
    adj(0, 1) = -d(0, 1);
    adj(1, 0) = -d(1, 0);
    adj(1, 1) = d(0, 0);
    return;
  }
  MatX minor(k - 1, k - 1);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      Index rr = 0;
      for (Index i = 0; i < k; ++i) {
        if (i == r) continue;
        Index cc = 0;
        for (Index j = 0; j < k; ++j) {
          if (j == c) continue;
          minor(rr, cc) = d(i, j);
          ++cc;
        }
        ++rr;
      }
      adj(c, r) = (((r + c) % 2 == 0) ? 1.0 : -1.0) * det_by_cofactors(minor);
    }
  }
}

}  // namespace

MatX up_laplacian_weak(const GammaTensors& gt, int k) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const int n0 = gt.basis->n0;
  const Index n = gt.size();
  if (k < 0 || k > d) throw Error("up Laplacian: need 0 <= k <= degree d");
  const auto Js = multi_indices(d, k);
  const int C = static_cast<int>(Js.size());
  const VecX& mu = gt.basis->mu;

  MatX up = MatX::Zero(Index(n1) * C, Index(n1) * C);

  /* Pointwise dets and adjugates for every (row multi-index, col
   * multi-index) pair. D_p(r, c) = Gamma_p(x_{J'[r]}, x_{J[c]}).
   */
  MatX dets = MatX::Ones(n, Index(C) * C);
  MatX adjs;  // (p, ((rj1*C + rj)*k + c)*k + r)
  if (k > 0) {
    adjs.resize(n, Index(C) * C * k * k);
    MatX dp(k, k), ap(k, k);
    for (int rj1 = 0; rj1 < C; ++rj1) {
      const auto& j1 = Js[size_t(rj1)];
      for (int rj = 0; rj < C; ++rj) {
        const auto& j = Js[size_t(rj)];
        const Index pair = Index(rj1) * C + rj;
        for (Index p = 0; p < n; ++p) {
          for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) {
              dp(r, c) = gt.cc(p, Index(j1[size_t(r)]) * d + j[size_t(c)]);
            }
          }
          double det = det_by_cofactors(dp);
          const double scale = dp.cwiseAbs().maxCoeff();
          if (std::abs(det) <= 1e-12 * std::pow(scale, k)) {
            dp.diagonal().array() += 1e-12 * dp.trace();
            det = det_by_cofactors(dp);
          }
          dets(p, pair) = det;
          adjugate(dp, ap);
          for (int c = 0; c < k; ++c) {
            for (int r = 0; r < k; ++r) {
              adjs(p, (pair * k + c) * k + r) = ap(c, r);
            }
          }
        }
      }
    }
  }

  /* First Schur term: det(D_p) Gamma_p(phi_i', phi_i), streamed over
   * basis pairs once with all (J', J) weights applied per block.
   */
  MatX wdets = mu.asDiagonal() * dets;
  stream_bb(gt, 8, [&](int i0, int cnt, const MatX& data) {
    for (int t = 0; t < cnt; ++t) {
      MatX m = data.middleCols(Index(t) * n1, n1).transpose() * wdets;
      for (int rj1 = 0; rj1 < C; ++rj1) {
        for (int rj = 0; rj < C; ++rj) {
          for (int ip = 0; ip < n1; ++ip) {
            up(Index(ip) * C + rj1, Index(i0 + t) * C + rj) +=
                m(ip, Index(rj1) * C + rj);
          }
        }
      }
    }
  });

  /* Second Schur term: the mixed rows/columns contracted through the
   * adjugate. Column r of the pointwise minor pairs x_{J'[r]} with the
   * output function, column c pairs x_{J[c]} with the input.
   */
  if (k > 0) {
    for (int rj1 = 0; rj1 < C; ++rj1) {
      const auto& j1 = Js[size_t(rj1)];
      for (int rj = 0; rj < C; ++rj) {
        const auto& j = Js[size_t(rj)];
        const Index pair = Index(rj1) * C + rj;
        MatX t2 = MatX::Zero(n1, n1);
        for (int c = 0; c < k; ++c) {
          const auto cbc = gt.cb.middleCols(Index(j[size_t(c)]) * n0, n1);
          for (int r = 0; r < k; ++r) {
            VecX w =
                mu.array() * adjs.col((pair * Index(k) + c) * k + r).array();
            t2.noalias() +=
                cbc.transpose() *
                (w.asDiagonal() *
                 gt.cb.middleCols(Index(j1[size_t(r)]) * n0, n1));
          }
        }
        for (int ip = 0; ip < n1; ++ip) {
          for (int i = 0; i < n1; ++i) {
            up(Index(ip) * C + rj1, Index(i) * C + rj) -= t2(ip, i);
          }
        }
      }
    }
  }
  return up;
}

MatX down_laplacian_weak(const GammaTensors& gt, int k) {
  const int d = gt.d;
  if (k < 0 || k > d) throw Error("down Laplacian: need 0 <= k <= degree d");
  const Index side = Index(gt.n1) * binom(d, k);
  if (k == 0) return MatX::Zero(side, side);
  MatX dw = weak_exterior_derivative(gt, k - 1);
  GramOperator g = make_gram(gram(gt, k - 1));
  return MatX(dw * gram_solve(g, MatX(dw.transpose())));
}

HodgePair hodge_laplacian(const GammaTensors& gt, int k) {
  MatX weak = down_laplacian_weak(gt, k) + up_laplacian_weak(gt, k);
  return {std::move(weak), make_gram(gram(gt, k))};
}

Spectrum generalized_spectrum(const MatX& weak, GramOperator& gram) {
  factor(gram);
  const int r = gram.rank;
  if (r == 0) {
    throw Error("generalized spectrum requires a Gram with positive rank");
  }
  // Whitening: columns of B are G-orthonormal, so the pencil reduces to
  // an ordinary symmetric problem on the retained subspace.
  MatX b = gram.eigvecs.leftCols(r) *
           gram.eigvals.head(r).array().sqrt().inverse().matrix().asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatX> es(b.transpose() * weak * b);
  return {es.eigenvalues(), MatX(b * es.eigenvectors())};
}

HodgeParts hodge_decomposition(const KForm& a, const GammaTensors& gt) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const int k = a.degree;
  if (k < 0 || k > d) throw Error("form degree out of range");
  const Index len = Index(n1) * binom(d, k);
  if (a.coeffs.size() != len) throw Error("form coefficient length mismatch");

  HodgeParts out;
  out.exact = {k, VecX::Zero(len)};
  out.coexact = {k, VecX::Zero(len)};
  out.beta = {k - 1, VecX()};
  out.delta = {k + 1, VecX()};

  GramOperator gk = make_gram(gram(gt, k));

  if (k >= 1) {
    MatX dw = weak_exterior_derivative(gt, k - 1);
    GramOperator up = make_gram(up_laplacian_weak(gt, k - 1));
    out.beta.coeffs = gram_solve(up, VecX(dw.transpose() * a.coeffs));
    out.exact.coeffs = gram_solve(gk, VecX(dw * out.beta.coeffs));
  }
  if (k + 1 <= d) {
    MatX dw = weak_exterior_derivative(gt, k);
    GramOperator down = make_gram(MatX(dw * gram_solve(gk, MatX(dw.transpose()))));
    out.delta.coeffs = gram_solve(down, VecX(dw * a.coeffs));
    out.coexact.coeffs = gram_solve(gk, VecX(dw.transpose() * out.delta.coeffs));
  }
  out.harmonic = {k, VecX(a.coeffs - out.exact.coeffs - out.coexact.coeffs)};
  return out;
}

}  // namespace diffgeo
