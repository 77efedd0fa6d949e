#include "diffgeo/gamma.hpp"

#include <cmath>

#include "diffgeo/multiindex.hpp"

namespace diffgeo {

namespace {

/* Batched carre du champ of one function against every column of H.
 *
 * Centred mode is the covariance of the pair under each kernel row:
 *   Gamma_i(f, h) = pref_i * [P(f h) - (Pf)(Ph)]_i,
 * which is positive semidefinite by construction. Uncentred mode is the
 * graph-Laplacian form pref_i * sum_j P_ij (f_j - f_i)(h_j - h_i), kept
 * for comparison. Both consume the smoothed companions pf = Pf, pH = PH.
 */
MatX gamma_cols(const MarkovModel& m, const VecX& pref, bool centred,
                const VecX& f, const VecX& pf, const MatX& H,
                const MatX& pH) {
  MatX out = m.P * MatX(f.asDiagonal() * H);
  if (centred) {
    out.noalias() -= pf.asDiagonal() * pH;
  } else {
    out.noalias() -= f.asDiagonal() * pH;
    out.noalias() -= pf.asDiagonal() * H;
    out.noalias() += f.asDiagonal() * H;
  }
  out.array().colwise() *= pref.array();
  return out;
}

VecX prefactor(const MarkovModel& m) {
  return 2.0 * m.rho.array().square().inverse();
}

}  // namespace

MatX GammaTensors::cc_at(Index p) const {
  MatX g(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) g(a, b) = cc(p, a * d + b);
  }
  return g;
}

VecX cdc_pair(const MarkovModel& model, const VecX& f, const VecX& h,
              bool centred) {
  const Index n = model.size();
  if (f.size() != n || h.size() != n) {
    throw Error("cdc_pair: vector length does not match point count");
  }
  VecX pref = prefactor(model);
  VecX pf = model.P * f, ph = model.P * h;
  VecX out = model.P * f.cwiseProduct(h);
  if (centred) {
    out -= pf.cwiseProduct(ph);
  } else {
    out -= f.cwiseProduct(ph);
    out -= h.cwiseProduct(pf);
    out += f.cwiseProduct(h);
  }
  return pref.cwiseProduct(out);
}

GammaTensors gamma_blocks(const MarkovModel& model, const FunctionBasis& basis,
                          const PointCloud& cloud, int n1,
                          const GammaOptions& opt) {
  const Index n = model.size();
  const int d = static_cast<int>(cloud.dim());
  const int n0 = basis.n0;
  if (cloud.size() != n || basis.size() != n) {
    throw Error("gamma_blocks: model, basis, and cloud sizes disagree");
  }
  if (n1 < 1 || n1 > n0) throw Error("gamma_blocks: need 1 <= n1 <= n0");
  GammaTensors gt;
  gt.model = &model;
  gt.basis = &basis;
  gt.n1 = n1;
  gt.d = d;
  gt.centred = opt.centred;
  gt.pref = prefactor(model);
  gt.coords = opt.smooth_coords ? MatX(model.P * cloud.points) : cloud.points;
  gt.p_coords = model.P * gt.coords;
  gt.p_basis = model.P * basis.U;
  gt.cc.resize(n, d * d);
  gt.cb.resize(n, static_cast<Index>(d) * n0);
  for (int a = 0; a < d; ++a) {
    MatX ga = gamma_cols(model, gt.pref, gt.centred, gt.coords.col(a),
                         gt.p_coords.col(a), gt.coords, gt.p_coords);
    for (int b = 0; b < d; ++b) gt.cc.col(a * d + b) = ga.col(b);
    MatX gb = gamma_cols(model, gt.pref, gt.centred, gt.coords.col(a),
                         gt.p_coords.col(a), basis.U, gt.p_basis);
    for (int i = 0; i < n0; ++i) {
      gt.cb.col(static_cast<Index>(a) * n0 + i) = gb.col(i);
    }
  }
  // Enforce exact pointwise symmetry of the coordinate block.
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      VecX s = 0.5 * (gt.cc.col(a * d + b) + gt.cc.col(b * d + a));
      gt.cc.col(a * d + b) = s;
      gt.cc.col(b * d + a) = s;
    }
  }
  return gt;
}

void ensure_c_cb(GammaTensors& gt) {
  if (gt.c_cb.size() > 0) return;
  const MarkovModel& m = *gt.model;
  const Index n = gt.size();
  const int d = gt.d;
  const int n0 = gt.basis->n0;
  gt.c_cb.resize(n, static_cast<Index>(d) * d * n0);
  for (int b = 0; b < d; ++b) {
    // Inner functions Gamma(x_b, phi_i) for all i, as pointwise columns.
    MatX inner(n, n0);
    for (int i = 0; i < n0; ++i) {
      inner.col(i) = gt.cb.col(static_cast<Index>(b) * n0 + i);
    }
    MatX p_inner = m.P * inner;
    for (int a = 0; a < d; ++a) {
      MatX block = gamma_cols(m, gt.pref, gt.centred, gt.coords.col(a),
                              gt.p_coords.col(a), inner, p_inner);
      for (int i = 0; i < n0; ++i) {
        gt.c_cb.col((static_cast<Index>(a) * d + b) * n0 + i) = block.col(i);
      }
    }
  }
}

void ensure_b_cc(GammaTensors& gt) {
  if (gt.b_cc.size() > 0) return;
  const MarkovModel& m = *gt.model;
  const Index n = gt.size();
  const int d = gt.d;
  const int n0 = gt.basis->n0;
  gt.b_cc.resize(n, static_cast<Index>(n0) * d * d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      VecX inner = gt.cc.col(a * d + b);
      VecX p_inner = m.P * inner;
      // Gamma(phi_i, inner) for all i at once by batching over the basis.
      MatX block = gamma_cols(m, gt.pref, gt.centred, inner, p_inner,
                              gt.basis->U, gt.p_basis);
      for (int i = 0; i < n0; ++i) {
        gt.b_cc.col(static_cast<Index>(i) * d * d + a * d + b) = block.col(i);
      }
    }
  }
}

void ensure_c_cc(GammaTensors& gt) {
  if (gt.c_cc.size() > 0) return;
  const MarkovModel& m = *gt.model;
  const Index n = gt.size();
  const int d = gt.d;
  gt.c_cc.resize(n, static_cast<Index>(d) * d * d);
  for (int b = 0; b < d; ++b) {
    MatX inner(n, d);
    for (int c = 0; c < d; ++c) inner.col(c) = gt.cc.col(b * d + c);
    MatX p_inner = m.P * inner;
    for (int a = 0; a < d; ++a) {
      MatX block = gamma_cols(m, gt.pref, gt.centred, gt.coords.col(a),
                              gt.p_coords.col(a), inner, p_inner);
      for (int c = 0; c < d; ++c) {
        gt.c_cc.col((static_cast<Index>(a) * d + b) * d + c) = block.col(c);
      }
    }
  }
}

MatX cdc_coords_batch(const GammaTensors& gt, const MatX& H) {
  const MarkovModel& m = *gt.model;
  const Index cols = H.cols();
  MatX pH = m.P * H;
  MatX out(gt.size(), static_cast<Index>(gt.d) * cols);
  for (int a = 0; a < gt.d; ++a) {
    MatX block = gamma_cols(m, gt.pref, gt.centred, gt.coords.col(a),
                            gt.p_coords.col(a), H, pH);
    for (Index c = 0; c < cols; ++c) out.col(a * cols + c) = block.col(c);
  }
  return out;
}

MatX cdc_basis_batch(const GammaTensors& gt, const MatX& H) {
  const MarkovModel& m = *gt.model;
  const int n0 = gt.basis->n0;
  const Index cols = H.cols();
  MatX pH = m.P * H;
  MatX out(gt.size(), static_cast<Index>(n0) * cols);
  // Batching over basis columns per H column needs only cols sparse
  // multiplies, cheaper than n0 of them the other way round.
  for (Index c = 0; c < cols; ++c) {
    MatX block = gamma_cols(m, gt.pref, gt.centred, H.col(c), pH.col(c),
                            gt.basis->U, gt.p_basis);
    for (int i = 0; i < n0; ++i) {
      out.col(static_cast<Index>(i) * cols + c) = block.col(i);
    }
  }
  return out;
}

void stream_bb(const GammaTensors& gt, int block,
               const std::function<void(int, int, const MatX&)>& fn) {
  const MarkovModel& m = *gt.model;
  const int n1 = gt.n1;
  const MatX U1 = gt.basis->U.leftCols(n1);
  const MatX pU1 = gt.p_basis.leftCols(n1);
  for (int i0 = 0; i0 < n1; i0 += block) {
    int cnt = std::min(block, n1 - i0);
    MatX data(gt.size(), static_cast<Index>(cnt) * n1);
    for (int t = 0; t < cnt; ++t) {
      MatX g = gamma_cols(m, gt.pref, gt.centred, U1.col(i0 + t),
                          pU1.col(i0 + t), U1, pU1);
      for (int ip = 0; ip < n1; ++ip) {
        data.col(static_cast<Index>(t) * n1 + ip) = g.col(ip);
      }
    }
    fn(i0, cnt, data);
  }
}

MatX kform_metric(const GammaTensors& gt, int k) {
  const Index n = gt.size();
  const int d = gt.d;
  if (k < 0 || k > d) throw Error("kform_metric: need 0 <= k <= d");
  if (k == 0) return MatX::Ones(n, 1);
  if (k == 1) return gt.cc;
  const auto mis = multi_indices(d, k);
  const int C = static_cast<int>(mis.size());
  MatX out(n, static_cast<Index>(C) * C);
  MatX g(d, d), sub(k, k);
#pragma omp parallel for schedule(static) firstprivate(g, sub)
  for (Index p = 0; p < n; ++p) {
    g = gt.cc_at(p);
    if (k <= 3) {
      for (int r = 0; r < C; ++r) {
        for (int c = r; c < C; ++c) {
          for (int s = 0; s < k; ++s) {
            for (int t = 0; t < k; ++t) {
              sub(s, t) = g(mis[static_cast<size_t>(r)][static_cast<size_t>(s)],
                            mis[static_cast<size_t>(c)][static_cast<size_t>(t)]);
            }
          }
          double det = k == 2 ? sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0)
                              : sub.determinant();
          out(p, static_cast<Index>(r) * C + c) = det;
          out(p, static_cast<Index>(c) * C + r) = det;
        }
      }
    } else {
      // Cauchy-Binet on the PSD square root keeps the compound matrix PSD:
      // comp(G) = comp(W) comp(W)^T for G = W W^T.
      Eigen::SelfAdjointEigenSolver<MatX> eig(g);
      MatX W = eig.eigenvectors() *
               eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
      MatX ck(C, C);
      for (int r = 0; r < C; ++r) {
        for (int c = 0; c < C; ++c) {
          for (int s = 0; s < k; ++s) {
            for (int t = 0; t < k; ++t) {
              sub(s, t) = W(mis[static_cast<size_t>(r)][static_cast<size_t>(s)],
                            mis[static_cast<size_t>(c)][static_cast<size_t>(t)]);
            }
          }
          ck(r, c) = sub.determinant();
        }
      }
      MatX comp = ck * ck.transpose();
      for (int r = 0; r < C; ++r) {
        for (int c = 0; c < C; ++c) {
          out(p, static_cast<Index>(r) * C + c) = comp(r, c);
        }
      }
    }
  }
  return out;
}

MatX gram(const GammaTensors& gt, int k) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const int C = static_cast<int>(binom(d, k));
  const MatX comp = kform_metric(gt, k);
  const MatX U1 = gt.basis->U.leftCols(n1);
  const VecX& mu = gt.model->mu;
  MatX G(static_cast<Index>(n1) * C, static_cast<Index>(n1) * C);
  for (int r = 0; r < C; ++r) {
    for (int c = r; c < C; ++c) {
      VecX w = mu.cwiseProduct(comp.col(static_cast<Index>(r) * C + c));
      MatX M = U1.transpose() * w.asDiagonal() * U1;
      for (int i = 0; i < n1; ++i) {
        for (int ip = 0; ip < n1; ++ip) {
          G(static_cast<Index>(i) * C + r, static_cast<Index>(ip) * C + c) =
              M(i, ip);
          G(static_cast<Index>(i) * C + c, static_cast<Index>(ip) * C + r) =
              M(i, ip);
        }
      }
    }
  }
  return 0.5 * (G + G.transpose());
}

MatX gram_2tensor(const GammaTensors& gt, bool symmetric) {
  const Index n = gt.size();
  const int d = gt.d;
  const int n1 = gt.n1;
  const MatX U1 = gt.basis->U.leftCols(n1);
  const VecX& mu = gt.model->mu;
  const Index side = static_cast<Index>(n1) * d * d;
  MatX G = MatX::Zero(side, side);
  const Index chunk = 256;
  MatX Z;
  Eigen::SelfAdjointEigenSolver<MatX> eig;
  VecX zt(static_cast<Index>(d) * d);
  for (Index p0 = 0; p0 < n; p0 += chunk) {
    const Index cnt = std::min(chunk, n - p0);
    Z.resize(side, cnt * d * d);
    for (Index t = 0; t < cnt; ++t) {
      const Index p = p0 + t;
      eig.compute(gt.cc_at(p));
      VecX lam = eig.eigenvalues().cwiseMax(0.0);
      const MatX& V = eig.eigenvectors();
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          double coef = std::sqrt(mu[p] * lam[a] * lam[b]);
          for (int j1 = 0; j1 < d; ++j1) {
            for (int j2 = 0; j2 < d; ++j2) {
              zt[static_cast<Index>(j1) * d + j2] = coef * V(j1, a) * V(j2, b);
            }
          }
          Index col = t * d * d + a * d + b;
          for (int i = 0; i < n1; ++i) {
            Z.block(static_cast<Index>(i) * d * d, col, d * d, 1) =
                U1(p, i) * zt;
          }
        }
      }
    }
    G.selfadjointView<Eigen::Lower>().rankUpdate(Z, 1.0);
  }
  G.triangularView<Eigen::StrictlyUpper>() =
      G.triangularView<Eigen::StrictlyLower>().transpose();
  if (!symmetric) return G;
  // Collapse both index orders onto j1 <= j2.
  const int s = d * (d + 1) / 2;
  auto srank = [d](int j1, int j2) {
    return j1 * d - j1 * (j1 - 1) / 2 + (j2 - j1);
  };
  MatX Gs = MatX::Zero(static_cast<Index>(n1) * s, static_cast<Index>(n1) * s);
  for (int i = 0; i < n1; ++i) {
    for (int ip = 0; ip < n1; ++ip) {
      for (int j1 = 0; j1 < d; ++j1) {
        for (int j2 = j1; j2 < d; ++j2) {
          for (int l1 = 0; l1 < d; ++l1) {
            for (int l2 = l1; l2 < d; ++l2) {
              double acc = 0.0;
              const int t1[2] = {j1 * d + j2, j2 * d + j1};
              const int t2[2] = {l1 * d + l2, l2 * d + l1};
              const int r1 = j1 == j2 ? 1 : 2;
              const int r2 = l1 == l2 ? 1 : 2;
              for (int u = 0; u < r1; ++u) {
                for (int v = 0; v < r2; ++v) {
                  acc += G(static_cast<Index>(i) * d * d + t1[u],
                           static_cast<Index>(ip) * d * d + t2[v]);
                }
              }
              Gs(static_cast<Index>(i) * s + srank(j1, j2),
                 static_cast<Index>(ip) * s + srank(l1, l2)) = acc;
            }
          }
        }
      }
    }
  }
  return Gs;
}

VecX sym_to_full(const GammaTensors& gt, const VecX& sym_coeffs) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const int s = d * (d + 1) / 2;
  if (sym_coeffs.size() != static_cast<Index>(n1) * s) {
    throw Error("sym_to_full: coefficient length mismatch");
  }
  auto srank = [d](int j1, int j2) {
    return j1 * d - j1 * (j1 - 1) / 2 + (j2 - j1);
  };
  VecX full = VecX::Zero(static_cast<Index>(n1) * d * d);
  for (int i = 0; i < n1; ++i) {
    for (int j1 = 0; j1 < d; ++j1) {
      for (int j2 = 0; j2 < d; ++j2) {
        int lo = std::min(j1, j2), hi = std::max(j1, j2);
        full[static_cast<Index>(i) * d * d + j1 * d + j2] =
            sym_coeffs[static_cast<Index>(i) * s + srank(lo, hi)];
      }
    }
  }
  return full;
}

KForm wedge(const KForm& a, const KForm& b, const GammaTensors& gt) {
  const int d = gt.d;
  const int n1 = gt.n1;
  const int k = a.degree + b.degree;
  if (k > d) throw Error("wedge: result degree exceeds ambient dimension");
  const auto misA = multi_indices(d, a.degree);
  const auto misB = multi_indices(d, b.degree);
  const int Ca = static_cast<int>(misA.size());
  const int Cb = static_cast<int>(misB.size());
  const int Cc = static_cast<int>(binom(d, k));
  if (a.coeffs.size() != static_cast<Index>(n1) * Ca ||
      b.coeffs.size() != static_cast<Index>(n1) * Cb) {
    throw Error("wedge: coefficient lengths do not match n1 and degree");
  }
  const MatX U1 = gt.basis->U.leftCols(n1);
  Eigen::Map<const MatX> Am(a.coeffs.data(), Ca, n1);
  Eigen::Map<const MatX> Bm(b.coeffs.data(), Cb, n1);
  MatX Ap = U1 * Am.transpose();  // n x Ca pointwise coefficient functions
  MatX Bp = U1 * Bm.transpose();
  MatX W = MatX::Zero(gt.size(), Cc);
  std::vector<int> merged;
  for (int ja = 0; ja < Ca; ++ja) {
    for (int jb = 0; jb < Cb; ++jb) {
      int s = merge_sign(misA[static_cast<size_t>(ja)],
                         misB[static_cast<size_t>(jb)], merged);
      if (s == 0) continue;
      W.col(mi_rank(merged, d)) +=
          double(s) * Ap.col(ja).cwiseProduct(Bp.col(jb));
    }
  }
  // Re-project every pointwise coefficient onto the field basis.
  MatX Wc = U1.transpose() * gt.model->mu.asDiagonal() * W;  // n1 x Cc
  KForm out;
  out.degree = k;
  out.coeffs.resize(static_cast<Index>(n1) * Cc);
  for (int i = 0; i < n1; ++i) {
    for (int J = 0; J < Cc; ++J) {
      out.coeffs[static_cast<Index>(i) * Cc + J] = Wc(i, J);
    }
  }
  return out;
}

FormVisual visualize_form(const KForm& a, const GammaTensors& gt) {
  const int k = a.degree;
  const int d = gt.d;
  if (k < 1 || k > 3 || (k == 3 && d != 3)) {
    throw Error("no visual reduction for degree " + std::to_string(k) +
                " in dimension " + std::to_string(d));
  }
  const int n1 = gt.n1;
  const int C = static_cast<int>(binom(d, k));
  if (a.coeffs.size() != static_cast<Index>(n1) * C) {
    throw Error("visualize_form: coefficient length mismatch");
  }
  const Index n = gt.size();
  const MatX U1 = gt.basis->U.leftCols(n1);
  Eigen::Map<const MatX> Am(a.coeffs.data(), C, n1);
  MatX Ap = U1 * Am.transpose();  // n x C
  const MatX comp = kform_metric(gt, k);
  MatX V(n, C);
  MatX cp(C, C);
  for (Index p = 0; p < n; ++p) {
    for (int r = 0; r < C; ++r) {
      for (int c = 0; c < C; ++c) {
        cp(r, c) = comp(p, static_cast<Index>(r) * C + c);
      }
    }
    V.row(p) = Ap.row(p) * cp;
  }
  FormVisual out;
  out.degree = k;
  if (k == 1) {
    out.vectors = V;
    return out;
  }
  if (k == 3) {
    out.magnitude = V.col(0);
    return out;
  }
  // k = 2: per-point skew matrix and its dominant plane.
  const auto mis = multi_indices(d, 2);
  out.skew = MatX::Zero(n, static_cast<Index>(d) * d);
  out.plane_u.resize(n, d);
  out.plane_v.resize(n, d);
  out.magnitude.resize(n);
  MatX M(d, d);
  for (Index p = 0; p < n; ++p) {
    M.setZero();
    for (int J = 0; J < C; ++J) {
      int j1 = mis[static_cast<size_t>(J)][0];
      int j2 = mis[static_cast<size_t>(J)][1];
      M(j1, j2) = V(p, J);
      M(j2, j1) = -V(p, J);
      out.skew(p, static_cast<Index>(j1) * d + j2) = V(p, J);
      out.skew(p, static_cast<Index>(j2) * d + j1) = -V(p, J);
    }
    Eigen::JacobiSVD<MatX> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    VecX u = svd.matrixU().col(0), v = svd.matrixV().col(0);
    Index at = 0;
    u.cwiseAbs().maxCoeff(&at);
    if (u[at] < 0) u = -u;
    v.cwiseAbs().maxCoeff(&at);
    if (v[at] < 0) v = -v;
    out.plane_u.row(p) = u.transpose();
    out.plane_v.row(p) = v.transpose();
    out.magnitude[p] = u.dot(M * v);
  }
  return out;
}

}  // namespace diffgeo
