#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "diffgeo/basis.hpp"
#include "diffgeo/gamma.hpp"
#include "diffgeo/markov.hpp"
#include "diffgeo/multiindex.hpp"
#include "diffgeo/shapes.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace diffgeo;
using testutil::random_vec;

namespace {

struct Setup {
  PointCloud cloud;
  MarkovModel model;
  FunctionBasis basis;
};

Setup make_setup(PointCloud cloud, int knn, int n0) {
  Setup s;
  BuiltModel built = build_model(cloud, knn);
  s.cloud = std::move(cloud);
  s.model = std::move(built.model);
  s.basis = eigenbasis(s.model, n0);
  return s;
}

double max_abs(const VecX& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("multiindex: binomials, enumeration, rank, merge sign") {
  CHECK(binom(10, 3) == 120);
  CHECK(binom(5, 0) == 1);
  CHECK(binom(4, 4) == 1);
  CHECK(binom(3, 5) == 0);

  auto mis = multi_indices(5, 2);
  REQUIRE(mis.size() == 10);
  CHECK(mis[0] == std::vector<int>{0, 1});
  CHECK(mis[1] == std::vector<int>{0, 2});
  CHECK(mis[9] == std::vector<int>{3, 4});
  // rank is the inverse of enumeration order
  auto all = multi_indices(6, 3);
  for (size_t r = 0; r < all.size(); ++r) {
    CHECK(mi_rank(all[r], 6) == static_cast<int>(r));
  }

  std::vector<int> merged;
  CHECK(merge_sign({0, 2}, {1}, merged) == -1);
  CHECK(merged == std::vector<int>{0, 1, 2});
  CHECK(merge_sign({0, 1}, {2}, merged) == 1);
  CHECK(merge_sign({1}, {0}, merged) == -1);
  CHECK(merge_sign({0, 1}, {1, 2}, merged) == 0);
}

TEST_CASE("cdc_pair: bilinear, symmetric, kills constants, nonnegative") {
  Setup s = make_setup(make_annulus(300, 5), 32, 12);
  std::mt19937_64 rng(11);
  VecX f = random_vec(s.model.size(), rng);
  VecX h = random_vec(s.model.size(), rng);
  VecX g = random_vec(s.model.size(), rng);

  VecX c = VecX::Constant(s.model.size(), 3.7);
  CHECK(max_abs(cdc_pair(s.model, f, c)) <= 1e-12);
  CHECK(cdc_pair(s.model, f, f).minCoeff() >= -1e-12);
  CHECK(max_abs(cdc_pair(s.model, f, h) - cdc_pair(s.model, h, f)) == 0.0);
  VecX lin = cdc_pair(s.model, VecX(2.0 * f + g), h);
  VecX ref = 2.0 * cdc_pair(s.model, f, h) + cdc_pair(s.model, g, h);
  CHECK(max_abs(lin - ref) <= 1e-10 * std::max(1.0, max_abs(ref)));
}

TEST_CASE("cdc_pair: flat grid recovers coordinate gradients") {
  PointCloud grid = make_grid(15);  // 225 points on [0,1]^2
  BuiltModel built = build_model(grid, 60);
  VecX gxy = cdc_pair(built.model, grid.points.col(0), grid.points.col(1));
  VecX gxx = cdc_pair(built.model, grid.points.col(0), grid.points.col(0));
  VecX gyy = cdc_pair(built.model, grid.points.col(1), grid.points.col(1));
  double cross = 0.0, xx = 0.0, yy = 0.0;
  int cnt = 0;
  for (Index p = 0; p < grid.size(); ++p) {
    double x = grid.points(p, 0), y = grid.points(p, 1);
    if (x < 0.3 || x > 0.7 || y < 0.3 || y > 0.7) continue;
    cross += std::abs(gxy[p]);
    xx += gxx[p];
    yy += gyy[p];
    ++cnt;
  }
  REQUIRE(cnt > 10);
  cross /= cnt;
  xx /= cnt;
  yy /= cnt;
  // grad x . grad y = 0, |grad x|^2 = |grad y|^2 = 1
  CHECK(cross <= 0.05);
  CHECK(xx / yy >= 0.8);
  CHECK(xx / yy <= 1.25);
  CHECK(xx >= 0.75);
  CHECK(xx <= 1.3);
}

TEST_CASE("cdc_pair: uncentred variant matches dense oracle") {
  Setup s = make_setup(make_annulus(150, 7), 16, 8);
  std::mt19937_64 rng(3);
  VecX f = random_vec(s.model.size(), rng);
  VecX h = random_vec(s.model.size(), rng);
  VecX got = cdc_pair(s.model, f, h, false);
  MatX P(s.model.P);
  for (Index i = 0; i < s.model.size(); i += 13) {
    double acc = 0.0;
    for (Index j = 0; j < s.model.size(); ++j) {
      acc += P(i, j) * (f[j] - f[i]) * (h[j] - h[i]);
    }
    acc *= 2.0 / (s.model.rho[i] * s.model.rho[i]);
    CHECK(std::abs(got[i] - acc) <= 1e-12 * std::max(1.0, std::abs(acc)));
  }
}

TEST_CASE("gamma_blocks: blocks agree with cdc_pair and are PSD") {
  Setup s = make_setup(make_torus(400, 9), 24, 10);
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 6);
  REQUIRE(gt.d == 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      VecX ref = cdc_pair(s.model, s.cloud.points.col(a),
                          s.cloud.points.col(b));
      CHECK(max_abs(VecX(gt.cc.col(a * 3 + b) - ref)) <= 1e-12);
    }
    for (int i : {0, 3, 9}) {
      VecX ref = cdc_pair(s.model, s.cloud.points.col(a), s.basis.U.col(i));
      CHECK(max_abs(VecX(gt.cb.col(a * s.basis.n0 + i) - ref)) <= 1e-12);
    }
  }
  // pointwise symmetry and PSD of the coordinate block
  double min_eig = 0.0;
  for (Index p = 0; p < gt.size(); ++p) {
    MatX g = gt.cc_at(p);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<MatX> eig(g);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  CHECK(min_eig >= -1e-10);
}

TEST_CASE("gamma_blocks: circle trace is steady at unit scale") {
  Setup s = make_setup(make_circle(300, 4), 32, 8);
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 4);
  VecX trace = gt.cc.col(0) + gt.cc.col(3);
  double lo = trace.minCoeff(), hi = trace.maxCoeff();
  CHECK(hi / lo < 3.0);
  double mean = trace.mean();
  CHECK(mean >= 0.7);
  CHECK(mean <= 1.4);
}

TEST_CASE("gamma_blocks: smoothed coordinates option") {
  Setup s = make_setup(make_annulus(200, 13), 24, 8);
  GammaOptions opt;
  opt.smooth_coords = true;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 4, opt);
  MatX px = s.model.P * s.cloud.points;
  CHECK((gt.coords - px).cwiseAbs().maxCoeff() == 0.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      VecX ref = cdc_pair(s.model, px.col(a), px.col(b));
      CHECK(max_abs(VecX(gt.cc.col(a * 2 + b) - ref)) <= 1e-12);
    }
  }
}

TEST_CASE("gamma_blocks: uncentred flag propagates to all blocks") {
  Setup s = make_setup(make_annulus(150, 21), 16, 6);
  GammaOptions opt;
  opt.centred = false;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 4, opt);
  VecX ref = cdc_pair(s.model, s.cloud.points.col(0), s.cloud.points.col(1),
                      false);
  CHECK(max_abs(VecX(gt.cc.col(1) - ref)) <= 1e-12);
}

TEST_CASE("nested blocks match nested cdc_pair") {
  Setup s = make_setup(make_annulus(200, 17), 24, 6);
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 4);
  ensure_c_cb(gt);
  ensure_b_cc(gt);
  ensure_c_cc(gt);
  const int d = 2, n0 = s.basis.n0;
  const auto& X = s.cloud.points;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      VecX inner_cc = cdc_pair(s.model, X.col(b), X.col(a));
      for (int i : {0, 2, 5}) {
        VecX inner = cdc_pair(s.model, X.col(b), s.basis.U.col(i));
        VecX ref = cdc_pair(s.model, X.col(a), inner);
        CHECK(max_abs(VecX(gt.c_cb.col((a * d + b) * n0 + i) - ref)) <= 1e-12);
        VecX ref2 = cdc_pair(s.model, s.basis.U.col(i),
                             cdc_pair(s.model, X.col(a), X.col(b)));
        CHECK(max_abs(VecX(gt.b_cc.col(i * d * d + a * d + b) - ref2)) <=
              1e-12);
      }
      for (int c = 0; c < d; ++c) {
        VecX ref3 = cdc_pair(s.model, X.col(a),
                             cdc_pair(s.model, X.col(b), X.col(c)));
        CHECK(max_abs(VecX(gt.c_cc.col((a * d + b) * d + c) - ref3)) <= 1e-12);
      }
    }
  }
  // idempotent
  MatX before = gt.c_cb;
  ensure_c_cb(gt);
  CHECK((gt.c_cb - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("batched evaluations match pairwise calls") {
  Setup s = make_setup(make_annulus(180, 23), 24, 6);
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 5);
  std::mt19937_64 rng(5);
  MatX H = testutil::random_mat(s.model.size(), 3, rng);
  MatX bc = cdc_coords_batch(gt, H);
  MatX bb = cdc_basis_batch(gt, H);
  for (Index c = 0; c < 3; ++c) {
    for (int a = 0; a < 2; ++a) {
      VecX ref = cdc_pair(s.model, s.cloud.points.col(a), H.col(c));
      CHECK(max_abs(VecX(bc.col(a * 3 + c) - ref)) <= 1e-12);
    }
    for (int i : {0, 4}) {
      VecX ref = cdc_pair(s.model, s.basis.U.col(i), H.col(c));
      CHECK(max_abs(VecX(bb.col(i * 3 + c) - ref)) <= 1e-12);
    }
  }
}

TEST_CASE("stream_bb: reassembled pair blocks, symmetric in the pair") {
  Setup s = make_setup(make_annulus(150, 29), 16, 8);
  const int n1 = 6;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  MatX full(s.model.size(), n1 * n1);
  int calls = 0;
  stream_bb(gt, 2, [&](int i0, int cnt, const MatX& data) {
    ++calls;
    for (int t = 0; t < cnt; ++t) {
      for (int ip = 0; ip < n1; ++ip) {
        full.col((i0 + t) * n1 + ip) = data.col(t * n1 + ip);
      }
    }
  });
  CHECK(calls == 3);
  for (int i : {0, 2, 5}) {
    for (int j : {1, 4}) {
      VecX ref = cdc_pair(s.model, s.basis.U.col(i), s.basis.U.col(j));
      CHECK(max_abs(VecX(full.col(i * n1 + j) - ref)) <= 1e-12);
      CHECK(max_abs(VecX(full.col(i * n1 + j) - full.col(j * n1 + i))) == 0.0);
    }
  }
}

TEST_CASE("kform_metric: degenerate and direct-minor degrees") {
  Setup s = make_setup(make_torus(300, 31), 24, 8);
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 4);
  MatX m0 = kform_metric(gt, 0);
  CHECK(m0.rows() == gt.size());
  CHECK(m0.cols() == 1);
  CHECK((m0.array() - 1.0).abs().maxCoeff() == 0.0);
  MatX m1 = kform_metric(gt, 1);
  CHECK((m1 - gt.cc).cwiseAbs().maxCoeff() == 0.0);

  auto mis = multi_indices(3, 2);
  MatX m2 = kform_metric(gt, 2);
  MatX m3 = kform_metric(gt, 3);
  for (Index p = 0; p < gt.size(); p += 37) {
    MatX g = gt.cc_at(p);
    for (size_t r = 0; r < 3; ++r) {
      for (size_t c = 0; c < 3; ++c) {
        double det = g(mis[r][0], mis[c][0]) * g(mis[r][1], mis[c][1]) -
                     g(mis[r][0], mis[c][1]) * g(mis[r][1], mis[c][0]);
        CHECK(std::abs(m2(p, static_cast<Index>(r * 3 + c)) - det) <= 1e-12);
      }
    }
    CHECK(std::abs(m3(p, 0) - g.determinant()) <=
          1e-12 * std::max(1.0, std::abs(g.determinant())));
  }
}

TEST_CASE("kform_metric: factored high-degree path matches direct minors") {
  // Synthetic PSD pointwise matrices in dimension 5, degree 4.
  std::mt19937_64 rng(41);
  const int d = 5, n = 7, k = 4;
  GammaTensors gt;
  gt.d = d;
  gt.cc.resize(n, d * d);
  for (int p = 0; p < n; ++p) {
    MatX A = testutil::random_mat(d, d, rng);
    MatX g = A * A.transpose();
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) gt.cc(p, a * d + b) = g(a, b);
    }
  }
  auto mis = multi_indices(d, k);
  const int C = static_cast<int>(mis.size());
  MatX m4 = kform_metric(gt, k);
  for (int p = 0; p < n; ++p) {
    MatX g = gt.cc_at(p);
    double scale = std::pow(g.norm(), k);
    for (int r = 0; r < C; ++r) {
      for (int c = 0; c < C; ++c) {
        MatX sub(k, k);
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) {
            sub(a, b) = g(mis[static_cast<size_t>(r)][static_cast<size_t>(a)],
                          mis[static_cast<size_t>(c)][static_cast<size_t>(b)]);
          }
        }
        CHECK(std::abs(m4(p, r * C + c) - sub.determinant()) <=
              1e-10 * scale);
      }
    }
    // compound spectrum = k-fold products of the base spectrum
    Eigen::SelfAdjointEigenSolver<MatX> base(g);
    std::vector<double> prods;
    for (const auto& J : mis) {
      double prod = 1.0;
      for (int j : J) prod *= base.eigenvalues()[j];
      prods.push_back(prod);
    }
    std::sort(prods.begin(), prods.end());
    MatX comp(C, C);
    for (int r = 0; r < C; ++r) {
      for (int c = 0; c < C; ++c) comp(r, c) = m4(p, r * C + c);
    }
    Eigen::SelfAdjointEigenSolver<MatX> ce(comp);
    for (int r = 0; r < C; ++r) {
      CHECK(std::abs(ce.eigenvalues()[r] - prods[static_cast<size_t>(r)]) <=
            1e-9 * scale);
    }
  }
}

TEST_CASE("gram: matches the naive assembly and is PSD") {
  Setup s = make_setup(make_circle(120, 37), 16, 10);
  const int n1 = 5, d = 2;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  MatX G = gram(gt, 1);
  REQUIRE(G.rows() == n1 * d);
  MatX naive = MatX::Zero(n1 * d, n1 * d);
  for (Index p = 0; p < gt.size(); ++p) {
    for (int i = 0; i < n1; ++i) {
      for (int ip = 0; ip < n1; ++ip) {
        for (int a = 0; a < d; ++a) {
          for (int b = 0; b < d; ++b) {
            naive(i * d + a, ip * d + b) += s.model.mu[p] * s.basis.U(p, i) *
                                            s.basis.U(p, ip) *
                                            gt.cc(p, a * d + b);
          }
        }
      }
    }
  }
  CHECK((G - naive).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<MatX> eig(G);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

  // degree-0 Gram is the identity by basis orthonormality
  MatX G0 = gram(gt, 0);
  CHECK((G0 - MatX::Identity(n1, n1)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("gram: top eigenvalue sits at unit scale on curves and surfaces") {
  {
    Setup s = make_setup(make_circle(250, 43), 32, 14);
    GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 12);
    Eigen::SelfAdjointEigenSolver<MatX> eig(gram(gt, 1));
    double top = eig.eigenvalues().maxCoeff();
    CHECK(top >= 0.9);
    CHECK(top <= 2.0);
  }
  {
    Setup s = make_setup(make_torus(500, 47), 32, 14);
    GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, 12);
    Eigen::SelfAdjointEigenSolver<MatX> eig(gram(gt, 1));
    double top = eig.eigenvalues().maxCoeff();
    CHECK(top >= 0.8);
    CHECK(top <= 2.0);
  }
}

TEST_CASE("gram_2tensor: naive oracle, symmetric collapse, PSD") {
  Setup s = make_setup(make_circle(120, 53), 16, 8);
  const int n1 = 4, d = 2;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  MatX G = gram_2tensor(gt, false);
  REQUIRE(G.rows() == n1 * d * d);
  MatX naive = MatX::Zero(n1 * d * d, n1 * d * d);
  for (Index p = 0; p < gt.size(); ++p) {
    for (int i = 0; i < n1; ++i) {
      for (int ip = 0; ip < n1; ++ip) {
        for (int j1 = 0; j1 < d; ++j1) {
          for (int j2 = 0; j2 < d; ++j2) {
            for (int t1 = 0; t1 < d; ++t1) {
              for (int t2 = 0; t2 < d; ++t2) {
                naive(i * d * d + j1 * d + j2, ip * d * d + t1 * d + t2) +=
                    s.model.mu[p] * s.basis.U(p, i) * s.basis.U(p, ip) *
                    gt.cc(p, j1 * d + t1) * gt.cc(p, j2 * d + t2);
              }
            }
          }
        }
      }
    }
  }
  CHECK((G - naive).cwiseAbs().maxCoeff() <= 1e-10);
  Eigen::SelfAdjointEigenSolver<MatX> eig(G);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

  // symmetric variant agrees through the quadratic form
  MatX Gs = gram_2tensor(gt, true);
  REQUIRE(Gs.rows() == n1 * d * (d + 1) / 2);
  std::mt19937_64 rng(59);
  VecX cs = random_vec(Gs.rows(), rng);
  VecX cf = sym_to_full(gt, cs);
  double qf = cf.dot(G * cf);
  double qs = cs.dot(Gs * cs);
  CHECK(std::abs(qf - qs) <= 1e-10 * std::max(1.0, std::abs(qf)));
}

TEST_CASE("gram_2tensor: one-dimensional data collapses to the full layout") {
  std::mt19937_64 rng(61);
  PointCloud cloud;
  cloud.points.resize(80, 1);
  for (Index i = 0; i < 80; ++i) {
    cloud.points(i, 0) = 0.05 * i + 0.01 * std::sin(7.0 * i);
  }
  BuiltModel built = build_model(cloud, 12);
  FunctionBasis basis = eigenbasis(built.model, 6);
  GammaTensors gt = gamma_blocks(built.model, basis, cloud, 4);
  MatX G = gram_2tensor(gt, false);
  MatX Gs = gram_2tensor(gt, true);
  CHECK((G - Gs).cwiseAbs().maxCoeff() <= 1e-14);
  VecX cs = random_vec(Gs.rows(), rng);
  CHECK(max_abs(VecX(sym_to_full(gt, cs) - cs)) == 0.0);
}

TEST_CASE("wedge: constant coordinate forms give the volume form") {
  Setup s = make_setup(make_annulus(200, 67), 24, 8);
  const int n1 = 6;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  KForm dx{1, VecX::Zero(n1 * 2)};
  KForm dy{1, VecX::Zero(n1 * 2)};
  dx.coeffs[0] = 1.0;  // phi_0 dx with phi_0 constant one
  dy.coeffs[1] = 1.0;
  KForm w = wedge(dx, dy, gt);
  REQUIRE(w.degree == 2);
  REQUIRE(w.coeffs.size() == n1);
  CHECK(std::abs(w.coeffs[0] - 1.0) <= 1e-8);
  for (int i = 1; i < n1; ++i) CHECK(std::abs(w.coeffs[i]) <= 1e-8);

  KForm zero = wedge(dx, dx, gt);
  CHECK(max_abs(zero.coeffs) == 0.0);

  CHECK_THROWS_WITH_AS(wedge(w, dx, gt),
                       doctest::Contains("exceeds ambient"), Error);
}

TEST_CASE("wedge: antisymmetry of one-forms in three dimensions") {
  Setup s = make_setup(make_torus(300, 71), 24, 8);
  const int n1 = 5;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  std::mt19937_64 rng(73);
  KForm a{1, random_vec(n1 * 3, rng)};
  KForm b{1, random_vec(n1 * 3, rng)};
  KForm ab = wedge(a, b, gt);
  KForm ba = wedge(b, a, gt);
  CHECK(max_abs(VecX(ab.coeffs + ba.coeffs)) <=
        1e-12 * std::max(1.0, max_abs(ab.coeffs)));
  // 1-form wedge 2-form commutes (degree product even)
  KForm ab_a = wedge(ab, a, gt);
  KForm a_ab = wedge(a, ab, gt);
  CHECK(max_abs(VecX(ab_a.coeffs - a_ab.coeffs)) <=
        1e-12 * std::max(1.0, max_abs(ab_a.coeffs)));
}

TEST_CASE("visualize_form: one-forms match the direct contraction") {
  Setup s = make_setup(make_annulus(200, 79), 24, 8);
  const int n1 = 6, d = 2;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  std::mt19937_64 rng(83);
  KForm a{1, random_vec(n1 * d, rng)};
  FormVisual vis = visualize_form(a, gt);
  REQUIRE(vis.vectors.rows() == gt.size());
  for (Index p = 0; p < gt.size(); p += 31) {
    for (int b = 0; b < d; ++b) {
      double want = 0.0;
      for (int i = 0; i < n1; ++i) {
        for (int aa = 0; aa < d; ++aa) {
          want += a.coeffs[i * d + aa] * s.basis.U(p, i) * gt.cc(p, aa * d + b);
        }
      }
      CHECK(std::abs(vis.vectors(p, b) - want) <=
            1e-12 * std::max(1.0, std::abs(want)));
    }
  }
  KForm zero{1, VecX::Zero(n1 * d)};
  CHECK(visualize_form(zero, gt).vectors.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("visualize_form: two-form planes reconstruct the skew tensor") {
  Setup s = make_setup(make_annulus(200, 89), 24, 8);
  const int n1 = 6, d = 2;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  std::mt19937_64 rng(97);
  KForm a{2, random_vec(n1, rng)};
  FormVisual vis = visualize_form(a, gt);
  for (Index p = 0; p < gt.size(); p += 17) {
    MatX M(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) M(r, c) = vis.skew(p, r * d + c);
    }
    CHECK((M + M.transpose()).cwiseAbs().maxCoeff() == 0.0);
    VecX u = vis.plane_u.row(p).transpose();
    VecX v = vis.plane_v.row(p).transpose();
    MatX rec = vis.magnitude[p] * (u * v.transpose() - v * u.transpose());
    CHECK((rec - M).cwiseAbs().maxCoeff() <=
          1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff()));
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    CHECK(std::abs(v.norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("visualize_form: top form on surfaces in three dimensions") {
  Setup s = make_setup(make_torus(300, 101), 24, 8);
  const int n1 = 5;
  GammaTensors gt = gamma_blocks(s.model, s.basis, s.cloud, n1);
  KForm vol{3, VecX::Zero(n1)};
  vol.coeffs[0] = 1.0;
  FormVisual vis = visualize_form(vol, gt);
  for (Index p = 0; p < gt.size(); p += 41) {
    double det = gt.cc_at(p).determinant();
    CHECK(std::abs(vis.magnitude[p] - det) <=
          1e-10 * std::max(1.0, std::abs(det)));
  }
  KForm four{4, VecX()};
  CHECK_THROWS_WITH_AS(visualize_form(four, gt),
                       doctest::Contains("no visual reduction"), Error);
}

TEST_CASE("visualize_form: no scalar reduction off three dimensions") {
  // circle embedded in R^4; degree-3 forms have no visual reduction there
  PointCloud cloud;
  cloud.points = MatX::Zero(80, 4);
  for (Index i = 0; i < 80; ++i) {
    double t = 2.0 * M_PI * static_cast<double>(i) / 80.0;
    cloud.points(i, 0) = std::cos(t);
    cloud.points(i, 1) = std::sin(t);
    cloud.points(i, 2) = 0.3 * std::cos(2.0 * t);
    cloud.points(i, 3) = 0.3 * std::sin(3.0 * t);
  }
  BuiltModel built = build_model(cloud, 10);
  FunctionBasis basis = eigenbasis(built.model, 6);
  const int n1 = 4;
  GammaTensors gt = gamma_blocks(built.model, basis, cloud, n1);
  KForm a{3, VecX::Zero(n1 * binom(4, 3))};
  CHECK_THROWS_WITH_AS(visualize_form(a, gt),
                       doctest::Contains("no visual reduction"), Error);
  KForm z{0, VecX::Zero(n1)};
  CHECK_THROWS_WITH_AS(visualize_form(z, gt),
                       doctest::Contains("no visual reduction"), Error);
}
