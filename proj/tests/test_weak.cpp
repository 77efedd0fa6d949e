#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "diffgeo/basis.hpp"
#include "diffgeo/gamma.hpp"
#include "diffgeo/markov.hpp"
#include "diffgeo/shapes.hpp"
#include "diffgeo/weak.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace diffgeo;
using testutil::random_vec;

TEST_CASE("gram_pinv: identity and spectral cutoff on a diagonal matrix") {
  GramOperator gi = make_gram(MatX::Identity(5, 5));
  MatX pi = gram_pinv(gi);
  CHECK((pi - MatX::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(gi.rank == 5);

  VecX diag(3);
  diag << 4.0, 1.0, 1e-9;
  GramOperator g = make_gram(MatX(diag.asDiagonal()));
  MatX p = gram_pinv(g);
  CHECK(g.rank == 2);  // 1e-9 < 4 / 1e5
  VecX want(3);
  want << 0.25, 1.0, 0.0;
  CHECK((p - MatX(want.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gram_pinv: fully regularized matrix raises rank-zero") {
  GramOperator g = make_gram(MatX::Zero(3, 3));
  CHECK_THROWS_WITH_AS(gram_pinv(g), doctest::Contains("rank-zero Gram"),
                       Error);
  GramOperator neg = make_gram(MatX(-MatX::Identity(3, 3)));
  VecX ones = VecX::Ones(3);
  CHECK_THROWS_WITH_AS(gram_solve(neg, ones),
                       doctest::Contains("rank-zero Gram"), Error);
}

TEST_CASE("gram_pinv: Moore-Penrose identities on a rank-deficient matrix") {
  std::mt19937_64 rng(7);
  MatX A = testutil::random_mat(12, 8, rng);
  MatX G = A * A.transpose();  // 12 x 12, rank 8
  GramOperator g = make_gram(G);
  MatX p = gram_pinv(g);
  CHECK(g.rank == 8);
  CHECK((G * p * G - G).cwiseAbs().maxCoeff() <= 1e-8 * G.norm());
  CHECK((p * G * p - p).cwiseAbs().maxCoeff() <= 1e-8 * p.norm());
  // solve(G) is the projector onto the retained subspace
  MatX proj = gram_solve(g, G);
  CHECK((proj * proj - proj).cwiseAbs().maxCoeff() <= 1e-10);
  // solve and explicit pseudoinverse agree
  MatX W = testutil::random_mat(12, 4, rng);
  CHECK((gram_solve(g, W) - p * W).cwiseAbs().maxCoeff() <= 1e-12);
  VecX w = random_vec(12, rng);
  CHECK((gram_solve(g, w) - VecX(p * w)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gram_pinv: Tikhonov mode matches the shifted inverse") {
  std::mt19937_64 rng(13);
  MatX A = testutil::random_mat(6, 6, rng);
  MatX G = A * A.transpose();
  const double eps = 1e-3;
  GramOperator g = make_gram(G, 1e5, eps);
  MatX p = gram_pinv(g);
  MatX want = (G + eps * MatX::Identity(6, 6)).inverse();
  CHECK((p - want).cwiseAbs().maxCoeff() <= 1e-10 * want.norm());
  CHECK(g.rank == 6);
}

TEST_CASE("make_gram: validation") {
  CHECK_THROWS_WITH_AS(make_gram(MatX::Zero(2, 3)),
                       doctest::Contains("square"), Error);
  CHECK_THROWS_WITH_AS(make_gram(MatX::Identity(2, 2), 0.5),
                       doctest::Contains("condition_target"), Error);
}

TEST_CASE("frame_report: identity frame") {
  GramOperator g = make_gram(MatX::Identity(4, 4));
  FrameReport r = frame_report(g, 1.0);
  CHECK(std::abs(r.upper - 1.0) <= 1e-12);
  CHECK(r.rank == 4);
  CHECK(std::abs(r.eps - 1e-5) <= 1e-18);
  CHECK(std::abs(r.condition - 1e5) <= 1e-6);
  CHECK(r.trace_bound == 1.0);
}

TEST_CASE("frame_report: gradient frame bound at unit scale, under trace") {
  auto run = [](PointCloud cloud, double lo) {
    BuiltModel built = build_model(cloud, 32);
    FunctionBasis basis = eigenbasis(built.model, 14);
    GammaTensors gt = gamma_blocks(built.model, basis, built.cloud, 12);
    GramOperator g = make_gram(gram(gt, 1));
    double tb = coord_trace_bound(gt);
    FrameReport r = frame_report(g, tb);
    CHECK(r.upper >= lo);
    CHECK(r.upper <= 2.0);
    CHECK(r.upper <= tb + 1e-8);
    CHECK(r.rank >= 1);
    CHECK(r.condition > 1.0);
    return r;
  };
  run(make_circle(250, 3), 0.9);
  FrameReport torus = run(make_torus(500, 5), 0.8);
  CHECK(torus.trace_bound <= 3.5);
}

TEST_CASE("solve_strong: recovers coefficients through the codomain Gram") {
  std::mt19937_64 rng(33);
  MatX a = testutil::random_mat(6, 6, rng);
  MatX g = a * a.transpose() + MatX::Identity(6, 6);  // well conditioned
  MatX w = testutil::random_mat(6, 4, rng);

  WeakOperator op{w, make_gram(g)};
  MatX strong = solve_strong(op);
  CHECK((g * strong - w).cwiseAbs().maxCoeff() <=
        1e-8 * w.cwiseAbs().maxCoeff());

  // weak matrix equal to the Gram itself yields the subspace projector
  WeakOperator proj{g, make_gram(g)};
  MatX p = solve_strong(proj);
  CHECK((p - MatX::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-10);

  WeakOperator bad{testutil::random_mat(5, 4, rng), make_gram(g)};
  CHECK_THROWS_AS(solve_strong(bad), Error);
}
