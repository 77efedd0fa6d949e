#include "diffgeo/weak.hpp"

#include <Eigen/Eigenvalues>

namespace diffgeo {

GramOperator make_gram(MatX G, double condition_target, double tikhonov) {
  if (G.rows() != G.cols()) throw Error("make_gram: matrix must be square");
  if (condition_target <= 1.0) {
    throw Error("make_gram: condition_target must exceed 1");
  }
  GramOperator g;
  g.G = std::move(G);
  g.condition_target = condition_target;
  g.tikhonov = tikhonov;
  return g;
}

void factor(GramOperator& g) {
  if (g.factored) return;
  Eigen::SelfAdjointEigenSolver<MatX> eig(0.5 * (g.G + g.G.transpose()));
  if (eig.info() != Eigen::Success) {
    throw Error("factor: eigendecomposition failed");
  }
  const Index m = g.G.rows();
  g.eigvals = eig.eigenvalues().reverse();
  g.eigvecs = eig.eigenvectors().rowwise().reverse();
  const double top = m > 0 ? g.eigvals[0] : 0.0;
  if (g.tikhonov > 0.0) {
    g.cutoff = g.tikhonov;
    g.rank = static_cast<int>(m);
  } else {
    g.cutoff = top > 0.0 ? top / g.condition_target : 0.0;
    int r = 0;
    while (r < m && g.eigvals[r] > g.cutoff) ++r;
    g.rank = r;
  }
  g.factored = true;
}

namespace {

// Inverse spectral weights under the active regularization.
VecX inverse_weights(GramOperator& g) {
  factor(g);
  if (g.tikhonov > 0.0) {
    return (g.eigvals.cwiseMax(0.0).array() + g.tikhonov).inverse();
  }
  if (g.rank == 0) throw Error("rank-zero Gram: no spectrum above cutoff");
  VecX w = VecX::Zero(g.eigvals.size());
  for (int i = 0; i < g.rank; ++i) w[i] = 1.0 / g.eigvals[i];
  return w;
}

}  // namespace

MatX gram_pinv(GramOperator& g) {
  VecX w = inverse_weights(g);
  return g.eigvecs * w.asDiagonal() * g.eigvecs.transpose();
}

MatX gram_solve(GramOperator& g, const MatX& W) {
  if (W.rows() != g.G.rows()) {
    throw Error("gram_solve: right-hand side row count mismatch");
  }
  VecX w = inverse_weights(g);
  MatX proj = g.eigvecs.transpose() * W;
  proj.array().colwise() *= w.array();
  return g.eigvecs * proj;
}

VecX gram_solve(GramOperator& g, const VecX& w) {
  return VecX(gram_solve(g, MatX(w)));
}

FrameReport frame_report(GramOperator& g, double trace_bound) {
  factor(g);
  FrameReport r;
  r.upper = g.eigvals.size() > 0 ? g.eigvals[0] : 0.0;
  r.eps = g.cutoff;
  r.rank = g.rank;
  r.condition = r.eps > 0.0 ? r.upper / r.eps : 0.0;
  r.trace_bound = trace_bound;
  return r;
}

double coord_trace_bound(const GammaTensors& gt) {
  double best = 0.0;
  for (Index p = 0; p < gt.size(); ++p) {
    double tr = 0.0;
    for (int a = 0; a < gt.d; ++a) tr += gt.cc(p, a * gt.d + a);
    best = std::max(best, tr);
  }
  return best;
}

MatX solve_strong(WeakOperator& op) {
  if (op.codomain_gram.G.rows() != op.W.rows()) {
    throw Error("solve_strong: weak matrix rows must match the codomain Gram");
  }
  return gram_solve(op.codomain_gram, op.W);
}

}  // namespace diffgeo
