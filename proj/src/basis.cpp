#include "diffgeo/basis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace diffgeo {

namespace {

// Fixes each column's sign so its entry of largest magnitude is positive.
void fix_signs(MatX& U) {
  for (Index j = 0; j < U.cols(); ++j) {
    Index at = 0;
    U.col(j).cwiseAbs().maxCoeff(&at);
    if (U(at, j) < 0) U.col(j) = -U.col(j);
  }
}

// Assembles the basis from eigenpairs of the deflated symmetric kernel:
// prepends the exact constant mode and back-transforms by 1/sqrt(mu).
FunctionBasis assemble(const MarkovModel& model, const VecX& sq,
                       const MatX& vecs, const VecX& vals, int n0) {
  FunctionBasis basis;
  const Index n = model.size();
  basis.n0 = n0;
  basis.mu = model.mu;
  basis.U.resize(n, n0);
  basis.lambda.resize(n0);
  basis.U.col(0).setOnes();
  basis.lambda[0] = 1.0;
  for (int k = 1; k < n0; ++k) {
    basis.U.col(k) = vecs.col(k - 1).cwiseQuotient(sq);
    // The chain's spectrum lies in [-1, 1]; clip roundoff spill.
    basis.lambda[k] = std::clamp(vals[k - 1], -1.0, 1.0);
  }
  fix_signs(basis.U);
  return basis;
}

FunctionBasis dense_path(const MarkovModel& model, int n0) {
  const Index n = model.size();
  const VecX sq = model.mu.array().sqrt();
  MatX S = MatX::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (SpMat::InnerIterator it(model.P, i); it; ++it) {
      S(i, it.col()) += sq[i] * it.value() / sq[it.col()];
    }
  }
  S = ((S + S.transpose()) * 0.5).eval();
  // Deflate the known constant mode v0 = sqrt(mu), eigenvalue exactly 1,
  // shifting it below the spectrum (to -2) so the top n0 - 1 eigenvectors
  // of the deflated matrix are exactly the non-constant modes.
  S.noalias() -= 3.0 * (sq * sq.transpose());
  Eigen::SelfAdjointEigenSolver<MatX> eig(S);
  if (eig.info() != Eigen::Success) {
    throw Error("eigenbasis: dense symmetric eigensolver failed");
  }
  // Eigen returns ascending order; take the top n0 - 1.
  MatX vecs(n, n0 - 1);
  VecX vals(n0 - 1);
  for (int k = 0; k < n0 - 1; ++k) {
    vecs.col(k) = eig.eigenvectors().col(n - 1 - k);
    vals[k] = eig.eigenvalues()[n - 1 - k];
  }
  return assemble(model, sq, vecs, vals, n0);
}

FunctionBasis lanczos_path(const MarkovModel& model, int n0,
                           const EigOptions& opt) {
  const Index n = model.size();
  const int want = n0 - 1;
  const VecX sq = model.mu.array().sqrt();
  const VecX isq = sq.cwiseInverse();
  auto apply = [&](const VecX& x) -> VecX {
    return sq.cwiseProduct(model.P * isq.cwiseProduct(x));
  };
  const int mmax =
      static_cast<int>(std::min<Index>(opt.max_lanczos, n - 1));
  if (want > mmax) {
    throw Error("eigenbasis: n0 = " + std::to_string(n0) +
                " exceeds the Krylov budget " + std::to_string(mmax));
  }
  MatX Q(n, mmax + 1);
  VecX alpha(mmax), beta(mmax);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss;
  auto fill_random = [&](VecX& v) {
    for (Index i = 0; i < n; ++i) v[i] = gauss(rng);
  };
  // Keeps w orthogonal to the deflated constant mode and to all previous
  // Lanczos vectors (two classical Gram-Schmidt sweeps).
  auto reorth = [&](VecX& w, int j) {
    for (int pass = 0; pass < 2; ++pass) {
      w.noalias() -= sq * sq.dot(w);
      if (j >= 0) {
        w.noalias() -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
      }
    }
  };
  VecX q0(n);
  fill_random(q0);
  reorth(q0, -1);
  q0.normalize();
  Q.col(0) = q0;

  Eigen::SelfAdjointEigenSolver<MatX> teig;
  int m = 0;
  double worst = 0.0;
  for (int j = 0; j < mmax; ++j) {
    VecX w = apply(Q.col(j));
    if (j > 0) w.noalias() -= beta[j - 1] * Q.col(j - 1);
    alpha[j] = Q.col(j).dot(w);
    w.noalias() -= alpha[j] * Q.col(j);
    reorth(w, j);
    double b = w.norm();
    if (b < 1e-13) {
      // Krylov space exhausted; restart with a fresh random direction.
      fill_random(w);
      reorth(w, j);
      b = w.norm();
      if (b < 1e-13) {
        m = j + 1;
        break;
      }
      beta[j] = 0.0;
      Q.col(j + 1) = w / b;
      m = j + 1;
      continue;
    }
    beta[j] = b;
    Q.col(j + 1) = w / b;
    m = j + 1;
    const bool last = j + 1 == mmax;
    if (m >= want && (m % 30 == 0 || last)) {
      MatX T = MatX::Zero(m, m);
      for (int t = 0; t < m; ++t) {
        T(t, t) = alpha[t];
        if (t + 1 < m) T(t, t + 1) = T(t + 1, t) = beta[t];
      }
      teig.compute(T);
      worst = 0.0;
      for (int k = 0; k < want; ++k) {
        double res = beta[m - 1] * std::abs(teig.eigenvectors()(m - 1, m - 1 - k));
        worst = std::max(worst, res);
      }
      if (worst <= opt.tol) break;
    }
  }
  if (m < want) {
    throw Error("eigenbasis: Lanczos exhausted after " + std::to_string(m) +
                " iterations, need " + std::to_string(want) + " pairs");
  }
  // Final Ritz extraction at the reached dimension, then a direct residual
  // verification (valid even if a random restart broke the recurrence).
  {
    MatX T = MatX::Zero(m, m);
    for (int t = 0; t < m; ++t) {
      T(t, t) = alpha[t];
      if (t + 1 < m) T(t, t + 1) = T(t + 1, t) = beta[t];
    }
    teig.compute(T);
  }
  MatX vecs(n, want);
  VecX vals(want);
  for (int k = 0; k < want; ++k) {
    vecs.col(k).noalias() = Q.leftCols(m) * teig.eigenvectors().col(m - 1 - k);
    vals[k] = teig.eigenvalues()[m - 1 - k];
  }
  worst = 0.0;
  for (int k = 0; k < want; ++k) {
    worst = std::max(worst, (apply(vecs.col(k)) - vals[k] * vecs.col(k))
                                .norm());
  }
  if (worst > 10.0 * opt.tol) {
    throw Error("eigenbasis: Lanczos did not converge (n = " +
                std::to_string(n) + ", n0 = " + std::to_string(n0) +
                ", iterations = " + std::to_string(m) +
                ", worst residual = " + std::to_string(worst) + ")");
  }
  return assemble(model, sq, vecs, vals, n0);
}

}  // namespace

FunctionBasis eigenbasis(const MarkovModel& model, int n0,
                         const EigOptions& opt) {
  const Index n = model.size();
  if (n0 < 1 || n0 > n) throw Error("n0 must satisfy 1 <= n0 <= n");
  if (n <= opt.dense_threshold || n0 - 1 > opt.max_lanczos / 3) {
    return dense_path(model, n0);
  }
  return lanczos_path(model, n0, opt);
}

VecX project(const FunctionBasis& basis, const VecX& f_pointwise) {
  if (f_pointwise.size() != basis.size()) {
    throw Error("project: length does not match point count");
  }
  return basis.U.transpose() * basis.mu.cwiseProduct(f_pointwise);
}

VecX evaluate(const FunctionBasis& basis, const VecX& coeffs) {
  if (coeffs.size() != basis.n0) {
    throw Error("evaluate: coefficient length does not match n0");
  }
  return basis.U * coeffs;
}

VecX multiply(const FunctionBasis& basis, const VecX& f_coeffs,
              const VecX& h_coeffs) {
  VecX prod =
      evaluate(basis, f_coeffs).cwiseProduct(evaluate(basis, h_coeffs));
  return project(basis, prod);
}

}  // namespace diffgeo
