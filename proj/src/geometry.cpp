#include "diffgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "diffgeo/basis.hpp"

namespace diffgeo {

namespace {

/* Lipschitz quadratic form at every point: the carre du champ of the
   reconstructed distance model. */
VecX constraint_values(const GammaTensors& gt, const VecX& ghat) {
  return cdc_pair(*gt.model, ghat, ghat, gt.centred);
}

/* Gradient of the point-j constraint with respect to the model
   coefficients: entry i is 2 Gamma_j(phi_i, ghat), assembled from one
   row of the chain. */
VecX constraint_gradient(const GammaTensors& gt, const VecX& ghat, Index j) {
  const MatX& U = gt.basis->U;
  const int n0 = gt.basis->n0;
  VecX a = VecX::Zero(n0), b = VecX::Zero(n0);
  double pg = 0.0;
  for (SpMat::InnerIterator it(gt.model->P, j); it; ++it) {
    const Index k = it.col();
    const double w = it.value();
    pg += w * ghat[k];
    a.noalias() += (w * ghat[k]) * U.row(k).transpose();
    b.noalias() += w * U.row(k).transpose();
  }
  const double scale = 2.0 * gt.pref[j];
  if (gt.centred) return scale * (a - pg * b);
  const VecX uj = U.row(j).transpose();
  return scale * (a - pg * uj - ghat[j] * b + ghat[j] * uj);
}

double median_of(VecX v) {
  const Index n = v.size();
  std::nth_element(v.data(), v.data() + n / 2, v.data() + n);
  return v[n / 2];
}

/* Pointwise component functions of a field, n x d. */
MatX component_values(const GammaTensors& gt, const VectorField& X) {
  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> m(X.coeffs.data(), gt.n1, gt.d);
  return gt.basis->U.leftCols(gt.n1) * m;
}

/* g_p(X, Y) through the coordinate metric block. */
VecX metric_pairing(const GammaTensors& gt, const MatX& cx, const MatX& cy) {
  const Index n = gt.size();
  const int d = gt.d;
  VecX out(n);
#pragma omp parallel for
  for (Index p = 0; p < n; ++p) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        s += cx(p, a) * cy(p, b) * gt.cc(p, a * d + b);
      }
    }
    out[p] = s;
  }
  return out;
}

}  // namespace

GeodesicResult geodesic_distance(Index source, const GammaTensors& gt,
                                 const GeodesicOptions& opt) {
  if (gt.model == nullptr || gt.basis == nullptr) {
    throw Error("geodesic_distance: gamma blocks are missing model or basis");
  }
  const FunctionBasis& basis = *gt.basis;
  const Index n = gt.size();
  const int n0 = basis.n0;
  if (source < 0 || source >= n) {
    throw Error("geodesic_distance: source index out of range");
  }

  /* Ambient distance from the source and its basis projection; the model
     total is shift + correction, so the Lipschitz ellipsoids stay centred
     in the total variable. */
  VecX e(n);
  for (Index q = 0; q < n; ++q) {
    e[q] = (gt.coords.row(q) - gt.coords.row(source)).norm();
  }
  const VecX shift = project(basis, e);

  /* The correction vanishes at the source, so the reconstructed total must
     match the reconstructed shift there. */
  const VecX u = basis.U.row(source).transpose();
  const double uu = u.squaredNorm();
  const double target = u.dot(shift);
  auto snap_source = [&](VecX& g) { g += ((target - u.dot(g)) / uu) * u; };

  const double slack = 1.0 + opt.violation_tol;
  /* Worst-violator scaling alternated with the source hyperplane; scaling
     is the exact projection onto one centred ellipsoid, and the snap
     perturbs by O(violation * target), so the pair contracts quickly. */
  auto restore = [&](VecX& g) {
    double worst = 0.0;
    for (int round = 0; round < 80; ++round) {
      worst = constraint_values(gt, basis.U * g).maxCoeff();
      if (worst <= slack) break;
      g /= std::sqrt(worst);
      snap_source(g);
    }
    return worst;
  };

  VecX g = shift;
  snap_source(g);
  double worst = restore(g);
  if (worst > slack) {
    /* Constant-mode fallback: zero carre du champ, trivially feasible. */
    g = VecX::Zero(n0);
    g[0] = target / u[0];
    worst = 0.0;
  }

  VecX best = g;
  double best_obj = g[0];

  /* Ascent on the mean-value coefficient, deflected off the gradients of
     near-active constraints so progress slides along the boundary. */
  const double active_floor = 0.98;
  const int max_active = 32;
  double eta = 0.05 * (1.0 + shift.norm());
  int stall = 0;
  bool converged = false;
  for (int it = 0; it < opt.max_iters; ++it) {
    const VecX ghat = basis.U * g;
    const VecX q = constraint_values(gt, ghat);

    VecX dir = VecX::Zero(n0);
    dir[0] = 1.0;
    dir -= (u[0] / uu) * u;

    std::vector<Index> active;
    for (Index j = 0; j < n; ++j) {
      if (q[j] >= active_floor) active.push_back(j);
    }
    std::sort(active.begin(), active.end(),
              [&](Index lhs, Index rhs) { return q[lhs] > q[rhs]; });
    if (static_cast<int>(active.size()) > max_active) {
      active.resize(max_active);
    }
    for (Index j : active) {
      VecX normal = constraint_gradient(gt, ghat, j);
      normal -= (u.dot(normal) / uu) * u;
      const double nn = normal.norm();
      if (nn < 1e-14) continue;
      normal /= nn;
      const double c = dir.dot(normal);
      if (c > 0.0) dir -= c * normal;
    }
    if (dir.norm() < 1e-12) {
      converged = true;
      break;
    }

    VecX trial = g + eta * dir;
    snap_source(trial);
    const double tworst = restore(trial);
    const double gain = trial[0] - g[0];
    if (tworst <= slack && gain > 0.0) {
      g = trial;
      worst = tworst;
      if (g[0] > best_obj) {
        best = g;
        best_obj = g[0];
      }
      eta *= 1.2;
      if (gain <= opt.stall_tol) {
        if (++stall >= 5) {
          converged = true;
          break;
        }
      } else {
        stall = 0;
      }
    } else {
      eta *= 0.5;
      if (eta < 1e-13) {
        converged = true;
        break;
      }
    }
  }

  GeodesicResult out;
  out.total = best;
  out.correction = best - shift;
  out.objective = out.correction[0];
  out.max_constraint = constraint_values(gt, basis.U * best).maxCoeff();
  out.converged = converged;
  const VecX chat = basis.U * out.correction;
  out.distance = e + chat.cwiseMax(0.0);
  return out;
}

VecX riemann(const VectorField& X, const VectorField& Y, const VectorField& Z,
             const VectorField& W, GammaTensors& gt, GramOperator& g1,
             GramOperator& g_full) {
  const VectorField cov_yz = covariant(Y, Z, gt, g1, g_full);
  const VectorField cov_xz = covariant(X, Z, gt, g1, g_full);
  const VectorField bracket = lie_bracket(X, Y, gt, g1);
  const Tensor02 n_yz = levi_civita(cov_yz, gt, g_full);
  const Tensor02 n_xz = levi_civita(cov_xz, gt, g_full);
  const Tensor02 n_z = levi_civita(Z, gt, g_full);
  return tensor02_action(n_yz, X, W, gt) - tensor02_action(n_xz, Y, W, gt) -
         tensor02_action(n_z, bracket, W, gt);
}

SectionalResult sectional_curvature(const VectorField& X, const VectorField& Y,
                                    GammaTensors& gt, GramOperator& g1,
                                    GramOperator& g_full) {
  const VecX R = riemann(X, Y, X, Y, gt, g1, g_full);
  const MatX cx = component_values(gt, X);
  const MatX cy = component_values(gt, Y);
  const VecX nx = metric_pairing(gt, cx, cx);
  const VecX ny = metric_pairing(gt, cy, cy);
  const VecX pxy = metric_pairing(gt, cx, cy);

  const VecX area = nx.cwiseProduct(ny);
  double floor = 1e-6 * median_of(area);
  if (!(floor > 0.0)) floor = 1e-12;

  const Index n = gt.size();
  SectionalResult out;
  out.K.resize(n);
  out.defined.assign(static_cast<size_t>(n), 1);
  for (Index p = 0; p < n; ++p) {
    const double den = area[p] - pxy[p] * pxy[p];
    if (den < floor) out.defined[static_cast<size_t>(p)] = 0;
    out.K[p] = R[p] / std::max(den, floor);
  }
  return out;
}

std::pair<VectorField, VectorField> default_curvature_fields(
    GammaTensors& gt, GramOperator& g1) {
  const Index n = gt.size();
  const int d = gt.d;
  if (d < 2) {
    throw Error("default_curvature_fields: ambient dimension must be >= 2");
  }

  /* Reference plane: the two ambient axes carrying the most metric mass. */
  std::vector<int> axes(d);
  for (int a = 0; a < d; ++a) axes[a] = a;
  VecX trace(d);
  for (int a = 0; a < d; ++a) trace[a] = gt.cc.col(a * d + a).sum();
  std::stable_sort(axes.begin(), axes.end(),
                   [&](int lhs, int rhs) { return trace[lhs] > trace[rhs]; });
  const int alpha = axes[0], beta = axes[1];

  MatX sx(n, d), sy(n, d);
#pragma omp parallel for
  for (Index p = 0; p < n; ++p) {
    Eigen::SelfAdjointEigenSolver<MatX> eig(gt.cc_at(p));
    MatX v(d, 2);
    v.col(0) = eig.eigenvectors().col(d - 1);
    v.col(1) = eig.eigenvectors().col(d - 2);
    /* Orthogonal Procrustes: rotate the eigenpair onto the reference axes
       so signs and in-plane phases line up across points. */
    MatX c(2, 2);
    c(0, 0) = v(alpha, 0);
    c(0, 1) = v(beta, 0);
    c(1, 0) = v(alpha, 1);
    c(1, 1) = v(beta, 1);
    Eigen::JacobiSVD<MatX> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const MatX f = v * (svd.matrixU() * svd.matrixV().transpose());
    sx.row(p) = f.col(0).transpose();
    sy.row(p) = f.col(1).transpose();
  }

  return {field_from_samples(gt, sx, g1), field_from_samples(gt, sy, g1)};
}

}  // namespace diffgeo
