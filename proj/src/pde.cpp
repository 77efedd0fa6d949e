#include "diffgeo/pde.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "diffgeo/basis.hpp"

namespace diffgeo {

namespace {

void check_times(const VecX& times) {
  if (times.size() == 0) throw Error("at least one sample instant required");
  for (Index j = 1; j < times.size(); ++j) {
    if (times[j] < times[j - 1]) throw Error("sample instants must ascend");
  }
}

void check_system(const MatX& t, const VecX& f0) {
  if (t.rows() != t.cols()) throw Error("generator must be square");
  if (f0.size() != t.rows()) {
    throw Error("initial value length must match the generator");
  }
}

// Smallest positive spacing of {0, times...}: the RK4 base step is a
// twentieth of it.
double base_step(const VecX& times) {
  double gap = std::numeric_limits<double>::infinity();
  double prev = 0.0;
  for (Index j = 0; j < times.size(); ++j) {
    double d = std::abs(times[j] - prev);
    if (d > 0.0 && d < gap) gap = d;
    prev = times[j];
  }
  if (!std::isfinite(gap)) gap = 1.0;
  return gap / 20.0;
}

VecX rk4_step(const MatX& t, const VecX& y, double h) {
  VecX k1 = t * y;
  VecX k2 = t * (y + 0.5 * h * k1);
  VecX k3 = t * (y + 0.5 * h * k2);
  VecX k4 = t * (y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/* Adaptive RK4 with a fixed base step. Each trial step is compared
 * against two half steps; the Richardson estimate |full - half| / 15
 * must stay below 1e-8 (1 + |y|) or the step halves. Calm stretches let
 * the step grow back toward the base.
 */
MatX rk4_run(const MatX& t, const VecX& f0, const VecX& times) {
  const double base = base_step(times);
  MatX out(f0.size(), times.size());
  VecX y = f0;
  double now = 0.0;
  for (Index j = 0; j < times.size(); ++j) {
    const double target = times[j];
    double h = std::min(base, std::abs(target - now));
    const double dir = (target >= now) ? 1.0 : -1.0;
    while (std::abs(target - now) > 1e-14 * (1.0 + std::abs(target))) {
      h = std::min(h, std::abs(target - now));
      const double hs = dir * h;
      VecX full = rk4_step(t, y, hs);
      VecX half = rk4_step(t, rk4_step(t, y, 0.5 * hs), 0.5 * hs);
      const double err = (full - half).norm() / 15.0;
      const double tol = 1e-8 * (1.0 + y.norm());
      if (err > tol && h > 1e-12 * base) {
        h *= 0.5;
        continue;
      }
      y = half;
      now += hs;
      if (err < tol / 64.0) h = std::min(2.0 * h, base);
    }
    out.col(j) = y;
  }
  return out;
}

MatX propagate(const MatX& t, const VecX& f0, const VecX& times) {
  check_system(t, f0);
  check_times(times);
  const Index n = t.rows();
  const double scale = t.cwiseAbs().maxCoeff();
  const double asym = (t - t.transpose()).cwiseAbs().maxCoeff();
  if (asym <= 1e-12 * std::max(1.0, scale)) {
    Eigen::SelfAdjointEigenSolver<MatX> es(t);
    VecX c = es.eigenvectors().transpose() * f0;
    MatX out(n, times.size());
    for (Index j = 0; j < times.size(); ++j) {
      VecX e = (times[j] * es.eigenvalues().array()).exp();
      out.col(j) = es.eigenvectors() * (e.array() * c.array()).matrix();
    }
    return out;
  }
  Eigen::EigenSolver<MatX> es(t);
  if (es.info() == Eigen::Success) {
    const Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin > 0.0 && smax / smin < 1e8) {
      Eigen::VectorXcd c =
          v.partialPivLu().solve(f0.cast<std::complex<double>>());
      MatX out(n, times.size());
      for (Index j = 0; j < times.size(); ++j) {
        Eigen::VectorXcd e =
            (times[j] * es.eigenvalues().array()).exp() * c.array();
        out.col(j) = (v * e).real();
      }
      return out;
    }
  }
  return rk4_run(t, f0, times);
}

}  // namespace

MatX solve_first_order(const EvolutionProblem& prob) {
  if (prob.order != 1) throw Error("first-order solve needs order 1");
  return propagate(prob.T, prob.f0, prob.times);
}

SecondOrderTrajectory solve_second_order_full(const EvolutionProblem& prob) {
  if (prob.order != 2) throw Error("second-order solve needs order 2");
  check_system(prob.T, prob.f0);
  const Index n = prob.T.rows();
  if (prob.S.rows() != n || prob.S.cols() != n) {
    throw Error("damping matrix must match the generator");
  }
  VecX h0 = prob.h0;
  if (h0.size() == 0) h0 = VecX::Zero(n);
  if (h0.size() != n) throw Error("initial velocity length mismatch");
  MatX comp = MatX::Zero(2 * n, 2 * n);
  comp.block(0, n, n, n).setIdentity();
  comp.block(n, 0, n, n) = prob.T;
  comp.block(n, n, n, n) = prob.S;
  VecX y0(2 * n);
  y0.head(n) = prob.f0;
  y0.tail(n) = h0;
  MatX y = propagate(comp, y0, prob.times);
  return {y.topRows(n), y.bottomRows(n)};
}

MatX solve_second_order(const EvolutionProblem& prob) {
  return solve_second_order_full(prob).u;
}

MatX rk4_trajectory(const MatX& t, const VecX& f0, const VecX& times) {
  check_system(t, f0);
  check_times(times);
  return rk4_run(t, f0, times);
}

MatX vf_flow(const VectorField& X, const GammaTensors& gt, const VecX& f0,
             const VecX& times) {
  return propagate(vf_operator(X, gt), f0, times);
}

std::vector<MatX> integral_curves(const VectorField& X,
                                  const GammaTensors& gt, const VecX& times) {
  check_times(times);
  const int d = gt.d;
  MatX t = vf_operator(X, gt);
  MatX traj_all(gt.basis->n0, times.size() * Index(d));
  for (int a = 0; a < d; ++a) {
    VecX c0 = project(*gt.basis, VecX(gt.coords.col(a)));
    MatX traj = propagate(t, c0, times);
    for (Index j = 0; j < times.size(); ++j) {
      traj_all.col(j * d + a) = traj.col(j);
    }
  }
  std::vector<MatX> out;
  out.reserve(size_t(times.size()));
  for (Index j = 0; j < times.size(); ++j) {
    MatX pos(gt.size(), d);
    for (int a = 0; a < d; ++a) {
      pos.col(a) = gt.basis->U * traj_all.col(j * d + a);
    }
    out.push_back(std::move(pos));
  }
  return out;
}

}  // namespace diffgeo
