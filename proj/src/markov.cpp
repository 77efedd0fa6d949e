#include "diffgeo/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "diffgeo/kdtree.hpp"

namespace diffgeo {

VecX build_bandwidths(const PointCloud& cloud, int neighbor_rank) {
  const Index n = cloud.size();
  if (n < 2) throw Error("point cloud needs at least 2 points");
  if (neighbor_rank < 1 || neighbor_rank >= n) {
    throw Error("neighbor_rank must satisfy 1 <= neighbor_rank < n");
  }
  KdTree tree(cloud.points);
  VecX rho(n);
  Index bad = -1;
#pragma omp parallel
  {
    std::vector<int> idx;
    std::vector<double> dist;
#pragma omp for schedule(dynamic, 64)
    for (Index i = 0; i < n; ++i) {
      tree.knn(cloud.points.row(i), neighbor_rank, idx, dist,
               static_cast<int>(i));
      double r = dist.back();
      rho[i] = r;
      if (!(r > 0.0)) {
#pragma omp critical
        bad = i;
      }
    }
  }
  if (bad >= 0) {
    throw Error("degenerate bandwidth: zero k-NN distance at point " +
                std::to_string(bad));
  }
  return rho;
}

VecX build_bandwidths(const PointCloud& cloud, const BandwidthOptions& opt) {
  VecX pilot = build_bandwidths(cloud, opt.neighbor_rank);
  if (!opt.density_power) return pilot;
  // Kernel density estimate from a pilot pass, then rho = q^power rescaled
  // so the median bandwidth is unchanged.
  const Index n = cloud.size();
  const double dimd = static_cast<double>(cloud.dim());
  SpMat K = build_kernel(cloud, pilot, std::min<int>(32, int(n) - 1));
  VecX q(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (SpMat::InnerIterator it(K, i); it; ++it) s += it.value();
    q[i] = s / (static_cast<double>(n) *
                std::pow(std::sqrt(M_PI) * pilot[i], dimd));
  }
  VecX rho = q.array().pow(opt.power);
  auto median = [](VecX v) {
    std::nth_element(v.data(), v.data() + v.size() / 2, v.data() + v.size());
    return v[v.size() / 2];
  };
  rho *= median(pilot) / median(rho);
  return rho;
}

SpMat build_kernel(const PointCloud& cloud, const VecX& rho, int knn) {
  const Index n = cloud.size();
  if (knn < 2) throw Error("knn must be at least 2");
  if (rho.size() != n) throw Error("bandwidth length does not match cloud");
  const int kq = static_cast<int>(std::min<Index>(knn, n - 1));
  KdTree tree(cloud.points);
  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(static_cast<size_t>(n) * (2 * static_cast<size_t>(kq) + 1));
  std::vector<int> idx;
  std::vector<double> dist;
  for (Index i = 0; i < n; ++i) {
    tree.knn(cloud.points.row(i), kq, idx, dist, static_cast<int>(i));
    trips.emplace_back(int(i), int(i), 1.0);
    for (size_t t = 0; t < idx.size(); ++t) {
      int j = idx[t];
      double v = std::exp(-dist[t] * dist[t] / (rho[i] * rho[j]));
      trips.emplace_back(int(i), j, v);
      trips.emplace_back(j, int(i), v);
    }
  }
  SpMat K(n, n);
  K.setFromTriplets(trips.begin(), trips.end(),
                    [](double a, double b) { return std::max(a, b); });
  return K;
}

MarkovModel build_markov(const SpMat& K) {
  return build_markov(K, VecX::Ones(K.rows()));
}

MarkovModel build_markov(const SpMat& K, const VecX& mult) {
  const Index n = K.rows();
  if (K.cols() != n) throw Error("kernel must be square");
  if (mult.size() != n) throw Error("multiplicity length mismatch");
  VecX D = VecX::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (SpMat::InnerIterator it(K, i); it; ++it) {
      D[i] += it.value() * mult[it.col()];
    }
    if (!(D[i] > 0.0) || !std::isfinite(D[i])) {
      throw Error("isolated point: zero kernel row sum at index " +
                  std::to_string(i));
    }
  }
  MarkovModel model;
  model.P = K;
  for (Index i = 0; i < n; ++i) {
    for (SpMat::InnerIterator it(model.P, i); it; ++it) {
      it.valueRef() = mult[it.col()] * it.value() / D[i];
    }
  }
  model.mu = mult.cwiseProduct(D);
  model.mu /= model.mu.sum();
  model.rho = VecX::Ones(n);
  model.mult = mult;
  return model;
}

MergedCloud merge_duplicates(const PointCloud& cloud) {
  const Index n = cloud.size();
  const Index d = cloud.dim();
  std::map<std::vector<double>, Index> seen;
  MergedCloud out;
  out.origin.resize(static_cast<size_t>(n));
  std::vector<Index> keep;
  std::vector<double> counts;
  std::vector<double> key(static_cast<size_t>(d));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) key[static_cast<size_t>(j)] = cloud.points(i, j);
    auto [it, inserted] = seen.emplace(key, static_cast<Index>(keep.size()));
    if (inserted) {
      keep.push_back(i);
      counts.push_back(1.0);
    } else {
      counts[static_cast<size_t>(it->second)] += 1.0;
    }
    out.origin[static_cast<size_t>(i)] = it->second;
  }
  out.cloud.points.resize(static_cast<Index>(keep.size()), d);
  for (size_t t = 0; t < keep.size(); ++t) {
    out.cloud.points.row(static_cast<Index>(t)) = cloud.points.row(keep[t]);
  }
  out.mult = Eigen::Map<VecX>(counts.data(), static_cast<Index>(counts.size()));
  return out;
}

BuiltModel build_model(const PointCloud& cloud, int knn, int neighbor_rank) {
  MergedCloud merged = merge_duplicates(cloud);
  VecX rho = build_bandwidths(merged.cloud, neighbor_rank);
  SpMat K = build_kernel(merged.cloud, rho, knn);
  BuiltModel out;
  out.model = build_markov(K, merged.mult);
  out.model.rho = rho;
  out.model.knn = knn;
  out.cloud = std::move(merged.cloud);
  out.origin = std::move(merged.origin);
  return out;
}

}  // namespace diffgeo
