#include "diffgeo/shapes.hpp"

#include <cmath>
#include <random>

namespace diffgeo {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

PointCloud make_circle(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointCloud c;
  c.points.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    double theta = kTwoPi * (i + unif(rng)) / n;
    c.points(i, 0) = std::cos(theta);
    c.points(i, 1) = std::sin(theta);
  }
  return c;
}

PointCloud make_annulus(int n, uint64_t seed, double r0, double r1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointCloud c;
  c.points.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    double theta = kTwoPi * (i + unif(rng)) / n;
    double r = std::sqrt(r0 * r0 + (r1 * r1 - r0 * r0) * unif(rng));
    c.points(i, 0) = r * std::cos(theta);
    c.points(i, 1) = r * std::sin(theta);
  }
  return c;
}

PointCloud make_square(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  PointCloud c;
  c.points.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    c.points(i, 0) = unif(rng);
    c.points(i, 1) = unif(rng);
  }
  return c;
}

PointCloud make_grid(int side) {
  PointCloud c;
  c.points.resize(static_cast<Index>(side) * side, 2);
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      c.points(static_cast<Index>(i) * side + j, 0) = double(i) / (side - 1);
      c.points(static_cast<Index>(i) * side + j, 1) = double(j) / (side - 1);
    }
  }
  return c;
}

PointCloud make_disk(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointCloud c;
  c.points.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    double theta = kTwoPi * unif(rng);
    double r = std::sqrt(unif(rng));
    c.points(i, 0) = r * std::cos(theta);
    c.points(i, 1) = r * std::sin(theta);
  }
  return c;
}

PointCloud make_sphere(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  PointCloud c;
  c.points.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVector3d v(gauss(rng), gauss(rng), gauss(rng));
    while (v.norm() < 1e-12) v = Eigen::RowVector3d(gauss(rng), gauss(rng), gauss(rng));
    c.points.row(i) = v / v.norm();
  }
  return c;
}

PointCloud make_torus(int n, uint64_t seed, double R, double r) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointCloud c;
  c.points.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    // Rejection sampling in the tube angle makes the sample uniform by
    // area: density along theta is proportional to R + r cos(theta).
    double theta;
    do {
      theta = kTwoPi * unif(rng);
    } while (unif(rng) * (R + r) > R + r * std::cos(theta));
    double phi = kTwoPi * (i + unif(rng)) / n;
    double w = R + r * std::cos(theta);
    c.points(i, 0) = w * std::cos(phi);
    c.points(i, 1) = w * std::sin(phi);
    c.points(i, 2) = r * std::sin(theta);
  }
  return c;
}

PointCloud make_sphere_with_circles(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;
  int nc = n / 5;            // per circle
  int ns = n - 2 * nc;       // sphere
  PointCloud c;
  c.points.resize(n, 3);
  for (int i = 0; i < ns; ++i) {
    Eigen::RowVector3d v(gauss(rng), gauss(rng), gauss(rng));
    while (v.norm() < 1e-12) v = Eigen::RowVector3d(gauss(rng), gauss(rng), gauss(rng));
    c.points.row(i) = v / v.norm();
  }
  // Circle 1 in the xz plane through (1, 0, 0); circle 2 in the yz plane
  // through (0, 1, 0). Both touch the sphere at a single point.
  for (int i = 0; i < nc; ++i) {
    double t = kTwoPi * (i + unif(rng)) / nc;
    c.points.row(ns + i) =
        Eigen::RowVector3d(2.0 + std::cos(t), 0.0, std::sin(t));
  }
  for (int i = 0; i < nc; ++i) {
    double t = kTwoPi * (i + unif(rng)) / nc;
    c.points.row(ns + nc + i) =
        Eigen::RowVector3d(0.0, 2.0 + std::cos(t), std::sin(t));
  }
  return c;
}

PointCloud make_branching(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PointCloud c;
  c.points.resize(n, 2);
  const double angles[3] = {0.5 * M_PI, 0.5 * M_PI + kTwoPi / 3,
                            0.5 * M_PI + 2 * kTwoPi / 3};
  for (int i = 0; i < n; ++i) {
    int arm = i % 3;
    int pos = i / 3;
    int arm_count = n / 3 + (arm < n % 3 ? 1 : 0);
    double t = (pos + unif(rng)) / arm_count;
    c.points(i, 0) = t * std::cos(angles[arm]);
    c.points(i, 1) = t * std::sin(angles[arm]);
  }
  return c;
}

PointCloud make_shape(const std::string& name, int n, uint64_t seed) {
  if (name == "circle") return make_circle(n, seed);
  if (name == "annulus") return make_annulus(n, seed);
  if (name == "square") return make_square(n, seed);
  if (name == "grid") {
    int side = static_cast<int>(std::lround(std::sqrt(double(n))));
    return make_grid(std::max(side, 2));
  }
  if (name == "disk") return make_disk(n, seed);
  if (name == "sphere") return make_sphere(n, seed);
  if (name == "torus") return make_torus(n, seed);
  if (name == "sphere_with_circles") return make_sphere_with_circles(n, seed);
  if (name == "branching") return make_branching(n, seed);
  throw Error("unknown shape: " + name);
}

}  // namespace diffgeo
