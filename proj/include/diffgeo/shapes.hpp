#pragma once

// Seeded sample generators for the built-in benchmark shapes. All
// generators are deterministic given (n, seed). Stratified angles are used
// on circles so samples are random but evenly covering.

#include <cstdint>
#include <string>

#include "diffgeo/types.hpp"

namespace diffgeo {

// Unit circle in R^2, stratified uniform angles.
PointCloud make_circle(int n, uint64_t seed);
// Annulus r in [r0, r1] in R^2, uniform by area.
PointCloud make_annulus(int n, uint64_t seed, double r0 = 1.0,
                        double r1 = 2.0);
// Uniform square [-1, 1]^2.
PointCloud make_square(int n, uint64_t seed);
// Regular side x side grid on [0, 1]^2 (deterministic; seed unused).
PointCloud make_grid(int side);
// Uniform unit disk in R^2.
PointCloud make_disk(int n, uint64_t seed);
// Uniform unit sphere in R^3.
PointCloud make_sphere(int n, uint64_t seed);
// Torus of revolution about the z axis, uniform by surface area.
PointCloud make_torus(int n, uint64_t seed, double R = 2.0, double r = 1.0);
// Unit sphere with two disjoint unit circles attached at single points.
PointCloud make_sphere_with_circles(int n, uint64_t seed);
// Three-armed branching curve (a Y shape) in R^2; a non-manifold example.
PointCloud make_branching(int n, uint64_t seed);

// Dispatch by CLI shape name: circle, annulus, square, grid, disk, sphere,
// torus, sphere_with_circles, branching. Throws on unknown names.
PointCloud make_shape(const std::string& name, int n, uint64_t seed);

}  // namespace diffgeo
