#pragma once

#include <array>
#include <span>

#include "bulksurf/vec.hpp"

namespace bulksurf {

/// Measure and barycentric gradients of a simplex with 2..4 vertices embedded in R^3.
/// For lower-dimensional simplices the gradients are tangential.
struct SimplexGeometry {
  int dim = 0;  ///< simplex dimension (vertex count - 1)
  double measure = 0.0;
  std::array<Vec3, 4> grad_lambda{};
};

/// Throws DegenerateSimplex for (near) zero measure or an unsupported vertex count.
SimplexGeometry simplex_geometry(std::span<const Vec3> vertices);

/// Small dense row-major matrix of size n x n (n <= 4).
struct ElementMatrix {
  int n = 0;
  std::array<double, 16> a{};

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(4 * i + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(4 * i + j)]; }
};

/// Exact integrals of products of barycentric basis functions.
ElementMatrix element_mass(std::span<const Vec3> vertices);
ElementMatrix element_mass(const SimplexGeometry& s);

/// Exact integrals of (tangential) gradient products.
ElementMatrix element_stiffness(std::span<const Vec3> vertices);
ElementMatrix element_stiffness(const SimplexGeometry& s);

/// Signed volume of a full-dimensional simplex in R^2 (triangle) or R^3 (tetrahedron).
double signed_volume(std::span<const Vec3> vertices, int dim);

}  // namespace bulksurf
