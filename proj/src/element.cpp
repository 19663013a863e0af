#include "bulksurf/element.hpp"

#include <algorithm>
#include <cmath>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0};

// Inverse and determinant of a symmetric k x k matrix (k <= 3), Gauss-Jordan.
double invert(std::array<std::array<double, 3>, 3>& m, int k) {
  std::array<std::array<double, 3>, 3> inv{};
  for (int i = 0; i < k; ++i) inv[i][i] = 1.0;
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int pivot = c;
    for (int r = c + 1; r < k; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[pivot][c])) pivot = r;
    }
    if (pivot != c) {
      std::swap(m[pivot], m[c]);
      std::swap(inv[pivot], inv[c]);
      det = -det;
    }
    const double d = m[c][c];
    det *= d;
    if (d == 0.0) return 0.0;
    for (int j = 0; j < k; ++j) {
      m[c][j] /= d;
      inv[c][j] /= d;
    }
    for (int r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = m[r][c];
      for (int j = 0; j < k; ++j) {
        m[r][j] -= f * m[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  m = inv;
  return det;
}

}  // namespace

SimplexGeometry simplex_geometry(std::span<const Vec3> v) {
  const int k = static_cast<int>(v.size()) - 1;
  if (k < 1 || k > 3) throw DegenerateSimplex("simplex needs 2 to 4 vertices");
  std::array<Vec3, 3> e{};
  double max_edge = 0.0;
  for (int i = 0; i < k; ++i) {
    e[i] = v[i + 1] - v[0];
    max_edge = std::max(max_edge, norm(e[i]));
  }
  std::array<std::array<double, 3>, 3> gram{};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) gram[i][j] = dot(e[i], e[j]);
  }
  const double det = invert(gram, k);
  const double root = det > 0.0 ? std::sqrt(det) : 0.0;
  if (!(root > 1e-13 * std::pow(max_edge, k)) || !std::isfinite(root)) {
    throw DegenerateSimplex("simplex has (near) zero measure");
  }
  SimplexGeometry s;
  s.dim = k;
  s.measure = root / kFactorial[k];
  // grad lambda_i = sum_j (G^{-1})_{ij} e_j for i = 1..k; lambda_0 closes the partition of unity.
  Vec3 sum{0.0, 0.0, 0.0};
  for (int i = 0; i < k; ++i) {
    Vec3 g{0.0, 0.0, 0.0};
    for (int j = 0; j < k; ++j) g += gram[i][j] * e[j];
    s.grad_lambda[i + 1] = g;
    sum += g;
  }
  s.grad_lambda[0] = -1.0 * sum;
  return s;
}

ElementMatrix element_mass(const SimplexGeometry& s) {
  ElementMatrix m;
  m.n = s.dim + 1;
  const double base = s.measure / ((s.dim + 1.0) * (s.dim + 2.0));
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) m(i, j) = (i == j ? 2.0 : 1.0) * base;
  }
  return m;
}

ElementMatrix element_mass(std::span<const Vec3> vertices) { return element_mass(simplex_geometry(vertices)); }

ElementMatrix element_stiffness(const SimplexGeometry& s) {
  ElementMatrix m;
  m.n = s.dim + 1;
  for (int i = 0; i < m.n; ++i) {
    for (int j = i; j < m.n; ++j) {
      const double value = s.measure * dot(s.grad_lambda[i], s.grad_lambda[j]);
      m(i, j) = value;
      m(j, i) = value;
    }
  }
  return m;
}

ElementMatrix element_stiffness(std::span<const Vec3> vertices) {
  return element_stiffness(simplex_geometry(vertices));
}

double signed_volume(std::span<const Vec3> v, int dim) {
  if (dim == 2) {
    const Vec3 a = v[1] - v[0];
    const Vec3 b = v[2] - v[0];
    return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  }
  return dot(v[1] - v[0], cross(v[2] - v[0], v[3] - v[0])) / 6.0;
}

}  // namespace bulksurf
