#pragma once

#include <vector>

#include "bulksurf/vec.hpp"

namespace bulksurf {

inline constexpr double kGradEps = 1e-10;
inline constexpr double kProjTol = 1e-12;
inline constexpr int kMaxProjIters = 50;
inline constexpr double kFdStep = 1e-6;

enum class GeometryKind {
  /// (x1 + tanh(rate t)(shift - x2^2))^2 + x2^2 (+ x3^2) - 1; params {shift, rate}.
  paper_tanh,
  /// |x - c|^2 - (r0 + v t)^2; params {r0, v, cx, cy, cz}.
  sphere,
  /// Quadric sum_k (a_k + b_k t) m_k(x) over m = {1, x, y, z, x^2, y^2, z^2, xy, xz, yz};
  /// params holds the 10 a_k, optionally followed by the 10 b_k.
  custom,
};

/// Selects the material velocity of the bulk.
enum class VelocityMode {
  zero,                ///< bulk material at rest; the moving mesh sees an ALE jump
  harmonic_extension,  ///< bulk moves with the mesh (Lagrangian scheme)
};

/// Analytic level-set description of the inner surface {phi(., t) = 0}.
/// The bulk region is {phi > 0}.
struct LevelSetGeometry {
  int dim = 2;
  GeometryKind kind = GeometryKind::paper_tanh;
  std::vector<double> params;
  /// Positive factor multiplying phi; the zero set, normal and velocity do not depend on it.
  double scale = 1.0;
};

LevelSetGeometry paper_tanh_geometry(int dim, double shift = 0.7, double rate = 5.0);
LevelSetGeometry sphere_geometry(int dim, double radius = 1.0, double radial_speed = 0.0,
                                 const Vec3& center = {0.0, 0.0, 0.0});
LevelSetGeometry custom_geometry(int dim, std::vector<double> coefficients);

/// Throws InvalidParameter when dim, params or scale are unusable.
void validate(const LevelSetGeometry& g);

/// True when phi does not depend on time.
bool is_stationary(const LevelSetGeometry& g);

double eval_phi(const LevelSetGeometry& g, const Vec3& x, double t);
Vec3 grad_phi(const LevelSetGeometry& g, const Vec3& x, double t);
double phi_t(const LevelSetGeometry& g, const Vec3& x, double t);

/// |grad| at or below kGradEps.
bool is_degenerate(const Vec3& grad);

/// nu = -grad phi / |grad phi|: out of the bulk, into the enclosed region.
Vec3 surface_normal(const LevelSetGeometry& g, const Vec3& x, double t);

/// V = -phi_t / |grad phi|, the speed of the zero set along +grad phi / |grad phi|.
double normal_velocity(const LevelSetGeometry& g, const Vec3& x, double t);

/// Point velocity of the zero set with no tangential part: -phi_t grad phi / |grad phi|^2.
Vec3 interface_velocity(const LevelSetGeometry& g, const Vec3& x, double t);

/// Damped Newton projection along grad phi onto {phi(., t) = 0}.
/// Throws NoConvergence after kMaxProjIters or at a degenerate gradient.
Vec3 project_to_surface(const LevelSetGeometry& g, const Vec3& x, double t);

}  // namespace bulksurf
