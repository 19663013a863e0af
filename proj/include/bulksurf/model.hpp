#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bulksurf/fem.hpp"
#include "bulksurf/geometry.hpp"
#include "bulksurf/mesh.hpp"
#include "bulksurf/sparse.hpp"

namespace bulksurf {

enum class KineticsKind {
  quadratic,  ///< g = u w
  hill,       ///< g = u^n w / (1 + u^n)
  none,       ///< g = 0, decouples the fields
};

struct Kinetics {
  KineticsKind kind = KineticsKind::quadratic;
  double hill_n = 2.0;
};

/// How the bulk sees the surface reaction.
enum class BulkReaction {
  explicit_load,  ///< the whole reaction is a load computed from the previous level
  linearized,     ///< g = h(U^{n-1}, W^{n-1}) U with the factor h lagged and U implicit
};

struct ParameterSet {
  double delta_omega = 1.0;
  double delta_gamma = 1.0;
  double delta_gamma_prime = 1.0;
  double delta_k = 1.0;
  double delta_k_prime = 1.0;
  Kinetics g;
  OuterBc outer_bc;
  double tau = 1e-3;
  double t_end = 1.0;
  VelocityMode velocity_mode = VelocityMode::zero;
  WindshieldSign windshield_sign = WindshieldSign::analysis;
  BulkReaction bulk_reaction = BulkReaction::linearized;
  SolverOptions bulk_solver{1e-11, 0};
  SolverOptions surface_solver{1e-13, 0};
};

/// Throws InvalidParameter. Surface diffusion coefficients may be zero.
void validate(const ParameterSet& p);

double reaction_g(const Kinetics& k, double u, double w);
inline double reaction_g(const ParameterSet& p, double u, double w) { return reaction_g(p.g, u, w); }

/// h with g(u, w) = h(u, w) u; finite at u = 0.
double reaction_factor(const Kinetics& k, double u, double w);

/// max(|dg/du|, |dg/dw|) at (u, w).
double reaction_slope(const Kinetics& k, double u, double w);

/// Nodal unknowns on one mesh level.
struct FieldState {
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> z;
  double time = 0.0;
  std::size_t level = 0;
};

/// A mesh snapshot with the operators that depend only on its positions.
struct MeshLevel {
  SimplicialMesh mesh;
  SurfaceView surface;
  BulkLevelOperators bulk;     ///< mass carries delta_omega
  SurfaceOperators surf;
};

MeshLevel make_level(SimplicialMesh mesh, double delta_omega);

enum class WProfile {
  constant,  ///< w0 = w_value
  exp_band,  ///< w0 = w_value * exp(-6 (1 - x1^2))
};

/// Closed-form initial data that presets and configs can describe.
struct InitialDataSpec {
  double u0 = 1.0;
  WProfile w_profile = WProfile::constant;
  double w0 = 1.0;
  double z0 = 0.0;
};

struct InitialData {
  std::function<double(const Vec3&)> u0;
  std::function<double(const Vec3&)> w0;
  std::function<double(const Vec3&)> z0;
};

InitialData to_functions(const InitialDataSpec& spec);

/// Nodal interpolation; Dirichlet outer nodes take u_D.
FieldState interpolate_initial(const MeshLevel& level, const InitialData& data, const ParameterSet& p);

/// Sets a dimensionless parameter by name (delta_omega, delta_gamma,
/// delta_gamma_prime, delta_k, delta_k_prime, tau, t_end, u_D, hill_n).
/// Throws InvalidParameter for unknown names.
void set_parameter(ParameterSet& p, const std::string& name, double value);

}  // namespace bulksurf
