#pragma once

#include <span>
#include <vector>

#include "bulksurf/element.hpp"
#include "bulksurf/mesh.hpp"
#include "bulksurf/sparse.hpp"

namespace bulksurf {

enum class SpaceKind { bulk, surface };

/// Continuous piecewise-linear space on the bulk or surface mesh.
struct P1Space {
  SpaceKind kind = SpaceKind::bulk;
  std::size_t dof_count = 0;
  /// Outer-boundary dofs when the bulk carries a Dirichlet condition; empty otherwise.
  std::vector<bool> dirichlet_mask;
};

P1Space bulk_space(const SimplicialMesh& m, bool dirichlet_outer);
P1Space surface_space(const SurfaceView& s);

struct OuterBc {
  enum class Kind { neumann, dirichlet };
  Kind kind = Kind::neumann;
  double value = 0.0;  ///< u_D for Dirichlet
};

/// Mass (scaled by delta_omega) and stiffness on one bulk mesh level.
struct BulkLevelOperators {
  CsrMatrix mass;
  CsrMatrix stiffness;
};

/// Terms that depend on the mesh motion.
struct MotionOperators {
  CsrMatrix ale;         ///< B_ji = -delta_omega int chi_i (J . grad chi_j)
  CsrMatrix windshield;  ///< R_ji = delta_omega int_Gamma J_h chi_i chi_j
  bool active = false;   ///< false when both are identically zero
};

struct SurfaceOperators {
  CsrMatrix mass;
  CsrMatrix stiffness;
};

/// Every bilinear form of one step plus the surface-to-bulk dof map.
struct AssembledOperators {
  CsrMatrix m_bulk;
  CsrMatrix a_bulk;
  CsrMatrix b_ale;
  CsrMatrix r_wind;
  CsrMatrix m_surf;
  CsrMatrix a_surf;
  std::vector<Index> trace_map;
};

BulkLevelOperators assemble_bulk_level(const SimplicialMesh& m, double delta_omega);

/// ALE term with the nodal jump interpolated in P1 and the windshield term with
/// the surface interpolant of windshield_nodal; both use the vertex quadrature rule.
MotionOperators assemble_motion_terms(const SimplicialMesh& m, const SurfaceView& s, const MeshMotion& motion,
                                      double delta_omega);

/// All bulk terms; the step matrix is m_bulk + tau (a_bulk + b_ale) + tau r_wind.
AssembledOperators assemble_bulk(const SimplicialMesh& m, const SurfaceView& s, const MeshMotion& motion,
                                 double delta_omega);

SurfaceOperators assemble_surface_operators(const SurfaceView& s);

struct SurfaceSystem {
  CsrMatrix mass;
  CsrMatrix lhs;  ///< mass + tau * delta_diff * stiffness
};

SurfaceSystem assemble_surface(const SurfaceView& s, double delta_diff, double tau);

/// M_surf f: the load of the nodal interpolant of f against every surface basis function.
std::vector<double> surface_load(const SurfaceView& s, std::span<const double> f);
std::vector<double> surface_load(const CsrMatrix& surface_mass, std::span<const double> f);

/// Neumann: no-op. Dirichlet: eliminates the masked rows and columns, moving
/// the known values to the right-hand side, and leaves identity rows with rhs = u_D.
void apply_outer_bc(const P1Space& space, CsrMatrix& a, std::vector<double>& rhs, const OuterBc& bc);

}  // namespace bulksurf
