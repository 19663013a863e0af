#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bulksurf/geometry.hpp"
#include "bulksurf/sparse.hpp"
#include "bulksurf/vec.hpp"

namespace bulksurf {

enum class VertexTag : std::uint8_t { interior, inner_surface, outer_boundary };

/// Simplicial mesh of the bulk region. Cells carry dim+1 vertex indices, facets
/// dim indices; all connectivity is stored flat.
struct SimplicialMesh {
  int dim = 2;
  std::vector<Vec3> vertices;
  std::vector<Index> cells;
  std::vector<Index> inner_facets;
  std::vector<Index> outer_facets;
  std::vector<VertexTag> tags;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_cells() const { return cells.size() / cell_size(); }
  std::size_t num_inner_facets() const { return inner_facets.size() / facet_size(); }
  std::size_t num_outer_facets() const { return outer_facets.size() / facet_size(); }
  std::size_t cell_size() const { return static_cast<std::size_t>(dim) + 1; }
  std::size_t facet_size() const { return static_cast<std::size_t>(dim); }

  std::span<const Index> cell(std::size_t c) const { return {cells.data() + c * cell_size(), cell_size()}; }
  std::span<const Index> inner_facet(std::size_t f) const {
    return {inner_facets.data() + f * facet_size(), facet_size()};
  }
  std::span<const Index> outer_facet(std::size_t f) const {
    return {outer_facets.data() + f * facet_size(), facet_size()};
  }
};

/// Builds a mesh from raw connectivity: derives vertex tags, flips negatively
/// oriented cells and validates. Throws InvalidMesh.
SimplicialMesh make_mesh(int dim, std::vector<Vec3> vertices, std::vector<Index> cells,
                         std::vector<Index> inner_facets, std::vector<Index> outer_facets);

/// Checks orientation, facet/cell incidence and tag consistency. Throws InvalidMesh.
void validate(const SimplicialMesh& m);

double cell_volume(const SimplicialMesh& m, std::size_t c);

/// Graded polar mesh of {phi(., 0) > 0} inside the circle of outer_radius (dim = 2).
/// `resolution` is the number of segments on the inner curve; ring spacing
/// follows the local arc length, so cells shrink toward the inner curve.
/// The inner curve must be star-shaped about the origin. Throws MeshGenFailure.
SimplicialMesh build_initial_mesh(const LevelSetGeometry& g, double outer_radius, std::size_t resolution);

/// Disk of the given radius with `rings` concentric rings (ring k holds 6k vertices).
/// No inner surface; the boundary circle is the outer boundary.
SimplicialMesh build_disk_mesh(double radius, std::size_t rings);

/// Induced triangulation of the inner surface.
struct SurfaceView {
  int dim = 2;  ///< ambient dimension; facets have `dim` vertices
  std::vector<Vec3> vertices;
  std::vector<Index> facets;       ///< local vertex indices, stride dim
  std::vector<Index> to_bulk;      ///< surface vertex -> bulk vertex
  std::vector<Index> facet_source; ///< surface facet -> inner facet of the bulk mesh

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_facets() const { return dim == 0 ? 0 : facets.size() / static_cast<std::size_t>(dim); }
  std::span<const Index> facet(std::size_t f) const {
    return {facets.data() + f * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

/// Surface vertices are ordered by increasing bulk index.
SurfaceView extract_surface(const SimplicialMesh& m);

/// Restriction of a bulk nodal vector to the surface.
std::vector<double> trace(const SurfaceView& s, std::span<const double> bulk);
/// bulk[to_bulk[i]] += surface[i].
void scatter_add(const SurfaceView& s, std::span<const double> surface, std::span<double> bulk);

/// Convention for the windshield coefficient J_h when the bulk is at rest.
enum class WindshieldSign {
  analysis,   ///< J_h = I_h(+phi_t / |grad phi|)
  level_set,  ///< J_h = I_h(-phi_t / |grad phi|)
};

struct MeshMotion {
  std::vector<Vec3> prev_positions;
  std::vector<Vec3> node_velocity;
  std::vector<Vec3> jump_nodal;          ///< ALE jump per bulk vertex
  std::vector<double> windshield_nodal;  ///< per surface vertex (SurfaceView order)
};

/// Motion record of a mesh that has not moved.
MeshMotion stationary_motion(const SimplicialMesh& m);

/// Nodal ALE jump: zero in Lagrangian mode, -(next - prev)/tau for a bulk at rest.
std::vector<Vec3> jump_from_positions(std::span<const Vec3> prev, std::span<const Vec3> next, double tau,
                                      VelocityMode mode);

/// Discrete harmonic function with the given values on inner-surface vertices
/// (SurfaceView order) and `outer_value` on the outer boundary.
/// Throws NoConvergence / NonFiniteBreakdown from the linear solver.
std::vector<double> harmonic_extension(const SimplicialMesh& m, std::span<const double> inner_values,
                                       double outer_value = 0.0, const SolverOptions& opts = {},
                                       std::span<const double> initial_guess = {});

struct AdvanceOptions {
  VelocityMode mode = VelocityMode::zero;
  WindshieldSign windshield_sign = WindshieldSign::analysis;
  /// Cells with volume at or below this are tangled; set from the initial mesh.
  double vol_floor = 0.0;
  SolverOptions solver{1e-12, 0};
};

struct AdvancedMesh {
  SimplicialMesh mesh;
  MeshMotion motion;
};

/// Moves the mesh from t_old to t_old + tau: surface nodes take an explicit
/// step along the interface velocity and are projected back onto the level
/// set; interior nodes follow the harmonic extension of the surface
/// displacement; the outer boundary stays fixed. `previous` seeds the
/// extension solves. Throws TangledMesh.
AdvancedMesh advance_mesh(const SimplicialMesh& m, const MeshMotion& previous, const LevelSetGeometry& g,
                          double t_old, double tau, const AdvanceOptions& opts);

struct MeshQuality {
  double min_volume = 0.0;
  /// Circumradius / (dim * inradius); 1 for the regular simplex, infinite for degenerate cells.
  double max_aspect_ratio = 0.0;
  double min_edge_length = 0.0;
};

MeshQuality mesh_quality(const SimplicialMesh& m);

/// Text format: `dim N_vertices N_cells N_inner N_outer`, then vertex
/// coordinates, cells, inner facets and outer facets, 0-based.
SimplicialMesh read_mesh(std::istream& in);
SimplicialMesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const SimplicialMesh& m);
void write_mesh_file(const std::string& path, const SimplicialMesh& m);

}  // namespace bulksurf
