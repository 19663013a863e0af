#include "bulksurf/fem.hpp"

#include <algorithm>
#include <array>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

template <std::size_t N>
std::array<Vec3, N> gather(const std::vector<Vec3>& points, std::span<const Index> ids) {
  std::array<Vec3, N> p{};
  for (std::size_t i = 0; i < ids.size(); ++i) p[i] = points[ids[i]];
  return p;
}

bool all_zero(const std::vector<Vec3>& v) {
  return std::all_of(v.begin(), v.end(), [](const Vec3& x) { return x[0] == 0.0 && x[1] == 0.0 && x[2] == 0.0; });
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

P1Space bulk_space(const SimplicialMesh& m, bool dirichlet_outer) {
  P1Space space{SpaceKind::bulk, m.num_vertices(), {}};
  if (dirichlet_outer) {
    space.dirichlet_mask.resize(m.num_vertices());
    for (Index v = 0; v < m.num_vertices(); ++v) space.dirichlet_mask[v] = m.tags[v] == VertexTag::outer_boundary;
  }
  return space;
}

P1Space surface_space(const SurfaceView& s) { return {SpaceKind::surface, s.num_vertices(), {}}; }

BulkLevelOperators assemble_bulk_level(const SimplicialMesh& m, double delta_omega) {
  const std::size_t n = m.num_vertices();
  const std::size_t k = m.cell_size();
  TripletBuffer mass, stiff;
  mass.reserve(m.num_cells() * k * k);
  stiff.reserve(m.num_cells() * k * k);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto cell = m.cell(c);
    const auto pts = gather<4>(m.vertices, cell);
    const SimplexGeometry geo = simplex_geometry(std::span<const Vec3>(pts.data(), k));
    const ElementMatrix me = element_mass(geo);
    const ElementMatrix ke = element_stiffness(geo);
    for (int i = 0; i < me.n; ++i) {
      for (int j = 0; j < me.n; ++j) {
        mass.add(cell[i], cell[j], delta_omega * me(i, j));
        stiff.add(cell[i], cell[j], ke(i, j));
      }
    }
  }
  return {to_csr(mass, n, n), to_csr(stiff, n, n)};
}

MotionOperators assemble_motion_terms(const SimplicialMesh& m, const SurfaceView& s, const MeshMotion& motion,
                                      double delta_omega) {
  const std::size_t n = m.num_vertices();
  MotionOperators out;
  TripletBuffer ale, wind;
  if (!motion.jump_nodal.empty() && !all_zero(motion.jump_nodal)) {
    if (motion.jump_nodal.size() != n) throw DimensionMismatch("jump_nodal needs one vector per vertex");
    const std::size_t k = m.cell_size();
    ale.reserve(m.num_cells() * k * k);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      const auto cell = m.cell(c);
      const auto pts = gather<4>(m.vertices, cell);
      const SimplexGeometry geo = simplex_geometry(std::span<const Vec3>(pts.data(), k));
      const double weight = geo.measure / static_cast<double>(k);
      // Vertex rule: int chi_i J . grad chi_j ~ |K|/(d+1) J(x_i) . grad chi_j.
      for (std::size_t i = 0; i < k; ++i) {
        const Vec3& jump = motion.jump_nodal[cell[i]];
        for (std::size_t j = 0; j < k; ++j) {
          ale.add(cell[j], cell[i], -delta_omega * weight * dot(jump, geo.grad_lambda[j]));
        }
      }
    }
    out.active = true;
  }
  if (!motion.windshield_nodal.empty() && !all_zero(motion.windshield_nodal)) {
    if (motion.windshield_nodal.size() != s.num_vertices()) {
      throw DimensionMismatch("windshield_nodal needs one value per surface vertex");
    }
    const std::size_t k = static_cast<std::size_t>(s.dim);
    for (std::size_t f = 0; f < s.num_facets(); ++f) {
      const auto facet = s.facet(f);
      const auto pts = gather<3>(s.vertices, facet);
      const SimplexGeometry geo = simplex_geometry(std::span<const Vec3>(pts.data(), k));
      const double weight = geo.measure / static_cast<double>(k);
      for (Index local : facet) {
        const Index bulk = s.to_bulk[local];
        wind.add(bulk, bulk, delta_omega * weight * motion.windshield_nodal[local]);
      }
    }
    out.active = true;
  }
  out.ale = to_csr(ale, n, n);
  out.windshield = to_csr(wind, n, n);
  return out;
}

AssembledOperators assemble_bulk(const SimplicialMesh& m, const SurfaceView& s, const MeshMotion& motion,
                                 double delta_omega) {
  BulkLevelOperators level = assemble_bulk_level(m, delta_omega);
  MotionOperators moving = assemble_motion_terms(m, s, motion, delta_omega);
  AssembledOperators ops;
  ops.m_bulk = std::move(level.mass);
  ops.a_bulk = std::move(level.stiffness);
  ops.b_ale = std::move(moving.ale);
  ops.r_wind = std::move(moving.windshield);
  ops.trace_map = s.to_bulk;
  return ops;
}

SurfaceOperators assemble_surface_operators(const SurfaceView& s) {
  const std::size_t n = s.num_vertices();
  TripletBuffer mass, stiff;
  const std::size_t k = static_cast<std::size_t>(s.dim);
  for (std::size_t f = 0; f < s.num_facets(); ++f) {
    const auto facet = s.facet(f);
    const auto pts = gather<3>(s.vertices, facet);
    const SimplexGeometry geo = simplex_geometry(std::span<const Vec3>(pts.data(), k));
    const ElementMatrix me = element_mass(geo);
    const ElementMatrix ke = element_stiffness(geo);
    for (int i = 0; i < me.n; ++i) {
      for (int j = 0; j < me.n; ++j) {
        mass.add(facet[i], facet[j], me(i, j));
        stiff.add(facet[i], facet[j], ke(i, j));
      }
    }
  }
  return {to_csr(mass, n, n), to_csr(stiff, n, n)};
}

SurfaceSystem assemble_surface(const SurfaceView& s, double delta_diff, double tau) {
  SurfaceOperators ops = assemble_surface_operators(s);
  SurfaceSystem sys;
  sys.lhs = linear_combination(1.0, ops.mass, tau * delta_diff, ops.stiffness);
  sys.mass = std::move(ops.mass);
  return sys;
}

std::vector<double> surface_load(const CsrMatrix& surface_mass, std::span<const double> f) {
  return spmv(surface_mass, f);
}

std::vector<double> surface_load(const SurfaceView& s, std::span<const double> f) {
  return surface_load(assemble_surface_operators(s).mass, f);
}

void apply_outer_bc(const P1Space& space, CsrMatrix& a, std::vector<double>& rhs, const OuterBc& bc) {
  if (bc.kind == OuterBc::Kind::neumann) return;
  if (space.dirichlet_mask.size() != a.rows() || rhs.size() != a.rows()) {
    throw DimensionMismatch("apply_outer_bc: space, matrix and rhs sizes differ");
  }
  const auto& fixed = space.dirichlet_mask;
  const auto off = a.offsets();
  const auto col = a.col_indices();
  auto val = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = off[i]; k < off[i + 1]; ++k) {
      if (fixed[i]) {
        val[k] = col[k] == i ? 1.0 : 0.0;
      } else if (fixed[col[k]]) {
        rhs[i] -= val[k] * bc.value;
        val[k] = 0.0;
      }
    }
  }
  for (Index i = 0; i < a.rows(); ++i) {
    if (!fixed[i]) continue;
    if (a.at(i, i) != 1.0) throw Error("apply_outer_bc: constrained row has no diagonal entry");
    rhs[i] = bc.value;
  }
}

}  // namespace bulksurf
