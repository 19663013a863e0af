#include "bulksurf/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "bulksurf/element.hpp"
#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

using FaceKey = std::array<Index, 3>;

FaceKey face_key(std::span<const Index> face) {
  FaceKey key{std::numeric_limits<Index>::max(), std::numeric_limits<Index>::max(),
              std::numeric_limits<Index>::max()};
  std::copy(face.begin(), face.end(), key.begin());
  std::sort(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(face.size()));
  return key;
}

// Faces of a cell: the cell with one vertex left out.
template <typename Fn>
void for_each_face(std::span<const Index> cell, Fn&& fn) {
  std::array<Index, 3> face{};
  for (std::size_t skip = 0; skip < cell.size(); ++skip) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < cell.size(); ++i) {
      if (i != skip) face[n++] = cell[i];
    }
    fn(std::span<const Index>(face.data(), n));
  }
}

std::array<Vec3, 4> cell_points(const SimplicialMesh& m, std::size_t c) {
  std::array<Vec3, 4> p{};
  const auto cell = m.cell(c);
  for (std::size_t i = 0; i < cell.size(); ++i) p[i] = m.vertices[cell[i]];
  return p;
}

// P1 Laplace problem with Dirichlet data on every tagged vertex.
class HarmonicExtender {
public:
  explicit HarmonicExtender(const SimplicialMesh& m) : mesh_(m), local_(m.num_vertices(), kBoundary) {
    for (Index v = 0; v < m.num_vertices(); ++v) {
      if (m.tags[v] == VertexTag::interior) {
        local_[v] = interior_.size();
        interior_.push_back(v);
      }
    }
    TripletBuffer inner;
    inner.reserve(m.num_cells() * m.cell_size() * m.cell_size());
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      const auto cell = m.cell(c);
      const auto pts = cell_points(m, c);
      const ElementMatrix k = element_stiffness(std::span<const Vec3>(pts.data(), cell.size()));
      for (int i = 0; i < k.n; ++i) {
        const Index row = local_[cell[i]];
        if (row == kBoundary) continue;
        for (int j = 0; j < k.n; ++j) {
          const Index col = local_[cell[j]];
          if (col == kBoundary) {
            coupling_.add(row, cell[j], k(i, j));
          } else {
            inner.add(row, col, k(i, j));
          }
        }
      }
    }
    reduced_ = to_csr(inner, interior_.size(), interior_.size());
  }

  std::vector<double> extend(std::span<const double> inner_values, const SurfaceView& surface, double outer_value,
                             const SolverOptions& opts, std::span<const double> guess) const {
    if (inner_values.size() != surface.num_vertices()) {
      throw DimensionMismatch("harmonic_extension: one value per inner-surface vertex expected");
    }
    std::vector<double> full(mesh_.num_vertices(), 0.0);
    for (Index v = 0; v < mesh_.num_vertices(); ++v) {
      if (mesh_.tags[v] == VertexTag::outer_boundary) full[v] = outer_value;
    }
    for (std::size_t s = 0; s < surface.num_vertices(); ++s) full[surface.to_bulk[s]] = inner_values[s];
    if (interior_.empty()) return full;

    std::vector<double> rhs(interior_.size(), 0.0);
    for (std::size_t e = 0; e < coupling_.size(); ++e) {
      rhs[coupling_.rows[e]] -= coupling_.values[e] * full[coupling_.cols[e]];
    }
    std::vector<double> x0;
    if (guess.size() == mesh_.num_vertices()) {
      x0.reserve(interior_.size());
      for (Index v : interior_) x0.push_back(guess[v]);
    }
    const std::vector<double> x = solve_spd(reduced_, rhs, opts, x0);
    for (std::size_t i = 0; i < interior_.size(); ++i) full[interior_[i]] = x[i];
    return full;
  }

private:
  static constexpr Index kBoundary = std::numeric_limits<Index>::max();
  const SimplicialMesh& mesh_;
  std::vector<Index> local_;
  std::vector<Index> interior_;
  TripletBuffer coupling_;  // rows: interior local index, cols: bulk vertex
  CsrMatrix reduced_;
};

}  // namespace

double cell_volume(const SimplicialMesh& m, std::size_t c) {
  const auto pts = cell_points(m, c);
  return signed_volume(std::span<const Vec3>(pts.data(), m.cell_size()), m.dim);
}

SimplicialMesh make_mesh(int dim, std::vector<Vec3> vertices, std::vector<Index> cells,
                         std::vector<Index> inner_facets, std::vector<Index> outer_facets) {
  if (dim != 2 && dim != 3) throw InvalidMesh("mesh dimension must be 2 or 3");
  SimplicialMesh m;
  m.dim = dim;
  m.vertices = std::move(vertices);
  m.cells = std::move(cells);
  m.inner_facets = std::move(inner_facets);
  m.outer_facets = std::move(outer_facets);
  if (m.cells.size() % m.cell_size() != 0 || m.inner_facets.size() % m.facet_size() != 0 ||
      m.outer_facets.size() % m.facet_size() != 0) {
    throw InvalidMesh("connectivity arrays are not a multiple of the simplex size");
  }
  const auto in_range = [&](Index v) { return v < m.vertices.size(); };
  if (!std::all_of(m.cells.begin(), m.cells.end(), in_range) ||
      !std::all_of(m.inner_facets.begin(), m.inner_facets.end(), in_range) ||
      !std::all_of(m.outer_facets.begin(), m.outer_facets.end(), in_range)) {
    throw InvalidMesh("vertex index out of range");
  }
  if (dim == 2) {
    for (auto& v : m.vertices) v[2] = 0.0;
  }
  m.tags.assign(m.vertices.size(), VertexTag::interior);
  for (Index v : m.outer_facets) m.tags[v] = VertexTag::outer_boundary;
  for (Index v : m.inner_facets) {
    if (m.tags[v] == VertexTag::outer_boundary) {
      throw InvalidMesh("vertex " + std::to_string(v) + " lies on both the inner surface and the outer boundary");
    }
    m.tags[v] = VertexTag::inner_surface;
  }
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    if (cell_volume(m, c) < 0.0) {
      auto* cell = m.cells.data() + c * m.cell_size();
      std::swap(cell[m.cell_size() - 2], cell[m.cell_size() - 1]);
    }
  }
  validate(m);
  return m;
}

void validate(const SimplicialMesh& m) {
  if (m.tags.size() != m.vertices.size()) throw InvalidMesh("one tag per vertex required");
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    if (!(cell_volume(m, c) > 0.0)) {
      throw InvalidMesh("cell " + std::to_string(c) + " has non-positive volume");
    }
  }
  std::map<FaceKey, int> face_count;
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for_each_face(m.cell(c), [&](std::span<const Index> face) { ++face_count[face_key(face)]; });
  }
  std::map<FaceKey, int> inner_keys;
  const auto check_boundary = [&](std::span<const Index> facet, const char* which) {
    const auto it = face_count.find(face_key(facet));
    if (it == face_count.end() || it->second != 1) {
      throw InvalidMesh(std::string(which) + " facet is not a face of exactly one cell");
    }
  };
  for (std::size_t f = 0; f < m.num_inner_facets(); ++f) {
    check_boundary(m.inner_facet(f), "inner");
    ++inner_keys[face_key(m.inner_facet(f))];
  }
  for (std::size_t f = 0; f < m.num_outer_facets(); ++f) check_boundary(m.outer_facet(f), "outer");
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    int on_surface = 0;
    for_each_face(m.cell(c), [&](std::span<const Index> face) { on_surface += inner_keys.count(face_key(face)) ? 1 : 0; });
    if (on_surface > 1) throw InvalidMesh("cell " + std::to_string(c) + " has more than one face on the inner surface");
  }
  std::vector<char> on_inner(m.num_vertices(), 0);
  std::vector<char> on_outer(m.num_vertices(), 0);
  for (Index v : m.inner_facets) on_inner[v] = 1;
  for (Index v : m.outer_facets) on_outer[v] = 1;
  for (Index v = 0; v < m.num_vertices(); ++v) {
    const VertexTag expected =
        on_inner[v] ? VertexTag::inner_surface : (on_outer[v] ? VertexTag::outer_boundary : VertexTag::interior);
    if (m.tags[v] != expected) throw InvalidMesh("vertex tag of " + std::to_string(v) + " disagrees with facets");
  }
}

SimplicialMesh build_initial_mesh(const LevelSetGeometry& g, double outer_radius, std::size_t resolution) {
  if (g.dim != 2) throw MeshGenFailure("the built-in mesher is two-dimensional; read 3D meshes from file");
  if (resolution < 3) throw MeshGenFailure("at least 3 inner segments are required");
  if (!(outer_radius > 0.0)) throw MeshGenFailure("outer radius must be positive");
  if (!(eval_phi(g, {0.0, 0.0, 0.0}, 0.0) < 0.0)) {
    throw MeshGenFailure("the origin must lie inside the inner surface");
  }
  const std::size_t n = resolution;
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n);

  std::vector<Vec3> inner(n);
  double min_radius = outer_radius;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = dtheta * static_cast<double>(i);
    const Vec3 dir{std::cos(theta), std::sin(theta), 0.0};
    if (!(eval_phi(g, outer_radius * dir, 0.0) > 0.0)) {
      throw MeshGenFailure("inner surface is not strictly inside the outer circle");
    }
    double lo = 0.0;
    double hi = outer_radius;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eval_phi(g, mid * dir, 0.0) < 0.0 ? lo : hi) = mid;
    }
    inner[i] = project_to_surface(g, 0.5 * (lo + hi) * dir, 0.0);
    min_radius = std::min(min_radius, norm(inner[i]));
  }
  if (!(min_radius < outer_radius * (1.0 - 1e-6))) throw MeshGenFailure("bulk region is degenerate");

  const auto rings = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::log(outer_radius / min_radius) / dtheta)));
  std::vector<Vec3> vertices;
  vertices.reserve(n * (rings + 1));
  for (std::size_t k = 0; k <= rings; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (k == 0) {
        vertices.push_back(inner[i]);
        continue;
      }
      const double theta = dtheta * static_cast<double>(i);
      const double r_in = norm(inner[i]);
      const double r = k == rings ? outer_radius
                                  : r_in * std::pow(outer_radius / r_in, static_cast<double>(k) / rings);
      vertices.push_back({r * std::cos(theta), r * std::sin(theta), 0.0});
    }
  }
  const auto id = [n](std::size_t i, std::size_t k) { return k * n + (i % n); };
  std::vector<Index> cells;
  cells.reserve(6 * n * rings);
  for (std::size_t k = 0; k < rings; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const Index a = id(i, k), b = id(i + 1, k), c = id(i + 1, k + 1), d = id(i, k + 1);
      if (norm(vertices[a] - vertices[c]) <= norm(vertices[b] - vertices[d])) {
        cells.insert(cells.end(), {a, b, c, a, c, d});
      } else {
        cells.insert(cells.end(), {a, b, d, b, c, d});
      }
    }
  }
  std::vector<Index> inner_facets;
  std::vector<Index> outer_facets;
  for (std::size_t i = 0; i < n; ++i) {
    inner_facets.insert(inner_facets.end(), {id(i, 0), id(i + 1, 0)});
    outer_facets.insert(outer_facets.end(), {id(i, rings), id(i + 1, rings)});
  }
  try {
    return make_mesh(2, std::move(vertices), std::move(cells), std::move(inner_facets), std::move(outer_facets));
  } catch (const InvalidMesh& e) {
    throw MeshGenFailure(std::string("generated mesh is invalid: ") + e.what());
  }
}

SimplicialMesh build_disk_mesh(double radius, std::size_t rings) {
  if (rings < 1 || !(radius > 0.0)) throw MeshGenFailure("disk mesh needs a positive radius and at least one ring");
  std::vector<Vec3> vertices{{0.0, 0.0, 0.0}};
  std::vector<Index> first{0};  // first vertex index of each ring
  for (std::size_t k = 1; k <= rings; ++k) {
    first.push_back(vertices.size());
    const std::size_t count = 6 * k;
    const double r = radius * static_cast<double>(k) / static_cast<double>(rings);
    for (std::size_t j = 0; j < count; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(count);
      vertices.push_back({r * std::cos(theta), r * std::sin(theta), 0.0});
    }
  }
  std::vector<Index> cells;
  for (Index j = 0; j < 6; ++j) cells.insert(cells.end(), {0, first[1] + j, first[1] + (j + 1) % 6});
  for (std::size_t k = 2; k <= rings; ++k) {
    const std::size_t na = 6 * (k - 1);
    const std::size_t nb = 6 * k;
    const auto ring_a = [&](std::size_t j) { return first[k - 1] + j % na; };
    const auto ring_b = [&](std::size_t j) { return first[k] + j % nb; };
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < na || b < nb) {
      const double next_a = static_cast<double>(a + 1) / static_cast<double>(na);
      const double next_b = static_cast<double>(b + 1) / static_cast<double>(nb);
      if (b == nb || (a < na && next_a < next_b)) {
        cells.insert(cells.end(), {ring_a(a), ring_a(a + 1), ring_b(b)});
        ++a;
      } else {
        cells.insert(cells.end(), {ring_a(a), ring_b(b), ring_b(b + 1)});
        ++b;
      }
    }
  }
  std::vector<Index> outer_facets;
  const std::size_t nb = 6 * rings;
  for (std::size_t j = 0; j < nb; ++j) {
    outer_facets.insert(outer_facets.end(), {first[rings] + j, first[rings] + (j + 1) % nb});
  }
  return make_mesh(2, std::move(vertices), std::move(cells), {}, std::move(outer_facets));
}

SurfaceView extract_surface(const SimplicialMesh& m) {
  SurfaceView s;
  s.dim = m.dim;
  std::vector<Index> local(m.num_vertices(), std::numeric_limits<Index>::max());
  for (Index v = 0; v < m.num_vertices(); ++v) {
    if (m.tags[v] == VertexTag::inner_surface) {
      local[v] = s.to_bulk.size();
      s.to_bulk.push_back(v);
      s.vertices.push_back(m.vertices[v]);
    }
  }
  s.facets.reserve(m.inner_facets.size());
  for (std::size_t f = 0; f < m.num_inner_facets(); ++f) {
    for (Index v : m.inner_facet(f)) s.facets.push_back(local[v]);
    s.facet_source.push_back(f);
  }
  return s;
}

std::vector<double> trace(const SurfaceView& s, std::span<const double> bulk) {
  std::vector<double> out(s.num_vertices());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = bulk[s.to_bulk[i]];
  return out;
}

void scatter_add(const SurfaceView& s, std::span<const double> surface, std::span<double> bulk) {
  if (surface.size() != s.num_vertices()) throw DimensionMismatch("scatter_add: surface vector length");
  for (std::size_t i = 0; i < surface.size(); ++i) bulk[s.to_bulk[i]] += surface[i];
}

MeshMotion stationary_motion(const SimplicialMesh& m) {
  MeshMotion motion;
  motion.prev_positions = m.vertices;
  motion.node_velocity.assign(m.num_vertices(), Vec3{0.0, 0.0, 0.0});
  motion.jump_nodal.assign(m.num_vertices(), Vec3{0.0, 0.0, 0.0});
  std::size_t surface_vertices = 0;
  for (auto tag : m.tags) surface_vertices += tag == VertexTag::inner_surface ? 1 : 0;
  motion.windshield_nodal.assign(surface_vertices, 0.0);
  return motion;
}

std::vector<Vec3> jump_from_positions(std::span<const Vec3> prev, std::span<const Vec3> next, double tau,
                                      VelocityMode mode) {
  if (prev.size() != next.size()) throw DimensionMismatch("jump_from_positions: position lists differ in length");
  std::vector<Vec3> jump(prev.size(), Vec3{0.0, 0.0, 0.0});
  if (mode == VelocityMode::harmonic_extension) return jump;
  for (std::size_t i = 0; i < prev.size(); ++i) jump[i] = (-1.0 / tau) * (next[i] - prev[i]);
  return jump;
}

std::vector<double> harmonic_extension(const SimplicialMesh& m, std::span<const double> inner_values,
                                       double outer_value, const SolverOptions& opts,
                                       std::span<const double> initial_guess) {
  const SurfaceView surface = extract_surface(m);
  return HarmonicExtender(m).extend(inner_values, surface, outer_value, opts, initial_guess);
}

AdvancedMesh advance_mesh(const SimplicialMesh& m, const MeshMotion& previous, const LevelSetGeometry& g,
                          double t_old, double tau, const AdvanceOptions& opts) {
  if (!(tau > 0.0)) throw InvalidParameter("advance_mesh: time step must be positive");
  const double t_new = t_old + tau;
  const SurfaceView surface = extract_surface(m);

  std::vector<Vec3> moved(surface.num_vertices());
  std::array<std::vector<double>, 3> rate;
  for (auto& r : rate) r.resize(surface.num_vertices());
  for (std::size_t s = 0; s < surface.num_vertices(); ++s) {
    const Vec3& x = surface.vertices[s];
    moved[s] = project_to_surface(g, x + tau * interface_velocity(g, x, t_old), t_new);
    const Vec3 v = (1.0 / tau) * (moved[s] - x);
    for (int d = 0; d < 3; ++d) rate[d][s] = v[d];
  }

  AdvancedMesh out;
  out.mesh = m;
  std::vector<Vec3>& positions = out.mesh.vertices;
  if (m.num_vertices() > surface.num_vertices()) {
    const HarmonicExtender extender(m);
    std::vector<double> guess(m.num_vertices());
    for (int d = 0; d < m.dim; ++d) {
      const bool warm = previous.node_velocity.size() == m.num_vertices();
      for (Index v = 0; v < m.num_vertices(); ++v) guess[v] = warm ? previous.node_velocity[v][d] : 0.0;
      const std::vector<double> vel =
          extender.extend(rate[d], surface, 0.0, opts.solver, std::span<const double>(guess));
      for (Index v = 0; v < m.num_vertices(); ++v) {
        if (m.tags[v] == VertexTag::interior) positions[v][d] = m.vertices[v][d] + tau * vel[v];
      }
    }
  }
  for (std::size_t s = 0; s < surface.num_vertices(); ++s) positions[surface.to_bulk[s]] = moved[s];

  for (std::size_t c = 0; c < out.mesh.num_cells(); ++c) {
    const double vol = cell_volume(out.mesh, c);
    if (!(vol > opts.vol_floor)) {
      throw TangledMesh("cell " + std::to_string(c) + " volume " + std::to_string(vol) + " at t = " +
                        std::to_string(t_new));
    }
  }

  MeshMotion& motion = out.motion;
  motion.prev_positions = m.vertices;
  motion.node_velocity.resize(m.num_vertices());
  for (Index v = 0; v < m.num_vertices(); ++v) motion.node_velocity[v] = (1.0 / tau) * (positions[v] - m.vertices[v]);
  motion.jump_nodal = jump_from_positions(m.vertices, positions, tau, opts.mode);
  motion.windshield_nodal.assign(surface.num_vertices(), 0.0);
  if (opts.mode == VelocityMode::zero) {
    const double sign = opts.windshield_sign == WindshieldSign::analysis ? 1.0 : -1.0;
    for (std::size_t s = 0; s < surface.num_vertices(); ++s) {
      const Vec3 grad = grad_phi(g, moved[s], t_new);
      if (is_degenerate(grad)) throw DegenerateGradient("windshield coefficient at a degenerate gradient");
      motion.windshield_nodal[s] = sign * phi_t(g, moved[s], t_new) / norm(grad);
    }
  }
  return out;
}

MeshQuality mesh_quality(const SimplicialMesh& m) {
  MeshQuality q;
  q.min_volume = std::numeric_limits<double>::infinity();
  q.min_edge_length = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto p = cell_points(m, c);
    const std::size_t nv = m.cell_size();
    const double vol = signed_volume(std::span<const Vec3>(p.data(), nv), m.dim);
    q.min_volume = std::min(q.min_volume, vol);
    for (std::size_t i = 0; i < nv; ++i) {
      for (std::size_t j = i + 1; j < nv; ++j) q.min_edge_length = std::min(q.min_edge_length, norm(p[i] - p[j]));
    }
    double aspect = std::numeric_limits<double>::infinity();
    if (vol > 0.0) {
      if (m.dim == 2) {
        const double a = norm(p[1] - p[2]), b = norm(p[0] - p[2]), c2 = norm(p[0] - p[1]);
        const double circum = a * b * c2 / (4.0 * vol);
        const double in = vol / (0.5 * (a + b + c2));
        aspect = circum / (2.0 * in);
      } else {
        const Vec3 a = p[1] - p[0], b = p[2] - p[0], c3 = p[3] - p[0];
        const Vec3 num = dot(a, a) * cross(b, c3) + dot(b, b) * cross(c3, a) + dot(c3, c3) * cross(a, b);
        const double circum = norm(num) / (12.0 * vol);
        double area = 0.0;
        for (std::size_t skip = 0; skip < 4; ++skip) {
          std::array<Vec3, 3> f{};
          std::size_t n = 0;
          for (std::size_t i = 0; i < 4; ++i) {
            if (i != skip) f[n++] = p[i];
          }
          area += 0.5 * norm(cross(f[1] - f[0], f[2] - f[0]));
        }
        const double in = 3.0 * vol / area;
        aspect = circum / (3.0 * in);
      }
    }
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, aspect);
  }
  if (m.num_cells() == 0) {
    q.min_volume = 0.0;
    q.min_edge_length = 0.0;
  }
  return q;
}

}  // namespace bulksurf
