#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bulksurf/errors.hpp"
#include "bulksurf/mesh.hpp"

namespace bulksurf {
namespace {

template <typename T>
T read_value(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw MeshFormatError(std::string("mesh file: expected ") + what);
  return value;
}

std::vector<Index> read_indices(std::istream& in, std::size_t count, const char* what) {
  std::vector<Index> out(count);
  for (auto& v : out) {
    const long long raw = read_value<long long>(in, what);
    if (raw < 0) throw MeshFormatError(std::string("mesh file: negative index in ") + what);
    v = static_cast<Index>(raw);
  }
  return out;
}

}  // namespace

SimplicialMesh read_mesh(std::istream& in) {
  const int dim = read_value<int>(in, "dimension");
  if (dim != 2 && dim != 3) throw MeshFormatError("mesh file: dimension must be 2 or 3");
  const auto n_vertices = read_value<std::size_t>(in, "vertex count");
  const auto n_cells = read_value<std::size_t>(in, "cell count");
  const auto n_inner = read_value<std::size_t>(in, "inner facet count");
  const auto n_outer = read_value<std::size_t>(in, "outer facet count");
  std::vector<Vec3> vertices(n_vertices, Vec3{0.0, 0.0, 0.0});
  for (auto& v : vertices) {
    for (int d = 0; d < dim; ++d) v[d] = read_value<double>(in, "vertex coordinate");
  }
  const auto d = static_cast<std::size_t>(dim);
  auto cells = read_indices(in, n_cells * (d + 1), "cell");
  auto inner = read_indices(in, n_inner * d, "inner facet");
  auto outer = read_indices(in, n_outer * d, "outer facet");
  std::string trailing;
  if (in >> trailing) throw MeshFormatError("mesh file: unexpected trailing content '" + trailing + "'");
  try {
    return make_mesh(dim, std::move(vertices), std::move(cells), std::move(inner), std::move(outer));
  } catch (const InvalidMesh& e) {
    throw MeshFormatError(std::string("mesh file: ") + e.what());
  }
}

SimplicialMesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const SimplicialMesh& m) {
  out << m.dim << ' ' << m.num_vertices() << ' ' << m.num_cells() << ' ' << m.num_inner_facets() << ' '
      << m.num_outer_facets() << '\n';
  char buf[32];
  for (const auto& v : m.vertices) {
    for (int d = 0; d < m.dim; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", v[d]);
      out << (d ? " " : "") << buf;
    }
    out << '\n';
  }
  const auto dump = [&out](const std::vector<Index>& flat, std::size_t stride) {
    for (std::size_t i = 0; i < flat.size(); ++i) out << flat[i] << ((i + 1) % stride == 0 ? '\n' : ' ');
  };
  dump(m.cells, m.cell_size());
  dump(m.inner_facets, m.facet_size());
  dump(m.outer_facets, m.facet_size());
}

void write_mesh_file(const std::string& path, const SimplicialMesh& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file '" + path + "'");
  write_mesh(out, m);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace bulksurf
