#include "bulksurf/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

int vtk_cell_type(std::size_t cell_size) {
  switch (cell_size) {
    case 2:
      return 3;
    case 3:
      return 5;
    case 4:
      return 10;
    default:
      throw InvalidParameter("VTK output supports lines, triangles and tetrahedra");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T expect(std::istream& in, const std::string& what) {
  T v{};
  if (!(in >> v)) throw MeshFormatError("vtk: expected " + what);
  return v;
}

void expect_word(std::istream& in, const std::string& word) {
  const auto got = expect<std::string>(in, word);
  if (got != word) throw MeshFormatError("vtk: expected '" + word + "', got '" + got + "'");
}

}  // namespace

void write_vtk_grid(const std::string& path, std::span<const Vec3> points, std::span<const Index> cells,
                    std::size_t cell_size, const std::vector<VtkField>& fields) {
  const int type = vtk_cell_type(cell_size);
  for (const auto& f : fields) {
    if (f.values.size() != points.size()) throw DimensionMismatch("vtk field '" + f.name + "' has the wrong length");
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  const std::size_t n_cells = cells.size() / cell_size;
  out << "# vtk DataFile Version 3.0\nbulksurf\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) out << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
  out << "CELLS " << n_cells << ' ' << n_cells * (cell_size + 1) << '\n';
  for (std::size_t c = 0; c < n_cells; ++c) {
    out << cell_size;
    for (std::size_t k = 0; k < cell_size; ++k) out << ' ' << cells[c * cell_size + k];
    out << '\n';
  }
  out << "CELL_TYPES " << n_cells << '\n';
  for (std::size_t c = 0; c < n_cells; ++c) out << type << '\n';
  if (!fields.empty()) {
    out << "POINT_DATA " << points.size() << '\n';
    for (const auto& f : fields) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) out << fmt(v) << '\n';
    }
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string surface_path(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "_surface";
  return path.substr(0, dot) + "_surface" + path.substr(dot);
}

void write_vtk(const std::string& path, const MeshLevel& level, const FieldState& state) {
  const auto& m = level.mesh;
  write_vtk_grid(path, m.vertices, m.cells, m.cell_size(), {{"U", state.u}});
  const auto& s = level.surface;
  const std::vector<double> u = trace(s, state.u);
  write_vtk_grid(surface_path(path), s.vertices, s.facets, static_cast<std::size_t>(s.dim),
                 {{"W", state.w}, {"Z", state.z}, {"U_trace", u}});
}

VtkGrid read_vtk_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw MeshFormatError("vtk: missing header");
  std::getline(in, line);
  expect_word(in, "ASCII");
  expect_word(in, "DATASET");
  expect_word(in, "UNSTRUCTURED_GRID");
  VtkGrid g;
  expect_word(in, "POINTS");
  const auto n = expect<std::size_t>(in, "point count");
  expect<std::string>(in, "point type");
  g.points.resize(n);
  for (auto& p : g.points) {
    for (auto& c : p) c = expect<double>(in, "coordinate");
  }
  expect_word(in, "CELLS");
  const auto nc = expect<std::size_t>(in, "cell count");
  expect<std::size_t>(in, "cell list size");
  g.cells.resize(nc);
  for (auto& c : g.cells) {
    c.resize(expect<std::size_t>(in, "cell size"));
    for (auto& v : c) v = expect<Index>(in, "cell index");
  }
  expect_word(in, "CELL_TYPES");
  g.cell_types.resize(expect<std::size_t>(in, "cell type count"));
  for (auto& t : g.cell_types) t = expect<int>(in, "cell type");
  std::string word;
  if (in >> word) {
    if (word != "POINT_DATA") throw MeshFormatError("vtk: unexpected '" + word + "'");
    expect<std::size_t>(in, "point data count");
    while (in >> word) {
      if (word != "SCALARS") throw MeshFormatError("vtk: unexpected '" + word + "'");
      std::pair<std::string, std::vector<double>> field;
      field.first = expect<std::string>(in, "field name");
      expect<std::string>(in, "field type");
      expect<int>(in, "component count");
      expect_word(in, "LOOKUP_TABLE");
      expect<std::string>(in, "table name");
      field.second.resize(n);
      for (auto& v : field.second) v = expect<double>(in, "scalar");
      g.fields.push_back(std::move(field));
    }
  }
  return g;
}

std::string format_diag_row(const DiagnosticsRecord& r) {
  std::ostringstream row;
  row << r.step;
  for (double v : {r.time, r.mass_u, r.mass_w, r.mass_z, r.mass_wz, r.combined_mass, r.g_residual_cum, r.comp_gap,
                   r.min_w, r.max_u_trace, r.fb_measure}) {
    row << ',' << fmt(v);
  }
  return row.str();
}

void write_diag_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << kDiagHeader << '\n';
  for (const auto& r : records) out << format_diag_row(r) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace bulksurf
