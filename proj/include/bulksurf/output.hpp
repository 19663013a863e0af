#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bulksurf/diagnostics.hpp"
#include "bulksurf/model.hpp"

namespace bulksurf {

struct VtkField {
  std::string name;
  std::span<const double> values;
};

/// Legacy ASCII unstructured grid. `cells` is flat with `cell_size` vertices
/// per cell (2: line, 3: triangle, 4: tetrahedron). Throws IoError.
void write_vtk_grid(const std::string& path, std::span<const Vec3> points, std::span<const Index> cells,
                    std::size_t cell_size, const std::vector<VtkField>& fields);

/// Bulk grid with U at `path`, surface grid with W, Z and the trace of U at surface_path(path).
void write_vtk(const std::string& path, const MeshLevel& level, const FieldState& state);

/// "run.vtk" -> "run_surface.vtk".
std::string surface_path(const std::string& path);

struct VtkGrid {
  std::vector<Vec3> points;
  std::vector<std::vector<Index>> cells;
  std::vector<int> cell_types;
  std::vector<std::pair<std::string, std::vector<double>>> fields;
};

/// Reads files produced by write_vtk_grid. Throws IoError / MeshFormatError.
VtkGrid read_vtk_grid(const std::string& path);

inline constexpr const char* kDiagHeader =
    "step,time,mass_u,mass_w,mass_z,mass_wz,combined_mass,g_residual_cum,comp_gap,min_w,max_u_trace,fb_measure";

/// Header plus one row per record, doubles at 17 significant digits. Throws IoError.
void write_diag_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);

std::string format_diag_row(const DiagnosticsRecord& r);

}  // namespace bulksurf
