// Hand-built meshes shared by the unit and acceptance suites.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "bulksurf/mesh.hpp"

namespace fixtures {

using bulksurf::Index;
using bulksurf::SimplicialMesh;
using bulksurf::Vec3;

/// Regular hexagon (vertices 0..5, unit circumradius) around centre vertex 6.
/// Edges 0-1 and 1-2 are inner facets, 3-4 and 4-5 outer facets.
inline SimplicialMesh hexagon() {
  std::vector<Vec3> v;
  for (int i = 0; i < 6; ++i) v.push_back({std::cos(M_PI / 3 * i), std::sin(M_PI / 3 * i), 0.0});
  v.push_back({0.0, 0.0, 0.0});
  std::vector<Index> cells;
  for (Index i = 0; i < 6; ++i) cells.insert(cells.end(), {i, (i + 1) % 6, 6});
  return bulksurf::make_mesh(2, v, cells, {0, 1, 1, 2}, {3, 4, 4, 5});
}

/// The cube [-2,2]^3 with the cube [-1,1]^3 removed, on a lattice with `n`
/// cells per unit length. Each lattice cube is split into six tetrahedra
/// along its main diagonal.
inline SimplicialMesh cube_shell(int n) {
  const int k = 4 * n;
  const auto id = [k](int i, int j, int l) { return static_cast<Index>((i * (k + 1) + j) * (k + 1) + l); };
  const auto coord = [n](int i) { return -2.0 + static_cast<double>(i) / n; };
  std::vector<Vec3> verts;
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j) {
      for (int l = 0; l <= k; ++l) verts.push_back({coord(i), coord(j), coord(l)});
    }
  }
  const auto in_hole = [n](int i) { return i >= n && i < 3 * n; };
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<Index> cells;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int l = 0; l < k; ++l) {
        if (in_hole(i) && in_hole(j) && in_hole(l)) continue;
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, l};
          std::array<Index, 4> tet{};
          tet[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            tet[s + 1] = id(c[0], c[1], c[2]);
          }
          cells.insert(cells.end(), tet.begin(), tet.end());
        }
      }
    }
  }
  std::map<std::array<Index, 3>, int> faces;
  for (std::size_t c = 0; c < cells.size() / 4; ++c) {
    for (int skip = 0; skip < 4; ++skip) {
      std::array<Index, 3> f{};
      int m = 0;
      for (int q = 0; q < 4; ++q) {
        if (q != skip) f[m++] = cells[4 * c + q];
      }
      std::sort(f.begin(), f.end());
      ++faces[f];
    }
  }
  std::vector<Index> inner, outer;
  for (const auto& [f, count] : faces) {
    if (count != 1) continue;
    const bool on_outer = std::all_of(f.begin(), f.end(), [&](Index v) {
      const Vec3& x = verts[v];
      return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])}) > 2.0 - 1e-12;
    });
    auto& dst = on_outer ? outer : inner;
    dst.insert(dst.end(), f.begin(), f.end());
  }
  // drop lattice points that no cell uses (the inside of the hole)
  std::vector<Index> remap(verts.size(), static_cast<Index>(-1));
  std::vector<Vec3> used;
  for (Index& v : cells) {
    if (remap[v] == static_cast<Index>(-1)) {
      remap[v] = used.size();
      used.push_back(verts[v]);
    }
    v = remap[v];
  }
  for (Index& v : inner) v = remap[v];
  for (Index& v : outer) v = remap[v];
  return bulksurf::make_mesh(3, used, cells, inner, outer);
}

}  // namespace fixtures
