#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bulksurf/errors.hpp"
#include "bulksurf/mesh.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace bulksurf;

namespace {

void check_invariants(const SimplicialMesh& m) {
  CHECK_NOTHROW(validate(m));
  for (std::size_t c = 0; c < m.num_cells(); ++c) CHECK(cell_volume(m, c) > 0.0);
  std::vector<char> inner(m.num_vertices(), 0);
  for (Index v : m.inner_facets) inner[v] = 1;
  for (Index v = 0; v < m.num_vertices(); ++v) CHECK((m.tags[v] == VertexTag::inner_surface) == (inner[v] == 1));
}

}  // namespace

TEST_CASE("built-in mesher on a circle") {
  const SimplicialMesh m = build_initial_mesh(sphere_geometry(2), 2.0, 40);
  check_invariants(m);
  for (Index v = 0; v < m.num_vertices(); ++v) {
    if (m.tags[v] == VertexTag::inner_surface) CHECK(std::abs(norm(m.vertices[v]) - 1.0) <= 1e-10);
    if (m.tags[v] == VertexTag::outer_boundary) CHECK(norm(m.vertices[v]) == doctest::Approx(2.0));
  }
  CHECK(mesh_quality(m).min_volume > 0.0);

  const SimplicialMesh tanh_mesh = build_initial_mesh(paper_tanh_geometry(2), 2.0, 150);
  check_invariants(tanh_mesh);
  CHECK(tanh_mesh.num_cells() > 4000);
  CHECK(tanh_mesh.num_cells() < 6000);

  CHECK_THROWS_AS(build_initial_mesh(paper_tanh_geometry(3), 2.0, 16), MeshGenFailure);
  CHECK_THROWS_AS(build_initial_mesh(sphere_geometry(2), 0.9, 16), MeshGenFailure);
  CHECK_THROWS_AS(build_initial_mesh(sphere_geometry(2, 1.0, 0.0, {5, 0, 0}), 2.0, 16), MeshGenFailure);
}

TEST_CASE("surface extraction") {
  const SimplicialMesh m = build_initial_mesh(sphere_geometry(2), 2.0, 16);
  const SurfaceView s = extract_surface(m);
  CHECK(s.num_facets() == 16);
  CHECK(s.num_vertices() == 16);
  for (Index b : s.to_bulk) CHECK(m.tags[b] == VertexTag::inner_surface);
  CHECK(std::is_sorted(s.to_bulk.begin(), s.to_bulk.end()));

  const SurfaceView none = extract_surface(build_disk_mesh(1.0, 3));
  CHECK(none.num_vertices() == 0);
  CHECK(none.num_facets() == 0);
}

TEST_CASE("property: trace after scatter is the identity") {
  const SimplicialMesh m = build_initial_mesh(paper_tanh_geometry(2), 2.0, 24);
  const SurfaceView s = extract_surface(m);
  std::vector<double> surf(s.num_vertices());
  for (std::size_t i = 0; i < surf.size(); ++i) surf[i] = std::sin(1.0 + static_cast<double>(i));
  std::vector<double> bulk(m.num_vertices(), 0.0);
  scatter_add(s, surf, bulk);
  CHECK(trace(s, bulk) == surf);
}

TEST_CASE("disk mesh") {
  const SimplicialMesh m = build_disk_mesh(1.0, 4);
  check_invariants(m);
  CHECK(m.num_cells() == 6 * 16);
  double area = 0.0;
  for (std::size_t c = 0; c < m.num_cells(); ++c) area += cell_volume(m, c);
  CHECK(area == doctest::Approx(24.0 / 2.0 * std::sin(2.0 * M_PI / 24.0)).epsilon(1e-12));
}

TEST_CASE("validation rejects broken meshes") {
  const std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  // flipped cells are reoriented
  CHECK_NOTHROW(make_mesh(2, v, {0, 2, 1}, {}, {}));
  CHECK_THROWS_AS(make_mesh(2, v, {0, 1, 2}, {1, 3}, {}), InvalidMesh);         // not a face
  CHECK_THROWS_AS(make_mesh(2, v, {0, 1, 2}, {0, 1, 1, 2}, {}), InvalidMesh);   // two inner faces
  CHECK_THROWS_AS(make_mesh(2, v, {0, 1, 2}, {0, 1}, {1, 2}), InvalidMesh);     // vertex on both
  CHECK_THROWS_AS(make_mesh(2, v, {0, 1, 9}, {}, {}), InvalidMesh);
  CHECK_THROWS_AS(make_mesh(2, {{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}, {0, 1, 2}, {}, {}), InvalidMesh);
}

TEST_CASE("3D ingestion through the text format") {
  const SimplicialMesh m = fixtures::cube_shell(1);
  check_invariants(m);
  CHECK(m.num_cells() == 6 * (64 - 8));
  CHECK(m.num_inner_facets() == 6 * 4 * 2);
  CHECK(m.num_outer_facets() == 6 * 16 * 2);
  std::stringstream io;
  write_mesh(io, m);
  const SimplicialMesh back = read_mesh(io);
  CHECK(back.vertices == m.vertices);
  CHECK(back.cells == m.cells);
  CHECK(back.inner_facets == m.inner_facets);
  const SurfaceView s = extract_surface(back);
  CHECK(s.num_facets() == 48);
  CHECK(s.num_vertices() == 26);
}

TEST_CASE("mesh file errors") {
  std::stringstream bad("2 3 1 0 0\n0 0\n1 0\n0 1\n0 1\n");
  CHECK_THROWS_AS(read_mesh(bad), MeshFormatError);
  std::stringstream trailing("2 3 1 0 0\n0 0\n1 0\n0 1\n0 1 2\nextra\n");
  CHECK_THROWS_AS(read_mesh(trailing), MeshFormatError);
  std::stringstream degenerate("2 3 1 0 0\n0 0\n1 1\n2 2\n0 1 2\n");
  CHECK_THROWS_AS(read_mesh(degenerate), MeshFormatError);
  CHECK_THROWS_AS(read_mesh_file("/nonexistent/mesh.txt"), IoError);
}

TEST_CASE("harmonic extension") {
  const SimplicialMesh hex = fixtures::hexagon();
  const std::vector<double> inner{0.3, -1.2, 2.0};
  const auto u = harmonic_extension(hex, inner, 0.5, {1e-14, 0});
  // hand elimination of the single interior row with oracle stiffness
  double diag = 0.0, off = 0.0;
  for (Index c = 0; c < hex.num_cells(); ++c) {
    const auto cell = hex.cell(c);
    std::vector<Vec3> pts;
    for (Index v : cell) pts.push_back(hex.vertices[v]);
    const auto k = oracle::stiffness(pts);
    for (int j = 0; j < 3; ++j) {
      if (cell[j] == 6) diag += k[2][j];
      else off += k[2][j] * (cell[j] <= 2 ? inner[cell[j]] : 0.5);
    }
  }
  CHECK(u[6] == doctest::Approx(-off / diag).epsilon(1e-12));
  CHECK(u[6] == doctest::Approx((0.3 - 1.2 + 2.0 + 3 * 0.5) / 6.0).epsilon(1e-12));

  const SimplicialMesh m = build_initial_mesh(paper_tanh_geometry(2), 2.0, 32);
  const SurfaceView s = extract_surface(m);
  const auto c = harmonic_extension(m, std::vector<double>(s.num_vertices(), 1.75), 1.75);
  for (double v : c) CHECK(v == doctest::Approx(1.75).epsilon(1e-9));
  const auto z = harmonic_extension(m, std::vector<double>(s.num_vertices(), 0.0), 0.0);
  for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("property: discrete maximum principle for the extension") {
  const SimplicialMesh m = build_initial_mesh(paper_tanh_geometry(2), 2.0, 48);
  const SurfaceView s = extract_surface(m);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> data(s.num_vertices());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::sin(0.37 * (trial + 1) * static_cast<double>(i));
    const double outer = 0.1 * trial - 0.2;
    const auto u = harmonic_extension(m, data, outer, {1e-12, 0});
    const double lo = std::min(*std::min_element(data.begin(), data.end()), outer);
    const double hi = std::max(*std::max_element(data.begin(), data.end()), outer);
    for (double v : u) {
      CHECK(v >= lo - 1e-9);
      CHECK(v <= hi + 1e-9);
    }
  }
}

TEST_CASE("jumps from positions") {
  const std::vector<Vec3> prev{{0, 1, 0}}, next{{0, 1.1, 0}};
  const auto j = jump_from_positions(prev, next, 0.1, VelocityMode::zero);
  CHECK(j[0][0] == 0.0);
  CHECK(j[0][1] == doctest::Approx(-1.0));
  const auto l = jump_from_positions(prev, next, 0.1, VelocityMode::harmonic_extension);
  CHECK(norm(l[0]) == 0.0);
}

TEST_CASE("advance_mesh") {
  SUBCASE("stationary geometry") {
    const auto g = sphere_geometry(2);
    const SimplicialMesh m = build_initial_mesh(g, 2.0, 24);
    const auto out = advance_mesh(m, stationary_motion(m), g, 0.0, 0.1, {});
    for (Index v = 0; v < m.num_vertices(); ++v) CHECK(norm(out.mesh.vertices[v] - m.vertices[v]) <= 1e-12);
    for (const auto& j : out.motion.jump_nodal) CHECK(norm(j) <= 1e-10);
    for (double w : out.motion.windshield_nodal) CHECK(w == 0.0);
  }
  SUBCASE("moving surface stays on the level set") {
    const auto g = paper_tanh_geometry(2);
    SimplicialMesh m = build_initial_mesh(g, 2.0, 48);
    MeshMotion motion = stationary_motion(m);
    AdvanceOptions opts;
    for (int n = 0; n < 20; ++n) {
      auto out = advance_mesh(m, motion, g, 0.01 * n, 0.01, opts);
      m = std::move(out.mesh);
      motion = std::move(out.motion);
      for (Index v = 0; v < m.num_vertices(); ++v) {
        if (m.tags[v] == VertexTag::inner_surface) CHECK(std::abs(eval_phi(g, m.vertices[v], 0.01 * (n + 1))) <= 1e-11);
        if (m.tags[v] == VertexTag::outer_boundary) CHECK(norm(m.vertices[v]) == doctest::Approx(2.0));
      }
    }
    CHECK(motion.windshield_nodal.size() == extract_surface(m).num_vertices());
  }
  SUBCASE("Lagrangian mode carries no jump") {
    const auto g = paper_tanh_geometry(2);
    const SimplicialMesh m = build_initial_mesh(g, 2.0, 32);
    AdvanceOptions opts;
    opts.mode = VelocityMode::harmonic_extension;
    const auto out = advance_mesh(m, stationary_motion(m), g, 0.0, 0.01, opts);
    for (const auto& j : out.motion.jump_nodal) CHECK(norm(j) == 0.0);
    for (double w : out.motion.windshield_nodal) CHECK(w == 0.0);
  }
  SUBCASE("windshield coefficient sign convention") {
    const auto g = paper_tanh_geometry(2);
    const SimplicialMesh m = build_initial_mesh(g, 2.0, 32);
    AdvanceOptions a, b;
    b.windshield_sign = WindshieldSign::level_set;
    const auto oa = advance_mesh(m, stationary_motion(m), g, 0.0, 0.01, a);
    const auto ob = advance_mesh(m, stationary_motion(m), g, 0.0, 0.01, b);
    double largest = 0.0;
    for (std::size_t i = 0; i < oa.motion.windshield_nodal.size(); ++i) {
      CHECK(oa.motion.windshield_nodal[i] == -ob.motion.windshield_nodal[i]);
      largest = std::max(largest, std::abs(oa.motion.windshield_nodal[i]));
    }
    CHECK(largest > 1.0);
  }
  SUBCASE("shrinking circle: one step against two half steps") {
    const auto g = sphere_geometry(2, 1.0, -0.5);
    const SimplicialMesh m = build_initial_mesh(g, 2.0, 32);
    double prev_diff = 0.0;
    for (double tau : {0.04, 0.02}) {
      AdvanceOptions opts;
      const auto one = advance_mesh(m, stationary_motion(m), g, 0.0, tau, opts);
      const auto half = advance_mesh(m, stationary_motion(m), g, 0.0, tau / 2, opts);
      const auto two = advance_mesh(half.mesh, half.motion, g, tau / 2, tau / 2, opts);
      double diff = 0.0;
      for (Index v = 0; v < m.num_vertices(); ++v) diff = std::max(diff, norm(one.mesh.vertices[v] - two.mesh.vertices[v]));
      CHECK(diff <= 2.0 * tau * tau);
      if (prev_diff > 1e-13) CHECK(diff < 0.5 * prev_diff);
      prev_diff = diff;
    }
  }
  SUBCASE("tangling is detected") {
    const auto g = sphere_geometry(2, 1.0, 3.0);
    const SimplicialMesh m = build_initial_mesh(g, 2.0, 16);
    AdvanceOptions opts;
    opts.vol_floor = 1e-14;
    CHECK_THROWS_AS(advance_mesh(m, stationary_motion(m), g, 0.0, 0.4, opts), TangledMesh);
  }
}

TEST_CASE("mesh quality") {
  const SimplicialMesh right = make_mesh(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {0, 1, 2}, {}, {});
  CHECK(mesh_quality(right).min_volume == doctest::Approx(0.5));
  CHECK(mesh_quality(right).min_edge_length == doctest::Approx(1.0));
  const SimplicialMesh eq = make_mesh(2, {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}}, {0, 1, 2}, {}, {});
  CHECK(mesh_quality(eq).max_aspect_ratio == doctest::Approx(1.0).epsilon(1e-12));
  SimplicialMesh flat = right;
  flat.vertices[2] = {2, 0, 0};
  CHECK(mesh_quality(flat).min_volume <= 0.0);
  CHECK(std::isinf(mesh_quality(flat).max_aspect_ratio));
}
