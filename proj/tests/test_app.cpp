#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bulksurf/config.hpp"
#include "bulksurf/errors.hpp"
#include "bulksurf/output.hpp"

using namespace bulksurf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bulksurf_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BULKSURF_RUN_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

const char* kSmallConfig = R"(# small coarse run
[geometry]
kind = paper_tanh
[mesh]
resolution = 16
[parameters]
delta_omega = 1
delta_gamma = 1
delta_gamma_prime = 1
delta_k = 1
delta_k_prime = 1
[time]
tau = 0.01
T = 0.03
)";

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal preset config") {
    const RunConfig cfg = parse_config("[parameters]\npreset = fast_binding\n");
    CHECK(cfg.preset == "fast_binding");
    CHECK(cfg.params.delta_k == 0.01);
    CHECK(cfg.params.tau == 1e-3);
    CHECK(cfg.resolution == 150);
    CHECK(cfg.write_csv);
    CHECK_FALSE(cfg.write_vtk);
  }
  SUBCASE("explicit parameters") {
    const RunConfig cfg = parse_config(std::string(kSmallConfig) + "[output]\nformats = csv, vtk\ndirectory = x\n");
    CHECK(cfg.params.tau == 0.01);
    CHECK(cfg.params.t_end == 0.03);
    CHECK(cfg.resolution == 16);
    CHECK(cfg.write_vtk);
    CHECK(cfg.output_dir == "x");
  }
  SUBCASE("empty text needs parameters") {
    try {
      parse_config("");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "parameters");
    }
  }
  SUBCASE("preset plus explicit delta") {
    CHECK_THROWS_AS(parse_config("[parameters]\npreset = fast_binding\ndelta_k = 0.5\n"), ConflictError);
  }
  SUBCASE("mesh file and resolution conflict") {
    CHECK_THROWS_AS(parse_config("[mesh]\nresolution = 16\nfile = a.msh\n[parameters]\npreset = fast_binding\n"),
                    ConflictError);
  }
  SUBCASE("unknown key reports its line") {
    try {
      parse_document("[time]\ntau = 0.1\n\nbogus = 3\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_document("[nowhere]\n"), ParseError);
    CHECK_THROWS_AS(parse_document("[time]\ntau = 1\ntau = 2\n"), ParseError);
    CHECK_THROWS_AS(parse_document("[time]\njust words\n"), ParseError);
  }
  SUBCASE("bad values") {
    CHECK_THROWS_AS(parse_config("[parameters]\npreset = nope\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[mesh]\nresolution = 4\n[parameters]\npreset = fast_binding\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[parameters]\ndelta_k = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[geometry]\ndim = 4\n[parameters]\npreset = fast_binding\n"), ValidationError);
  }
}

TEST_CASE("vtk output") {
  const fs::path dir = scratch("vtk");
  SUBCASE("single triangle") {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    const std::vector<Index> cells{0, 1, 2};
    const std::vector<double> f{0.1, 1.0 / 3.0, -2.5e-7};
    const auto path = (dir / "tri.vtk").string();
    write_vtk_grid(path, pts, cells, 3, {{"f", f}});
    const std::string text = slurp(path);
    CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
    CHECK(text.find("POINTS 3") != std::string::npos);
    CHECK(text.find("CELL_TYPES 1\n5") != std::string::npos);
    CHECK(text.find("SCALARS f") != std::string::npos);

    const VtkGrid g = read_vtk_grid(path);
    REQUIRE(g.points.size() == 3);
    CHECK(g.cells == std::vector<std::vector<Index>>{{0, 1, 2}});
    CHECK(g.cell_types == std::vector<int>{5});
    REQUIRE(g.fields.size() == 1);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g.fields[0].second[i] - f[i]) <= 1e-15 * std::abs(f[i]));
  }
  SUBCASE("bulk and surface files") {
    const MeshLevel level = make_level(build_initial_mesh(paper_tanh_geometry(2), 2.0, 16), 1.0);
    ParameterSet p;
    const FieldState st = interpolate_initial(level, to_functions({}), p);
    const auto path = (dir / "run.vtk").string();
    write_vtk(path, level, st);
    CHECK(surface_path(path) == (dir / "run_surface.vtk").string());
    const VtkGrid bulk = read_vtk_grid(path);
    CHECK(bulk.points.size() == level.mesh.num_vertices());
    CHECK(bulk.cells.size() == level.mesh.num_cells());
    const VtkGrid surf = read_vtk_grid(surface_path(path));
    CHECK(surf.cells.size() == level.surface.num_facets());
    CHECK(surf.cell_types.front() == 3);
    CHECK(surf.fields.size() == 3);
  }
  CHECK_THROWS_AS(write_vtk_grid((dir / "missing" / "x.vtk").string(), {}, {}, 3, {}), IoError);
}

TEST_CASE("diagnostics csv") {
  const fs::path dir = scratch("csv");
  write_diag_csv((dir / "empty.csv").string(), {});
  CHECK(slurp(dir / "empty.csv") == std::string(kDiagHeader) + "\n");

  DiagnosticsRecord a, b;
  b.step = 1;
  b.time = 0.1;
  b.mass_u = 1.0 / 3.0;
  write_diag_csv((dir / "two.csv").string(), {a, b});
  const std::string text = slurp(dir / "two.csv");
  CHECK(count_lines(text) == 3);
  const std::string row = format_diag_row(b);
  CHECK(std::count(row.begin(), row.end(), ',') == 11);
  CHECK(row.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("command-line driver") {
  const fs::path dir = scratch("cli");
  dump(dir / "small.cfg", kSmallConfig);
  const std::string cfg = (dir / "small.cfg").string();

  CHECK(run_cli("--config " + (dir / "absent.cfg").string()) == 1);
  CHECK(run_cli("") == 1);
  dump(dir / "bad.cfg", "[parameters]\npreset = fast_binding\ndelta_k = 2\n");
  CHECK(run_cli("--config " + (dir / "bad.cfg").string()) == 1);
  CHECK(run_cli("--config " + cfg + " --sweep delta_k=1,x") == 1);

  SUBCASE("single run and determinism") {
    REQUIRE(run_cli("--config " + cfg + " --quiet --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("--config " + cfg + " --quiet --out " + (dir / "b").string()) == 0);
    const std::string first = slurp(dir / "a" / "diagnostics.csv");
    CHECK(count_lines(first) == 5);
    CHECK(first == slurp(dir / "b" / "diagnostics.csv"));
  }
  SUBCASE("sweep writes one directory per value") {
    REQUIRE(run_cli("--config " + cfg + " --quiet --sweep delta_k=1,0.1,0.01 --out " + (dir / "s").string()) == 0);
    for (const char* name : {"delta_k_1", "delta_k_0.1", "delta_k_0.01"}) {
      CHECK(fs::exists(dir / "s" / name / "diagnostics.csv"));
    }
  }
  SUBCASE("vtk files follow output_every") {
    dump(dir / "vtk.cfg", std::string(kSmallConfig) + "output_every = 2\n[output]\nformats = vtk\n");
    REQUIRE(run_cli("--config " + (dir / "vtk.cfg").string() + " --quiet --out " + (dir / "v").string()) == 0);
    CHECK(fs::exists(dir / "v" / "fields_000000.vtk"));
    CHECK(fs::exists(dir / "v" / "fields_000002.vtk"));
    CHECK(fs::exists(dir / "v" / "fields_000003_surface.vtk"));
    CHECK_FALSE(fs::exists(dir / "v" / "fields_000001.vtk"));
    CHECK_FALSE(fs::exists(dir / "v" / "diagnostics.csv"));
  }
  SUBCASE("runtime failure exits with 2") {
    // an expanding circle runs into the outer boundary
    std::string text = kSmallConfig;
    text.replace(text.find("kind = paper_tanh"), 17, "kind = sphere\ncoefficients = 1, 4");
    text.replace(text.find("tau = 0.01\nT = 0.03"), 19, "tau = 0.05\nT = 0.5");
    text.replace(text.find("delta_k_prime = 1"), 17, "delta_k_prime = 1\nvelocity_mode = harmonic_extension");
    dump(dir / "tangle.cfg", text);
    CHECK(run_cli("--config " + (dir / "tangle.cfg").string() + " --quiet --out " + (dir / "t").string()) == 2);
  }
}
