// Command-line driver: one run or a parameter sweep from a config file.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bulksurf/config.hpp"
#include "bulksurf/errors.hpp"
#include "bulksurf/mesh.hpp"
#include "bulksurf/output.hpp"
#include "bulksurf/stepper.hpp"

namespace fs = std::filesystem;
using namespace bulksurf;

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct SweepRequest {
  std::string parameter;
  std::vector<double> values;
};

SweepRequest parse_sweep(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--sweep expects NAME=v1,v2,...");
  SweepRequest s;
  s.parameter = arg.substr(0, eq);
  std::stringstream in(arg.substr(eq + 1));
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("--sweep: bad value '" + item + "'");
    s.values.push_back(v);
  }
  if (s.values.empty()) throw ConfigError("--sweep: no values");
  return s;
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sweep_dir_name(const std::string& name, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%g", name.c_str(), v);
  return buf;
}

void run_one(const RunConfig& cfg, const ParameterSet& p, const fs::path& dir, bool quiet) {
  fs::create_directories(dir);
  SimplicialMesh mesh = cfg.mesh_file.empty() ? build_initial_mesh(cfg.geometry, cfg.outer_radius, cfg.resolution)
                                              : read_mesh_file(cfg.mesh_file);
  RunOptions opts;
  opts.fb_threshold = cfg.fb_threshold;
  if (cfg.write_vtk) {
    opts.output_every = cfg.output_every == 0 ? static_cast<std::size_t>(-1) : cfg.output_every;
    opts.on_output = [&dir](const Snapshot& snap) {
      char name[32];
      std::snprintf(name, sizeof name, "fields_%06zu.vtk", snap.step);
      write_vtk((dir / name).string(), snap.level, snap.state);
    };
  }
  if (!quiet) opts.on_warning = [](const std::string& w) { std::cerr << "warning: " << w << '\n'; };
  const RunResult result = run_simulation(p, cfg.geometry, std::move(mesh), to_functions(cfg.initial), opts);
  if (cfg.write_csv) write_diag_csv((dir / "diagnostics.csv").string(), result.records);
  if (!quiet) {
    const auto& last = result.records.back();
    std::printf("%s: %zu steps, t = %.6g, mass_wz = %.12g, max_u_trace = %.6g\n", dir.string().c_str(),
                result.steps, last.time, last.mass_wz, last.max_u_trace);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled bulk-surface reaction-diffusion on evolving domains"};
  std::string config_path, preset, out_dir, sweep_arg;
  std::optional<double> tau, tmax;
  bool quiet = false;
  app.add_option("--config", config_path, "Configuration file")->required();
  app.add_option("--preset", preset, "Regime preset (overrides [parameters] preset)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--tau", tau, "Time step");
  app.add_option("--tmax", tmax, "Final time");
  app.add_option("--sweep", sweep_arg, "NAME=v1,v2,... runs once per value");
  app.add_flag("--quiet", quiet, "Suppress progress and warnings");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  RunConfig cfg;
  std::optional<SweepRequest> sweep;
  try {
    ConfigDocument doc = parse_document(read_text_file(config_path));
    if (!preset.empty()) doc.set("parameters", "preset", preset);
    if (!out_dir.empty()) doc.set("output", "directory", out_dir);
    if (tau) doc.set("time", "tau", exact(*tau));
    if (tmax) doc.set("time", "T", exact(*tmax));
    cfg = build_config(doc);
    if (!sweep_arg.empty()) {
      sweep = parse_sweep(sweep_arg);
      for (double v : sweep->values) {
        ParameterSet p = cfg.params;
        set_parameter(p, sweep->parameter, v);
        validate(p);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (!sweep) {
      run_one(cfg, cfg.params, cfg.output_dir, quiet);
    } else {
      for (double v : sweep->values) {
        ParameterSet p = cfg.params;
        set_parameter(p, sweep->parameter, v);
        run_one(cfg, p, fs::path(cfg.output_dir) / sweep_dir_name(sweep->parameter, v), quiet);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
