#pragma once

#include <map>
#include <string>
#include <vector>

#include "bulksurf/diagnostics.hpp"
#include "bulksurf/model.hpp"

namespace bulksurf {

/// Raw `[section]` / `key = value` content with the line each key came from.
struct ConfigDocument {
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  std::map<std::string, std::map<std::string, Entry>> sections;

  bool has(const std::string& section, const std::string& key) const;
  /// Inserts or replaces a value; line 0 marks a command-line override.
  void set(const std::string& section, const std::string& key, const std::string& value);
};

/// Throws ParseError for malformed lines, duplicate keys and unknown sections or keys.
ConfigDocument parse_document(const std::string& text);

struct RunConfig {
  LevelSetGeometry geometry = paper_tanh_geometry(2);
  double outer_radius = 2.0;
  std::size_t resolution = 150;
  std::string mesh_file;
  std::string preset;
  ParameterSet params;
  InitialDataSpec initial;
  std::size_t output_every = 0;
  double fb_threshold = 0.1;
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_vtk = false;
  std::vector<Sweep> sweeps;
};

/// Throws ValidationError and ConflictError.
RunConfig build_config(const ConfigDocument& doc);

RunConfig parse_config(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace bulksurf
