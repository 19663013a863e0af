#include "bulksurf/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"geometry", {"kind", "dim", "coefficients", "outer_radius", "scale"}},
      {"mesh", {"resolution", "file"}},
      {"parameters",
       {"preset", "delta_omega", "delta_gamma", "delta_gamma_prime", "delta_k", "delta_k_prime", "g_kind", "hill_n",
        "outer_bc", "u_D", "velocity_mode", "bulk_reaction"}},
      {"initial", {"u0", "w0", "w_profile", "z0"}},
      {"time", {"tau", "T", "output_every"}},
      {"diagnostics", {"threshold", "windshield_sign"}},
      {"output", {"directory", "formats"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  const std::string* raw(const std::string& section, const std::string& key) const {
    const auto s = doc_.sections.find(section);
    if (s == doc_.sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second.value;
  }

  static double to_number(const std::string& field, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
      throw ValidationError(field, "expected a number, got '" + text + "'");
    }
    return v;
  }

  bool number(const std::string& section, const std::string& key, double& out) const {
    const std::string* v = raw(section, key);
    if (!v) return false;
    out = to_number(section + "." + key, *v);
    return true;
  }

  bool count(const std::string& section, const std::string& key, std::size_t& out) const {
    double v = 0.0;
    if (!number(section, key, v)) return false;
    if (v < 0.0 || v != std::floor(v)) throw ValidationError(section + "." + key, "expected a non-negative integer");
    out = static_cast<std::size_t>(v);
    return true;
  }

  template <typename T>
  bool choice(const std::string& section, const std::string& key, const std::map<std::string, T>& options,
              T& out) const {
    const std::string* v = raw(section, key);
    if (!v) return false;
    const auto it = options.find(*v);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + name;
      throw ValidationError(section + "." + key, "expected one of " + allowed + ", got '" + *v + "'");
    }
    out = it->second;
    return true;
  }

private:
  const ConfigDocument& doc_;
};

}  // namespace

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

void ConfigDocument::set(const std::string& section, const std::string& key, const std::string& value) {
  sections[section][key] = Entry{value, 0};
}

ConfigDocument parse_document(const std::string& text) {
  ConfigDocument doc;
  std::stringstream in(text);
  std::string line;
  std::string section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(number, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) throw ParseError(number, "unknown section [" + section + "]");
      if (doc.sections.count(section)) throw ParseError(number, "section [" + section + "] repeated");
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected key = value");
    if (section.empty()) throw ParseError(number, "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(number, "empty key");
    if (!schema().at(section).count(key)) throw ParseError(number, "unknown key '" + key + "' in [" + section + "]");
    if (doc.sections[section].count(key)) throw ParseError(number, "duplicate key '" + key + "'");
    doc.sections[section][key] = {value, number};
  }
  return doc;
}

RunConfig build_config(const ConfigDocument& doc) {
  if (!doc.sections.count("parameters")) throw ValidationError("parameters", "missing required section");
  const Reader r(doc);
  RunConfig cfg;
  static const char* deltas[] = {"delta_omega", "delta_gamma", "delta_gamma_prime", "delta_k", "delta_k_prime"};

  if (const std::string* preset = r.raw("parameters", "preset")) {
    for (const char* d : deltas) {
      if (doc.has("parameters", d)) {
        throw ConflictError(std::string("parameters.") + d + " given together with preset '" + *preset + "'");
      }
    }
    RegimePreset rp;
    try {
      rp = regime_preset(*preset);
    } catch (const UnknownPreset& e) {
      throw ValidationError("parameters.preset", e.what());
    }
    cfg.preset = rp.name;
    cfg.params = rp.params;
    cfg.geometry = rp.geometry;
    cfg.initial = rp.initial;
    cfg.fb_threshold = rp.fb_threshold;
    cfg.sweeps = rp.sweeps;
  } else {
    for (const char* d : deltas) {
      if (!doc.has("parameters", d)) throw ValidationError(std::string("parameters.") + d, "required without a preset");
    }
    if (!doc.has("time", "tau") || !doc.has("time", "T")) {
      throw ValidationError("time", "tau and T are required without a preset");
    }
  }

  // Geometry.
  static const std::map<std::string, GeometryKind> kinds{
      {"paper_tanh", GeometryKind::paper_tanh}, {"sphere", GeometryKind::sphere}, {"custom", GeometryKind::custom}};
  GeometryKind kind = cfg.geometry.kind;
  const bool kind_given = r.choice("geometry", "kind", kinds, kind);
  double dim = cfg.geometry.dim;
  r.number("geometry", "dim", dim);
  if (dim != 2.0 && dim != 3.0) throw ValidationError("geometry.dim", "must be 2 or 3");
  std::vector<double> coeffs;
  if (const std::string* c = r.raw("geometry", "coefficients")) {
    for (const auto& item : split_list(*c)) coeffs.push_back(Reader::to_number("geometry.coefficients", item));
  }
  const int d = static_cast<int>(dim);
  if (kind_given || d != cfg.geometry.dim || !coeffs.empty()) {
    try {
      switch (kind) {
        case GeometryKind::paper_tanh:
          if (!coeffs.empty() && coeffs.size() != 2) {
            throw ValidationError("geometry.coefficients", "paper_tanh takes shift, rate");
          }
          cfg.geometry = coeffs.empty() ? paper_tanh_geometry(d) : paper_tanh_geometry(d, coeffs[0], coeffs[1]);
          break;
        case GeometryKind::sphere: {
          std::vector<double> c = coeffs.empty() ? std::vector<double>{1.0} : coeffs;
          if (c.size() > 5) throw ValidationError("geometry.coefficients", "sphere takes r0, v, cx, cy, cz");
          c.resize(5, 0.0);
          cfg.geometry = sphere_geometry(d, c[0], c[1], {c[2], c[3], c[4]});
          break;
        }
        case GeometryKind::custom:
          cfg.geometry = custom_geometry(d, coeffs);
          break;
      }
    } catch (const InvalidParameter& e) {
      throw ValidationError("geometry.coefficients", e.what());
    }
  }
  r.number("geometry", "scale", cfg.geometry.scale);
  try {
    validate(cfg.geometry);
  } catch (const InvalidParameter& e) {
    throw ValidationError("geometry", e.what());
  }
  r.number("geometry", "outer_radius", cfg.outer_radius);
  if (!(cfg.outer_radius > 0.0)) throw ValidationError("geometry.outer_radius", "must be positive");

  // Mesh.
  const bool has_res = r.count("mesh", "resolution", cfg.resolution);
  if (const std::string* f = r.raw("mesh", "file")) {
    if (has_res) throw ConflictError("mesh.resolution and mesh.file are mutually exclusive");
    cfg.mesh_file = *f;
  }
  if (cfg.mesh_file.empty() && cfg.resolution < 8) throw ValidationError("mesh.resolution", "must be at least 8");

  // Parameters.
  ParameterSet& p = cfg.params;
  r.number("parameters", "delta_omega", p.delta_omega);
  r.number("parameters", "delta_gamma", p.delta_gamma);
  r.number("parameters", "delta_gamma_prime", p.delta_gamma_prime);
  r.number("parameters", "delta_k", p.delta_k);
  r.number("parameters", "delta_k_prime", p.delta_k_prime);
  static const std::map<std::string, KineticsKind> g_kinds{
      {"quadratic", KineticsKind::quadratic}, {"hill", KineticsKind::hill}, {"none", KineticsKind::none}};
  r.choice("parameters", "g_kind", g_kinds, p.g.kind);
  r.number("parameters", "hill_n", p.g.hill_n);
  static const std::map<std::string, OuterBc::Kind> bcs{{"neumann", OuterBc::Kind::neumann},
                                                        {"dirichlet", OuterBc::Kind::dirichlet}};
  r.choice("parameters", "outer_bc", bcs, p.outer_bc.kind);
  r.number("parameters", "u_D", p.outer_bc.value);
  static const std::map<std::string, VelocityMode> modes{{"zero", VelocityMode::zero},
                                                         {"harmonic_extension", VelocityMode::harmonic_extension}};
  r.choice("parameters", "velocity_mode", modes, p.velocity_mode);
  static const std::map<std::string, BulkReaction> couplings{{"explicit", BulkReaction::explicit_load},
                                                             {"linearized", BulkReaction::linearized}};
  r.choice("parameters", "bulk_reaction", couplings, p.bulk_reaction);

  // Initial data.
  r.number("initial", "u0", cfg.initial.u0);
  r.number("initial", "w0", cfg.initial.w0);
  r.number("initial", "z0", cfg.initial.z0);
  static const std::map<std::string, WProfile> profiles{{"constant", WProfile::constant},
                                                        {"exp_band", WProfile::exp_band}};
  r.choice("initial", "w_profile", profiles, cfg.initial.w_profile);

  // Time.
  r.number("time", "tau", p.tau);
  r.number("time", "T", p.t_end);
  r.count("time", "output_every", cfg.output_every);

  // Diagnostics.
  r.number("diagnostics", "threshold", cfg.fb_threshold);
  static const std::map<std::string, WindshieldSign> signs{{"analysis", WindshieldSign::analysis},
                                                           {"level_set", WindshieldSign::level_set}};
  r.choice("diagnostics", "windshield_sign", signs, p.windshield_sign);

  // Output.
  if (const std::string* dir = r.raw("output", "directory")) {
    if (dir->empty()) throw ValidationError("output.directory", "must not be empty");
    cfg.output_dir = *dir;
  }
  if (const std::string* formats = r.raw("output", "formats")) {
    cfg.write_csv = cfg.write_vtk = false;
    for (const auto& f : split_list(*formats)) {
      if (f == "csv") {
        cfg.write_csv = true;
      } else if (f == "vtk") {
        cfg.write_vtk = true;
      } else {
        throw ValidationError("output.formats", "unknown format '" + f + "'");
      }
    }
  }

  try {
    validate(p);
  } catch (const InvalidParameter& e) {
    throw ValidationError("parameters", e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::string& text) { return build_config(parse_document(text)); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace bulksurf
