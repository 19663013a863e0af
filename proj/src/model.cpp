#include "bulksurf/model.hpp"

#include <algorithm>
#include <cmath>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const ParameterSet& p) {
  require(positive(p.delta_omega), "delta_omega must be positive");
  require(positive(p.delta_k), "delta_k must be positive");
  require(positive(p.delta_k_prime), "delta_k_prime must be positive");
  require(std::isfinite(p.delta_gamma) && p.delta_gamma >= 0.0, "delta_gamma must be non-negative");
  require(std::isfinite(p.delta_gamma_prime) && p.delta_gamma_prime >= 0.0,
          "delta_gamma_prime must be non-negative");
  if (p.g.kind == KineticsKind::hill) require(std::isfinite(p.g.hill_n) && p.g.hill_n > 1.0, "hill exponent must exceed 1");
  require(positive(p.tau), "tau must be positive");
  require(positive(p.t_end), "T must be positive");
  require(p.tau <= p.t_end, "tau must not exceed T");
  require(std::isfinite(p.outer_bc.value), "u_D must be finite");
  require(positive(p.bulk_solver.tol) && positive(p.surface_solver.tol), "solver tolerances must be positive");
}

// Hill kinetics use the positive part of u so non-integer exponents stay real.
double reaction_g(const Kinetics& k, double u, double w) {
  switch (k.kind) {
    case KineticsKind::quadratic:
      return u * w;
    case KineticsKind::hill: {
      const double un = std::pow(std::max(u, 0.0), k.hill_n);
      return un * w / (1.0 + un);
    }
    case KineticsKind::none:
      return 0.0;
  }
  return 0.0;
}

double reaction_factor(const Kinetics& k, double u, double w) {
  switch (k.kind) {
    case KineticsKind::quadratic:
      return w;
    case KineticsKind::hill: {
      const double up = std::max(u, 0.0);
      return std::pow(up, k.hill_n - 1.0) * w / (1.0 + std::pow(up, k.hill_n));
    }
    case KineticsKind::none:
      return 0.0;
  }
  return 0.0;
}

double reaction_slope(const Kinetics& k, double u, double w) {
  switch (k.kind) {
    case KineticsKind::quadratic:
      return std::max(std::abs(u), std::abs(w));
    case KineticsKind::hill: {
      const double up = std::max(u, 0.0);
      const double un = std::pow(up, k.hill_n);
      const double dgdu = k.hill_n * std::pow(up, k.hill_n - 1.0) * w / ((1.0 + un) * (1.0 + un));
      return std::max(std::abs(dgdu), un / (1.0 + un));
    }
    case KineticsKind::none:
      return 0.0;
  }
  return 0.0;
}

MeshLevel make_level(SimplicialMesh mesh, double delta_omega) {
  MeshLevel level;
  level.mesh = std::move(mesh);
  level.surface = extract_surface(level.mesh);
  level.bulk = assemble_bulk_level(level.mesh, delta_omega);
  level.surf = assemble_surface_operators(level.surface);
  return level;
}

InitialData to_functions(const InitialDataSpec& spec) {
  InitialData data;
  const double u0 = spec.u0, w0 = spec.w0, z0 = spec.z0;
  data.u0 = [u0](const Vec3&) { return u0; };
  if (spec.w_profile == WProfile::exp_band) {
    data.w0 = [w0](const Vec3& x) { return w0 * std::exp(-6.0 * (1.0 - x[0] * x[0])); };
  } else {
    data.w0 = [w0](const Vec3&) { return w0; };
  }
  data.z0 = [z0](const Vec3&) { return z0; };
  return data;
}

FieldState interpolate_initial(const MeshLevel& level, const InitialData& data, const ParameterSet& p) {
  FieldState st;
  const auto& m = level.mesh;
  st.u.resize(m.num_vertices());
  for (Index v = 0; v < m.num_vertices(); ++v) {
    const bool fixed = p.outer_bc.kind == OuterBc::Kind::dirichlet && m.tags[v] == VertexTag::outer_boundary;
    st.u[v] = fixed ? p.outer_bc.value : data.u0(m.vertices[v]);
  }
  const auto& s = level.surface;
  st.w.resize(s.num_vertices());
  st.z.resize(s.num_vertices());
  for (Index i = 0; i < s.num_vertices(); ++i) {
    st.w[i] = data.w0(s.vertices[i]);
    st.z[i] = data.z0(s.vertices[i]);
  }
  return st;
}

void set_parameter(ParameterSet& p, const std::string& name, double value) {
  if (name == "delta_omega") {
    p.delta_omega = value;
  } else if (name == "delta_gamma") {
    p.delta_gamma = value;
  } else if (name == "delta_gamma_prime") {
    p.delta_gamma_prime = value;
  } else if (name == "delta_k") {
    p.delta_k = value;
  } else if (name == "delta_k_prime") {
    p.delta_k_prime = value;
  } else if (name == "tau") {
    p.tau = value;
  } else if (name == "t_end" || name == "T") {
    p.t_end = value;
  } else if (name == "u_D") {
    p.outer_bc.value = value;
  } else if (name == "hill_n") {
    p.g.hill_n = value;
  } else {
    throw InvalidParameter("unknown parameter '" + name + "'");
  }
}

}  // namespace bulksurf
