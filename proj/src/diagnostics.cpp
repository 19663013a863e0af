#include "bulksurf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

double weighted_sum(const CsrMatrix& mass, std::span<const double> f) {
  double total = 0.0;
  for (double v : spmv(mass, f)) total += v;
  return total;
}

double polygon_area(const std::vector<Vec3>& poly) {
  if (poly.size() < 3) return 0.0;
  Vec3 acc{0.0, 0.0, 0.0};
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) acc += cross(poly[i] - poly[0], poly[i + 1] - poly[0]);
  return 0.5 * norm(acc);
}

Vec3 lerp(const Vec3& a, const Vec3& b, double s) { return a + s * (b - a); }

}  // namespace

Masses compute_masses(const MeshLevel& level, const FieldState& state, const ParameterSet& p) {
  Masses m;
  m.u = weighted_sum(level.bulk.mass, state.u) / p.delta_omega;
  m.w = weighted_sum(level.surf.mass, state.w);
  m.z = weighted_sum(level.surf.mass, state.z);
  m.wz = m.w + m.z;
  m.combined = p.delta_omega * m.u + m.z;
  return m;
}

double g_residual(const MeshLevel& level, const FieldState& state, const ParameterSet& p, double tau,
                  double accumulator) {
  const auto u = trace(level.surface, state.u);
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = reaction_g(p, u[i], state.w[i]);
  return accumulator + tau * weighted_sum(level.surf.mass, g);
}

double complementarity_gap(const CsrMatrix& surface_mass, std::span<const double> u_trace,
                           std::span<const double> w) {
  if (u_trace.size() != w.size()) throw DimensionMismatch("complementarity_gap: field sizes differ");
  std::vector<double> m(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) m[i] = std::min(std::max(u_trace[i], 0.0), std::max(w[i], 0.0));
  return weighted_sum(surface_mass, m);
}

double complementarity_gap(const SurfaceView& s, std::span<const double> u_trace, std::span<const double> w) {
  return complementarity_gap(assemble_surface_operators(s).mass, u_trace, w);
}

FreeBoundary extract_free_boundary(const SurfaceView& s, std::span<const double> w, double threshold) {
  if (w.size() != s.num_vertices()) throw DimensionMismatch("extract_free_boundary: W does not match the surface");
  FreeBoundary fb;
  const auto below = [&](Index i) { return w[i] < threshold; };
  for (std::size_t f = 0; f < s.num_facets(); ++f) {
    const auto facet = s.facet(f);
    const std::size_t k = facet.size();
    std::vector<ThresholdCrossing> local;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        const Index ia = facet[a], ib = facet[b];
        if (below(ia) == below(ib)) continue;
        const double t = (threshold - w[ia]) / (w[ib] - w[ia]);
        local.push_back({f, a, b, t, lerp(s.vertices[ia], s.vertices[ib], t)});
      }
    }
    if (k == 2) {
      const Vec3& x0 = s.vertices[facet[0]];
      const Vec3& x1 = s.vertices[facet[1]];
      const double len = norm(x1 - x0);
      if (below(facet[0]) && below(facet[1])) {
        fb.measure += len;
      } else if (!local.empty()) {
        const double t = local.front().parameter;
        fb.measure += below(facet[0]) ? t * len : (1.0 - t) * len;
        fb.segments.push_back({local.front().point, local.front().point});
      }
    } else {
      // Clip the triangle to {I_h W < threshold}.
      std::vector<Vec3> poly;
      for (std::size_t a = 0; a < k; ++a) {
        const std::size_t b = (a + 1) % k;
        const Index ia = facet[a], ib = facet[b];
        if (below(ia)) poly.push_back(s.vertices[ia]);
        if (below(ia) != below(ib)) {
          const double t = (threshold - w[ia]) / (w[ib] - w[ia]);
          poly.push_back(lerp(s.vertices[ia], s.vertices[ib], t));
        }
      }
      fb.measure += polygon_area(poly);
      if (local.size() == 2) fb.segments.push_back({local[0].point, local[1].point});
    }
    fb.crossings.insert(fb.crossings.end(), local.begin(), local.end());
  }
  return fb;
}

DimensionlessGroups nondimensionalize(const PhysicalParameters& ph) {
  const double fields[] = {ph.length, ph.ligand_scale, ph.receptor_scale, ph.complex_scale, ph.d_omega,
                           ph.d_gamma, ph.d_gamma_prime, ph.k_on, ph.k_off, ph.time_scale};
  for (double v : fields) {
    if (!(std::isfinite(v) && v > 0.0)) throw InvalidParameter("physical parameters must be positive and finite");
  }
  const double l2 = ph.length * ph.length;
  DimensionlessGroups d;
  d.delta_omega = l2 / (ph.d_omega * ph.time_scale);
  d.delta_gamma = ph.d_gamma * ph.time_scale / l2;
  d.delta_gamma_prime = ph.d_gamma_prime * ph.time_scale / l2;
  d.delta_k = ph.d_omega / (ph.k_on * ph.length * ph.receptor_scale);
  d.delta_k_prime_inv = ph.k_off * ph.complex_scale * ph.length / (ph.d_omega * ph.ligand_scale);
  d.mu = ph.time_scale * ph.ligand_scale * ph.d_omega / (ph.length * ph.receptor_scale);
  d.mu_prime = ph.time_scale * ph.ligand_scale * ph.d_omega / (ph.length * ph.complex_scale);
  return d;
}

ParameterSet apply_sweep(ParameterSet p, const Sweep& sweep, double value) {
  for (const auto& [name, power] : sweep.parameters) set_parameter(p, name, std::pow(value, power));
  return p;
}

std::vector<std::string> preset_names() {
  return {"fast_binding",       "fast_binding_no_surface_diffusion", "full_limit_neumann",
          "full_limit_dirichlet", "windshield_on",                   "windshield_off"};
}

RegimePreset regime_preset(const std::string& name) {
  const std::vector<double> decades{1e-1, 1e-2, 1e-3};
  RegimePreset r;
  r.name = name;
  r.geometry = paper_tanh_geometry(2);
  ParameterSet& p = r.params;
  p.g = {KineticsKind::quadratic, 2.0};
  p.tau = 1e-3;
  p.t_end = 1.0;
  p.velocity_mode = VelocityMode::zero;
  if (name == "fast_binding") {
    p.delta_omega = p.delta_gamma = p.delta_gamma_prime = p.delta_k_prime = 1.0;
    p.delta_k = 0.01;
    r.sweeps = {{{{"delta_k", 1.0}}, decades}};
  } else if (name == "fast_binding_no_surface_diffusion") {
    p.delta_omega = p.delta_k_prime = 1.0;
    p.delta_k = p.delta_gamma = p.delta_gamma_prime = 0.01;
    r.sweeps = {{{{"delta_k", 1.0}, {"delta_gamma", 1.0}, {"delta_gamma_prime", 1.0}}, decades}};
  } else if (name == "full_limit_neumann" || name == "full_limit_dirichlet") {
    p.delta_omega = p.delta_k = p.delta_gamma = p.delta_gamma_prime = 0.01;
    p.delta_k_prime = 100.0;
    if (name == "full_limit_dirichlet") p.outer_bc = {OuterBc::Kind::dirichlet, 1.0};
    r.sweeps = {{{{"delta_omega", 1.0},
                  {"delta_k", 1.0},
                  {"delta_gamma", 1.0},
                  {"delta_gamma_prime", 1.0},
                  {"delta_k_prime", -1.0}},
                 decades}};
  } else if (name == "windshield_on" || name == "windshield_off") {
    p.delta_k = p.delta_gamma = p.delta_gamma_prime = 0.001;
    p.delta_omega = p.delta_k_prime = 1.0;
    p.g = {KineticsKind::hill, 2.0};
    p.outer_bc = {OuterBc::Kind::dirichlet, 1.0};
    p.tau = 1e-5;
    p.t_end = 0.4;
    p.velocity_mode = name == "windshield_on" ? VelocityMode::zero : VelocityMode::harmonic_extension;
    r.initial.w_profile = WProfile::exp_band;
    r.sweeps = {{{{"delta_k", 1.0}, {"delta_gamma", 1.0}, {"delta_gamma_prime", 1.0}}, decades}};
  } else {
    throw UnknownPreset("unknown preset '" + name + "'");
  }
  return r;
}

DiagnosticsRecord make_record(std::size_t step, const MeshLevel& level, const FieldState& state,
                              const ParameterSet& p, double g_cum, double fb_threshold) {
  DiagnosticsRecord r;
  r.step = step;
  r.time = state.time;
  const Masses m = compute_masses(level, state, p);
  r.mass_u = m.u;
  r.mass_w = m.w;
  r.mass_z = m.z;
  r.mass_wz = m.wz;
  r.combined_mass = m.combined;
  r.g_residual_cum = g_cum;
  const auto u = trace(level.surface, state.u);
  r.comp_gap = complementarity_gap(level.surf.mass, u, state.w);
  r.min_w = state.w.empty() ? 0.0 : *std::min_element(state.w.begin(), state.w.end());
  r.max_u_trace = u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
  r.fb_measure = extract_free_boundary(level.surface, state.w, fb_threshold).measure;
  return r;
}

}  // namespace bulksurf
