#include "bulksurf/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

constexpr double kNegativeWarn = -1e-8;

double max_reaction_slope(const ParameterSet& p, const FieldState& st, const SurfaceView& s) {
  const auto u = trace(s, st.u);
  double slope = 0.0;
  for (Index i = 0; i < s.num_vertices(); ++i) slope = std::max(slope, reaction_slope(p.g, u[i], st.w[i]));
  return slope;
}

// Sparse M_s diag(h) mapped to bulk dofs.
CsrMatrix reaction_sink(const SurfaceView& s, const CsrMatrix& surface_mass, std::span<const double> h,
                        std::size_t n_bulk) {
  TripletBuffer t;
  t.reserve(surface_mass.nnz());
  const auto off = surface_mass.offsets();
  const auto col = surface_mass.col_indices();
  const auto val = surface_mass.values();
  for (Index i = 0; i < surface_mass.rows(); ++i) {
    for (Index k = off[i]; k < off[i + 1]; ++k) t.add(s.to_bulk[i], s.to_bulk[col[k]], val[k] * h[col[k]]);
  }
  return to_csr(t, n_bulk, n_bulk);
}

}  // namespace

FieldState imex_step(const ParameterSet& p, const MeshLevel& prev, const MeshLevel& next, const MeshMotion& motion,
                     const FieldState& state, StepReport* report) {
  const std::size_t nb = next.mesh.num_vertices();
  const std::size_t ns = next.surface.num_vertices();
  if (state.u.size() != prev.mesh.num_vertices() || state.w.size() != prev.surface.num_vertices() ||
      state.z.size() != prev.surface.num_vertices()) {
    throw DimensionMismatch("imex_step: state does not match the previous mesh level");
  }
  if (nb != prev.mesh.num_vertices() || ns != prev.surface.num_vertices()) {
    throw DimensionMismatch("imex_step: mesh levels differ in size");
  }
  const double tau = p.tau;
  const auto& ms_prev = prev.surf.mass;

  const std::vector<double> u_trace = trace(prev.surface, state.u);
  std::vector<double> g(ns), h;
  for (Index i = 0; i < ns; ++i) g[i] = reaction_g(p.g, u_trace[i], state.w[i]);
  std::vector<double> rate(ns);
  for (Index i = 0; i < ns; ++i) rate[i] = state.z[i] / p.delta_k_prime - g[i] / p.delta_k;
  const std::vector<double> load = spmv(ms_prev, rate);

  // Bulk.
  std::vector<double> rhs = spmv(prev.bulk.mass, state.u);
  const MotionOperators moving = assemble_motion_terms(next.mesh, next.surface, motion, p.delta_omega);
  CsrMatrix lhs = linear_combination(1.0, next.bulk.mass, tau, next.bulk.stiffness);
  bool symmetric = true;
  if (moving.active) {
    lhs = linear_combination(1.0, lhs, tau, linear_combination(1.0, moving.ale, 1.0, moving.windshield));
    symmetric = moving.ale.nnz() == 0;
  }
  std::vector<double> bulk_load(ns);
  if (p.bulk_reaction == BulkReaction::linearized && p.g.kind != KineticsKind::none) {
    h.resize(ns);
    for (Index i = 0; i < ns; ++i) h[i] = reaction_factor(p.g, u_trace[i], state.w[i]);
    lhs = linear_combination(1.0, lhs, tau / p.delta_k, reaction_sink(prev.surface, ms_prev, h, nb));
    std::vector<double> unbinding(ns);
    for (Index i = 0; i < ns; ++i) unbinding[i] = state.z[i] / p.delta_k_prime;
    bulk_load = spmv(ms_prev, unbinding);
    symmetric = false;
  } else {
    bulk_load = load;
  }
  for (auto& v : bulk_load) v *= tau;
  scatter_add(prev.surface, bulk_load, rhs);
  const P1Space space = bulk_space(next.mesh, p.outer_bc.kind == OuterBc::Kind::dirichlet);
  apply_outer_bc(space, lhs, rhs, p.outer_bc);

  FieldState out;
  StepReport local;
  StepReport& rep = report ? *report : local;
  out.u = symmetric ? solve_spd(lhs, rhs, p.bulk_solver, state.u, &rep.bulk)
                    : solve_general(lhs, rhs, p.bulk_solver, state.u, &rep.bulk);

  // Surface. Both right-hand sides share `load`, so the reaction cancels in W + Z.
  const auto& ms = next.surf.mass;
  const auto& as = next.surf.stiffness;
  std::vector<double> rhs_w = spmv(ms_prev, state.w);
  std::vector<double> rhs_z = spmv(ms_prev, state.z);
  for (Index i = 0; i < ns; ++i) {
    rhs_w[i] += tau * load[i];
    rhs_z[i] -= tau * load[i];
  }
  const CsrMatrix lhs_w = linear_combination(1.0, ms, tau * p.delta_gamma, as);
  out.w = solve_spd(lhs_w, rhs_w, p.surface_solver, state.w, &rep.w);
  const CsrMatrix lhs_z = p.delta_gamma_prime == p.delta_gamma
                              ? lhs_w
                              : linear_combination(1.0, ms, tau * p.delta_gamma_prime, as);
  out.z = solve_spd(lhs_z, rhs_z, p.surface_solver, state.z, &rep.z);

  const std::vector<double> mg = spmv(ms_prev, g);
  rep.g_integral = 0.0;
  for (double v : mg) rep.g_integral += v;
  out.time = state.time + tau;
  out.level = state.level + 1;
  return out;
}

std::pair<std::size_t, double> step_plan(double tau, double t_end) {
  if (!(tau > 0.0) || !(t_end > 0.0)) throw InvalidParameter("tau and T must be positive");
  const double ratio = t_end / tau;
  const double rounded = std::round(ratio);
  if (rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) {
    return {static_cast<std::size_t>(rounded), tau};
  }
  const auto full = static_cast<std::size_t>(std::floor(ratio));
  return {full + 1, t_end - static_cast<double>(full) * tau};
}

RunResult run_simulation(const ParameterSet& p, const std::optional<LevelSetGeometry>& geometry,
                         SimplicialMesh initial_mesh, const InitialData& data, const RunOptions& opts) {
  validate(p);
  if (geometry) validate(*geometry);
  const auto [n_steps, last_tau] = step_plan(p.tau, p.t_end);
  const bool moving = geometry && !is_stationary(*geometry);

  RunResult result;
  result.steps = n_steps;
  result.last_tau = last_tau;
  result.last_step_truncated = last_tau != p.tau;
  const auto warn = [&](const std::string& msg) {
    result.warnings.push_back(msg);
    if (opts.on_warning) opts.on_warning(msg);
  };
  if (result.last_step_truncated) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "T is not a multiple of tau; last step has length %.6g", last_tau);
    warn(buf);
  }

  auto level = std::make_shared<const MeshLevel>(make_level(std::move(initial_mesh), p.delta_omega));
  FieldState st = interpolate_initial(*level, data, p);
  AdvanceOptions adv;
  adv.mode = p.velocity_mode;
  adv.windshield_sign = p.windshield_sign;
  adv.vol_floor = 1e-14 * mesh_quality(level->mesh).min_volume;
  MeshMotion motion = stationary_motion(level->mesh);

  double g_cum = 0.0;
  const auto emit = [&](std::size_t step) {
    result.records.push_back(make_record(step, *level, st, p, g_cum, opts.fb_threshold));
    if (opts.on_record) opts.on_record(result.records.back());
    if (opts.on_output && opts.output_every > 0 && (step % opts.output_every == 0 || step == n_steps)) {
      opts.on_output(Snapshot{step, *level, st});
    }
  };
  emit(0);

  bool stability_warned = false;
  bool negative_warned[3] = {false, false, false};
  for (std::size_t n = 1; n <= n_steps; ++n) {
    ParameterSet pn = p;
    pn.tau = n == n_steps ? last_tau : p.tau;
    try {
      if (!stability_warned) {
        const double rate = pn.tau * std::max(max_reaction_slope(p, st, level->surface) / p.delta_k,
                                              1.0 / p.delta_k_prime);
        if (rate > 1.0) {
          char buf[128];
          std::snprintf(buf, sizeof buf, "step %zu: explicit reaction rate tau*L = %.3g exceeds 1", n, rate);
          warn(buf);
          stability_warned = true;
        }
      }
      std::shared_ptr<const MeshLevel> next = level;
      MeshMotion step_motion;
      if (moving) {
        AdvancedMesh advanced = advance_mesh(level->mesh, motion, *geometry, st.time, pn.tau, adv);
        next = std::make_shared<const MeshLevel>(make_level(std::move(advanced.mesh), p.delta_omega));
        motion = std::move(advanced.motion);
        step_motion = motion;
      } else {
        step_motion = stationary_motion(level->mesh);
      }
      StepReport report;
      FieldState updated = imex_step(pn, *level, *next, step_motion, st, &report);
      updated.time = n == n_steps ? p.t_end : static_cast<double>(n) * p.tau;
      g_cum += pn.tau * report.g_integral;
      st = std::move(updated);
      level = std::move(next);
    } catch (const StepFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw StepFailure(n, e.what());
    }
    const std::vector<double>* fields[3] = {&st.u, &st.w, &st.z};
    const char* names[3] = {"U", "W", "Z"};
    for (int f = 0; f < 3; ++f) {
      if (negative_warned[f] || fields[f]->empty()) continue;
      const double lo = *std::min_element(fields[f]->begin(), fields[f]->end());
      if (lo < kNegativeWarn) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "step %zu: %s reached %.3g", n, names[f], lo);
        warn(buf);
        negative_warned[f] = true;
      }
    }
    emit(n);
  }
  result.final_state = std::move(st);
  return result;
}

}  // namespace bulksurf
