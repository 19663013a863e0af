#include <doctest.h>

#include <cmath>

#include "bulksurf/errors.hpp"
#include "bulksurf/stepper.hpp"

using namespace bulksurf;

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double surface_total(const MeshLevel& level, const std::vector<double>& f) { return sum(spmv(level.surf.mass, f)); }

ParameterSet small_params() {
  ParameterSet p;
  p.tau = 0.01;
  p.t_end = 0.05;
  return p;
}

}  // namespace

TEST_CASE("reaction kinetics") {
  const Kinetics quad{KineticsKind::quadratic, 2.0}, hill{KineticsKind::hill, 2.0}, none{KineticsKind::none, 2.0};
  CHECK(reaction_g(quad, 2.0, 3.0) == 6.0);
  CHECK(reaction_g(hill, 1.0, 4.0) == doctest::Approx(2.0));
  for (const auto& k : {quad, hill}) CHECK(reaction_g(k, 0.0, 3.7) == 0.0);
  CHECK(reaction_g(none, 2.0, 3.0) == 0.0);
  // g = h u
  for (double u : {0.0, 0.3, 1.0, 2.5}) {
    for (double w : {0.0, 0.7, 2.0}) {
      CHECK(reaction_factor(quad, u, w) * u == doctest::Approx(reaction_g(quad, u, w)));
      CHECK(reaction_factor(hill, u, w) * u == doctest::Approx(reaction_g(hill, u, w)));
      CHECK(reaction_g(hill, u, w) >= 0.0);
    }
  }
  ParameterSet p;
  p.g = hill;
  CHECK(reaction_g(p, 1.0, 4.0) == doctest::Approx(2.0));
}

TEST_CASE("parameter validation") {
  ParameterSet p;
  CHECK_NOTHROW(validate(p));
  p.delta_k = 0.0;
  CHECK_THROWS_AS(validate(p), InvalidParameter);
  p = {};
  p.g = {KineticsKind::hill, 1.0};
  CHECK_THROWS_AS(validate(p), InvalidParameter);
  p = {};
  p.tau = 2.0;
  CHECK_THROWS_AS(validate(p), InvalidParameter);
  p = {};
  p.delta_gamma = 0.0;
  CHECK_NOTHROW(validate(p));
  CHECK_THROWS_AS(set_parameter(p, "delta_x", 1.0), InvalidParameter);
}

TEST_CASE("imex_step on a stationary mesh") {
  const MeshLevel level = make_level(build_initial_mesh(paper_tanh_geometry(2), 2.0, 24), 1.0);
  const std::size_t nb = level.mesh.num_vertices(), ns = level.surface.num_vertices();
  ParameterSet p = small_params();
  p.g.kind = KineticsKind::none;
  const MeshMotion still = stationary_motion(level.mesh);

  SUBCASE("constant W is preserved") {
    FieldState st{std::vector<double>(nb, 0.0), std::vector<double>(ns, 0.8), std::vector<double>(ns, 0.0), 0.0, 0};
    const FieldState out = imex_step(p, level, level, still, st);
    for (double w : out.w) CHECK(w == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("uniform Z decays by 1 - tau/delta_k'") {
    p.delta_gamma_prime = 0.0;
    p.delta_k_prime = 0.5;
    FieldState st{std::vector<double>(nb, 0.0), std::vector<double>(ns, 0.0), std::vector<double>(ns, 2.0), 0.0, 0};
    const FieldState out = imex_step(p, level, level, still, st);
    for (double z : out.z) CHECK(z == doctest::Approx(2.0 * (1.0 - 0.01 / 0.5)).epsilon(1e-12));
    CHECK(out.level == 1);
    CHECK(out.time == doctest::Approx(0.01));
  }
}

TEST_CASE("property: W + Z is conserved across moving steps") {
  const auto g = paper_tanh_geometry(2);
  for (auto coupling : {BulkReaction::explicit_load, BulkReaction::linearized}) {
    for (auto mode : {VelocityMode::zero, VelocityMode::harmonic_extension}) {
      ParameterSet p;
      p.tau = 0.005;
      p.velocity_mode = mode;
      p.bulk_reaction = coupling;
      p.delta_gamma = 0.3;
      p.delta_gamma_prime = 0.02;
      auto level = make_level(build_initial_mesh(g, 2.0, 24), p.delta_omega);
      FieldState st = interpolate_initial(level, to_functions({1.0, WProfile::exp_band, 1.0, 0.2}), p);
      MeshMotion motion = stationary_motion(level.mesh);
      AdvanceOptions opts;
      opts.mode = mode;
      const double before = surface_total(level, st.w) + surface_total(level, st.z);
      for (int n = 0; n < 10; ++n) {
        auto adv = advance_mesh(level.mesh, motion, g, st.time, p.tau, opts);
        MeshLevel next = make_level(std::move(adv.mesh), p.delta_omega);
        motion = std::move(adv.motion);
        st = imex_step(p, level, next, motion, st);
        level = std::move(next);
        const double after = surface_total(level, st.w) + surface_total(level, st.z);
        CHECK(std::abs(after - before) <= 1e-12 * before);
      }
    }
  }
}

TEST_CASE("explicit and linearized couplings agree as tau shrinks") {
  const MeshLevel level = make_level(build_initial_mesh(sphere_geometry(2), 2.0, 24), 1.0);
  const MeshMotion still = stationary_motion(level.mesh);
  double prev = 0.0;
  for (double tau : {1.25e-3, 6.25e-4}) {
    ParameterSet a;
    a.tau = tau;
    a.bulk_reaction = BulkReaction::explicit_load;
    ParameterSet b = a;
    b.bulk_reaction = BulkReaction::linearized;
    FieldState st = interpolate_initial(level, to_functions({}), a);
    const auto ua = imex_step(a, level, level, still, st).u;
    const auto ub = imex_step(b, level, level, still, st).u;
    double diff = 0.0;
    for (std::size_t i = 0; i < ua.size(); ++i) diff = std::max(diff, std::abs(ua[i] - ub[i]));
    if (prev > 0.0) CHECK(diff < 0.4 * prev);  // second order, still pre-asymptotic
    prev = diff;
  }
}

TEST_CASE("step planning") {
  CHECK(step_plan(0.1, 1.0) == std::pair<std::size_t, double>{10, 0.1});
  const auto [n, last] = step_plan(0.3, 1.0);
  CHECK(n == 4);
  CHECK(last == doctest::Approx(0.1));
  CHECK(step_plan(2e-3, 2e-3).first == 1);
}

TEST_CASE("run_simulation") {
  const auto g = paper_tanh_geometry(2);
  SUBCASE("T = tau gives one step and two outputs") {
    ParameterSet p;
    p.tau = p.t_end = 0.01;
    std::vector<std::size_t> levels;
    RunOptions opts;
    opts.output_every = 1;
    opts.on_output = [&](const Snapshot& s) { levels.push_back(s.step); };
    const auto r = run_simulation(p, g, build_initial_mesh(g, 2.0, 24), to_functions({}), opts);
    CHECK(r.steps == 1);
    CHECK(levels == std::vector<std::size_t>{0, 1});
    CHECK(r.records.size() == 2);
    CHECK(r.final_state.time == 0.01);
  }
  SUBCASE("truncated last step is recorded") {
    ParameterSet p;
    p.tau = 0.03;
    p.t_end = 0.1;
    const auto r = run_simulation(p, g, build_initial_mesh(g, 2.0, 16), to_functions({}));
    CHECK(r.last_step_truncated);
    CHECK(r.steps == 4);
    CHECK(r.final_state.time == 0.1);
    CHECK_FALSE(r.warnings.empty());
  }
  SUBCASE("static mesh without geometry") {
    ParameterSet p = small_params();
    const auto mesh = build_initial_mesh(g, 2.0, 16);
    const auto r = run_simulation(p, std::nullopt, mesh, to_functions({}));
    CHECK(r.records.size() == 6);
  }
  SUBCASE("full-limit preset on a coarse mesh") {
    auto pr = regime_preset("full_limit_dirichlet");
    pr.params.t_end = 0.1;
    const auto r = run_simulation(pr.params, pr.geometry, build_initial_mesh(g, 2.0, 48), to_functions(pr.initial));
    CHECK(r.records.size() == 101);
    for (const auto& rec : r.records) CHECK(std::isfinite(rec.combined_mass));
  }
  SUBCASE("windshield pair runs on a coarse mesh") {
    for (const char* name : {"windshield_on", "windshield_off"}) {
      auto pr = regime_preset(name);
      pr.params.tau = 1e-4;
      pr.params.t_end = 0.01;
      const auto r = run_simulation(pr.params, pr.geometry, build_initial_mesh(g, 2.0, 32), to_functions(pr.initial));
      CHECK(r.records.back().max_u_trace > 0.0);
    }
  }
  SUBCASE("deterministic") {
    ParameterSet p = small_params();
    p.velocity_mode = VelocityMode::zero;
    const auto a = run_simulation(p, g, build_initial_mesh(g, 2.0, 24), to_functions({}));
    const auto b = run_simulation(p, g, build_initial_mesh(g, 2.0, 24), to_functions({}));
    CHECK(a.final_state.u == b.final_state.u);
    CHECK(a.final_state.w == b.final_state.w);
  }
  SUBCASE("warnings for an unstable explicit configuration") {
    ParameterSet p;
    p.tau = 0.05;
    p.t_end = 0.2;
    p.delta_k = 1e-3;
    p.bulk_reaction = BulkReaction::explicit_load;
    std::vector<std::string> seen;
    RunOptions opts;
    opts.on_warning = [&](const std::string& w) { seen.push_back(w); };
    try {
      run_simulation(p, std::nullopt, build_initial_mesh(g, 2.0, 16), to_functions({}), opts);
    } catch (const StepFailure&) {
    }
    REQUIRE_FALSE(seen.empty());
    CHECK(seen.front().find("explicit reaction") != std::string::npos);
    bool negative = false;
    for (const auto& w : seen) negative = negative || w.find("reached") != std::string::npos;
    CHECK(negative);
  }
  SUBCASE("failures carry the step index") {
    const auto grow = sphere_geometry(2, 1.0, 4.0);
    ParameterSet p;
    p.tau = 0.05;
    p.t_end = 0.5;
    try {
      run_simulation(p, grow, build_initial_mesh(grow, 2.0, 16), to_functions({}));
      FAIL("expected a failure");
    } catch (const StepFailure& e) {
      CHECK(e.step() >= 1);
      CHECK(e.step() <= 6);
    }
  }
  SUBCASE("initial data follows the Dirichlet value") {
    ParameterSet p;
    p.outer_bc = {OuterBc::Kind::dirichlet, 0.25};
    const MeshLevel level = make_level(build_initial_mesh(g, 2.0, 16), 1.0);
    const FieldState st = interpolate_initial(level, to_functions({}), p);
    for (Index v = 0; v < level.mesh.num_vertices(); ++v) {
      CHECK(st.u[v] == (level.mesh.tags[v] == VertexTag::outer_boundary ? 0.25 : 1.0));
    }
  }
}
