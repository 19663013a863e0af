#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bulksurf/diagnostics.hpp"
#include "bulksurf/model.hpp"

namespace bulksurf {

struct StepReport {
  double g_integral = 0.0;  ///< 1^T M_surf^{n-1} I_h g^{n-1}
  SolveStats bulk;
  SolveStats w;
  SolveStats z;
};

/// One step of the scheme from `prev` to `next`. `motion` describes how the
/// mesh moved between the two levels. Solver errors propagate.
FieldState imex_step(const ParameterSet& p, const MeshLevel& prev, const MeshLevel& next, const MeshMotion& motion,
                     const FieldState& state, StepReport* report = nullptr);

struct Snapshot {
  std::size_t step;
  const MeshLevel& level;
  const FieldState& state;
};

struct RunOptions {
  double fb_threshold = 0.1;
  /// 0 disables snapshot output; otherwise every n-th level and the last one.
  std::size_t output_every = 0;
  std::function<void(const Snapshot&)> on_output;
  std::function<void(const DiagnosticsRecord&)> on_record;
  std::function<void(const std::string&)> on_warning;
};

struct RunResult {
  FieldState final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::string> warnings;
  std::size_t steps = 0;
  bool last_step_truncated = false;
  double last_tau = 0.0;
};

/// Number of steps for (tau, T) and the length of the last one.
std::pair<std::size_t, double> step_plan(double tau, double t_end);

/// Runs from t = 0 to p.t_end. Without a geometry the mesh stays fixed.
/// Any failure is rethrown as StepFailure carrying the step index.
RunResult run_simulation(const ParameterSet& p, const std::optional<LevelSetGeometry>& geometry,
                         SimplicialMesh initial_mesh, const InitialData& data, const RunOptions& opts = {});

}  // namespace bulksurf
