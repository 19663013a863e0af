#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "bulksurf/model.hpp"

namespace bulksurf {

struct DiagnosticsRecord {
  std::size_t step = 0;
  double time = 0.0;
  double mass_u = 0.0;         ///< 1^T M U, without the delta_omega weight
  double mass_w = 0.0;
  double mass_z = 0.0;
  double mass_wz = 0.0;
  double combined_mass = 0.0;  ///< delta_omega mass_u + mass_z
  double g_residual_cum = 0.0;
  double comp_gap = 0.0;
  double min_w = 0.0;
  double max_u_trace = 0.0;
  double fb_measure = 0.0;
};

struct Masses {
  double u = 0.0;
  double w = 0.0;
  double z = 0.0;
  double wz = 0.0;
  double combined = 0.0;
};

Masses compute_masses(const MeshLevel& level, const FieldState& state, const ParameterSet& p);

/// accumulator + tau 1^T M_surf I_h g(U, W) on the given level.
double g_residual(const MeshLevel& level, const FieldState& state, const ParameterSet& p, double tau,
                  double accumulator);

/// int over the surface of I_h min(U+, W+).
double complementarity_gap(const SurfaceView& s, std::span<const double> u_trace, std::span<const double> w);
double complementarity_gap(const CsrMatrix& surface_mass, std::span<const double> u_trace,
                           std::span<const double> w);

struct ThresholdCrossing {
  std::size_t facet = 0;
  std::size_t from = 0;     ///< local vertex indices of the crossed edge
  std::size_t to = 0;
  double parameter = 0.0;   ///< position along from -> to
  Vec3 point{};
};

struct FreeBoundary {
  std::vector<ThresholdCrossing> crossings;
  /// Pieces of the level curve {I_h W = threshold}: points in 2D, segments on surface triangles.
  std::vector<std::array<Vec3, 2>> segments;
  double measure = 0.0;  ///< length or area of {I_h W < threshold}
};

FreeBoundary extract_free_boundary(const SurfaceView& s, std::span<const double> w, double threshold);

struct PhysicalParameters {
  double length = 7.5e-6;           ///< L, m
  double ligand_scale = 1e-3;       ///< U, mol m^-3
  double receptor_scale = 2.3e-8;   ///< W, mol m^-2
  double complex_scale = 2.3e-8;    ///< Z, mol m^-2
  double d_omega = 1e-11;           ///< m^2 s^-1
  double d_gamma = 1e-15;
  double d_gamma_prime = 1e-15;
  double k_on = 1e3;                ///< m^3 mol^-1 s^-1
  double k_off = 5e-3;              ///< s^-1
  double time_scale = 5.6;          ///< S, s
};

struct DimensionlessGroups {
  double delta_omega = 0.0;
  double delta_gamma = 0.0;
  double delta_gamma_prime = 0.0;
  double delta_k = 0.0;
  double delta_k_prime_inv = 0.0;
  double mu = 0.0;
  double mu_prime = 0.0;
};

/// Throws InvalidParameter unless every field is positive and finite.
DimensionlessGroups nondimensionalize(const PhysicalParameters& phys);

/// A parameter sweep: each listed parameter is set to value^power.
struct Sweep {
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<double> values;
};

ParameterSet apply_sweep(ParameterSet p, const Sweep& sweep, double value);

struct RegimePreset {
  std::string name;
  ParameterSet params;
  LevelSetGeometry geometry;
  InitialDataSpec initial;
  double fb_threshold = 0.1;
  std::vector<Sweep> sweeps;
};

/// Throws UnknownPreset.
RegimePreset regime_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Record of one level. g_cum is carried in from the caller.
DiagnosticsRecord make_record(std::size_t step, const MeshLevel& level, const FieldState& state,
                              const ParameterSet& p, double g_cum, double fb_threshold);

}  // namespace bulksurf
