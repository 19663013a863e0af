#include "bulksurf/geometry.hpp"

#include <cmath>
#include <string>

#include "bulksurf/errors.hpp"

namespace bulksurf {
namespace {

void check_point(const Vec3& x, double t) {
  if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2]) || !std::isfinite(t)) {
    throw InvalidParameter("level set evaluated at a non-finite point or time");
  }
  if (t < 0.0) throw InvalidParameter("level set evaluated at negative time");
}

Vec3 planar(const LevelSetGeometry& g, Vec3 x) {
  if (g.dim == 2) x[2] = 0.0;
  return x;
}

double param(const LevelSetGeometry& g, std::size_t i, double fallback) {
  return i < g.params.size() ? g.params[i] : fallback;
}

std::array<double, 10> monomials(const Vec3& x) {
  return {1.0, x[0], x[1], x[2], x[0] * x[0], x[1] * x[1], x[2] * x[2],
          x[0] * x[1], x[0] * x[2], x[1] * x[2]};
}

// phi without the scale factor or argument checks; x already planar.
double raw_phi(const LevelSetGeometry& g, const Vec3& x, double t) {
  switch (g.kind) {
    case GeometryKind::paper_tanh: {
      const double shift = param(g, 0, 0.7);
      const double rate = param(g, 1, 5.0);
      const double q = x[0] + std::tanh(rate * t) * (shift - x[1] * x[1]);
      return q * q + x[1] * x[1] + x[2] * x[2] - 1.0;
    }
    case GeometryKind::sphere: {
      const double r = param(g, 0, 1.0) + param(g, 1, 0.0) * t;
      const Vec3 d = x - Vec3{param(g, 2, 0.0), param(g, 3, 0.0), param(g, 4, 0.0)};
      return dot(d, d) - r * r;
    }
    case GeometryKind::custom: {
      const auto m = monomials(x);
      const bool timed = g.params.size() == 20;
      double value = 0.0;
      for (std::size_t k = 0; k < 10; ++k) {
        const double c = g.params[k] + (timed ? g.params[10 + k] * t : 0.0);
        value += c * m[k];
      }
      return value;
    }
  }
  return 0.0;
}

}  // namespace

LevelSetGeometry paper_tanh_geometry(int dim, double shift, double rate) {
  LevelSetGeometry g{dim, GeometryKind::paper_tanh, {shift, rate}, 1.0};
  validate(g);
  return g;
}

LevelSetGeometry sphere_geometry(int dim, double radius, double radial_speed, const Vec3& center) {
  LevelSetGeometry g{dim, GeometryKind::sphere, {radius, radial_speed, center[0], center[1], center[2]}, 1.0};
  validate(g);
  return g;
}

LevelSetGeometry custom_geometry(int dim, std::vector<double> coefficients) {
  LevelSetGeometry g{dim, GeometryKind::custom, std::move(coefficients), 1.0};
  validate(g);
  return g;
}

void validate(const LevelSetGeometry& g) {
  if (g.dim != 2 && g.dim != 3) {
    throw InvalidParameter("geometry dimension must be 2 or 3, got " + std::to_string(g.dim));
  }
  if (!(g.scale > 0.0) || !std::isfinite(g.scale)) throw InvalidParameter("geometry scale must be positive");
  for (double p : g.params) {
    if (!std::isfinite(p)) throw InvalidParameter("geometry coefficients must be finite");
  }
  switch (g.kind) {
    case GeometryKind::paper_tanh:
      if (g.params.size() > 2) throw InvalidParameter("paper_tanh takes at most 2 coefficients");
      break;
    case GeometryKind::sphere:
      if (g.params.size() > 5) throw InvalidParameter("sphere takes at most 5 coefficients");
      if (!(param(g, 0, 1.0) > 0.0)) throw InvalidParameter("sphere radius must be positive");
      break;
    case GeometryKind::custom:
      if (g.params.size() != 10 && g.params.size() != 20) {
        throw InvalidParameter("custom geometry takes 10 or 20 coefficients");
      }
      break;
  }
}

bool is_stationary(const LevelSetGeometry& g) {
  switch (g.kind) {
    case GeometryKind::paper_tanh:
      return param(g, 1, 5.0) == 0.0;
    case GeometryKind::sphere:
      return param(g, 1, 0.0) == 0.0;
    case GeometryKind::custom:
      if (g.params.size() == 10) return true;
      for (std::size_t k = 10; k < 20; ++k) {
        if (g.params[k] != 0.0) return false;
      }
      return true;
  }
  return true;
}

double eval_phi(const LevelSetGeometry& g, const Vec3& x, double t) {
  check_point(x, t);
  return g.scale * raw_phi(g, planar(g, x), t);
}

Vec3 grad_phi(const LevelSetGeometry& g, const Vec3& x_in, double t) {
  check_point(x_in, t);
  const Vec3 x = planar(g, x_in);
  Vec3 grad{0.0, 0.0, 0.0};
  switch (g.kind) {
    case GeometryKind::paper_tanh: {
      const double shift = param(g, 0, 0.7);
      const double s = std::tanh(param(g, 1, 5.0) * t);
      const double q = x[0] + s * (shift - x[1] * x[1]);
      grad = {2.0 * q, 2.0 * q * (-2.0 * s * x[1]) + 2.0 * x[1], 2.0 * x[2]};
      break;
    }
    case GeometryKind::sphere: {
      const Vec3 c{param(g, 2, 0.0), param(g, 3, 0.0), param(g, 4, 0.0)};
      grad = 2.0 * (x - c);
      break;
    }
    case GeometryKind::custom: {
      for (int d = 0; d < g.dim; ++d) {
        Vec3 xp = x;
        Vec3 xm = x;
        xp[d] += kFdStep;
        xm[d] -= kFdStep;
        grad[d] = (raw_phi(g, xp, t) - raw_phi(g, xm, t)) / (2.0 * kFdStep);
      }
      break;
    }
  }
  if (g.dim == 2) grad[2] = 0.0;
  return g.scale * grad;
}

double phi_t(const LevelSetGeometry& g, const Vec3& x_in, double t) {
  check_point(x_in, t);
  const Vec3 x = planar(g, x_in);
  double value = 0.0;
  switch (g.kind) {
    case GeometryKind::paper_tanh: {
      const double shift = param(g, 0, 0.7);
      const double rate = param(g, 1, 5.0);
      const double s = std::tanh(rate * t);
      const double q = x[0] + s * (shift - x[1] * x[1]);
      value = 2.0 * q * rate * (1.0 - s * s) * (shift - x[1] * x[1]);
      break;
    }
    case GeometryKind::sphere: {
      const double r0 = param(g, 0, 1.0);
      const double v = param(g, 1, 0.0);
      value = -2.0 * (r0 + v * t) * v;
      break;
    }
    case GeometryKind::custom:
      value = (raw_phi(g, x, t + kFdStep) - raw_phi(g, x, t - kFdStep)) / (2.0 * kFdStep);
      break;
  }
  return g.scale * value;
}

bool is_degenerate(const Vec3& grad) { return !(norm(grad) > kGradEps); }

Vec3 surface_normal(const LevelSetGeometry& g, const Vec3& x, double t) {
  const Vec3 grad = grad_phi(g, x, t);
  if (is_degenerate(grad)) throw DegenerateGradient("level-set gradient vanishes; normal undefined");
  return (-1.0 / norm(grad)) * grad;
}

double normal_velocity(const LevelSetGeometry& g, const Vec3& x, double t) {
  const Vec3 grad = grad_phi(g, x, t);
  if (is_degenerate(grad)) throw DegenerateGradient("level-set gradient vanishes; normal velocity undefined");
  return -phi_t(g, x, t) / norm(grad);
}

Vec3 interface_velocity(const LevelSetGeometry& g, const Vec3& x, double t) {
  const Vec3 grad = grad_phi(g, x, t);
  if (is_degenerate(grad)) throw DegenerateGradient("level-set gradient vanishes; velocity undefined");
  return (-phi_t(g, x, t) / dot(grad, grad)) * grad;
}

Vec3 project_to_surface(const LevelSetGeometry& g, const Vec3& x, double t) {
  check_point(x, t);
  Vec3 y = planar(g, x);
  const double tol = kProjTol * g.scale;
  double f = eval_phi(g, y, t);
  for (int it = 0; it < kMaxProjIters; ++it) {
    if (std::abs(f) <= tol) return y;
    const Vec3 grad = grad_phi(g, y, t);
    if (is_degenerate(grad)) throw NoConvergence("level-set projection hit a degenerate gradient");
    const Vec3 step = (-f / dot(grad, grad)) * grad;
    double damping = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving) {
      const Vec3 trial = y + damping * step;
      const double f_trial = eval_phi(g, trial, t);
      if (std::abs(f_trial) < std::abs(f)) {
        y = trial;
        f = f_trial;
        accepted = true;
        break;
      }
      damping *= 0.5;
    }
    if (!accepted) break;
  }
  if (std::abs(f) <= tol) return y;
  throw NoConvergence("level-set projection did not reach |phi| <= " + std::to_string(tol));
}

}  // namespace bulksurf
