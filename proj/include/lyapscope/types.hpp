#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lyap {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;

// Configuration / input problems (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric failures: orbit escape, singular Jacobians, non-convergence
// (CLI exit code 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Torus coordinates and the flat metric.

inline double wrap_unit(double t) {
  double r = t - std::floor(t);
  return (r >= 1.0) ? 0.0 : r;  // guard against floor rounding at 1-ulp
}

inline Vec2 wrap_torus(const Vec2& p) { return {wrap_unit(p.x()), wrap_unit(p.y())}; }

// Signed coordinate difference wrapped to [-1/2, 1/2).
inline double wrap_diff(double d) {
  d -= std::round(d);
  return d;
}

inline double torus_dist(const Vec2& a, const Vec2& b) {
  const double du = wrap_diff(a.x() - b.x());
  const double dv = wrap_diff(a.y() - b.y());
  return std::hypot(du, dv);
}

inline double plane_dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// ---------------------------------------------------------------------------
// Projective fiber: a tangent line is an angle in [0, pi), and the fiber is a
// circle of perimeter pi.

inline double normalize_theta(double t) {
  double r = std::fmod(t, pi);
  if (r < 0) r += pi;
  return (r >= pi) ? 0.0 : r;
}

inline double fiber_dist(double t1, double t2) {
  double d = std::fabs(normalize_theta(t1) - normalize_theta(t2));
  return std::min(d, pi - d);
}

inline double theta_of(const Vec2& v) { return normalize_theta(std::atan2(v.y(), v.x())); }

inline Vec2 unit_of_theta(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Point of the projective tangent bundle: base point plus line direction.
struct ProjPoint {
  Vec2 x{0.0, 0.0};
  double theta = 0.0;
};

// Metric on the bundle: sqrt(d_M^2 + d_fiber^2).
inline double bundle_dist_torus(const ProjPoint& a, const ProjPoint& b) {
  return std::hypot(torus_dist(a.x, b.x), fiber_dist(a.theta, b.theta));
}

inline double bundle_dist_plane(const ProjPoint& a, const ProjPoint& b) {
  return std::hypot(plane_dist(a.x, b.x), fiber_dist(a.theta, b.theta));
}

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Spectral (operator) norm of a 2x2 matrix, in closed form.
inline double op_norm(const Mat2& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double q = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, q * q - 4.0 * det * det));
  return std::sqrt(0.5 * (q + disc));
}

inline double op_norm(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m);
  return svd.singularValues()(0);
}

}  // namespace lyap
