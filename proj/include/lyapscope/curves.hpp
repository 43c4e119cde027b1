#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "lyapscope/maps.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

struct Poly3 {
  std::array<double, 4> c{0, 0, 0, 0};  // c0 + c1 t + c2 t^2 + c3 t^3

  double eval(double t) const { return ((c[3] * t + c[2]) * t + c[1]) * t + c[0]; }
  double d1(double t) const { return (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1]; }
  double d2(double t) const { return 6.0 * c[3] * t + 2.0 * c[2]; }

  // exact coefficients of t |-> p(a + b t)
  Poly3 precompose_affine(double a, double b) const {
    Poly3 r;
    r.c[0] = ((c[3] * a + c[2]) * a + c[1]) * a + c[0];
    r.c[1] = b * ((3.0 * c[3] * a + 2.0 * c[2]) * a + c[1]);
    r.c[2] = b * b * (3.0 * c[3] * a + c[2]);
    r.c[3] = b * b * b * c[3];
    return r;
  }
};

// Cubic curve on [0,1] with the canonical lift derived from its derivative:
// sigma_hat(t) = (sigma(t), angle of sigma'(t)).
struct ParamCurve {
  Poly3 u, v;

  Vec2 point(double t) const { return {u.eval(t), v.eval(t)}; }
  Vec2 deriv(double t) const { return {u.d1(t), v.d1(t)}; }
  Vec2 deriv2(double t) const { return {u.d2(t), v.d2(t)}; }

  double theta(double t) const { return theta_of(deriv(t)); }
  ProjPoint lift(double t) const { return {point(t), theta(t)}; }

  // d theta / dt = (sigma' x sigma'') / |sigma'|^2
  double theta_rate(double t) const {
    const Vec2 d = deriv(t);
    const double n2 = d.squaredNorm();
    if (n2 < 1e-24) throw NumericError("theta_rate: irregular curve (vanishing derivative)");
    return cross2(d, deriv2(t)) / n2;
  }

  ParamCurve precompose(double offset, double scale) const {
    return {u.precompose_affine(offset, scale), v.precompose_affine(offset, scale)};
  }

  ParamCurve translated(const Vec2& d) const {
    ParamCurve r = *this;
    r.u.c[0] += d.x();
    r.v.c[0] += d.y();
    return r;
  }
};

inline ParamCurve line_curve(const Vec2& a, const Vec2& b) {
  ParamCurve c;
  c.u.c = {a.x(), b.x() - a.x(), 0.0, 0.0};
  c.v.c = {a.y(), b.y() - a.y(), 0.0, 0.0};
  return c;
}

// Non-constant affine reparametrization t |-> offset + scale * t of [0,1]
// into itself; compositions stay affine, so families flatten.
struct Reparam {
  double offset = 0.0;
  double scale = 1.0;

  double operator()(double t) const { return offset + scale * t; }

  // this(inner(t)): the flattening used when concatenating families
  Reparam after(const Reparam& inner) const {
    return {offset + scale * inner.offset, scale * inner.scale};
  }
};

// C^r sizes at r = 2: base = sampled max of (|sigma'|, |sigma''|), lift =
// sampled max of |sigma_hat'| = sqrt(|sigma'|^2 + theta_rate^2).
struct CrSize {
  double base = 0.0;
  double lift = 0.0;
  bool below(double eps, double eps_hat) const { return base < eps && lift < eps_hat; }
};

inline CrSize cr_size(const ParamCurve& c, int n_samples = 17) {
  CrSize s;
  for (int i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i) / (n_samples - 1);
    const Vec2 d = c.deriv(t);
    const double speed = d.norm();
    if (speed < 1e-12) throw NumericError("cr_size: irregular curve (vanishing derivative)");
    s.base = std::max({s.base, speed, c.deriv2(t).norm()});
    s.lift = std::max(s.lift, std::hypot(speed, c.theta_rate(t)));
  }
  return s;
}

namespace detail {

inline constexpr int kFitNodes = 8;

inline const Eigen::Matrix<double, 4, kFitNodes>& fit_pinv() {
  static const Eigen::Matrix<double, 4, kFitNodes> p = [] {
    Eigen::Matrix<double, kFitNodes, 4> m;
    for (int i = 0; i < kFitNodes; ++i) {
      const double t = static_cast<double>(i) / (kFitNodes - 1);
      m(i, 0) = 1.0;
      m(i, 1) = t;
      m(i, 2) = t * t;
      m(i, 3) = t * t * t;
    }
    return Eigen::Matrix<double, 4, kFitNodes>(
        (m.transpose() * m).inverse() * m.transpose());
  }();
  return p;
}

}  // namespace detail

// Least-squares cubic through samples at the fixed fit nodes i/7.
inline ParamCurve cubic_through(const std::array<Vec2, detail::kFitNodes>& pts) {
  Eigen::Matrix<double, detail::kFitNodes, 1> xs, ys;
  for (int i = 0; i < detail::kFitNodes; ++i) {
    xs(i) = pts[i].x();
    ys(i) = pts[i].y();
  }
  const auto& p = detail::fit_pinv();
  const Eigen::Vector4d cu = p * xs, cv = p * ys;
  ParamCurve c;
  for (int i = 0; i < 4; ++i) {
    c.u.c[i] = cu(i);
    c.v.c[i] = cv(i);
  }
  return c;
}

// Iterated image point in unwrapped coordinates (continuity across the
// fundamental domain; torus maps commute with integer translations).
inline Vec2 iterate_raw(const SurfaceMap& map, Vec2 x, int steps) {
  for (int k = 0; k < steps; ++k) x = map.apply_raw(x);
  return x;
}

struct RefitResult {
  ParamCurve curve;
  double fidelity = 0.0;  // max deviation from true image points at check nodes
};

// Cubic refit of map^steps o curve o (offset + scale * t), recentred so the
// base point lies in the fundamental domain.
inline RefitResult refit_image(const SurfaceMap& map, const ParamCurve& curve, double offset,
                               double scale, int steps) {
  std::array<Vec2, detail::kFitNodes> pts;
  for (int i = 0; i < detail::kFitNodes; ++i) {
    const double t = offset + scale * static_cast<double>(i) / (detail::kFitNodes - 1);
    pts[i] = iterate_raw(map, curve.point(t), steps);
  }
  Vec2 shift{0.0, 0.0};
  if (map.domain() == DomainKind::torus)
    shift = {-std::floor(pts[0].x()), -std::floor(pts[0].y())};
  for (auto& p : pts) p += shift;

  RefitResult r;
  r.curve = cubic_through(pts);
  for (int i = 0; i + 1 < detail::kFitNodes; ++i) {
    const double tm = (i + 0.5) / (detail::kFitNodes - 1);
    const double t = offset + scale * tm;
    const Vec2 truth = iterate_raw(map, curve.point(t), steps) + shift;
    r.fidelity = std::max(r.fidelity, (r.curve.point(tm) - truth).norm());
  }
  return r;
}

}  // namespace lyap
