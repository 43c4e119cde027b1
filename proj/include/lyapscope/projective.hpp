#pragma once

#include <cmath>
#include <vector>

#include "lyapscope/maps.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

// One step of the canonical lift f^(x,E) = (f(x), Df_x E), together with
// phi(x,E) = log ||Df_x|_E||. Iterating and summing phi gives log ||Df^n|_E||,
// the subadditive cocycle of f written as an additive cocycle of the lift.
struct LiftStep {
  ProjPoint image;
  double phi;
};

inline LiftStep lift_step(const SurfaceMap& map, const ProjPoint& p) {
  const Mat2 j = map.jacobian(p.x);
  if (std::fabs(j.determinant()) < 1e-300)
    throw NumericError("lift_step: singular Jacobian at base point");
  const Vec2 w = j * unit_of_theta(p.theta);
  const double n = w.norm();
  if (!(n > 0.0)) throw NumericError("lift_step: direction collapsed");
  return {ProjPoint{map.apply(p.x), theta_of(w)}, std::log(n)};
}

inline double cocycle_sum(const SurfaceMap& map, ProjPoint p, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    LiftStep step = lift_step(map, p);
    s += step.phi;
    p = step.image;
  }
  return s;
}

// Lifted orbit p, f^(p), ..., f^^(n-1)(p) plus the phi value at each point.
struct LiftedOrbit {
  std::vector<ProjPoint> points;
  std::vector<double> phis;
};

inline LiftedOrbit lifted_orbit(const SurfaceMap& map, ProjPoint p, int n) {
  LiftedOrbit o;
  o.points.reserve(n);
  o.phis.reserve(n);
  for (int k = 0; k < n; ++k) {
    o.points.push_back(p);
    LiftStep step = lift_step(map, p);
    o.phis.push_back(step.phi);
    p = step.image;
  }
  return o;
}

inline std::vector<Vec2> orbit(const SurfaceMap& map, Vec2 x, int n) {
  std::vector<Vec2> o;
  o.reserve(n);
  for (int k = 0; k < n; ++k) {
    o.push_back(x);
    x = map.apply(x);
  }
  return o;
}

// Derivative of the chart representation (u, v, theta) |-> f^(u, v, theta).
// The base block is Df. With A = Df, w = (cos theta, sin theta), u = A w:
//   d(new theta)/d theta = det A / |u|^2,
//   d(new theta)/d x_i   = (u x (d_i A) w) / |u|^2,
// where (d_i A) w comes from the second-derivative tensor. These are the
// angle-chart form of the derivative of v |-> A v / |A v|.
inline Mat3 lift_jacobian(const SurfaceMap& map, const ProjPoint& p) {
  const Mat2 a = map.jacobian(p.x);
  const double det = a.determinant();
  if (std::fabs(det) < 1e-300) throw NumericError("lift_jacobian: singular Jacobian");
  const Hessians h = map.second_derivative(p.x);
  const Vec2 w = unit_of_theta(p.theta);
  const Vec2 u = a * w;
  const double n2 = u.squaredNorm();

  Mat3 out = Mat3::Zero();
  out.topLeftCorner<2, 2>() = a;
  for (int i = 0; i < 2; ++i) {
    // (d A / d x_i) w, component j = (H_j w)_i.
    const Vec2 dAw{(h[0] * w)(i), (h[1] * w)(i)};
    out(2, i) = cross2(u, dAw) / n2;
  }
  out(2, 2) = det / n2;
  return out;
}

// (1/n) log max over the grid of ||Df^n_x|| (operator norm). Finite-n
// surrogate for the asymptotic dilation; a finer grid never decreases it.
inline double asymptotic_dilation(const SurfaceMap& map, int n, const std::vector<Vec2>& grid) {
  if (n < 1) throw InvalidArgument("asymptotic_dilation: n must be >= 1");
  if (grid.empty()) throw InvalidArgument("asymptotic_dilation: empty grid");
  double best = -1e300;
  for (const Vec2& x0 : grid) {
    Mat2 m = Mat2::Identity();
    Vec2 x = x0;
    double logscale = 0.0;
    for (int k = 0; k < n; ++k) {
      m = map.jacobian(x) * m;
      const double s = op_norm(m);
      if (s > 0) {
        m /= s;
        logscale += std::log(s);
      }
      x = map.apply(x);
    }
    best = std::max(best, (logscale + std::log(op_norm(m))) / n);
  }
  return best;
}

inline std::vector<Vec2> unit_grid(int per_side) {
  std::vector<Vec2> g;
  g.reserve(static_cast<std::size_t>(per_side) * per_side);
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j)
      g.push_back({(i + 0.5) / per_side, (j + 0.5) / per_side});
  return g;
}

// Same surrogate for the lift, using products of the 3x3 chart derivative
// along lifted orbits over a (base grid) x (fiber grid) sample.
inline double lift_asymptotic_dilation(const SurfaceMap& map, int n, const std::vector<Vec2>& grid,
                                       int thetas) {
  if (n < 1 || thetas < 1) throw InvalidArgument("lift_asymptotic_dilation: bad arguments");
  double best = -1e300;
  for (const Vec2& x0 : grid) {
    for (int t = 0; t < thetas; ++t) {
      ProjPoint p{x0, normalize_theta(pi * (t + 0.5) / thetas)};
      Mat3 m = Mat3::Identity();
      double logscale = 0.0;
      for (int k = 0; k < n; ++k) {
        m = lift_jacobian(map, p) * m;
        const double s = m.cwiseAbs().maxCoeff();
        if (s > 0) {
          m /= s;
          logscale += std::log(s);
        }
        p = lift_step(map, p).image;
      }
      best = std::max(best, (logscale + std::log(op_norm(m))) / n);
    }
  }
  return best;
}

}  // namespace lyap
