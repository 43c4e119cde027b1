#pragma once

#include <cmath>
#include <vector>

#include "lyapscope/maps.hpp"
#include "lyapscope/projective.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

struct ExponentEstimate {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  int n_used = 0;
  double convergence_proxy = 0.0;  // |last-quarter mean - full mean| of phi
  bool converged = true;
};

struct ExponentOptions {
  double burn_fraction = 0.5;      // settle-in iterations before averaging, as a fraction of n
  double proxy_threshold = 0.05;   // flag when proxy > threshold * |lambda_plus|
};

// Generic default direction seed: golden-angle offset from 0, away from the
// axis-aligned degenerate seeds.
inline double golden_theta() { return normalize_theta(pi * 0.381966011250105); }

namespace detail {

struct BirkhoffResult {
  double mean;
  double proxy;
};

inline BirkhoffResult birkhoff_phi(const SurfaceMap& map, ProjPoint p, int n, int burn) {
  for (int k = 0; k < burn; ++k) p = lift_step(map, p).image;
  double total = 0.0, tail = 0.0;
  const int tail_start = n - n / 4;
  for (int k = 0; k < n; ++k) {
    LiftStep s = lift_step(map, p);
    total += s.phi;
    if (k >= tail_start) tail += s.phi;
    p = s.image;
  }
  const double mean = total / n;
  const int tail_len = n - tail_start;
  const double tail_mean = tail_len > 0 ? tail / tail_len : mean;
  return {mean, std::fabs(tail_mean - mean)};
}

}  // namespace detail

// Birkhoff average of phi along the lifted orbit. The direction settles onto
// the unstable line exponentially fast, so the average is taken after a
// settle-in segment of burn_fraction * n iterations. lambda_minus is obtained
// the same way for the inverse map, via lambda^-(f) = -lambda^+(f^-1).
inline ExponentEstimate top_exponent(const SurfaceMap& map, const Vec2& x0, double theta0, int n,
                                     const ExponentOptions& opt = {}) {
  if (n < 100) throw InvalidArgument("top_exponent: n must be >= 100");
  const int burn = static_cast<int>(opt.burn_fraction * n);
  const auto fwd = detail::birkhoff_phi(map, {x0, normalize_theta(theta0)}, n, burn);
  const SurfaceMap inv = map.inverse();
  const auto bwd =
      detail::birkhoff_phi(inv, {x0, normalize_theta(theta0 + 0.5)}, n, burn);

  ExponentEstimate est;
  est.lambda_plus = fwd.mean;
  est.lambda_minus = -bwd.mean;
  est.n_used = n;
  est.convergence_proxy = std::max(fwd.proxy, bwd.proxy);
  est.converged = est.convergence_proxy <= opt.proxy_threshold * std::fabs(est.lambda_plus);
  return est;
}

// a_n = (1/n) * mean over the sample of log ||Df^n_x||, n = 1..n_max. The
// infimum over n upper-estimates lambda^+ (subadditive ergodic theorem).
inline std::vector<double> subadditive_exponent(const SurfaceMap& map,
                                                const std::vector<Vec2>& sample, int n_max) {
  if (sample.empty()) throw InvalidArgument("subadditive_exponent: empty sample");
  std::vector<double> acc(n_max, 0.0);
  for (const Vec2& x0 : sample) {
    Mat2 m = Mat2::Identity();
    Vec2 x = x0;
    double logscale = 0.0;
    for (int k = 0; k < n_max; ++k) {
      m = map.jacobian(x) * m;
      const double s = m.cwiseAbs().maxCoeff();
      if (s > 0) {
        m /= s;
        logscale += std::log(s);
      }
      acc[k] += logscale + std::log(op_norm(m));
      x = map.apply(x);
    }
  }
  std::vector<double> out(n_max);
  for (int k = 0; k < n_max; ++k) out[k] = acc[k] / (sample.size() * (k + 1.0));
  return out;
}

struct OseledetsFrame {
  Vec2 x{0.0, 0.0};
  double theta_u = 0.0;
  double theta_s = 0.0;
};

// Push a generic direction forward n_settle steps from f^-n(x) to get E^+(x);
// likewise under f^-1 from f^n(x) for E^-(x). Fails (non-hyperbolic) when the
// two directions do not separate.
inline OseledetsFrame oseledets_directions(const SurfaceMap& map, const Vec2& x, int n_settle,
                                           double min_angle = 1e-4) {
  const SurfaceMap inv = map.inverse();

  Vec2 xb = x;
  for (int k = 0; k < n_settle; ++k) xb = inv.apply(xb);
  ProjPoint pu{xb, golden_theta()};
  for (int k = 0; k < n_settle; ++k) pu = lift_step(map, pu).image;

  Vec2 xf = x;
  for (int k = 0; k < n_settle; ++k) xf = map.apply(xf);
  ProjPoint ps{xf, golden_theta()};
  for (int k = 0; k < n_settle; ++k) ps = lift_step(inv, ps).image;

  if (fiber_dist(pu.theta, ps.theta) < min_angle)
    throw NumericError("oseledets_directions: non-hyperbolic (directions did not separate)");
  return {x, pu.theta, ps.theta};
}

// lambda^+ - a * (lambda^+ - lambda^-): the limit exponent when mass a of the
// unstable lifts escapes to the stable graph.
inline double defect_limit(double lambda_plus, double lambda_minus, double a) {
  if (lambda_plus < lambda_minus) throw InvalidArgument("defect_limit: lambda_plus < lambda_minus");
  if (a < 0.0 || a > 1.0) throw InvalidArgument("defect_limit: a must lie in [0,1]");
  return lambda_plus - a * (lambda_plus - lambda_minus);
}

// beta = 1 - a * (lambda^+ + |lambda^-|) / lambda^+, so that
// beta * lambda^+ = defect_limit identically.
inline double beta_from_mass(double lambda_plus, double lambda_minus, double a) {
  if (!(lambda_plus > 0.0)) throw InvalidArgument("beta_from_mass: lambda_plus must be positive");
  if (!(lambda_minus < 0.0)) throw InvalidArgument("beta_from_mass: lambda_minus must be negative");
  if (a < 0.0 || a > 1.0) throw InvalidArgument("beta_from_mass: a must lie in [0,1]");
  return 1.0 - a * (lambda_plus - lambda_minus) / lambda_plus;
}

}  // namespace lyap
