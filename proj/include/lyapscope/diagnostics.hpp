#pragma once

#include <cmath>
#include <vector>

#include "lyapscope/types.hpp"

namespace lyap {

struct MeasureReport {
  double h = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

struct SequenceReport {
  std::vector<MeasureReport> member_reports;  // over k
  MeasureReport limit_report;
  double beta = 0.0;
};

struct DiagnosticTols {
  double exponent = 0.02;  // absolute, for exponent identities
  double entropy = 0.1;    // for entropy inequalities
};

// "Limit" of a finite member sequence: mean of the last quarter.
inline double tail_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw InvalidArgument("tail_mean: empty sequence");
  const std::size_t q = std::max<std::size_t>(1, xs.size() / 4);
  double s = 0.0;
  for (std::size_t i = xs.size() - q; i < xs.size(); ++i) s += xs[i];
  return s / q;
}

// Young's formula: HD = h (1/lambda+ + 1/|lambda-|).
inline double hausdorff_dim(const MeasureReport& r) {
  if (!(r.lambda_plus > 0.0) || !(r.lambda_minus < 0.0))
    throw InvalidArgument("hausdorff_dim: report must be hyperbolic of saddle type");
  return r.h * (1.0 / r.lambda_plus + 1.0 / -r.lambda_minus);
}

// delta^u = h / lambda+.
inline double unstable_dim(const MeasureReport& r) {
  if (!(r.lambda_plus > 0.0)) throw InvalidArgument("unstable_dim: lambda_plus must be positive");
  return r.h / r.lambda_plus;
}

// P^u = h - lambda+.
inline double pressure(const MeasureReport& r) {
  if (!(r.lambda_plus > 0.0)) throw InvalidArgument("pressure: lambda_plus must be positive");
  return r.h - r.lambda_plus;
}

// SRB characterization: zero geometric pressure, equivalently unit unstable
// dimension.
inline bool srb_flag(const MeasureReport& r, double tol = 1e-3) {
  return std::fabs(pressure(r)) < tol;
}

struct IdentityVerdict {
  bool exponent_identity = false;  // lim lambda+ == beta * lambda+(mu1)
  bool entropy_inequality = false; // lim h - (dil_f + dil_finv)/(r-1) <= beta h(mu1)
  double exponent_residual = 0.0;
  double entropy_slack = 0.0;
};

// The two main-theorem relations evaluated over a finite sweep:
//   lim lambda+(f_k, nu_k) = beta lambda+(f, mu1)
//   lim h(f_k, nu_k) - (lambda(f) + lambda(f^-1)) / (r - 1) <= beta h(f, mu1)
inline IdentityVerdict main_identity_check(const SequenceReport& s, const MeasureReport& mu1,
                                           double r_smooth,
                                           std::pair<double, double> lambda_dilations,
                                           const DiagnosticTols& tols = {}) {
  if (r_smooth <= 1.0) throw InvalidArgument("main_identity_check: r must exceed 1");
  std::vector<double> lams, hs;
  for (const auto& m : s.member_reports) {
    lams.push_back(m.lambda_plus);
    hs.push_back(m.h);
  }
  const double lim_lambda = tail_mean(lams);
  const double lim_h = tail_mean(hs);

  IdentityVerdict v;
  v.exponent_residual = lim_lambda - s.beta * mu1.lambda_plus;
  v.exponent_identity = std::fabs(v.exponent_residual) < tols.exponent;
  const double penalty = (lambda_dilations.first + lambda_dilations.second) / (r_smooth - 1.0);
  v.entropy_slack = s.beta * mu1.h + tols.entropy - (lim_h - penalty);
  v.entropy_inequality = v.entropy_slack >= 0.0;
  return v;
}

// Variant bound: lambda+(mu) - lim lambda+ <= |lambda-(mu)| (1 - lim h / h(mu)).
inline bool variant_bound_check(const SequenceReport& s, const MeasureReport& mu,
                                const DiagnosticTols& tols = {}) {
  if (!(mu.h > 0.0)) throw InvalidArgument("variant_bound_check: limit entropy must be positive");
  std::vector<double> lams, hs;
  for (const auto& m : s.member_reports) {
    lams.push_back(m.lambda_plus);
    hs.push_back(m.h);
  }
  const double lhs = mu.lambda_plus - tail_mean(lams);
  const double rhs = std::fabs(mu.lambda_minus) * (1.0 - tail_mean(hs) / mu.h);
  return lhs <= rhs + tols.exponent;
}

// The unsymmetrized form of the same bound, with lambda+ in place of
// |lambda-|.
inline double gold_variant_rhs(const MeasureReport& mu, double lim_h) {
  return mu.lambda_plus * (1.0 - lim_h / mu.h);
}

}  // namespace lyap
