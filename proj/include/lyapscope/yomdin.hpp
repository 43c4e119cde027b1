#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lyapscope/curves.hpp"
#include "lyapscope/maps.hpp"
#include "lyapscope/projective.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

struct SubdividedPiece {
  Reparam reparam;       // relative to the subdivided curve's parameter
  ParamCurve image;      // refit of map^steps o curve o reparam
};

struct SubdivideOptions {
  int steps = 1;          // apply map^steps before measuring sizes
  int max_depth = 40;     // bisection levels before flagging non-convergence
  double fidelity_frac = 0.1;  // refit must track true image points to eps * this
};

// Dyadic bisection until every refit image piece has C^r size below
// (eps, eps_hat). Pieces are emitted left to right.
inline std::vector<SubdividedPiece> subdivide_to_size_pieces(const ParamCurve& curve,
                                                             const SurfaceMap& map, double eps,
                                                             double eps_hat,
                                                             const SubdivideOptions& opt = {}) {
  if (!(eps > 0.0) || !(eps_hat > 0.0))
    throw InvalidArgument("subdivide_to_size: scales must be positive");
  std::vector<SubdividedPiece> out;
  struct Item {
    double offset, scale;
    int depth;
  };
  std::vector<Item> stack{{0.0, 1.0, 0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    RefitResult refit = refit_image(map, curve, it.offset, it.scale, opt.steps);
    bool fits = false;
    if (refit.fidelity < opt.fidelity_frac * eps) {
      const CrSize size = cr_size(refit.curve);
      fits = size.below(eps, eps_hat);
    }
    if (fits) {
      out.push_back({{it.offset, it.scale}, std::move(refit.curve)});
      continue;
    }
    if (it.depth >= opt.max_depth)
      throw NumericError("subdivide_to_size: no convergence after 40 bisection levels");
    const double half = it.scale * 0.5;
    // push right first so the left half is processed first
    stack.push_back({it.offset + half, half, it.depth + 1});
    stack.push_back({it.offset, half, it.depth + 1});
  }
  return out;
}

inline std::vector<Reparam> subdivide_to_size(const ParamCurve& curve, const SurfaceMap& map,
                                              double eps, double eps_hat,
                                              const SubdivideOptions& opt = {}) {
  std::vector<Reparam> out;
  for (auto& p : subdivide_to_size_pieces(curve, map, eps, eps_hat, opt)) out.push_back(p.reparam);
  return out;
}

// Family of affine reparametrizations admissible up to time n: at every time
// in {0, N, 2N, ..., n} each member's image curve has C^r size below
// (eps, eps_hat). Built by subdividing every N steps and flattening the
// affine compositions.
struct AdmissibleFamily {
  std::vector<Reparam> reparams;
  std::vector<int> admissible_times;        // shared by every member
  std::vector<std::size_t> counts_per_step; // members alive at each admissible time
  double eps = 0.0, eps_hat = 0.0;
  int step_gap = 1;

  // (1/t_j) log |R at t_j| for j >= 1
  std::vector<double> rates() const {
    std::vector<double> r;
    for (std::size_t j = 1; j < counts_per_step.size(); ++j)
      r.push_back(std::log(static_cast<double>(counts_per_step[j])) / admissible_times[j]);
    return r;
  }
};

namespace detail {

struct FamilyBuilder {
  const SurfaceMap& map;
  double eps, eps_hat;
  int gap;
  int levels;
  SubdivideOptions opt;
  AdmissibleFamily* out;

  void walk(const Reparam& flattened, const ParamCurve& current, int level) {
    ++out->counts_per_step[level];
    if (level == levels) {
      out->reparams.push_back(flattened);
      return;
    }
    const auto pieces = subdivide_to_size_pieces(current, map, eps, eps_hat, opt);
    for (const auto& piece : pieces) walk(flattened.after(piece.reparam), piece.image, level + 1);
  }
};

}  // namespace detail

inline AdmissibleFamily admissible_family(const ParamCurve& curve, const SurfaceMap& map, int N,
                                          double eps, double eps_hat, int n) {
  if (N < 1 || n < 1) throw InvalidArgument("admissible_family: N and n must be >= 1");
  if (!cr_size(curve).below(eps, eps_hat))
    throw InvalidArgument("admissible_family: initial curve size must be below (eps, eps_hat)");
  const int levels = (n + N - 1) / N;  // pad n up to the N-grid

  AdmissibleFamily fam;
  fam.eps = eps;
  fam.eps_hat = eps_hat;
  fam.step_gap = N;
  fam.counts_per_step.assign(levels + 1, 0);
  for (int j = 0; j <= levels; ++j) fam.admissible_times.push_back(j * N);

  SubdivideOptions opt;
  opt.steps = N;
  detail::FamilyBuilder builder{map, eps, eps_hat, N, levels, opt, &fam};
  builder.walk({0.0, 1.0}, curve, 0);
  return fam;
}

// sup ||D f_hat|| over a sample grid of the bundle.
inline double lift_derivative_sup(const SurfaceMap& map, int base_per_side = 12, int thetas = 12) {
  double best = 1.0;  // the lift of a surjective map has ||D f_hat|| >= 1
  for (const Vec2& x : unit_grid(base_per_side))
    for (int t = 0; t < thetas; ++t)
      best = std::max(best, op_norm(lift_jacobian(map, {x, pi * (t + 0.5) / thetas})));
  return best;
}

struct FamilyCover {
  std::int64_t count = 0;   // cardinality of the constructed cover
  double bound = 0.0;       // 2 eps_hat* ||Df_hat||^N / min(eps, eps_hat) * |R|
  bool verified = false;    // every sampled lifted curve point lies in a ball
};

// Explicit fibered (n, eps, eps_hat)-Bowen cover of the lifted curve: centers
// are sigma_hat(psi(t')) over a rho-dense parameter net per member, with
// rho = min(eps, eps_hat) / (eps_hat* ||Df_hat||^N).
inline FamilyCover cover_from_family(const AdmissibleFamily& family, const ParamCurve& curve,
                                     const SurfaceMap& map, int n, double eps, double eps_hat,
                                     int verify_samples = 400) {
  const double big_l = std::max(lift_derivative_sup(map), 1.0);
  const double growth = std::pow(big_l, family.step_gap);
  const double rho = std::min(eps, eps_hat) / (family.eps_hat * growth);
  const std::int64_t net = std::max<std::int64_t>(2, static_cast<std::int64_t>(2.0 / rho));

  FamilyCover out;
  out.count = net * static_cast<std::int64_t>(family.reparams.size());
  out.bound = (2.0 * family.eps_hat * growth / std::min(eps, eps_hat)) *
              static_cast<double>(family.reparams.size());

  // membership check against the designed center of each sampled parameter
  std::vector<Reparam> sorted = family.reparams;
  std::sort(sorted.begin(), sorted.end(),
            [](const Reparam& a, const Reparam& b) { return a.offset < b.offset; });
  bool ok = true;
  for (int s = 0; s < verify_samples && ok; ++s) {
    const double t_orig = (s + 0.5) / verify_samples;
    auto it = std::upper_bound(sorted.begin(), sorted.end(), t_orig,
                               [](double v, const Reparam& r) { return v < r.offset; });
    if (it != sorted.begin()) --it;
    const Reparam piece = *it;
    const double t_local = std::clamp((t_orig - piece.offset) / piece.scale, 0.0, 1.0);
    const double spacing = 1.0 / static_cast<double>(net - 1);
    const double t_net = std::round(t_local / spacing) * spacing;

    ProjPoint a = curve.lift(piece(t_local));
    ProjPoint b = curve.lift(piece(std::min(t_net, 1.0)));
    for (int k = 0; k < n && ok; ++k) {
      if (!(map.dist(a.x, b.x) < eps && map.dist(a, b) < eps_hat)) ok = false;
      a = lift_step(map, a).image;
      b = lift_step(map, b).image;
    }
  }
  out.verified = ok;
  return out;
}

// Length(g^t o sigma o psi) < e^(eta t / 10) ||Dg^t_x|E|| Length(sigma o psi)
// at every admissible time, with (x, E) sampled from the piece's lifted
// image.
inline bool length_control_check(const AdmissibleFamily& family, const ParamCurve& curve,
                                 const SurfaceMap& map, double eta, int samples = 32) {
  if (!(eta > 0.0)) throw InvalidArgument("length_control_check: eta must be positive");
  for (const Reparam& psi : family.reparams) {
    std::vector<Vec2> pts(samples + 1);
    for (int i = 0; i <= samples; ++i) pts[i] = curve.point(psi(static_cast<double>(i) / samples));
    double base_len = 0.0;
    for (int i = 0; i < samples; ++i) base_len += (pts[i + 1] - pts[i]).norm();

    ProjPoint mid = curve.lift(psi(0.5));
    double log_growth = 0.0;
    int t = 0;
    for (std::size_t j = 1; j < family.admissible_times.size(); ++j) {
      const int target = family.admissible_times[j];
      for (; t < target; ++t) {
        const auto step = lift_step(map, mid);
        log_growth += step.phi;
        mid = step.image;
        for (auto& p : pts) p = map.apply_raw(p);
      }
      double len = 0.0;
      for (int i = 0; i < samples; ++i) len += (pts[i + 1] - pts[i]).norm();
      if (!(len < std::exp(eta * target / 10.0) * std::exp(log_growth) * base_len)) return false;
    }
  }
  return true;
}

// h <= liminf (1/n) log |R_n| as a numerical inequality: the entropy estimate
// must not exceed the smallest of the last-half rates plus the tolerance.
inline bool entropy_reparam_bound(const std::vector<double>& family_rates, double h_estimate,
                                  double tol = 0.1) {
  if (family_rates.empty()) throw InvalidArgument("entropy_reparam_bound: no rates");
  const std::size_t half = (family_rates.size() + 1) / 2;
  double lo = family_rates[family_rates.size() - half];
  for (std::size_t i = family_rates.size() - half; i < family_rates.size(); ++i)
    lo = std::min(lo, family_rates[i]);
  return h_estimate <= lo + tol;
}

}  // namespace lyap
