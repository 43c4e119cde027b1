// Acceptance suite: every criterion below prints one PASS/FAIL line with its
// runtime against the stated budget; the process exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lyapscope/runner.hpp"
#include "support/oracles.hpp"

using namespace lyap;
namespace fs = std::filesystem;

namespace {

const double kCatLambda = std::log((3.0 + std::sqrt(5.0)) / 2.0);

struct Harness {
  int failures = 0;

  void criterion(int id, const std::string& name, double budget_s,
                 const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool pass = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      pass = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      pass = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over budget");
    }
    std::printf("criterion %2d %-24s %s  %6.2fs (budget %gs)%s%s\n", id, name.c_str(),
                pass ? "PASS" : "FAIL", secs, budget_s, detail.empty() ? "" : "  -- ",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::vector<SurfaceMap> zoo() {
  Mat2 other;
  other << 1, 1, 1, 2;
  return {SurfaceMap::identity(), SurfaceMap::rotation(0.25, 0.125), SurfaceMap::cat(),
          SurfaceMap::torus_linear(other), SurfaceMap::perturbed_cat(0.05, 0.03)};
}

Vec2 henon_attractor_point(std::mt19937_64& rng) {
  const SurfaceMap h = SurfaceMap::henon();
  Vec2 x{0.0, 0.0};
  const int burn = 150 + static_cast<int>(rng() % 300);
  for (int k = 0; k < burn; ++k) x = h.apply(x);
  return x;
}

// ---------------------------------------------------------------- criteria

bool crit_cocycle_identity(std::string& detail) {
  std::mt19937_64 rng(20260810);
  const auto maps = zoo();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool use_henon = trial % 5 == 4;
    const SurfaceMap map = use_henon ? SurfaceMap::henon() : maps[trial % maps.size()];
    Vec2 x{uniform01(rng), uniform01(rng)};
    int n = 1 + static_cast<int>(rng() % 100);
    if (use_henon) {
      x = henon_attractor_point(rng);
      n = std::min(n, 60);
    }
    const double theta = pi * uniform01(rng);
    const double direct = oracle::log_growth_product(map, x, theta, n);
    worst = std::max(worst, std::fabs(cocycle_sum(map, {x, theta}, n) - direct));
  }
  detail = "max |cocycle - oracle| = " + fmt_double(worst);
  return worst <= 1e-9;
}

bool crit_cat_exponents(std::string& detail) {
  std::mt19937_64 rng(77);
  const SurfaceMap cat = SurfaceMap::cat();
  double worst_lp = 0.0, worst_sum = 0.0;
  for (int s = 0; s < 5; ++s) {
    const Vec2 x0{uniform01(rng), uniform01(rng)};
    const double theta0 = normalize_theta(golden_theta() + s * 0.37);
    const auto est = top_exponent(cat, x0, theta0, 200);
    worst_lp = std::max(worst_lp, std::fabs(est.lambda_plus - kCatLambda));
    worst_sum = std::max(worst_sum, std::fabs(est.lambda_plus + est.lambda_minus));
  }
  detail = "rate err " + fmt_double(worst_lp) + ", sum err " + fmt_double(worst_sum);
  return worst_lp <= 1e-6 && worst_sum <= 1e-9;
}

bool crit_example1(std::string& detail) {
  const int L = 5;
  for (auto variant : {Example1Variant::p, Example1Variant::q}) {
    for (int k : {10, 50, 120}) {
      for (const Rational alpha : {Rational(1, 5), Rational(1, 20)}) {
        const std::int64_t len = example1_block_length(k, alpha, L, variant);
        const auto d = limit_decomposition(variant, k, alpha, L);
        if (d.blocks.blocks.size() != 3) return false;
        for (int p = 0; p < 3; ++p) {
          if (d.blocks.blocks[p].first != 3 * static_cast<std::int64_t>(k) * p) return false;
          if (d.blocks.blocks[p].length() != len) return false;
        }
        const Rational tol = Rational(3) * (alpha + Rational(1, k));
        auto close = [&](const std::map<int, Rational>& m, int sym, const Rational& target) {
          auto it = m.find(sym);
          const Rational w = it == m.end() ? Rational(0) : it->second;
          const Rational diff = w - target;
          return -tol <= diff && diff <= tol;
        };
        bool ok;
        if (variant == Example1Variant::p) {
          ok = close(d.m0_weights, -2, Rational(1, 3)) && close(d.m0_weights, 2, Rational(1, 3)) &&
               close(d.m0_weights, 1, Rational(0)) && close(d.m1_weights, 1, Rational(1, 3));
        } else {
          ok = close(d.m0_weights, -2, Rational(1, 3)) && close(d.m0_weights, 1, Rational(1, 3)) &&
               close(d.m0_weights, 2, Rational(1, 6)) && close(d.m1_weights, 2, Rational(1, 6));
        }
        if (!ok) {
          detail = "marginal out of tolerance at k=" + std::to_string(k);
          return false;
        }
      }
    }
  }
  detail = "blocks exact, marginals within 3(alpha + 1/k)";
  return true;
}

bool crit_residual_bracket(std::string& detail) {
  struct Case {
    std::vector<double> phis;
    double alpha;
    int L;
  };
  std::vector<Case> cases;

  // symbolic decompositions across the Example 1 grid
  for (auto variant : {Example1Variant::p, Example1Variant::q}) {
    for (int k : {10, 50, 120}) {
      for (double alpha : {0.2, 0.05}) {
        const auto seq = repeat_word(example1_word(k, variant), 3);
        cases.push_back({std::vector<double>(seq.begin(), seq.end()), alpha, 5});
      }
    }
  }
  // smooth-map decompositions along lifted orbits
  std::mt19937_64 rng(31);
  auto smooth_case = [&](const SurfaceMap& map, const ProjPoint& p0, int n, double alpha, int L) {
    const auto orbit = lifted_orbit(map, p0, n);
    cases.push_back({orbit.phis, alpha, L});
  };
  smooth_case(SurfaceMap::identity(), {{0.3, 0.8}, 0.4}, 2000, 0.1, 5);
  smooth_case(SurfaceMap::rotation(0.327, 0.613), {{0.1, 0.9}, 1.2}, 2000, 0.1, 5);
  smooth_case(SurfaceMap::cat(), {{uniform01(rng), uniform01(rng)}, golden_theta()}, 4000, 0.3, 5);
  smooth_case(SurfaceMap::perturbed_cat(0.03, 0.02),
              {{uniform01(rng), uniform01(rng)}, golden_theta()}, 4000, 0.3, 5);
  {
    const SurfaceMap h = SurfaceMap::henon();
    ProjPoint p{henon_attractor_point(rng), golden_theta()};
    for (int k = 0; k < 100; ++k) p = lift_step(h, p).image;
    smooth_case(h, p, 4000, 0.1, 5);
  }

  for (const auto& c : cases) {
    const std::size_t n = c.phis.size();
    std::vector<int> sites(n);
    const auto d = decompose(sites, c.phis, NeutralParams{c.alpha, c.L});
    const double residual = zero_mean_residual(d, c.phis);
    double max_phi = 0.0;
    for (double phi : c.phis) max_phi = std::max(max_phi, std::fabs(phi));
    const double lo = -max_phi / c.L - 2.0 * max_phi * c.L / static_cast<double>(n);
    if (!(lo - 1e-12 <= residual && residual <= c.alpha + 1e-12)) {
      detail = "violated: residual " + fmt_double(residual) + " outside [" + fmt_double(lo) +
               ", " + fmt_double(c.alpha) + "]";
      return false;
    }
  }
  detail = std::to_string(cases.size()) + " decompositions within the bracket";
  return true;
}

bool crit_neutral_oracle(std::string& detail) {
  std::mt19937_64 rng(8675309);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 20 + static_cast<int>(rng() % 181);  // lengths up to 200
    std::vector<double> seq(n);
    for (auto& x : seq) x = -1.0 + 2.0 * uniform01(rng);
    for (double alpha : {0.1, 0.3, 0.7}) {
      for (int L : {1, 3, 10}) {
        const auto fast = neutral_blocks(seq, NeutralParams{alpha, L});
        const auto slow = oracle::brute_force_neutral_blocks(seq, alpha, L);
        if (!(fast.blocks == slow.blocks)) {
          detail = "mismatch at trial " + std::to_string(trial);
          return false;
        }
      }
    }
  }
  detail = "500 sequences x 9 parameter pairs, exact match";
  return true;
}

bool crit_symbolic_entropy(std::string& detail) {
  // full 3-shift: cylinder covers count exactly 3^n. The n = 1 query runs in
  // the big-ball rescan regime; n >= 2 queries share one pair table.
  const auto words = enumerate_words(full_shift_adjacency(3), 8);
  const auto cloud = words_to_cloud(words, 3);
  CoverEngine<Vec2> cover_eng(cloud, 0.15, 0.0, 2);
  CoverEngine<Vec2> sep_eng(cloud, 0.30, 0.0, 2);
  CoverTable table;
  std::int64_t expect = 1;
  for (int n = 1; n <= 8; ++n) {
    expect *= 3;
    const CoverCounts c = n == 1 ? bowen_cover(cloud, 1, 0.15)
                                 : CoverCounts{cover_eng.greedy_cover(n), sep_eng.max_separated(n)};
    if (c.cover != expect || c.packing != expect) {
      detail = "3-shift count mismatch at n=" + std::to_string(n);
      return false;
    }
    table.rows.push_back({n, 0.15, std::nan(""), std::nan(""), c.cover, c.packing});
  }
  const double rate3 = entropy_rate(table, 0.15);
  if (std::fabs(rate3 - std::log(3.0)) > 1e-12) {
    detail = "3-shift rate " + fmt_double(rate3);
    return false;
  }

  CoverTable gm;
  for (int n = 1; n <= 20; ++n) {
    const auto w = static_cast<std::int64_t>(sft_word_count(golden_mean_adjacency(), n));
    gm.rows.push_back({n, 0.2, std::nan(""), std::nan(""), w, w});
  }
  const double golden = std::log((1.0 + std::sqrt(5.0)) / 2.0);
  const double rate_gm = entropy_rate(gm, 0.2);
  detail = "3-shift rate exact, golden-mean err " + fmt_double(std::fabs(rate_gm - golden));
  return std::fabs(rate_gm - golden) <= 1e-3;
}

struct KatokOutput {
  double h_lo = 0.0;  // packing rate at the largest n
};
KatokOutput g_katok;

bool crit_katok_bracket(std::string& detail) {
  std::mt19937_64 rng(314159);
  const Vec2 x0{uniform01(rng), uniform01(rng)};
  const auto cloud = cloud_from_map(SurfaceMap::cat(), x0, 10000, 12);
  const double eps = 0.1, gamma = 0.9;
  CoverEngine<Vec2> cover_eng(cloud, eps, 0.0, 8);
  CoverEngine<Vec2> mass_eng(cloud, 2.0 * eps, 0.0, 8);

  const double band_lo = 0.5 * kCatLambda, band_hi = 1.3 * kCatLambda;
  std::string rates;
  for (int n = 8; n <= 12; ++n) {
    const std::int64_t cover = cover_eng.greedy_mass_cover(n, gamma);
    const double maxmass = mass_eng.max_ball_mass(n);
    const std::int64_t packing =
        static_cast<std::int64_t>(std::ceil(gamma / std::max(maxmass, 1e-300) - 1e-12));
    const double lo = std::log(static_cast<double>(packing)) / n;
    const double hi = std::log(static_cast<double>(cover)) / n;
    rates += " n=" + std::to_string(n) + ":[" + fmt_double(lo).substr(0, 5) + "," +
             fmt_double(hi).substr(0, 5) + "]";
    if (hi < band_lo || lo > band_hi) {
      detail = "bracket misses the band at n=" + std::to_string(n) + rates;
      return false;
    }
    if (n == 12) g_katok.h_lo = lo;
  }
  detail = "brackets intersect [0.5, 1.3] x exponent;" + rates;
  return true;
}

bool crit_curve_growth(std::string& detail) {
  const auto frame = oracle::eigen_frame(SurfaceMap::cat().jacobian({0, 0}));
  const Vec2 start{0.21, 0.34};
  const ParamCurve unstable = line_curve(start, start + 0.05 * unit_of_theta(frame.theta_u));
  const auto fam = admissible_family(unstable, SurfaceMap::cat(), 1, 0.1, 0.1, 16);
  const auto rates = fam.rates();
  for (int n = 8; n <= 16; ++n) {
    const double r = rates[n - 1];
    if (r < 0.8 * kCatLambda || r > 1.2 * kCatLambda) {
      detail = "cat rate at n=" + std::to_string(n) + " is " + fmt_double(r);
      return false;
    }
  }
  if (!entropy_reparam_bound(rates, g_katok.h_lo, 0.1)) {
    detail = "entropy lower bracket " + fmt_double(g_katok.h_lo) + " exceeds rate + 0.1";
    return false;
  }

  const ParamCurve small_seg = line_curve({0.2, 0.2}, {0.24, 0.23});
  for (const auto& map : {SurfaceMap::identity(), SurfaceMap::rotation(0.31, 0.17)}) {
    const auto f = admissible_family(small_seg, map, 1, 0.1, 0.1, 16);
    for (double r : f.rates()) {
      if (r > 0.05) {
        detail = "isometry rate " + fmt_double(r);
        return false;
      }
    }
  }
  detail = "cat rate in [0.8, 1.2] x exponent at n=8..16; h_lo " + fmt_double(g_katok.h_lo) +
           " respected; isometries flat";
  return true;
}

bool crit_lift_dilation(std::string& detail) {
  std::mt19937_64 rng(2718);
  std::vector<SurfaceMap> maps{SurfaceMap::cat()};
  for (int i = 0; i < 3; ++i)
    maps.push_back(
        SurfaceMap::perturbed_cat(0.01 + 0.03 * uniform01(rng), 0.01 + 0.03 * uniform01(rng)));
  const auto base_grid = unit_grid(10);
  const auto lift_grid = unit_grid(6);
  std::string margins;
  for (const auto& map : maps) {
    const int n = 24;
    const double fwd = asymptotic_dilation(map, n, base_grid);
    const double bwd = asymptotic_dilation(map.inverse(), n, base_grid);
    const double lifted = lift_asymptotic_dilation(map, n, lift_grid, 10);
    margins += " " + fmt_double(fwd + bwd + 0.05 - lifted).substr(0, 7);
    if (!(lifted <= fwd + bwd + 0.05)) {
      detail = "violated for " + map.id() + ": lift " + fmt_double(lifted) + " vs " +
               fmt_double(fwd + bwd);
      return false;
    }
  }
  detail = "slack margins:" + margins;
  return true;
}

bool crit_identity_controls(std::string& detail) {
  std::mt19937_64 rng(424242);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double lp = 0.05 + 2.0 * uniform01(rng);
    const double lm = -0.05 - 2.0 * uniform01(rng);
    const double a = uniform01(rng);
    worst = std::max(worst,
                     std::fabs(beta_from_mass(lp, lm, a) * lp - defect_limit(lp, lm, a)));
  }
  if (worst > 1e-12) {
    detail = "algebraic identity residual " + fmt_double(worst);
    return false;
  }

  const MeasureReport limit{0.96, 0.96, -0.96};
  SequenceReport good;
  for (int k = 0; k < 8; ++k) good.member_reports.push_back(limit);
  good.beta = 1.0;
  const auto ok = main_identity_check(good, limit, 4.0, {0.0, 0.0});
  SequenceReport bad = good;
  for (auto& m : bad.member_reports) m.lambda_plus += 10.0 * 0.02;
  const auto rejected = main_identity_check(bad, limit, 4.0, {0.0, 0.0});
  detail = "identity residual " + fmt_double(worst) + "; negative control rejected";
  return ok.exponent_identity && ok.entropy_inequality && !rejected.exponent_identity;
}

bool crit_dimension_formulas(std::string& detail) {
  const MeasureReport anosov{kCatLambda, kCatLambda, -kCatLambda};
  if (std::fabs(hausdorff_dim(anosov) - 2.0) > 1e-12) return false;
  if (std::fabs(unstable_dim(anosov) - 1.0) > 1e-12) return false;
  if (std::fabs(pressure(anosov)) > 1e-12) return false;
  if (!srb_flag(anosov)) return false;

  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const MeasureReport r{uniform01(rng), 0.1 + uniform01(rng), -0.1 - uniform01(rng)};
    const double lhs = hausdorff_dim(r);
    const double rhs = unstable_dim(r) + r.h / std::fabs(r.lambda_minus);
    if (std::fabs(lhs - rhs) > 1e-12) {
      detail = "HD identity residual " + fmt_double(lhs - rhs);
      return false;
    }
  }
  detail = "symmetric Anosov values and the HD identity hold";
  return true;
}

bool crit_determinism(std::string& detail) {
  const std::vector<nlohmann::json> configs = {
      {{"experiment", "exponents"},
       {"map", {{"kind", "torus-linear"}, {"params", {2, 1, 1, 1}}}},
       {"n", 200},
       {"points", 4},
       {"seed", 9}},
      {{"experiment", "neutral"},
       {"map", {{"kind", "perturbed-torus"}, {"params", {2, 1, 1, 1, 0.2, 0.1}}}},
       {"n", 600},
       {"alpha", {0.3, 0.9}},
       {"L", {2, 5}},
       {"seed", 5}},
      {{"experiment", "shift-example1"}, {"k", {10, 30}}, {"alpha", {"1/5"}}, {"L", 5}},
      {{"experiment", "curve-growth"},
       {"map", {{"kind", "torus-linear"}, {"params", {2, 1, 1, 1}}}},
       {"n", 8},
       {"seed", 3}},
      {{"experiment", "entropy"},
       {"map", {{"kind", "torus-linear"}, {"params", {2, 1, 1, 1}}}},
       {"points", 800},
       {"eps", {0.2, 0.1}},
       {"n", {2, 4, 6, 8}},
       {"seed", 1}},
      {{"experiment", "sweep-identity-check"},
       {"mode", "example1"},
       {"variant", "q"},
       {"k", {10, 30, 60}},
       {"alpha", "1/100"},
       {"L", 5}}};

  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
  };
  for (std::size_t ci = 0; ci < configs.size(); ++ci) {
    fs::path dirs[2];
    for (int r = 0; r < 2; ++r) {
      ExperimentConfig cfg = ExperimentConfig::from_json(configs[ci]);
      cfg.out_dir = fs::temp_directory_path() /
                    ("lyapscope_accept_det_" + std::to_string(ci) + "_" + std::to_string(r));
      fs::remove_all(cfg.out_dir);
      cfg.workers = r + 1;  // concurrency must not change the bytes
      run(cfg);
      dirs[r] = cfg.out_dir;
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string name = entry.path().filename().string();
      if (name == "manifest.json") continue;  // carries wall-clock timing
      if (slurp(entry.path()) != slurp(dirs[1] / name)) {
        detail = "artifact differs: config " + std::to_string(ci) + " file " + name;
        return false;
      }
    }
  }
  detail = std::to_string(configs.size()) + " configs, byte-identical artifacts across reruns";
  return true;
}

}  // namespace

int main() {
  Harness h;
  std::printf("lyapscope acceptance suite (%s)\n", kToolVersion);
  h.criterion(1, "cocycle-identity", 1.0, crit_cocycle_identity);
  h.criterion(2, "cat-exponents", 1.0, crit_cat_exponents);
  h.criterion(3, "example1-exactness", 5.0, crit_example1);
  h.criterion(4, "residual-bracket", 10.0, crit_residual_bracket);
  h.criterion(5, "neutral-oracle", 30.0, crit_neutral_oracle);
  h.criterion(6, "symbolic-entropy", 5.0, crit_symbolic_entropy);
  h.criterion(7, "katok-bracket", 60.0, crit_katok_bracket);
  h.criterion(8, "curve-growth", 60.0, crit_curve_growth);
  h.criterion(9, "lift-dilation", 30.0, crit_lift_dilation);
  h.criterion(10, "identity-controls", 1.0, crit_identity_controls);
  h.criterion(11, "dimension-formulas", 1.0, crit_dimension_formulas);
  h.criterion(12, "determinism", 120.0, crit_determinism);
  if (h.failures) {
    std::printf("%d criterion(s) FAILED\n", h.failures);
    return 1;
  }
  std::printf("all 12 criteria PASS\n");
  return 0;
}
