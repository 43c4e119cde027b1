#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lyapscope/config.hpp"
#include "lyapscope/csv.hpp"
#include "lyapscope/curves.hpp"
#include "lyapscope/diagnostics.hpp"
#include "lyapscope/entropy.hpp"
#include "lyapscope/exponents.hpp"
#include "lyapscope/maps.hpp"
#include "lyapscope/measures.hpp"
#include "lyapscope/neutral.hpp"
#include "lyapscope/parallel.hpp"
#include "lyapscope/projective.hpp"
#include "lyapscope/shift.hpp"
#include "lyapscope/svg.hpp"
#include "lyapscope/yomdin.hpp"

namespace lyap {

struct RunManifest {
  std::string config_hash;
  std::string tool_version;
  double wall_ms = 0.0;
  std::map<std::string, std::size_t> row_counts;  // per emitted artifact

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["wall_ms"] = wall_ms;
    j["rows"] = row_counts;
    return j;
  }
};

namespace run_detail {

struct Sink {
  std::filesystem::path dir;
  RunManifest* manifest;

  void csv(const std::string& name, const CsvWriter& w) const {
    write_text_atomic(dir / name, w.str());
    manifest->row_counts[name] = w.row_count();
  }
  void json(const std::string& name, const nlohmann::json& j) const {
    write_text_atomic(dir / name, j.dump(2) + "\n");
    manifest->row_counts[name] = j.size();
  }
  void text(const std::string& name, const std::string& body) const {
    write_text_atomic(dir / name, body);
    manifest->row_counts[name] = 1;
  }
};

inline SurfaceMap map_from_config(const nlohmann::json& cfg) {
  return SurfaceMap::from_json(cfg_field(cfg, "map"));
}

// --------------------------------------------------------------- exponents
inline void run_exponents(const ExperimentConfig& cfg, const Sink& sink) {
  const SurfaceMap map = map_from_config(cfg.raw);
  const int n = cfg_get<int>(cfg.raw, "n", 200);
  const int points = cfg_get<int>(cfg.raw, "points", 8);
  const double theta0 = cfg_get<double>(cfg.raw, "theta0", golden_theta());
  const bool require_convergence = cfg_get<bool>(cfg.raw, "require_convergence", false);
  ExponentOptions opt;
  opt.burn_fraction = cfg_get<double>(cfg.raw, "burn_fraction", opt.burn_fraction);
  opt.proxy_threshold = cfg_get<double>(cfg.raw, "proxy_threshold", opt.proxy_threshold);
  const std::string hash = cfg.hash();

  std::mt19937_64 rng(cfg.seed);
  std::vector<Vec2> seeds;
  for (int i = 0; i < points; ++i) seeds.push_back({uniform01(rng), uniform01(rng)});

  std::vector<ExponentEstimate> results(seeds.size());
  parallel_for(seeds.size(), cfg.workers, [&](std::size_t i) {
    results[i] = top_exponent(map, seeds[i], theta0, n, opt);
  });

  CsvWriter w({"config_hash", "map_id", "x0u", "x0v", "n", "lambda_plus", "lambda_minus", "sum",
               "proxy", "converged"});
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto& e = results[i];
    if (require_convergence && !e.converged)
      throw NumericError("exponents: estimate did not converge at x0 = (" +
                         fmt_double(seeds[i].x()) + ", " + fmt_double(seeds[i].y()) +
                         "), proxy " + fmt_double(e.convergence_proxy));
    w.row({hash, map.id(), seeds[i].x(), seeds[i].y(), std::int64_t{n}, e.lambda_plus,
           e.lambda_minus, e.lambda_plus + e.lambda_minus, e.convergence_proxy,
           std::int64_t{e.converged ? 1 : 0}});
  }
  sink.csv("exponents.csv", w);
}

// ----------------------------------------------------------------- entropy
inline void run_entropy(const ExperimentConfig& cfg, const Sink& sink) {
  const SurfaceMap map = map_from_config(cfg.raw);
  const int points = cfg_get<int>(cfg.raw, "points", 4000);
  const auto eps_grid = cfg_get<std::vector<double>>(cfg.raw, "eps", {0.2, 0.1});
  const auto n_grid = cfg_get<std::vector<int>>(cfg.raw, "n", {4, 6, 8, 10});
  const double gamma = cfg_get<double>(cfg.raw, "gamma", 0.9);
  const std::string hash = cfg.hash();

  int n_max = 1;
  for (int n : n_grid) n_max = std::max(n_max, n);
  std::mt19937_64 rng(cfg.seed);
  const Vec2 x0{uniform01(rng), uniform01(rng)};
  const auto cloud = cloud_from_map(map, x0, points, n_max);

  struct Cell {
    int n;
    double eps;
    CoverCounts counts;
  };
  std::vector<Cell> cells;
  for (double eps : eps_grid)
    for (int n : n_grid) cells.push_back({n, eps, {}});
  parallel_for(cells.size(), cfg.workers, [&](std::size_t i) {
    cells[i].counts = katok_cover(cloud, cells[i].n, cells[i].eps, gamma);
  });

  CoverTable table;
  CsvWriter w({"config_hash", "n", "eps", "eps_hat", "gamma", "cover", "packing"});
  for (const auto& c : cells) {
    table.rows.push_back({c.n, c.eps, std::nan(""), gamma, c.counts.cover, c.counts.packing});
    w.row({hash, std::int64_t{c.n}, c.eps, std::string{}, gamma, c.counts.cover,
           c.counts.packing});
  }
  sink.csv("cover_table.csv", w);

  CsvWriter rates({"config_hash", "eps", "rate_cover", "rate_packing"});
  for (double eps : eps_grid) {
    if (n_grid.size() >= 4)
      rates.row({hash, eps, entropy_rate(table, eps, false), entropy_rate(table, eps, true)});
  }
  sink.csv("rates.csv", rates);
}

// ----------------------------------------------------------------- neutral
inline void run_neutral(const ExperimentConfig& cfg, const Sink& sink) {
  const SurfaceMap map = map_from_config(cfg.raw);
  const int n = cfg_get<int>(cfg.raw, "n", 2000);
  const auto alphas = cfg_get<std::vector<double>>(cfg.raw, "alpha", {0.1, 0.3});
  const auto ls = cfg_get<std::vector<int>>(cfg.raw, "L", {3, 10});
  const std::string hash = cfg.hash();

  std::mt19937_64 rng(cfg.seed);
  const ProjPoint p0{{uniform01(rng), uniform01(rng)}, golden_theta()};
  const auto orbit = lifted_orbit(map, p0, n);

  std::vector<NeutralParams> grid;
  for (double alpha : alphas)
    for (int L : ls) grid.push_back({alpha, L});

  // cells are independent; results are collected by cell index
  std::vector<Decomposition<ProjPoint>> decs(grid.size());
  parallel_for(grid.size(), cfg.workers,
               [&](std::size_t i) { decs[i] = decompose(orbit.points, orbit.phis, grid[i]); });

  CsvWriter w({"config_hash", "alpha", "L", "blocks", "mass0", "beta", "residual", "max_abs_phi"});
  nlohmann::json cells = nlohmann::json::array();
  double max_phi = 0.0;
  for (double phi : orbit.phis) max_phi = std::max(max_phi, std::fabs(phi));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& d = decs[i];
    w.row({hash, grid[i].alpha, std::int64_t{grid[i].L}, std::int64_t(d.blocks.blocks.size()),
           d.m0.total_mass(), d.beta, zero_mean_residual(d, orbit.phis), max_phi});
    cells.push_back({{"alpha", grid[i].alpha},
                     {"L", grid[i].L},
                     {"beta", d.beta},
                     {"mass0", d.m0.total_mass()},
                     {"blocks", d.blocks.to_json()}});
  }
  // full atom-level decomposition for the first sweep cell
  if (!decs.empty())
    sink.json("decomposition.json", decomposition_to_json(decs.front(), [](const ProjPoint& p) {
                return nlohmann::json{p.x.x(), p.x.y(), p.theta};
              }));
  sink.csv("neutral.csv", w);
  sink.json("neutral.json", cells);

  // m0 stability across orbit lengths, as a marginal transport diagnostic
  if (cfg.raw.contains("n_compare")) {
    auto lens = cfg_require<std::vector<int>>(cfg.raw, "n_compare");
    std::sort(lens.begin(), lens.end());
    CsvWriter tw({"config_hash", "alpha", "L", "n_from", "n_to", "m0_transport", "m1_transport"});
    for (std::size_t i = 0; i + 1 < lens.size(); ++i) {
      if (lens[i] < 1 || lens[i + 1] > n) throw ConfigError("config: n_compare outside [1, n]");
      auto prefix = [&](int len) {
        const std::vector<ProjPoint> pts(orbit.points.begin(), orbit.points.begin() + len);
        const std::vector<double> phis(orbit.phis.begin(), orbit.phis.begin() + len);
        return decompose(pts, phis, grid.front());
      };
      const auto da = prefix(lens[i]);
      const auto db = prefix(lens[i + 1]);
      tw.row({hash, grid.front().alpha, std::int64_t{grid.front().L}, std::int64_t{lens[i]},
              std::int64_t{lens[i + 1]}, marginal_transport_distance(da.m0, db.m0),
              marginal_transport_distance(da.m1, db.m1)});
    }
    sink.csv("transport.csv", tw);
  }
}

// ---------------------------------------------------------- shift-example1
inline void run_shift_example1(const ExperimentConfig& cfg, const Sink& sink) {
  const auto variants = cfg_get<std::vector<std::string>>(cfg.raw, "variants", {"p", "q"});
  const auto k_grid = cfg_get<std::vector<int>>(cfg.raw, "k", {10, 50, 120});
  const int L = cfg_get<int>(cfg.raw, "L", 5);
  std::vector<Rational> alphas;
  if (cfg.raw.contains("alpha"))
    for (const auto& a : cfg.raw.at("alpha")) alphas.push_back(parse_rational(a, "alpha"));
  else
    alphas = {Rational(1, 5), Rational(1, 20)};
  const std::string hash = cfg.hash();

  CsvWriter w({"config_hash", "variant", "k", "alpha", "L", "ell_closed", "len_closed",
               "len_algorithmic", "match", "beta", "m0_minus2", "m0_plus1", "m0_plus2",
               "m1_minus2", "m1_plus1", "m1_plus2"});
  nlohmann::json exact = nlohmann::json::array();
  for (const std::string& vs : variants) {
    const Example1Variant variant = vs == "p" ? Example1Variant::p : Example1Variant::q;
    for (int k : k_grid) {
      for (const Rational& alpha : alphas) {
        const std::int64_t len_closed = example1_block_length(k, alpha, L, variant);
        const auto d = limit_decomposition(variant, k, alpha, L);
        const std::int64_t len_algo =
            d.blocks.blocks.empty() ? 0 : d.blocks.blocks.front().length();
        bool match = d.blocks.blocks.size() == 3;
        for (const auto& b : d.blocks.blocks) match = match && (b.length() == len_closed);
        auto weight = [&](const std::map<int, Rational>& m, int sym) {
          auto it = m.find(sym);
          return it == m.end() ? 0.0 : it->second.to_double();
        };
        w.row({hash, vs, std::int64_t{k}, alpha.str(), std::int64_t{L},
               example1_ell(k, alpha, variant), len_closed, len_algo,
               std::int64_t{match ? 1 : 0}, d.beta.to_double(), weight(d.m0_weights, -2),
               weight(d.m0_weights, 1), weight(d.m0_weights, 2), weight(d.m1_weights, -2),
               weight(d.m1_weights, 1), weight(d.m1_weights, 2)});
        nlohmann::json cell;
        cell["variant"] = vs;
        cell["k"] = k;
        cell["alpha"] = alpha.str();
        cell["beta"] = d.beta.str();
        cell["word"] = example1_word(k, variant).letters;
        for (const auto& [sym, wt] : d.m0_weights) cell["m0"][std::to_string(sym)] = wt.str();
        for (const auto& [sym, wt] : d.m1_weights) cell["m1"][std::to_string(sym)] = wt.str();
        exact.push_back(cell);
      }
    }
  }
  sink.csv("example1.csv", w);
  sink.json("example1.json", exact);
}

// ------------------------------------------------------------ curve-growth
inline void run_curve_growth(const ExperimentConfig& cfg, const Sink& sink) {
  const SurfaceMap map = map_from_config(cfg.raw);
  const double eps = cfg_get<double>(cfg.raw, "eps", 0.1);
  const double eps_hat = cfg_get<double>(cfg.raw, "eps_hat", 0.1);
  const int N = cfg_get<int>(cfg.raw, "N", 1);
  const int n = cfg_get<int>(cfg.raw, "n", 10);
  const double length = cfg_get<double>(cfg.raw, "curve_length", 0.05);
  const std::string hash = cfg.hash();

  std::mt19937_64 rng(cfg.seed);
  const Vec2 start{uniform01(rng), uniform01(rng)};
  double theta = golden_theta();
  if (map.kind() == "torus-linear" || map.kind() == "perturbed-torus") {
    // seed along the expanding direction when there is one
    try {
      theta = oseledets_directions(map, start, 40).theta_u;
    } catch (const NumericError&) {
    }
  }
  const ParamCurve curve = line_curve(start, start + length * unit_of_theta(theta));

  const auto fam = admissible_family(curve, map, N, eps, eps_hat, n);
  CsvWriter w({"config_hash", "n", "members", "rate"});
  const auto rates = fam.rates();
  for (std::size_t j = 1; j < fam.counts_per_step.size(); ++j)
    w.row({hash, std::int64_t{fam.admissible_times[j]},
           static_cast<std::int64_t>(fam.counts_per_step[j]), rates[j - 1]});
  sink.csv("curve_growth.csv", w);

  std::vector<SvgSeries> series(1);
  series[0].name = "rate";
  for (std::size_t j = 1; j < fam.counts_per_step.size(); ++j)
    series[0].points.push_back({static_cast<double>(fam.admissible_times[j]), rates[j - 1]});
  sink.text("curve_growth.svg", svg_line_chart(series, "reparametrization growth rate vs n"));
}

// --------------------------------------------------- sweep-identity-check
inline void run_sweep_identity(const ExperimentConfig& cfg, const Sink& sink) {
  const std::string mode = cfg_get<std::string>(cfg.raw, "mode", "example1");
  const std::string hash = cfg.hash();
  nlohmann::json verdict;
  verdict["config_hash"] = hash;
  CsvWriter w({"config_hash", "k", "lambda_plus", "h", "beta"});

  if (mode == "example1") {
    const std::string vs = cfg_get<std::string>(cfg.raw, "variant", "p");
    const Example1Variant variant = vs == "p" ? Example1Variant::p : Example1Variant::q;
    const auto k_grid = cfg_get<std::vector<int>>(cfg.raw, "k", {10, 30, 60, 120});
    const Rational alpha =
        cfg.raw.contains("alpha") ? parse_rational(cfg.raw.at("alpha"), "alpha") : Rational(1, 100);
    const int L = cfg_get<int>(cfg.raw, "L", 5);

    SequenceReport seq;
    for (int k : k_grid) {
      // periodic-orbit members: lambda+ is the payoff mean, entropy zero
      const auto word = example1_word(k, variant);
      double mean = 0.0;
      for (int s : word.letters) mean += s;
      mean /= static_cast<double>(word.letters.size());
      seq.member_reports.push_back({0.0, mean, 0.0});
      w.row({hash, std::int64_t{k}, mean, 0.0, 0.0});
    }
    const auto d = limit_decomposition(variant, k_grid.back(), alpha, L);
    seq.beta = d.beta.to_double();
    Rational m1_integral(0);
    for (const auto& [sym, wt] : d.m1_weights) m1_integral += Rational(sym) * wt;
    MeasureReport mu1;
    mu1.lambda_plus = d.beta == Rational(0) ? 0.0 : (m1_integral / d.beta).to_double();
    mu1.h = 0.0;
    seq.limit_report = mu1;

    const auto v = main_identity_check(seq, mu1, cfg_get<double>(cfg.raw, "r", 3.0), {0.0, 0.0});
    verdict["mode"] = "example1";
    verdict["variant"] = vs;
    verdict["beta"] = seq.beta;
    verdict["mu1_lambda_plus"] = mu1.lambda_plus;
    verdict["exponent_identity"] = v.exponent_identity;
    verdict["exponent_residual"] = v.exponent_residual;
    verdict["entropy_inequality"] = v.entropy_inequality;
  } else if (mode == "family") {
    const MapFamily family = MapFamily::from_json(cfg_field(cfg.raw, "family"));
    const auto k_grid = cfg_get<std::vector<int>>(cfg.raw, "k", {1, 2, 4, 8});
    const int n_exp = cfg_get<int>(cfg.raw, "n_exponent", 400);
    const int points = cfg_get<int>(cfg.raw, "points", 2500);
    const int n_cover = cfg_get<int>(cfg.raw, "n_cover", 8);
    const double eps = cfg_get<double>(cfg.raw, "eps", 0.1);
    const double gamma = cfg_get<double>(cfg.raw, "gamma", 0.9);
    const double r_smooth = cfg_get<double>(cfg.raw, "r", 3.0);

    std::mt19937_64 rng(cfg.seed);
    const Vec2 x0{uniform01(rng), uniform01(rng)};
    auto measure = [&](const SurfaceMap& m) {
      const auto est = top_exponent(m, x0, golden_theta(), n_exp);
      const auto cloud = cloud_from_map(m, x0, points, n_cover);
      const auto counts = katok_cover(cloud, n_cover, eps, gamma);
      const double h_lo = std::log(static_cast<double>(counts.packing)) / n_cover;
      const double h_hi = std::log(static_cast<double>(counts.cover)) / n_cover;
      return MeasureReport{0.5 * (h_lo + h_hi), est.lambda_plus, est.lambda_minus};
    };

    SequenceReport seq;
    std::vector<MeasureReport> member(k_grid.size());
    parallel_for(k_grid.size(), cfg.workers,
                 [&](std::size_t i) { member[i] = measure(family.member(k_grid[i])); });
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
      seq.member_reports.push_back(member[i]);
      w.row({hash, std::int64_t{k_grid[i]}, member[i].lambda_plus, member[i].h, 1.0});
    }
    const MeasureReport limit = measure(family.limit());
    seq.limit_report = limit;
    seq.beta = 1.0;  // members converge to the limit with no escaping mass

    const auto grid = unit_grid(8);
    const double dil_f = asymptotic_dilation(family.limit(), 20, grid);
    const double dil_b = asymptotic_dilation(family.limit().inverse(), 20, grid);
    DiagnosticTols tols;
    tols.entropy = 0.25;  // member entropies are desk-scale brackets
    const auto v = main_identity_check(seq, limit, r_smooth, {dil_f, dil_b}, tols);
    bool ruelle = true;
    for (const auto& m : seq.member_reports) ruelle = ruelle && m.h <= m.lambda_plus + 0.05;
    verdict["mode"] = "family";
    verdict["beta"] = 1.0;
    verdict["exponent_identity"] = v.exponent_identity;
    verdict["exponent_residual"] = v.exponent_residual;
    verdict["entropy_inequality"] = v.entropy_inequality;
    verdict["variant_bound"] = variant_bound_check(seq, limit);
    verdict["ruelle_gate"] = ruelle;
  } else {
    throw ConfigError("sweep-identity-check: unknown mode '" + mode + "'");
  }

  sink.csv("sweep.csv", w);
  sink.json("verdict.json", verdict);
}

}  // namespace run_detail

// Execute the configured experiment; artifacts and the manifest land in
// cfg.out_dir. Deterministic for fixed config and seed.
inline RunManifest run(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.out_dir);

  RunManifest manifest;
  manifest.config_hash = cfg.hash();
  manifest.tool_version = kToolVersion;
  run_detail::Sink sink{cfg.out_dir, &manifest};

  if (cfg.experiment == "exponents")
    run_detail::run_exponents(cfg, sink);
  else if (cfg.experiment == "entropy")
    run_detail::run_entropy(cfg, sink);
  else if (cfg.experiment == "neutral")
    run_detail::run_neutral(cfg, sink);
  else if (cfg.experiment == "shift-example1")
    run_detail::run_shift_example1(cfg, sink);
  else if (cfg.experiment == "curve-growth")
    run_detail::run_curve_growth(cfg, sink);
  else if (cfg.experiment == "sweep-identity-check")
    run_detail::run_sweep_identity(cfg, sink);
  else
    throw ConfigError("config: unknown experiment '" + cfg.experiment + "'");

  // config echo for provenance joins
  run_detail::Sink{cfg.out_dir, &manifest}.json("config.json", cfg.raw);

  manifest.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  write_text_atomic(cfg.out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

// ------------------------------------------------------------------ report
struct ReportResult {
  std::string text;
  std::string svg;
};

inline ReportResult report(const std::filesystem::path& run_dir) {
  namespace fs = std::filesystem;
  const fs::path mpath = run_dir / "manifest.json";
  std::ifstream mf(mpath);
  if (!mf) throw ConfigError("report: missing manifest at " + mpath.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(mf);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("report: corrupt manifest: " + std::string(e.what()));
  }

  std::string text;
  text += "run " + run_dir.string() + "\n";
  text += "  tool:   " + manifest.value("tool_version", std::string("?")) + "\n";
  text += "  config: " + manifest.value("config_hash", std::string("?")) + "\n";
  std::vector<SvgSeries> series;

  for (const auto& [name, rows] : manifest.at("rows").items()) {
    text += "  " + name + ": " + std::to_string(rows.get<std::size_t>()) + " rows\n";
    if (name == "verdict.json") {
      std::ifstream vf(run_dir / name);
      nlohmann::json v;
      if (vf && (vf >> v, true))
        for (const auto& [key, val] : v.items()) text += "    " + key + ": " + val.dump() + "\n";
      continue;
    }
    if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
    std::ifstream f(run_dir / name);
    if (!f) continue;
    std::string header;
    std::getline(f, header);
    text += "    " + header + "\n";
    std::string line;
    int shown = 0;
    SvgSeries s;
    s.name = name;
    while (std::getline(f, line) && !line.empty()) {
      if (shown < 12) {
        text += "    " + line + "\n";
        ++shown;
      }
      // chart the last column against the (n|k) column when present
      const auto last_comma = line.rfind(',');
      if (last_comma != std::string::npos) {
        try {
          const double y = std::stod(line.substr(last_comma + 1));
          s.points.push_back({static_cast<double>(s.points.size() + 1), y});
        } catch (const std::exception&) {
        }
      }
    }
    if (s.points.size() >= 2) series.push_back(std::move(s));
  }

  ReportResult out;
  out.text = text;
  out.svg = svg_line_chart(series, "run summary");
  write_text_atomic(run_dir / "report.svg", out.svg);
  return out;
}

}  // namespace lyap
