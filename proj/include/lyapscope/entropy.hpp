#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "lyapscope/maps.hpp"
#include "lyapscope/projective.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

enum class BaseMetric { torus, plane };

// A weighted set of finite orbits (all of length n_max), stored contiguously.
template <class P>
struct OrbitCloud {
  std::vector<P> backing;
  std::vector<std::int64_t> starts;
  int n_max = 0;
  std::vector<double> weights;
  BaseMetric metric = BaseMetric::torus;

  std::size_t size() const { return starts.size(); }
  const P& at(std::size_t member, int step) const {
    return backing[static_cast<std::size_t>(starts[member] + step)];
  }
};

// Sliding windows over a single long orbit, weights 1/count.
inline OrbitCloud<Vec2> cloud_from_map(const SurfaceMap& map, const Vec2& x0, int count,
                                       int n_max, int burn = 200) {
  OrbitCloud<Vec2> c;
  c.metric = map.domain() == DomainKind::torus ? BaseMetric::torus : BaseMetric::plane;
  c.n_max = n_max;
  Vec2 x = x0;
  for (int k = 0; k < burn; ++k) x = map.apply(x);
  c.backing.reserve(count + n_max);
  for (int k = 0; k < count + n_max; ++k) {
    c.backing.push_back(x);
    x = map.apply(x);
  }
  c.starts.reserve(count);
  c.weights.assign(count, 1.0 / count);
  for (int k = 0; k < count; ++k) c.starts.push_back(k);
  return c;
}

inline OrbitCloud<ProjPoint> lifted_cloud_from_map(const SurfaceMap& map, const ProjPoint& p0,
                                                   int count, int n_max, int burn = 200) {
  OrbitCloud<ProjPoint> c;
  c.metric = map.domain() == DomainKind::torus ? BaseMetric::torus : BaseMetric::plane;
  c.n_max = n_max;
  ProjPoint p = p0;
  for (int k = 0; k < burn; ++k) p = lift_step(map, p).image;
  c.backing.reserve(count + n_max);
  for (int k = 0; k < count + n_max; ++k) {
    c.backing.push_back(p);
    p = lift_step(map, p).image;
  }
  c.starts.reserve(count);
  c.weights.assign(count, 1.0 / count);
  for (int k = 0; k < count; ++k) c.starts.push_back(k);
  return c;
}

namespace detail {

// Hot path: squared comparisons, branch-based torus wrap (inputs are
// differences of points in [0,1)^2).
inline double base_dist2(BaseMetric m, const Vec2& a, const Vec2& b) {
  double du = a.x() - b.x(), dv = a.y() - b.y();
  if (m == BaseMetric::torus) {
    if (du > 0.5)
      du -= 1.0;
    else if (du < -0.5)
      du += 1.0;
    if (dv > 0.5)
      dv -= 1.0;
    else if (dv < -0.5)
      dv += 1.0;
  }
  return du * du + dv * dv;
}

inline bool step_close(BaseMetric m, const Vec2& a, const Vec2& b, double eps, double) {
  return base_dist2(m, a, b) < eps * eps;
}

// Fibered condition: base distance < eps and bundle distance < eps_hat.
inline bool step_close(BaseMetric m, const ProjPoint& a, const ProjPoint& b, double eps,
                       double eps_hat) {
  const double b2 = base_dist2(m, a.x, b.x);
  if (!(b2 < eps * eps)) return false;
  const double f = fiber_dist(a.theta, b.theta);
  return b2 + f * f < eps_hat * eps_hat;
}

}  // namespace detail

// Greedy cover / packing machinery at fixed scales over one cloud. Pairwise
// separation times are materialized when they fit a budget (small-ball
// regime; lists are short); otherwise counts are recomputed per round
// (big-ball regime; few rounds). Both paths are deterministic.
template <class P>
class CoverEngine {
 public:
  // min_n: smallest n this engine will be queried with; pairs separating
  // earlier need not be materialized. In the big-ball regime (small n) the
  // table overflows the budget and greedy falls back to per-round rescans,
  // which is cheap there because the round count is small.
  CoverEngine(const OrbitCloud<P>& cloud, double eps, double eps_hat = 0.0, int min_n = 1,
              std::size_t pair_budget = 6'000'000)
      : cloud_(cloud), eps_(eps), eps_hat_(eps_hat), min_n_(std::max(min_n, 1)) {
    build_table(pair_budget);
  }

  // First step k < n_max at which the pair separates; n_max if never.
  int sep_time(std::size_t i, std::size_t j) const {
    for (int k = 0; k < cloud_.n_max; ++k)
      if (!detail::step_close(cloud_.metric, cloud_.at(i, k), cloud_.at(j, k), eps_, eps_hat_))
        return k;
    return cloud_.n_max;
  }

  // Size of a greedy cover of all members by (n, scales)-Bowen balls centered
  // at members.
  std::int64_t greedy_cover(int n) const { return greedy(n, 1.0 + 1e-12, nullptr); }

  // Greedy count of balls until the covered weight reaches gamma.
  std::int64_t greedy_mass_cover(int n, double gamma) const {
    if (!(gamma > 0.0 && gamma < 1.0))
      throw InvalidArgument("greedy_mass_cover: gamma must lie in (0,1)");
    return greedy(n, gamma, nullptr);
  }

  // Maximal (n, scales)-separated subset, greedily by member index.
  std::int64_t max_separated(int n) const {
    const std::size_t m = cloud_.size();
    std::vector<char> kept(m, 0);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < m; ++i) {
      bool free = true;
      if (has_table_) {
        for (const auto& [j, tau] : near_[i]) {
          if (tau >= n && kept[j]) {
            free = false;
            break;
          }
        }
      } else {
        for (std::size_t j = 0; j < i && free; ++j)
          if (kept[j] && sep_time(i, j) >= n) free = false;
      }
      if (free) {
        kept[i] = 1;
        ++count;
      }
    }
    return count;
  }

  // Largest weight of a single ball centered at a member.
  double max_ball_mass(int n) const {
    const std::size_t m = cloud_.size();
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double w = cloud_.weights[i];
      if (has_table_) {
        for (const auto& [j, tau] : near_[i])
          if (tau >= n) w += cloud_.weights[j];
      } else {
        for (std::size_t j = 0; j < m; ++j)
          if (j != i && sep_time(i, j) >= n) w += cloud_.weights[j];
      }
      best = std::max(best, w);
    }
    return best;
  }

 private:
  void build_table(std::size_t budget) {
    const std::size_t m = cloud_.size();
    near_.assign(m, {});
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < m && pairs <= budget; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const int tau = sep_time(i, j);
        if (tau >= min_n_) {
          near_[i].push_back({static_cast<std::int32_t>(j), static_cast<std::int32_t>(tau)});
          near_[j].push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(tau)});
          if (++pairs > budget) break;
        }
      }
    }
    has_table_ = pairs <= budget;
    if (!has_table_) near_.clear();
  }

  std::int64_t greedy(int n, double gamma, void*) const {
    const std::size_t m = cloud_.size();
    if (m == 0) return 0;
    double total = 0.0;
    for (double w : cloud_.weights) total += w;
    const double target = std::min(gamma, 1.0) * total;

    std::vector<char> covered(m, 0);
    double covered_mass = 0.0;
    std::int64_t count = 0;

    auto ball_mass = [&](std::size_t i) {
      double w = covered[i] ? 0.0 : cloud_.weights[i];
      if (has_table_) {
        for (const auto& [j, tau] : near_[i])
          if (tau >= n && !covered[j]) w += cloud_.weights[j];
      } else {
        for (std::size_t j = 0; j < m; ++j)
          if (j != i && !covered[j] && sep_time(i, j) >= n) w += cloud_.weights[j];
      }
      return w;
    };
    auto mark = [&](std::size_t i) {
      if (!covered[i]) {
        covered[i] = 1;
        covered_mass += cloud_.weights[i];
      }
      if (has_table_) {
        for (const auto& [j, tau] : near_[i])
          if (tau >= n && !covered[j]) {
            covered[j] = 1;
            covered_mass += cloud_.weights[j];
          }
      } else {
        for (std::size_t j = 0; j < m; ++j)
          if (j != i && !covered[j] && sep_time(i, j) >= n) {
            covered[j] = 1;
            covered_mass += cloud_.weights[j];
          }
      }
    };

    // lazy greedy: stale upper bounds on a max-heap, re-evaluated on pop;
    // ball masses only shrink, so a popped entry whose fresh mass still tops
    // the heap is a true argmax. Ties resolve to the smallest index.
    using Entry = std::pair<double, std::int64_t>;  // (mass, -index)
    std::priority_queue<Entry> heap;
    for (std::size_t i = 0; i < m; ++i)
      heap.push({ball_mass(i), -static_cast<std::int64_t>(i)});
    while (covered_mass < target && !heap.empty()) {
      auto [stale, negi] = heap.top();
      heap.pop();
      const std::size_t i = static_cast<std::size_t>(-negi);
      const double fresh = ball_mass(i);
      if (fresh <= 0.0) continue;
      if (!heap.empty() && fresh < heap.top().first) {
        heap.push({fresh, negi});
        continue;
      }
      mark(i);
      ++count;
    }
    return count;
  }

  const OrbitCloud<P>& cloud_;
  double eps_;
  double eps_hat_;
  int min_n_ = 1;
  bool has_table_ = false;
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> near_;
};

struct CoverCounts {
  std::int64_t cover = 0;    // greedy cover count: upper bound on the minimum
  std::int64_t packing = 0;  // maximal (n, 2*scales)-separated: lower bound
};

// Greedy (n, eps)-Bowen cover of the cloud plus the separated-set dual. The
// separated set is taken at scale 2*eps so its cardinality lower-bounds every
// (n, eps)-cover: an eps-ball has diameter < 2*eps.
inline CoverCounts bowen_cover(const OrbitCloud<Vec2>& cloud, int n, double eps) {
  if (n > cloud.n_max) throw InvalidArgument("bowen_cover: n exceeds stored orbit length");
  CoverEngine<Vec2> cover_eng(cloud, eps, 0.0, n);
  CoverEngine<Vec2> sep_eng(cloud, 2.0 * eps, 0.0, n);
  return {cover_eng.greedy_cover(n), sep_eng.max_separated(n)};
}

// Greedy count of Bowen balls (chosen by maximal uncovered mass) until the
// covered empirical mass reaches gamma. The packing lower bound counts
// gamma / (largest 2*eps-ball mass): any eps-ball lies inside a 2*eps-ball
// centered at a member.
inline CoverCounts katok_cover(const OrbitCloud<Vec2>& cloud, int n, double eps, double gamma) {
  if (n > cloud.n_max) throw InvalidArgument("katok_cover: n exceeds stored orbit length");
  CoverEngine<Vec2> cover_eng(cloud, eps, 0.0, n);
  CoverEngine<Vec2> mass_eng(cloud, 2.0 * eps, 0.0, n);
  const double m = mass_eng.max_ball_mass(n);
  return {cover_eng.greedy_mass_cover(n, gamma),
          static_cast<std::int64_t>(std::ceil(gamma / std::max(m, 1e-300) - 1e-12))};
}

// Fibered (n, eps, eps_hat)-Bowen cover of a projective cloud.
inline CoverCounts fibered_cover(const OrbitCloud<ProjPoint>& cloud, int n, double eps,
                                 double eps_hat) {
  if (n > cloud.n_max) throw InvalidArgument("fibered_cover: n exceeds stored orbit length");
  CoverEngine<ProjPoint> cover_eng(cloud, eps, eps_hat, n);
  CoverEngine<ProjPoint> sep_eng(cloud, 2.0 * eps, 2.0 * eps_hat, n);
  return {cover_eng.greedy_cover(n), sep_eng.max_separated(n)};
}

// ---------------------------------------------------------------------------
// Cover tables and rates.

struct CoverRow {
  int n = 0;
  double eps = 0.0;
  double eps_hat = std::nan("");  // nan: base (unfibered) cover
  double gamma = std::nan("");    // nan: full cover
  std::int64_t cover = 0;
  std::int64_t packing = 0;
};

struct CoverTable {
  std::vector<CoverRow> rows;
};

// Least-squares slope of log(count) against n over the largest-n half of the
// entries at the given eps.
inline double entropy_rate(const CoverTable& table, double eps_fixed, bool use_packing = false) {
  std::vector<std::pair<int, std::int64_t>> pts;
  for (const auto& r : table.rows)
    if (std::fabs(r.eps - eps_fixed) < 1e-12) pts.push_back({r.n, use_packing ? r.packing : r.cover});
  if (pts.size() < 4) throw InvalidArgument("entropy_rate: need at least 4 entries at fixed eps");
  std::sort(pts.begin(), pts.end());
  const std::size_t half = (pts.size() + 1) / 2;
  pts.erase(pts.begin(), pts.end() - half);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, c] : pts) {
    const double x = n, y = std::log(static_cast<double>(std::max<std::int64_t>(c, 1)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double denom = m * sxx - sx * sx;
  if (std::fabs(denom) < 1e-30) throw InvalidArgument("entropy_rate: degenerate n values");
  return (m * sxy - sx * sy) / denom;
}

// Essential supremum surrogate: max entropy over positive-weight components.
inline double essential_sup_entropy(const std::vector<double>& component_entropies,
                                    const std::vector<double>& weights) {
  if (component_entropies.size() != weights.size())
    throw InvalidArgument("essential_sup_entropy: length mismatch");
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw InvalidArgument("essential_sup_entropy: negative weight");
    if (weights[i] > 0.0) {
      best = any ? std::max(best, component_entropies[i]) : component_entropies[i];
      any = true;
    }
  }
  if (!any) throw InvalidArgument("essential_sup_entropy: all weights vanish");
  return best;
}

}  // namespace lyap
