#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lyapscope/neutral.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

// Finite weighted atom list with total mass <= 1. The mass is kept as an
// exact count/denominator pair so that complementary measures add to 1
// exactly; atom weights are 1/denominator each.
template <class Site>
struct EmpiricalMeasure {
  std::vector<std::pair<Site, double>> atoms;
  std::size_t support_count = 0;
  std::size_t denom = 1;

  double total_mass() const { return static_cast<double>(support_count) / denom; }
};

template <class Site>
EmpiricalMeasure<Site> empirical_measure(const std::vector<Site>& orbit,
                                         const std::vector<int>& index_set) {
  const std::size_t n = orbit.size();
  EmpiricalMeasure<Site> m;
  m.denom = n;
  m.atoms.reserve(index_set.size());
  for (int j : index_set) {
    if (j < 0 || static_cast<std::size_t>(j) >= n)
      throw InvalidArgument("empirical_measure: index out of range");
    m.atoms.push_back({orbit[j], 1.0 / n});
    ++m.support_count;
  }
  return m;
}

// m0 = empirical measure over the neutral set, m1 over its complement,
// beta = mass of m1.
template <class Site>
struct Decomposition {
  EmpiricalMeasure<Site> m0, m1;
  double beta = 0.0;
  BlockSet blocks;
};

template <class Site>
Decomposition<Site> decompose_from_blocks(const std::vector<Site>& orbit, BlockSet blocks) {
  const std::size_t n = orbit.size();
  std::vector<int> in, out;
  in.reserve(n);
  out.reserve(n);
  {
    auto it = blocks.blocks.begin();
    for (std::size_t j = 0; j < n; ++j) {
      while (it != blocks.blocks.end() && static_cast<std::int64_t>(j) >= it->last) ++it;
      const bool neutral =
          it != blocks.blocks.end() && static_cast<std::int64_t>(j) >= it->first;
      (neutral ? in : out).push_back(static_cast<int>(j));
    }
  }
  Decomposition<Site> d;
  d.m0 = empirical_measure(orbit, in);
  d.m1 = empirical_measure(orbit, out);
  d.beta = d.m1.total_mass();
  d.blocks = std::move(blocks);
  return d;
}

template <class Site>
Decomposition<Site> decompose(const std::vector<Site>& orbit, const std::vector<double>& phis,
                              const NeutralParams& params) {
  if (orbit.size() != phis.size())
    throw InvalidArgument("decompose: orbit and phi sequence lengths differ");
  return decompose_from_blocks(orbit, neutral_blocks(phis, params));
}

// Integral of phi against m0: (1/n) * sum of phi over the neutral indices.
// Along maximal blocks this lies in (-max|phi|/L - boundary/n, alpha].
template <class Site>
double zero_mean_residual(const Decomposition<Site>& decomp, const std::vector<double>& phis) {
  double s = 0.0;
  for (const auto& b : decomp.blocks.blocks)
    for (std::int64_t j = b.first; j < b.last; ++j) s += phis[static_cast<std::size_t>(j)];
  return phis.empty() ? 0.0 : s / static_cast<double>(phis.size());
}

// Exact 1-Wasserstein distance between two mass vectors binned on a circle of
// the given circumference: W1 = binwidth * min_c sum_i |prefix_i - c|, with
// the optimal c a median of the prefix differences.
inline double circular_w1(const std::vector<double>& a, const std::vector<double>& b,
                          double circumference) {
  if (a.size() != b.size() || a.empty())
    throw InvalidArgument("circular_w1: bin vectors must have equal positive length");
  std::vector<double> prefix(a.size());
  double run = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    run += a[i] - b[i];
    prefix[i] = run;
  }
  std::vector<double> sorted = prefix;
  std::sort(sorted.begin(), sorted.end());
  const double c = sorted[sorted.size() / 2];
  double s = 0.0;
  for (double d : prefix) s += std::fabs(d - c);
  return s * circumference / static_cast<double>(a.size());
}

// Transport diagnostic between two bundle measures: sum of the exact W1
// distances of the binned (u, v, theta) marginals. A lower bound for the full
// transport cost; used to compare decompositions across runs without
// claiming any particular weak* metrization.
inline double marginal_transport_distance(const EmpiricalMeasure<ProjPoint>& a,
                                          const EmpiricalMeasure<ProjPoint>& b, int bins = 32) {
  auto binned = [&](const EmpiricalMeasure<ProjPoint>& m, auto coord, double period) {
    std::vector<double> out(bins, 0.0);
    for (const auto& [site, w] : m.atoms) {
      const double t = coord(site) / period;
      int i = static_cast<int>((t - std::floor(t)) * bins);
      if (i >= bins) i = bins - 1;
      out[i] += w;
    }
    return out;
  };
  double total = 0.0;
  total += circular_w1(binned(a, [](const ProjPoint& p) { return p.x.x(); }, 1.0),
                       binned(b, [](const ProjPoint& p) { return p.x.x(); }, 1.0), 1.0);
  total += circular_w1(binned(a, [](const ProjPoint& p) { return p.x.y(); }, 1.0),
                       binned(b, [](const ProjPoint& p) { return p.x.y(); }, 1.0), 1.0);
  total += circular_w1(binned(a, [](const ProjPoint& p) { return p.theta; }, pi),
                       binned(b, [](const ProjPoint& p) { return p.theta; }, pi), pi);
  return total;
}

inline nlohmann::json decomposition_to_json(const auto& decomp,
                                            const auto& atom_writer) {
  nlohmann::json j;
  j["beta"] = decomp.beta;
  j["blocks"] = decomp.blocks.to_json();
  auto dump = [&](const auto& m) {
    nlohmann::json out;
    out["total_mass"] = m.total_mass();
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& [site, w] : m.atoms) atoms.push_back({{"site", atom_writer(site)}, {"w", w}});
    out["atoms"] = std::move(atoms);
    return out;
  };
  j["m0"] = dump(decomp.m0);
  j["m1"] = dump(decomp.m1);
  return j;
}

}  // namespace lyap
