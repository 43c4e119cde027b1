#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lyapscope/rational.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

struct NeutralParams {
  double alpha = 0.0;
  int L = 1;
};

struct Interval {
  std::int64_t first = 0;  // inclusive
  std::int64_t last = 0;   // exclusive
  std::int64_t length() const { return last - first; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Maximal (alpha, L)-neutral blocks of a finite sequence, as disjoint,
// non-adjacent half-open intervals.
struct BlockSet {
  std::vector<Interval> blocks;

  std::int64_t total_length() const {
    std::int64_t s = 0;
    for (const auto& b : blocks) s += b.length();
    return s;
  }
  bool contains(std::int64_t i) const {
    for (const auto& b : blocks)
      if (i >= b.first && i < b.last) return true;
    return false;
  }
  std::vector<int> indices() const {
    std::vector<int> out;
    for (const auto& b : blocks)
      for (std::int64_t i = b.first; i < b.last; ++i) out.push_back(static_cast<int>(i));
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : blocks) arr.push_back({b.first, b.last});
    return arr;
  }
};

// Detection of the maximal (alpha, L)-neutral blocks: intervals [n0, n1) of
// length >= L whose partial sums from n0 satisfy
//     S(n) - S(n0) <= alpha * (n - n0)   for all n0 < n <= n1,
// and which cannot be extended inside [0, n). Ties (equality) are included.
//
// The scan computes, for each candidate start, the longest prefix satisfying
// the sum condition ("reach"). Any neutral interval starting inside a reach
// interval is contained in it (the union of two overlapping intervals with
// the prefix property again has the prefix property), so the scan may resume
// at the reach point. Worst case O(n * max block length).
//
// Works for any ordered scalar with +, *, and comparison; symbolic orbits use
// exact Rational, smooth orbits use double.
template <class T, class A>
BlockSet neutral_blocks(const std::vector<T>& seq, const A& alpha, int L) {
  if (!(A{} < alpha)) throw InvalidArgument("neutral_blocks: alpha must be positive");
  if (L < 1) throw InvalidArgument("neutral_blocks: L must be >= 1");
  const std::int64_t n = static_cast<std::int64_t>(seq.size());
  BlockSet out;
  std::int64_t n0 = 0;
  while (n0 < n) {
    A sum{};
    std::int64_t reach = n0;
    for (std::int64_t m = n0; m < n; ++m) {
      sum += A(seq[m]);
      if (!(sum <= alpha * A(m - n0 + 1))) break;
      reach = m + 1;
    }
    if (reach - n0 >= L) out.blocks.push_back({n0, reach});
    n0 = std::max(reach, n0 + 1);
  }
  return out;
}

inline BlockSet neutral_blocks(const std::vector<double>& seq, const NeutralParams& p) {
  return neutral_blocks<double, double>(seq, p.alpha, p.L);
}

// Indices j admitting some 0 <= a <= K such that the window [j-a, j]
// satisfies the neutrality partial-sum condition (anchored at its left end,
// ending at j). With T(m) = S(m) - alpha*m this is: exists s in [j-K, j] with
// T(s) >= max(T(s+1), ..., T(j+1)); scanned right-to-left in O(K) per j.
template <class T, class A>
std::vector<int> pliss_suffix_times(const std::vector<T>& seq, const A& alpha, int K) {
  if (K < 0) throw InvalidArgument("pliss_suffix_times: K must be >= 0");
  const int n = static_cast<int>(seq.size());
  std::vector<A> t(n + 1);
  t[0] = A{};
  for (int i = 0; i < n; ++i) t[i + 1] = t[i] + A(seq[i]) - alpha;
  std::vector<int> out;
  for (int j = 0; j < n; ++j) {
    // Failed positions satisfy T(s) < T(j+1), so the running maximum over
    // (s, j+1] stays at T(j+1) until the first success.
    const A bar = t[j + 1];
    bool ok = false;
    for (int s = j; s >= 0 && s >= j - K; --s) {
      if (bar <= t[s]) {
        ok = true;
        break;
      }
    }
    if (ok) out.push_back(j);
  }
  return out;
}

inline std::vector<int> pliss_suffix_times(const std::vector<double>& seq, double alpha, int K) {
  return pliss_suffix_times<double, double>(seq, alpha, K);
}

// Binary entropy H(t) = t log(1/t) + (1-t) log(1/(1-t)): the exponential
// growth rate of the number of index subsets with density t.
inline double binary_entropy(double t) {
  if (t < 0.0 || t > 1.0) throw InvalidArgument("binary_entropy: t must lie in [0,1]");
  double h = 0.0;
  if (t > 0.0) h += t * std::log(1.0 / t);
  if (t < 1.0) h += (1.0 - t) * std::log(1.0 / (1.0 - t));
  return h;
}

}  // namespace lyap
