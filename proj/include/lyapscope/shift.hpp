#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lyapscope/entropy.hpp"
#include "lyapscope/measures.hpp"
#include "lyapscope/neutral.hpp"
#include "lyapscope/rational.hpp"
#include "lyapscope/types.hpp"

namespace lyap {

// ---------------------------------------------------------------------------
// Example 1: the periodic words on {-2, +1, +2} with payoff phi(x) = x_0.

enum class Example1Variant { p, q };

// Finite alphabet with a per-symbol payoff, phi(x) = payoff(x_0).
struct WeightedAlphabet {
  std::vector<int> symbols;
  std::map<int, Rational> payoff;

  static WeightedAlphabet example1() {
    return {{-2, 1, 2}, {{-2, Rational(-2)}, {1, Rational(1)}, {2, Rational(2)}}};
  }

  std::vector<Rational> payoffs(const std::vector<int>& word) const {
    std::vector<Rational> out;
    out.reserve(word.size());
    for (int s : word) {
      const auto it = payoff.find(s);
      if (it == payoff.end()) throw InvalidArgument("WeightedAlphabet: unknown symbol");
      out.push_back(it->second);
    }
    return out;
  }
};

struct PeriodicWord {
  std::vector<int> letters;  // one period
};

// p: (-2)^k (+2)^k (+1)^k ; q: (-2)^k (+1)^k (+2)^k.
inline PeriodicWord example1_word(int k, Example1Variant variant) {
  if (k < 1) throw InvalidArgument("example1_word: k must be >= 1");
  PeriodicWord w;
  w.letters.reserve(3 * k);
  auto run = [&](int sym) {
    for (int i = 0; i < k; ++i) w.letters.push_back(sym);
  };
  run(-2);
  if (variant == Example1Variant::p) {
    run(+2);
    run(+1);
  } else {
    run(+1);
    run(+2);
  }
  return w;
}

inline std::vector<int> repeat_word(const PeriodicWord& w, int periods) {
  std::vector<int> s;
  s.reserve(w.letters.size() * periods);
  for (int p = 0; p < periods; ++p) s.insert(s.end(), w.letters.begin(), w.letters.end());
  return s;
}

// Closed-form tail length of the maximal neutral block:
//   p: l = floor(2a/(1-a) * k),  q: l = floor((2a+1)/(2-a) * k).
// Both closed forms describe the maximal blocks only while l < k, i.e.
// alpha < 1/3; beyond that neutrality chains across runs.
inline std::int64_t example1_ell(int k, const Rational& alpha, Example1Variant variant) {
  if (!(Rational(0) < alpha) || !(alpha < Rational(1, 3)))
    throw InvalidArgument("example1_ell: closed form requires 0 < alpha < 1/3");
  const Rational ratio = variant == Example1Variant::p
                             ? (Rational(2) * alpha) / (Rational(1) - alpha)
                             : (Rational(2) * alpha + Rational(1)) / (Rational(2) - alpha);
  return (ratio * Rational(k)).floor();
}

// Total length 2k + l of each maximal (alpha, L)-neutral block, in the regime
// where the closed form applies (alpha < 1/3, k >= L/2 so the block passes
// the length filter).
inline std::int64_t example1_block_length(int k, const Rational& alpha, int L,
                                          Example1Variant variant) {
  if (2 * k < L) throw InvalidArgument("example1_block_length: requires k >= L/2");
  return 2 * static_cast<std::int64_t>(k) + example1_ell(k, alpha, variant);
}

// Decomposition with exact rational symbol weights, computed by running the
// block detector on three exact periods.
struct SymbolDecomposition {
  std::map<int, Rational> m0_weights, m1_weights;
  Rational beta;
  BlockSet blocks;
  int orbit_length = 0;
};

inline SymbolDecomposition limit_decomposition(Example1Variant variant, int k,
                                               const Rational& alpha, int L) {
  const auto seq = repeat_word(example1_word(k, variant), 3);
  const auto values = WeightedAlphabet::example1().payoffs(seq);
  SymbolDecomposition d;
  d.blocks = neutral_blocks<Rational, Rational>(values, alpha, L);
  d.orbit_length = static_cast<int>(seq.size());
  const Rational unit(1, static_cast<std::int64_t>(seq.size()));
  std::int64_t inside = 0;
  {
    auto it = d.blocks.blocks.begin();
    for (std::size_t j = 0; j < seq.size(); ++j) {
      while (it != d.blocks.blocks.end() && static_cast<std::int64_t>(j) >= it->last) ++it;
      const bool neutral = it != d.blocks.blocks.end() && static_cast<std::int64_t>(j) >= it->first;
      auto& weights = neutral ? d.m0_weights : d.m1_weights;
      auto [pos, fresh] = weights.try_emplace(seq[j], Rational(0));
      pos->second += unit;
      if (neutral) ++inside;
    }
  }
  d.beta = Rational(static_cast<std::int64_t>(seq.size()) - inside,
                    static_cast<std::int64_t>(seq.size()));
  return d;
}

// Realize words over a finite alphabet as orbit codings on the torus: symbol
// i sits at ((i + 1/2)/|A|, 1/2), so distinct symbols are >= 1/|A| apart.
inline OrbitCloud<Vec2> words_to_cloud(const std::vector<std::vector<int>>& words,
                                       int alphabet_size) {
  OrbitCloud<Vec2> c;
  c.metric = BaseMetric::torus;
  if (words.empty()) return c;
  c.n_max = static_cast<int>(words[0].size());
  c.backing.reserve(words.size() * words[0].size());
  for (const auto& w : words) {
    c.starts.push_back(static_cast<std::int64_t>(c.backing.size()));
    for (int s : w) c.backing.push_back({(s + 0.5) / alphabet_size, 0.5});
  }
  c.weights.assign(words.size(), 1.0 / words.size());
  return c;
}

// ---------------------------------------------------------------------------
// Subshifts of finite type.

using Adjacency = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

inline Adjacency full_shift_adjacency(int symbols) {
  return Adjacency::Ones(symbols, symbols);
}

inline Adjacency golden_mean_adjacency() {
  Adjacency b(2, 2);
  b << 1, 1, 1, 0;
  return b;
}

inline bool strongly_connected(const Adjacency& b) {
  const int n = static_cast<int>(b.rows());
  auto reach = [&](bool transpose) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        const bool edge = transpose ? b(v, u) != 0 : b(u, v) != 0;
        if (edge && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    for (char s : seen)
      if (!s) return false;
    return true;
  };
  return reach(false) && reach(true);
}

// Number of admissible words of the given length (exact integer count).
inline std::uint64_t sft_word_count(const Adjacency& b, int length) {
  if (length < 1) throw InvalidArgument("sft_word_count: length must be >= 1");
  const int n = static_cast<int>(b.rows());
  std::vector<std::uint64_t> v(n, 1);
  for (int step = 1; step < length; ++step) {
    std::vector<std::uint64_t> next(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (b(i, j)) next[i] += v[j];
    v = next;
  }
  std::uint64_t total = 0;
  for (auto x : v) total += x;
  return total;
}

inline void enumerate_words_rec(const Adjacency& b, int length, std::vector<int>& cur,
                                std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == length) {
    out.push_back(cur);
    return;
  }
  const int n = static_cast<int>(b.rows());
  for (int s = 0; s < n; ++s) {
    if (!cur.empty() && !b(cur.back(), s)) continue;
    cur.push_back(s);
    enumerate_words_rec(b, length, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> enumerate_words(const Adjacency& b, int length) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate_words_rec(b, length, cur, out);
  return out;
}

// ---------------------------------------------------------------------------
// Markov measures.

struct MarkovMeasure {
  Eigen::MatrixXd transition;  // row-stochastic
  Eigen::VectorXd stationary;  // stationary * transition = stationary
};

inline Eigen::VectorXd stationary_of(const Eigen::MatrixXd& p, int iters = 20000) {
  const int n = static_cast<int>(p.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd next = p.transpose() * v;
    next /= next.sum();
    if ((next - v).cwiseAbs().maxCoeff() < 1e-15) return next;
    v = next;
  }
  return v;
}

inline MarkovMeasure make_markov(const Eigen::MatrixXd& transition) {
  const int n = static_cast<int>(transition.rows());
  for (int i = 0; i < n; ++i) {
    const double row = transition.row(i).sum();
    if (std::fabs(row - 1.0) > 1e-9)
      throw InvalidArgument("make_markov: transition rows must sum to 1");
    for (int j = 0; j < n; ++j)
      if (transition(i, j) < 0) throw InvalidArgument("make_markov: negative entry");
  }
  return {transition, stationary_of(transition)};
}

// Maximal-entropy Markov measure on an SFT: P_ij = B_ij r_j / (lambda r_i)
// with r the Perron right eigenvector of the adjacency matrix.
inline MarkovMeasure parry_measure(const Adjacency& b) {
  if (!strongly_connected(b)) throw InvalidArgument("parry_measure: graph must be transitive");
  const int n = static_cast<int>(b.rows());
  Eigen::MatrixXd bd = b.cast<double>();
  Eigen::VectorXd r = Eigen::VectorXd::Ones(n);
  double lambda = 1.0;
  for (int k = 0; k < 10000; ++k) {
    Eigen::VectorXd next = bd * r;
    lambda = next.maxCoeff();
    next /= lambda;
    if ((next - r).cwiseAbs().maxCoeff() < 1e-15) break;
    r = next;
  }
  Eigen::MatrixXd p(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = b(i, j) ? bd(i, j) * r(j) / (lambda * r(i)) : 0.0;
  // renormalize rows against eigenvector rounding
  for (int i = 0; i < n; ++i) p.row(i) /= p.row(i).sum();
  return make_markov(p);
}

// Entropy rate -sum_i pi_i sum_j P_ij log P_ij.
inline double markov_entropy(const MarkovMeasure& m) {
  double h = 0.0;
  for (int i = 0; i < m.transition.rows(); ++i)
    for (int j = 0; j < m.transition.cols(); ++j) {
      const double p = m.transition(i, j);
      if (p > 0) h -= m.stationary(i) * p * std::log(p);
    }
  return h;
}

// Convex-mix each transition row with the uniform row on the admissible
// successors at weight t, then restationarize. Fully supported on the graph
// for t > 0, hence ergodic; converges to the target weak* and in entropy as
// t -> 0.
inline MarkovMeasure approximate_in_entropy(const MarkovMeasure& target, const Adjacency& graph,
                                            double t) {
  if (t < 0.0 || t > 1.0) throw InvalidArgument("approximate_in_entropy: t must lie in [0,1]");
  if (!strongly_connected(graph))
    throw InvalidArgument("approximate_in_entropy: support graph must be transitive");
  if (t == 0.0) return target;
  const int n = static_cast<int>(graph.rows());
  Eigen::MatrixXd p = target.transition;
  for (int i = 0; i < n; ++i) {
    const int deg = graph.row(i).sum();
    if (deg == 0) throw InvalidArgument("approximate_in_entropy: dead-end state");
    for (int j = 0; j < n; ++j) {
      if (target.transition(i, j) > 0 && !graph(i, j))
        throw InvalidArgument("approximate_in_entropy: target not supported on the graph");
      p(i, j) = (1.0 - t) * target.transition(i, j) + (graph(i, j) ? t / deg : 0.0);
    }
  }
  return make_markov(p);
}

// Two-step cylinder weights pi_i P_ij, the finite-order weak* data.
inline Eigen::MatrixXd two_cylinder_weights(const MarkovMeasure& m) {
  Eigen::MatrixXd w = m.transition;
  for (int i = 0; i < w.rows(); ++i) w.row(i) *= m.stationary(i);
  return w;
}

}  // namespace lyap
