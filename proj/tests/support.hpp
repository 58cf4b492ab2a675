#pragma once

// Generators and independent brute-force oracles shared by the tests. None of
// the oracles call into the code they check.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "wordmeasure/words.hpp"

namespace wmtest {

using wm::Letter;
using wm::Word;

/// Every freely reduced word of length exactly n in F_r.
inline std::vector<Word> reduced_words(int n, int r) {
  std::vector<Word> out;
  std::vector<Letter> cur;
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.size()) == n) {
      out.emplace_back(cur, r);
      return;
    }
    for (int g = 1; g <= r; ++g)
      for (int s : {1, -1}) {
        const Letter l{g, s};
        if (!cur.empty() && cur.back() == l.inverse()) continue;
        cur.push_back(l);
        rec();
        cur.pop_back();
      }
  };
  rec();
  return out;
}

inline std::vector<Word> reduced_words_up_to(int n, int r) {
  std::vector<Word> out;
  for (int k = 0; k <= n; ++k)
    for (Word& w : reduced_words(k, r)) out.push_back(std::move(w));
  return out;
}

inline bool cyclically_reduced(const Word& w) {
  return w.size() < 2 || w.letters().front() != w.letters().back().inverse();
}

inline Word random_word(std::mt19937_64& rng, int max_len, int r) {
  std::uniform_int_distribution<int> len(0, max_len), gen(1, r), sign(0, 1);
  std::vector<Letter> ls;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) ls.push_back({gen(rng), sign(rng) ? 1 : -1});
  return Word(ls, r);
}

// ---------------------------------------------------------------------------
// Naive fringe: every set partition of the cycle on the letters of w, merged
// and folded by brute force, compared up to rooted labelled isomorphism.

struct NaiveGraph {
  int n = 1;
  std::set<std::tuple<int, int, int>> edges;  // (src, label, dst)
};

inline NaiveGraph naive_fold(int n, std::vector<std::tuple<int, int, int>> edges) {
  std::vector<int> cls(static_cast<std::size_t>(n));
  std::iota(cls.begin(), cls.end(), 0);
  auto relabel = [&](int from, int to) {
    for (int& c : cls)
      if (c == from) c = to;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < edges.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < edges.size() && !changed; ++j) {
        auto [s1, l1, d1] = edges[i];
        auto [s2, l2, d2] = edges[j];
        if (l1 != l2) continue;
        const int a1 = cls[static_cast<std::size_t>(s1)], a2 = cls[static_cast<std::size_t>(s2)];
        const int b1 = cls[static_cast<std::size_t>(d1)], b2 = cls[static_cast<std::size_t>(d2)];
        if (a1 == a2 && b1 != b2) {
          relabel(std::max(b1, b2), std::min(b1, b2));
          changed = true;
        } else if (b1 == b2 && a1 != a2) {
          relabel(std::max(a1, a2), std::min(a1, a2));
          changed = true;
        }
      }
  }
  std::set<std::tuple<int, int, int>> merged;
  for (auto [s, l, d] : edges) merged.insert({cls[static_cast<std::size_t>(s)], l, cls[static_cast<std::size_t>(d)]});
  // Canonical form: breadth-first order from the root class (0) over
  // (label, out before in).
  std::map<int, int> order;
  std::vector<int> queue{cls[0]};
  order[cls[0]] = 0;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int v = queue[q];
    std::vector<std::tuple<int, int, int>> nbrs;  // (label, dir, other)
    for (auto [s, l, d] : merged) {
      if (s == v) nbrs.push_back({l, 0, d});
      if (d == v) nbrs.push_back({l, 1, s});
    }
    std::sort(nbrs.begin(), nbrs.end());
    for (auto [l, dir, u] : nbrs) {
      (void)l;
      (void)dir;
      if (!order.count(u)) {
        order[u] = static_cast<int>(queue.size());
        queue.push_back(u);
      }
    }
  }
  NaiveGraph g;
  g.n = static_cast<int>(queue.size());
  for (auto [s, l, d] : merged) g.edges.insert({order[s], l, order[d]});
  return g;
}

inline bool operator<(const NaiveGraph& a, const NaiveGraph& b) {
  return std::tie(a.n, a.edges) < std::tie(b.n, b.edges);
}

inline bool operator==(const NaiveGraph& a, const NaiveGraph& b) { return a.n == b.n && a.edges == b.edges; }

/// Requires w cyclically reduced and nonempty. Returns quotients with the
/// (label-indexed) edge counts, deduplicated.
inline std::set<NaiveGraph> naive_fringe(const Word& w) {
  const int n = static_cast<int>(w.size());
  std::vector<std::tuple<int, int, int>> cycle;
  for (int i = 0; i < n; ++i) {
    const Letter l = w[static_cast<std::size_t>(i)];
    const int a = i, b = (i + 1) % n;
    if (l.sign > 0)
      cycle.push_back({a, l.gen, b});
    else
      cycle.push_back({b, l.gen, a});
  }
  std::set<NaiveGraph> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n) {
      std::vector<std::tuple<int, int, int>> q;
      for (auto [s, l, d] : cycle) q.push_back({rgs[static_cast<std::size_t>(s)], l, rgs[static_cast<std::size_t>(d)]});
      NaiveGraph g = naive_fold(blocks, q);
      out.insert(g);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      rgs[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  rgs[0] = 0;
  rec(1, 1);
  return out;
}

/// total / count in lowest terms.
inline mpq_class ratio(long long total, long long count) {
  mpq_class q(static_cast<long>(total), static_cast<unsigned long>(count));
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------------------
// Brute force over (C_2 wr S_N)^r with explicit integer signed permutation
// matrices, and over S_N^r with explicit permutations.

using IntMatrix = std::vector<std::vector<long long>>;

inline IntMatrix int_mul(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size();
  IntMatrix c(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline IntMatrix int_transpose(const IntMatrix& a) {
  IntMatrix t(a.size(), std::vector<long long>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline std::vector<IntMatrix> all_signed_permutation_matrices(int n) {
  std::vector<IntMatrix> out;
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    for (int mask = 0; mask < (1 << n); ++mask) {
      IntMatrix m(static_cast<std::size_t>(n), std::vector<long long>(static_cast<std::size_t>(n), 0));
      for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] = (mask >> i & 1) ? -1 : 1;
      out.push_back(m);
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Exact mean trace of w over all r-tuples of signed permutation matrices.
inline mpq_class brute_signed_trace(const Word& w, int n) {
  const auto group = all_signed_permutation_matrices(n);
  const int r = w.ambient_rank();
  std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
  long long total = 0, count = 0;
  for (;;) {
    IntMatrix acc(static_cast<std::size_t>(n), std::vector<long long>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i) acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    for (const Letter& l : w.letters()) {
      const IntMatrix& g = group[idx[static_cast<std::size_t>(l.gen - 1)]];
      acc = int_mul(acc, l.sign > 0 ? g : int_transpose(g));
    }
    for (int i = 0; i < n; ++i) total += acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    ++count;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == group.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return ratio(total, count);
}

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline std::vector<int> compose(const std::vector<int>& first, const std::vector<int>& then) {
  std::vector<int> out(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) out[i] = then[static_cast<std::size_t>(first[i])];
  return out;
}

inline std::vector<int> invert(const std::vector<int>& p) {
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return out;
}

/// The permutation w(sigma_1, ..., sigma_r), acting on points left to right.
inline std::vector<int> word_permutation(const Word& w, const std::vector<std::vector<int>>& sigmas, int n) {
  std::vector<int> acc(static_cast<std::size_t>(n));
  std::iota(acc.begin(), acc.end(), 0);
  for (const Letter& l : w.letters()) {
    const auto& s = sigmas[static_cast<std::size_t>(l.gen - 1)];
    acc = compose(acc, l.sign > 0 ? s : invert(s));
  }
  return acc;
}

inline int fixed_points(const std::vector<int>& p) {
  int c = 0;
  for (std::size_t i = 0; i < p.size(); ++i) c += p[i] == static_cast<int>(i);
  return c;
}

/// Calls visit(sigmas) for every r-tuple of permutations of n points.
template <typename Visit>
void for_each_permutation_tuple(int n, int r, Visit&& visit) {
  const auto perms = all_permutations(n);
  std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
  std::vector<std::vector<int>> sigmas(static_cast<std::size_t>(r));
  for (;;) {
    for (int i = 0; i < r; ++i) sigmas[static_cast<std::size_t>(i)] = perms[idx[static_cast<std::size_t>(i)]];
    visit(sigmas);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == perms.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
}

}  // namespace wmtest
