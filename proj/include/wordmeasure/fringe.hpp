#pragma once

// The fringe [<w>, inf)_X: subgroups X-covered by <w>, i.e. the folded
// quotients of the core graph of <w> by vertex partitions.
//
// Partitions are enumerated as restricted-growth strings over the vertices
// (in canonical BFS order). A prefix is abandoned as soon as two edges with
// the same label leave, or enter, one block towards different blocks; once
// both endpoints of an edge are placed that conflict is permanent, so the
// pruning never loses a folded quotient. Every accepted partition is already
// folded, and the quotient morphism from a core graph is unique, so distinct
// accepted partitions give distinct subgroups; the result is still
// deduplicated by canonical key.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "wordmeasure/core_graph.hpp"
#include "wordmeasure/errors.hpp"
#include "wordmeasure/words.hpp"

namespace wm {

struct EnumerationOptions {
  /// Largest core graph (vertex count; |w| for a cyclically reduced word).
  int max_vertices = 16;
  /// Worker threads; results are identical for every value.
  unsigned threads = 1;

  /// Defaults overridden by WM_MAX_WORD_LENGTH when set.
  static EnumerationOptions from_environment() {
    EnumerationOptions o;
    if (const char* cap = std::getenv("WM_MAX_WORD_LENGTH")) {
      try {
        o.max_vertices = std::stoi(cap);
      } catch (const std::exception&) {
        throw InputError(std::string("WM_MAX_WORD_LENGTH is not an integer: ") + cap);
      }
    }
    return o;
  }
};

struct FringeElement {
  CoreGraph graph;
  TraversalProfile profile;
};

namespace detail {

class QuotientEnumerator {
 public:
  explicit QuotientEnumerator(const CoreGraph& g)
      : g_(g), n_(g.num_vertices()), r_(g.ambient_rank()), edges_at_(static_cast<std::size_t>(n_)) {
    for (int e = 0; e < g.num_edges(); ++e) {
      const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
      edges_at_[static_cast<std::size_t>(std::max(edge.src, edge.dst))].push_back(e);
    }
  }

  // Full sequential enumeration.
  std::vector<CoreGraph> run() {
    State s(n_, r_);
    std::vector<CoreGraph> out;
    if (place(s, 0, 0)) descend(s, 1, out);
    return out;
  }

  // Prefixes of length `depth` (block assignments of vertices 0..depth-1).
  std::vector<std::vector<int>> prefixes(int depth) {
    State s(n_, r_);
    std::vector<std::vector<int>> out;
    if (place(s, 0, 0)) collect(s, 1, depth, out);
    return out;
  }

  std::vector<CoreGraph> run_from(const std::vector<int>& prefix) {
    State s(n_, r_);
    for (int v = 0; v < static_cast<int>(prefix.size()); ++v)
      if (!place(s, v, prefix[static_cast<std::size_t>(v)])) return {};
    std::vector<CoreGraph> out;
    descend(s, static_cast<int>(prefix.size()), out);
    return out;
  }

  [[nodiscard]] int num_vertices() const { return n_; }

 private:
  struct State {
    State(int n, int r)
        : block(static_cast<std::size_t>(n), -1),
          out(static_cast<std::size_t>(n) * static_cast<std::size_t>(r), -1),
          in(static_cast<std::size_t>(n) * static_cast<std::size_t>(r), -1) {}
    std::vector<int> block;
    std::vector<int> out;  // [block * r + label-1] -> target block
    std::vector<int> in;   // [block * r + label-1] -> source block
    std::vector<std::size_t> undo_out;
    std::vector<std::size_t> undo_in;
    int num_blocks = 0;
  };

  [[nodiscard]] std::size_t slot(int b, int label) const {
    return static_cast<std::size_t>(b) * static_cast<std::size_t>(r_) + static_cast<std::size_t>(label - 1);
  }

  // Places vertex v in block b; on conflict leaves the state unchanged.
  bool place(State& s, int v, int b) {
    const std::size_t mark_out = s.undo_out.size();
    const std::size_t mark_in = s.undo_in.size();
    const int saved_blocks = s.num_blocks;
    s.block[static_cast<std::size_t>(v)] = b;
    if (b == s.num_blocks) ++s.num_blocks;
    for (int e : edges_at_[static_cast<std::size_t>(v)]) {
      const Edge& edge = g_.edges()[static_cast<std::size_t>(e)];
      const int sb = s.block[static_cast<std::size_t>(edge.src)];
      const int db = s.block[static_cast<std::size_t>(edge.dst)];
      const std::size_t os = slot(sb, edge.label);
      const std::size_t is = slot(db, edge.label);
      if ((s.out[os] >= 0 && s.out[os] != db) || (s.in[is] >= 0 && s.in[is] != sb)) {
        unplace(s, v, mark_out, mark_in, saved_blocks);
        return false;
      }
      if (s.out[os] < 0) {
        s.out[os] = db;
        s.undo_out.push_back(os);
      }
      if (s.in[is] < 0) {
        s.in[is] = sb;
        s.undo_in.push_back(is);
      }
    }
    return true;
  }

  void unplace(State& s, int v, std::size_t mark_out, std::size_t mark_in, int saved_blocks) {
    while (s.undo_out.size() > mark_out) {
      s.out[s.undo_out.back()] = -1;
      s.undo_out.pop_back();
    }
    while (s.undo_in.size() > mark_in) {
      s.in[s.undo_in.back()] = -1;
      s.undo_in.pop_back();
    }
    s.block[static_cast<std::size_t>(v)] = -1;
    s.num_blocks = saved_blocks;
  }

  // A block forced on v by an already-determined transition, or -1.
  int forced_block(const State& s, int v) const {
    for (int e : edges_at_[static_cast<std::size_t>(v)]) {
      const Edge& edge = g_.edges()[static_cast<std::size_t>(e)];
      if (edge.dst == v && edge.src != v) {
        const int t = s.out[slot(s.block[static_cast<std::size_t>(edge.src)], edge.label)];
        if (t >= 0) return t;
      } else if (edge.src == v && edge.dst != v) {
        const int t = s.in[slot(s.block[static_cast<std::size_t>(edge.dst)], edge.label)];
        if (t >= 0) return t;
      }
    }
    return -1;
  }

  template <typename Visit>
  void branch(State& s, int v, Visit&& visit) {
    const std::size_t mark_out = s.undo_out.size();
    const std::size_t mark_in = s.undo_in.size();
    const int saved_blocks = s.num_blocks;
    const int forced = forced_block(s, v);
    const int lo = forced >= 0 ? forced : 0;
    const int hi = forced >= 0 ? forced : s.num_blocks;
    for (int b = lo; b <= hi; ++b) {
      if (!place(s, v, b)) continue;
      visit();
      unplace(s, v, mark_out, mark_in, saved_blocks);
    }
  }

  void descend(State& s, int v, std::vector<CoreGraph>& out) {
    if (v == n_) {
      out.push_back(quotient(s));
      return;
    }
    branch(s, v, [&] { descend(s, v + 1, out); });
  }

  void collect(State& s, int v, int depth, std::vector<std::vector<int>>& out) {
    if (v == depth) {
      out.emplace_back(s.block.begin(), s.block.begin() + depth);
      return;
    }
    branch(s, v, [&] { collect(s, v + 1, depth, out); });
  }

  CoreGraph quotient(const State& s) const {
    PreGraph pre;
    pre.num_vertices = s.num_blocks;
    pre.ambient_rank = r_;
    pre.edges.reserve(g_.edges().size());
    for (const Edge& e : g_.edges())
      pre.edges.push_back({s.block[static_cast<std::size_t>(e.src)], s.block[static_cast<std::size_t>(e.dst)], e.label});
    return fold(pre);
  }

  const CoreGraph& g_;
  int n_;
  int r_;
  std::vector<std::vector<int>> edges_at_;
};

inline std::vector<CoreGraph> sorted_unique(std::vector<CoreGraph> graphs) {
  std::vector<std::pair<std::string, std::size_t>> keyed;
  keyed.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) keyed.emplace_back(canonical_key(graphs[i]), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<CoreGraph> out;
  out.reserve(graphs.size());
  const std::string* prev = nullptr;
  for (const auto& [key, i] : keyed) {
    if (prev && *prev == key) continue;
    out.push_back(std::move(graphs[i]));
    prev = &key;
  }
  return out;
}

}  // namespace detail

/// All folded quotients of g (the fringe [H, inf)_X of the subgroup H with
/// core graph g), sorted by canonical key.
inline std::vector<CoreGraph> enumerate_quotients(const CoreGraph& g, const EnumerationOptions& opts = {}) {
  if (g.num_vertices() > opts.max_vertices)
    throw CapExceeded("core graph has " + std::to_string(g.num_vertices()) + " vertices; enumeration cap is " +
                      std::to_string(opts.max_vertices) + " (set WM_MAX_WORD_LENGTH to raise it)");
  detail::QuotientEnumerator en(g);
  if (opts.threads <= 1 || g.num_vertices() <= 2) return detail::sorted_unique(en.run());

  // Shard on the first few choices of the restricted-growth string.
  int depth = 1;
  std::vector<std::vector<int>> shards = en.prefixes(depth);
  while (depth < g.num_vertices() && shards.size() < 8 * static_cast<std::size_t>(opts.threads))
    shards = en.prefixes(++depth);

  std::vector<std::vector<CoreGraph>> results(shards.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    detail::QuotientEnumerator local(g);
    for (std::size_t i = next++; i < shards.size(); i = next++) results[i] = local.run_from(shards[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < opts.threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<CoreGraph> merged;
  for (auto& part : results)
    for (auto& q : part) merged.push_back(std::move(q));
  return detail::sorted_unique(std::move(merged));
}

/// The fringe of <w> with w's traversal profile on each element.
inline std::vector<FringeElement> enumerate_fringe(const Word& w, const EnumerationOptions& opts = {}) {
  if (w.empty()) throw InputError("the fringe of the trivial subgroup is not enumerated");
  const CoreGraph base = core_graph_of_word(w);
  std::vector<FringeElement> out;
  for (CoreGraph& q : enumerate_quotients(base, opts)) {
    auto profile = membership_and_profile(w, q);
    if (!profile) throw InternalError("word is not a member of one of its own quotients");
    out.push_back({std::move(q), std::move(*profile)});
  }
  return out;
}

/// True iff every signed traversal count is a multiple of m (zero for
/// m = infinity).
[[nodiscard]] inline bool passes_km_filter(const TraversalProfile& p, Modulus m) {
  return std::all_of(p.signed_counts.begin(), p.signed_counts.end(), [m](long long c) { return m.divides(c); });
}

/// Q_m(w) as a filter of an already enumerated fringe.
inline std::vector<FringeElement> filter_q_m(const std::vector<FringeElement>& fringe, Modulus m) {
  std::vector<FringeElement> out;
  for (const FringeElement& f : fringe)
    if (passes_km_filter(f.profile, m)) out.push_back(f);
  return out;
}

inline std::vector<FringeElement> q_m(const Word& w, Modulus m, const EnumerationOptions& opts = {}) {
  return filter_q_m(enumerate_fringe(w, opts), m);
}

}  // namespace wm
