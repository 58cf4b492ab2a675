#pragma once

// Stallings core graphs of finitely generated subgroups of F_r.
//
// Vertices are dense indices with the root at 0. After construction every
// graph is folded, trimmed and relabeled in canonical breadth-first order
// (neighbors visited by label, outgoing before incoming), so two graphs are
// isomorphic as rooted labeled graphs iff their edge arrays are identical.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "wordmeasure/errors.hpp"
#include "wordmeasure/words.hpp"

namespace wm {

struct Edge {
  int src = 0;
  int dst = 0;
  int label = 1;  // 1-based generator index
  friend constexpr bool operator==(const Edge&, const Edge&) = default;
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Rooted labeled multigraph, not necessarily folded. Root is vertex 0.
struct PreGraph {
  int num_vertices = 1;
  int ambient_rank = 1;
  std::vector<Edge> edges;
};

class CoreGraph;
CoreGraph fold(const PreGraph& g);

class CoreGraph {
 public:
  /// The trivial subgroup: a lone root.
  CoreGraph() : CoreGraph(1, 1, {}) {}

  [[nodiscard]] int num_vertices() const { return num_vertices_; }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }
  [[nodiscard]] int ambient_rank() const { return rank_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] bool is_trivial() const { return edges_.empty(); }

  /// Index of the edge leaving / entering v with this label, or -1.
  [[nodiscard]] int out_edge(int v, int label) const { return out_[slot(v, label)]; }
  [[nodiscard]] int in_edge(int v, int label) const { return in_[slot(v, label)]; }

  /// #E_i: number of edges carrying this label.
  [[nodiscard]] int edge_count(int label) const { return label_counts_[static_cast<std::size_t>(label - 1)]; }

  /// #E - #V + 1.
  [[nodiscard]] int rank() const { return num_edges() - num_vertices_ + 1; }

  friend bool operator==(const CoreGraph& a, const CoreGraph& b) {
    return a.num_vertices_ == b.num_vertices_ && a.rank_ == b.rank_ && a.edges_ == b.edges_;
  }

 private:
  friend CoreGraph fold(const PreGraph& g);

  CoreGraph(int num_vertices, int rank, std::vector<Edge> edges)
      : num_vertices_(num_vertices), rank_(rank), edges_(std::move(edges)) {
    const auto slots = static_cast<std::size_t>(num_vertices_) * static_cast<std::size_t>(rank_);
    out_.assign(slots, -1);
    in_.assign(slots, -1);
    label_counts_.assign(static_cast<std::size_t>(rank_), 0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      out_[slot(edges_[e].src, edges_[e].label)] = static_cast<int>(e);
      in_[slot(edges_[e].dst, edges_[e].label)] = static_cast<int>(e);
      ++label_counts_[static_cast<std::size_t>(edges_[e].label - 1)];
    }
  }

  [[nodiscard]] std::size_t slot(int v, int label) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(rank_) + static_cast<std::size_t>(label - 1);
  }

  int num_vertices_;
  int rank_;
  std::vector<Edge> edges_;
  std::vector<int> out_;
  std::vector<int> in_;
  std::vector<int> label_counts_;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int v) {
    while (parent_[static_cast<std::size_t>(v)] != v) {
      parent_[static_cast<std::size_t>(v)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])];
      v = parent_[static_cast<std::size_t>(v)];
    }
    return v;
  }
  // Keeps the smaller index as representative so the root stays 0.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

/// Stallings folding to fixpoint, then trimming of hanging trees (never the
/// root) and canonical relabeling. Unreachable vertices are dropped.
inline CoreGraph fold(const PreGraph& g) {
  const int n = g.num_vertices;
  const int r = g.ambient_rank;
  if (n < 1 || r < 1) throw std::invalid_argument("pre-graph needs a root and a positive rank");
  for (const Edge& e : g.edges)
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n || e.label < 1 || e.label > r)
      throw std::invalid_argument("pre-graph edge out of range");

  detail::UnionFind uf(n);
  const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(r);
  std::vector<int> out(slots);
  std::vector<int> in(slots);
  auto slot = [r](int v, int label) {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(r) + static_cast<std::size_t>(label - 1);
  };
  for (bool changed = true; changed;) {
    changed = false;
    std::fill(out.begin(), out.end(), -1);
    std::fill(in.begin(), in.end(), -1);
    for (const Edge& e : g.edges) {
      const int s = uf.find(e.src);
      const int d = uf.find(e.dst);
      int& o = out[slot(s, e.label)];
      if (o < 0)
        o = d;
      else if (uf.find(o) != d)
        changed |= uf.unite(o, d);
      int& i = in[slot(uf.find(d), e.label)];
      if (i < 0)
        i = uf.find(s);
      else if (uf.find(i) != uf.find(s))
        changed |= uf.unite(i, s);
    }
  }

  // Collapse identified edges.
  std::vector<Edge> edges;
  edges.reserve(g.edges.size());
  for (const Edge& e : g.edges) edges.push_back({uf.find(e.src), uf.find(e.dst), e.label});
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // Trim hanging trees.
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  std::vector<bool> alive(edges.size(), true);
  for (const Edge& e : edges) {
    ++degree[static_cast<std::size_t>(e.src)];
    ++degree[static_cast<std::size_t>(e.dst)];
  }
  for (bool trimmed = true; trimmed;) {
    trimmed = false;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!alive[k]) continue;
      const Edge& e = edges[k];
      const bool src_leaf = e.src != 0 && degree[static_cast<std::size_t>(e.src)] == 1;
      const bool dst_leaf = e.dst != 0 && degree[static_cast<std::size_t>(e.dst)] == 1;
      if (src_leaf || dst_leaf) {
        alive[k] = false;
        --degree[static_cast<std::size_t>(e.src)];
        --degree[static_cast<std::size_t>(e.dst)];
        trimmed = true;
      }
    }
  }

  // Canonical breadth-first relabeling from the root.
  std::fill(out.begin(), out.end(), -1);
  std::fill(in.begin(), in.end(), -1);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!alive[k]) continue;
    out[slot(edges[k].src, edges[k].label)] = edges[k].dst;
    in[slot(edges[k].dst, edges[k].label)] = edges[k].src;
  }
  std::vector<int> relabel(static_cast<std::size_t>(n), -1);
  std::deque<int> queue{0};
  relabel[0] = 0;
  int next = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int label = 1; label <= r; ++label) {
      for (int nb : {out[slot(v, label)], in[slot(v, label)]}) {
        if (nb >= 0 && relabel[static_cast<std::size_t>(nb)] < 0) {
          relabel[static_cast<std::size_t>(nb)] = next++;
          queue.push_back(nb);
        }
      }
    }
  }
  std::vector<Edge> canonical;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!alive[k] || relabel[static_cast<std::size_t>(edges[k].src)] < 0) continue;
    canonical.push_back({relabel[static_cast<std::size_t>(edges[k].src)],
                         relabel[static_cast<std::size_t>(edges[k].dst)], edges[k].label});
  }
  std::sort(canonical.begin(), canonical.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.src, a.label) < std::tie(b.src, b.label); });
  return CoreGraph(next, r, std::move(canonical));
}

/// Wedge of the generator cycles at the root, folded and trimmed.
inline CoreGraph core_graph_of_subgroup(const std::vector<Word>& gens) {
  PreGraph pre;
  pre.ambient_rank = 1;
  for (const Word& w : gens) pre.ambient_rank = std::max(pre.ambient_rank, w.ambient_rank());
  bool nontrivial = false;
  for (const Word& w : gens) {
    if (w.empty()) continue;
    nontrivial = true;
    const std::size_t len = w.size();
    int prev = 0;
    for (std::size_t t = 0; t < len; ++t) {
      const int next = t + 1 == len ? 0 : pre.num_vertices++;
      const Letter& l = w[t];
      if (l.sign > 0)
        pre.edges.push_back({prev, next, l.gen});
      else
        pre.edges.push_back({next, prev, l.gen});
      prev = next;
    }
  }
  if (!nontrivial) throw InputError("all subgroup generators are trivial");
  return fold(pre);
}

/// Core graph of <w>. Callers special-case the empty word.
inline CoreGraph core_graph_of_word(const Word& w) {
  if (w.empty()) throw InputError("core graph of the trivial subgroup requested; handle the empty word separately");
  return core_graph_of_subgroup({w});
}

/// Per-edge traversal counts of a closed root path.
struct TraversalProfile {
  std::vector<long long> signed_counts;
  std::vector<long long> unsigned_counts;
};

/// Traces w from the root. nullopt when w is not in the subgroup.
inline std::optional<TraversalProfile> membership_and_profile(const Word& w, const CoreGraph& g) {
  TraversalProfile p;
  p.signed_counts.assign(static_cast<std::size_t>(g.num_edges()), 0);
  p.unsigned_counts.assign(static_cast<std::size_t>(g.num_edges()), 0);
  int v = 0;
  for (const Letter& l : w.letters()) {
    if (l.gen > g.ambient_rank()) return std::nullopt;
    const int e = l.sign > 0 ? g.out_edge(v, l.gen) : g.in_edge(v, l.gen);
    if (e < 0) return std::nullopt;
    p.signed_counts[static_cast<std::size_t>(e)] += l.sign;
    ++p.unsigned_counts[static_cast<std::size_t>(e)];
    v = l.sign > 0 ? g.edges()[static_cast<std::size_t>(e)].dst : g.edges()[static_cast<std::size_t>(e)].src;
  }
  if (v != 0) return std::nullopt;
  return p;
}

[[nodiscard]] inline bool is_member(const Word& w, const CoreGraph& g) {
  return membership_and_profile(w, g).has_value();
}

/// Breadth-first spanning tree from the root (labels in order, outgoing
/// before incoming), with the non-tree edges in edge-index order.
struct SpanningTree {
  std::vector<int> parent_edge;    // per vertex, -1 at the root
  std::vector<int> basis_index;    // per edge: position among non-tree edges, or -1
  std::vector<int> non_tree_edges;
  std::vector<std::vector<Letter>> root_path;  // letters spelling root -> v in the tree
};

inline SpanningTree spanning_tree(const CoreGraph& g) {
  SpanningTree t;
  const auto nv = static_cast<std::size_t>(g.num_vertices());
  t.parent_edge.assign(nv, -1);
  t.root_path.assign(nv, {});
  std::vector<bool> seen(nv, false);
  std::vector<bool> tree_edge(static_cast<std::size_t>(g.num_edges()), false);
  std::deque<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int label = 1; label <= g.ambient_rank(); ++label) {
      const int eo = g.out_edge(v, label);
      if (eo >= 0) {
        const int u = g.edges()[static_cast<std::size_t>(eo)].dst;
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = true;
          tree_edge[static_cast<std::size_t>(eo)] = true;
          t.parent_edge[static_cast<std::size_t>(u)] = eo;
          t.root_path[static_cast<std::size_t>(u)] = t.root_path[static_cast<std::size_t>(v)];
          t.root_path[static_cast<std::size_t>(u)].push_back({label, 1});
          queue.push_back(u);
        }
      }
      const int ei = g.in_edge(v, label);
      if (ei >= 0) {
        const int u = g.edges()[static_cast<std::size_t>(ei)].src;
        if (!seen[static_cast<std::size_t>(u)]) {
          seen[static_cast<std::size_t>(u)] = true;
          tree_edge[static_cast<std::size_t>(ei)] = true;
          t.parent_edge[static_cast<std::size_t>(u)] = ei;
          t.root_path[static_cast<std::size_t>(u)] = t.root_path[static_cast<std::size_t>(v)];
          t.root_path[static_cast<std::size_t>(u)].push_back({label, -1});
          queue.push_back(u);
        }
      }
    }
  }
  t.basis_index.assign(static_cast<std::size_t>(g.num_edges()), -1);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (tree_edge[static_cast<std::size_t>(e)]) continue;
    t.basis_index[static_cast<std::size_t>(e)] = static_cast<int>(t.non_tree_edges.size());
    t.non_tree_edges.push_back(e);
  }
  return t;
}

/// Free basis: one word per non-tree edge (root -> origin, across, back).
inline std::vector<Word> spanning_tree_basis(const CoreGraph& g) {
  const SpanningTree t = spanning_tree(g);
  std::vector<Word> basis;
  basis.reserve(t.non_tree_edges.size());
  for (int e : t.non_tree_edges) {
    const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
    std::vector<Letter> ls = t.root_path[static_cast<std::size_t>(edge.src)];
    ls.push_back({edge.label, 1});
    const auto& back = t.root_path[static_cast<std::size_t>(edge.dst)];
    for (auto it = back.rbegin(); it != back.rend(); ++it) ls.push_back(it->inverse());
    basis.emplace_back(std::move(ls), g.ambient_rank());
  }
  return basis;
}

/// w expressed over the spanning_tree_basis letters b_1..b_rank.
inline Word rewrite_in_basis(const Word& w, const CoreGraph& g) {
  const SpanningTree t = spanning_tree(g);
  std::vector<Letter> out;
  int v = 0;
  for (const Letter& l : w.letters()) {
    const int e = l.gen > g.ambient_rank() ? -1 : (l.sign > 0 ? g.out_edge(v, l.gen) : g.in_edge(v, l.gen));
    if (e < 0) throw InputError("word " + to_string(w) + " is not a member of the subgroup");
    const int k = t.basis_index[static_cast<std::size_t>(e)];
    if (k >= 0) out.push_back({k + 1, l.sign});
    v = l.sign > 0 ? g.edges()[static_cast<std::size_t>(e)].dst : g.edges()[static_cast<std::size_t>(e)].src;
  }
  if (v != 0) throw InputError("word " + to_string(w) + " is not a member of the subgroup");
  return Word(std::move(out), std::max(1, g.rank()));
}

/// Byte string equal for two graphs iff they are root-preserving,
/// label-respecting isomorphic.
inline std::string canonical_key(const CoreGraph& g) {
  std::string key;
  key.reserve(8 + 12 * static_cast<std::size_t>(g.num_edges()));
  auto put = [&key](int x) {
    const auto u = static_cast<std::uint32_t>(x);
    for (int s = 0; s < 32; s += 8) key.push_back(static_cast<char>((u >> s) & 0xffu));
  };
  put(g.num_vertices());
  put(g.ambient_rank());
  for (const Edge& e : g.edges()) {
    put(e.src);
    put(e.label);
    put(e.dst);
  }
  return key;
}

/// Debug export: one "src dst label" line per edge; root is vertex 0.
inline std::string to_adjacency_text(const CoreGraph& g) {
  std::ostringstream os;
  for (const Edge& e : g.edges()) os << e.src << ' ' << e.dst << ' ' << e.label << '\n';
  return os.str();
}

}  // namespace wm
