// Ribbon graphs as dart permutations: structural queries, Whitehead moves,
// edge collapse and expansion, isomorphism and canonical forms, and the
// links of codimension-two cells.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "torelli/core.hpp"

namespace torelli {

// A dart is a half-edge. As an oriented edge, dart d points *into* the
// vertex it is attached to; its reverse is iota(d).
using Dart = int;

class FatGraph {
 public:
  FatGraph() = default;

  // Validates and derives vertices, edges and boundary cycles.
  static FatGraph build(std::vector<Dart> sigma, std::vector<Dart> iota) {
    const int n = static_cast<int>(sigma.size());
    if (static_cast<int>(iota.size()) != n) throw Error(ErrorCode::InvalidArgument, "sigma and iota differ in size");
    if (n == 0 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, "dart count must be positive and even");
    check_permutation(sigma, "sigma");
    check_permutation(iota, "iota");
    for (int d = 0; d < n; ++d) {
      if (iota[d] == d) throw Error(ErrorCode::FixedPointInInvolution, "iota fixes dart " + std::to_string(d));
      if (iota[iota[d]] != d) throw Error(ErrorCode::NotInvolution, "iota is not an involution at dart " + std::to_string(d));
    }
    FatGraph g;
    g.sigma_ = std::move(sigma);
    g.iota_ = std::move(iota);
    g.derive();
    return g;
  }

  int num_darts() const { return static_cast<int>(sigma_.size()); }
  int num_edges() const { return num_darts() / 2; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_boundaries() const { return static_cast<int>(boundaries_.size()); }
  // From V - E + B = 2 - 2g.
  int genus() const { return (2 - num_vertices() + num_edges() - num_boundaries()) / 2; }

  Dart sigma(Dart d) const { return sigma_[d]; }
  Dart sigma_inv(Dart d) const { return sigma_inv_[d]; }
  Dart iota(Dart d) const { return iota_[d]; }
  const std::vector<Dart>& sigma_perm() const { return sigma_; }
  const std::vector<Dart>& iota_perm() const { return iota_; }

  int vertex(Dart d) const { return vertex_of_[d]; }
  // Darts at vertex v in counterclockwise order, starting at its lowest dart.
  const std::vector<Dart>& vertex_darts(int v) const { return vertices_[v]; }
  int valence(int v) const { return static_cast<int>(vertices_[v].size()); }
  // Position of d in the counterclockwise order of its vertex.
  int position(Dart d) const { return position_[d]; }

  // Cycles of d -> sigma(iota(d)).
  const std::vector<std::vector<Dart>>& boundary_cycles() const { return boundaries_; }

  // One representative dart per edge (the smaller one), ascending.
  std::vector<Dart> edges() const {
    std::vector<Dart> out;
    for (Dart d = 0; d < num_darts(); ++d)
      if (d < iota_[d]) out.push_back(d);
    return out;
  }
  Dart edge_rep(Dart d) const { return std::min(d, iota_[d]); }

  bool is_loop(Dart d) const { return vertex_of_[d] == vertex_of_[iota_[d]]; }
  bool is_trivalent() const {
    for (const auto& v : vertices_)
      if (v.size() != 3) return false;
    return true;
  }
  bool is_spine() const { return num_boundaries() == 1 && genus() >= 1; }
  // Codimension of the cell named by a one-boundary graph of this genus.
  int codimension() const { return 6 * genus() - 3 - num_edges(); }

  friend bool operator==(const FatGraph& a, const FatGraph& b) {
    return a.sigma_ == b.sigma_ && a.iota_ == b.iota_;
  }

 private:
  static void check_permutation(const std::vector<Dart>& p, const char* name) {
    std::vector<char> seen(p.size(), 0);
    for (Dart x : p) {
      if (x < 0 || x >= static_cast<int>(p.size()) || seen[x])
        throw Error(ErrorCode::InvalidArgument, std::string(name) + " is not a permutation");
      seen[x] = 1;
    }
  }

  void derive() {
    const int n = num_darts();
    sigma_inv_.assign(n, 0);
    for (int d = 0; d < n; ++d) sigma_inv_[sigma_[d]] = d;
    vertex_of_.assign(n, -1);
    position_.assign(n, 0);
    vertices_.clear();
    for (int d = 0; d < n; ++d) {
      if (vertex_of_[d] >= 0) continue;
      std::vector<Dart> cyc;
      Dart x = d;
      do {
        vertex_of_[x] = static_cast<int>(vertices_.size());
        position_[x] = static_cast<int>(cyc.size());
        cyc.push_back(x);
        x = sigma_[x];
      } while (x != d);
      vertices_.push_back(std::move(cyc));
    }
    // connectedness under <sigma, iota>
    std::vector<char> seen(n, 0);
    std::vector<Dart> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      Dart d = stack.back();
      stack.pop_back();
      for (Dart nb : {sigma_[d], iota_[d]})
        if (!seen[nb]) {
          seen[nb] = 1;
          ++count;
          stack.push_back(nb);
        }
    }
    if (count != n) throw Error(ErrorCode::Disconnected, "sigma and iota do not act transitively");
    boundaries_.clear();
    std::vector<char> used(n, 0);
    for (int d = 0; d < n; ++d) {
      if (used[d]) continue;
      std::vector<Dart> cyc;
      Dart x = d;
      do {
        used[x] = 1;
        cyc.push_back(x);
        x = sigma_[iota_[x]];
      } while (x != d);
      boundaries_.push_back(std::move(cyc));
    }
  }

  std::vector<Dart> sigma_, iota_, sigma_inv_;
  std::vector<int> vertex_of_, position_;
  std::vector<std::vector<Dart>> vertices_;
  std::vector<std::vector<Dart>> boundaries_;
};

// Result of a Whitehead move. Darts are reused, so the edge correspondence
// is the identity on darts; the flipped edge keeps both of its darts.
struct MoveResult {
  FatGraph graph;
  Dart flipped = -1;  // the dart that ends up at the (flipped, d, a) vertex
  // Neighbors in the pre-move graph: counterclockwise (flipped, a, b) at one
  // endpoint and (reverse, c, d) at the other.
  std::array<Dart, 4> quad{};
};

// Darts (a, b, c, d) around the edge of e, oriented from the vertex of e:
// counterclockwise (e, a, b) and (iota e, c, d).
inline std::array<Dart, 4> move_quad(const FatGraph& g, Dart e) {
  const Dart y = g.iota(e);
  const Dart a = g.sigma(e), b = g.sigma(a);
  const Dart c = g.sigma(y), d = g.sigma(c);
  return {a, b, c, d};
}

inline void check_movable(const FatGraph& g, Dart e) {
  if (e < 0 || e >= g.num_darts()) throw Error(ErrorCode::InvalidArgument, "dart " + std::to_string(e) + " out of range");
  if (g.is_loop(e)) throw Error(ErrorCode::LoopEdge, "edge of dart " + std::to_string(e) + " is a loop");
  if (g.valence(g.vertex(e)) != 3 || g.valence(g.vertex(g.iota(e))) != 3)
    throw Error(ErrorCode::NotTrivalent, "endpoints of edge " + std::to_string(e) + " are not trivalent");
}

// Whitehead move along the edge of e. Counterclockwise (e, a, b) and
// (iota e, c, d) become (e, d, a) and (iota e, b, c). The result does not
// depend on which dart of the edge is passed.
inline MoveResult whitehead_move(const FatGraph& g, Dart e) {
  check_movable(g, e);
  const Dart x = g.edge_rep(e);
  const Dart y = g.iota(x);
  const auto q = move_quad(g, x);
  const auto [a, b, c, d] = q;
  std::vector<Dart> sigma = g.sigma_perm();
  sigma[x] = d;
  sigma[d] = a;
  sigma[a] = x;
  sigma[y] = b;
  sigma[b] = c;
  sigma[c] = y;
  MoveResult r;
  r.graph = FatGraph::build(std::move(sigma), g.iota_perm());
  r.flipped = x;
  r.quad = q;
  return r;
}

struct CollapseResult {
  FatGraph graph;
  std::vector<Dart> dart_map;  // old dart -> new dart, -1 for the removed pair
};

// Contracts the edge of e, splicing the two rotations: (e, a1..ap) and
// (iota e, c1..cq) merge into (a1..ap, c1..cq). Remaining darts are
// renumbered in increasing order.
inline CollapseResult collapse_edge(const FatGraph& g, Dart e) {
  if (e < 0 || e >= g.num_darts()) throw Error(ErrorCode::InvalidArgument, "dart out of range");
  if (g.is_loop(e)) throw Error(ErrorCode::LoopEdge, "cannot collapse a loop");
  const Dart x = e, y = g.iota(e);
  std::vector<Dart> sigma = g.sigma_perm();
  const Dart last_v = g.sigma_inv(x);
  const Dart last_w = g.sigma_inv(y);
  const Dart first_v = g.sigma(x);
  const Dart first_w = g.sigma(y);
  // valence >= 2 at both ends is guaranteed for a one-boundary graph of
  // valence >= 3; for valence 1 ends the splice degenerates.
  if (first_v == x || first_w == y) throw Error(ErrorCode::InvalidArgument, "cannot collapse an edge at a univalent vertex");
  sigma[last_v] = first_w;
  sigma[last_w] = first_v;
  CollapseResult r;
  r.dart_map.assign(g.num_darts(), -1);
  int next = 0;
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (d != x && d != y) r.dart_map[d] = next++;
  std::vector<Dart> ns(next), ni(next);
  for (Dart d = 0; d < g.num_darts(); ++d) {
    if (d == x || d == y) continue;
    ns[r.dart_map[d]] = r.dart_map[sigma[d]];
    ni[r.dart_map[d]] = r.dart_map[g.iota(d)];
  }
  r.graph = FatGraph::build(std::move(ns), std::move(ni));
  return r;
}

struct ExpandResult {
  FatGraph graph;
  Dart first_new = -1;  // attached to the block that starts at `start`
  Dart second_new = -1;
};

// Splits vertex v by a new edge: the `block` consecutive darts starting at
// position `start` (counterclockwise) go to one new vertex with dart
// first_new, the rest go to the other with second_new. Both sides keep at
// least two old darts. New darts get the two highest indices.
inline ExpandResult expand_vertex(const FatGraph& g, int v, int start, int block) {
  const auto& ds = g.vertex_darts(v);
  const int k = static_cast<int>(ds.size());
  if (block < 2 || k - block < 2) throw Error(ErrorCode::InvalidArgument, "expansion blocks need at least two darts");
  const int n = g.num_darts();
  const Dart x = n, y = n + 1;
  std::vector<Dart> sigma = g.sigma_perm();
  std::vector<Dart> iota = g.iota_perm();
  sigma.resize(n + 2);
  iota.resize(n + 2);
  iota[x] = y;
  iota[y] = x;
  std::vector<Dart> A, B;
  for (int i = 0; i < k; ++i) (i < block ? A : B).push_back(ds[(start + i) % k]);
  auto ring = [&](Dart head, const std::vector<Dart>& blk) {
    sigma[head] = blk.front();
    for (std::size_t i = 0; i + 1 < blk.size(); ++i) sigma[blk[i]] = blk[i + 1];
    sigma[blk.back()] = head;
  };
  ring(x, A);
  ring(y, B);
  return {FatGraph::build(std::move(sigma), std::move(iota)), x, y};
}

// All single-edge expansions of vertices of valence >= 4, each unordered
// split listed once: valence k gives k(k-3)/2 splits.
inline std::vector<ExpandResult> all_expansions(const FatGraph& g) {
  std::vector<ExpandResult> out;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int k = g.valence(v);
    for (int block = 2; 2 * block <= k; ++block)
      for (int start = 0; start < k; ++start) {
        if (2 * block == k && start >= block) continue;  // complementary split already listed
        out.push_back(expand_vertex(g, v, start, block));
      }
  }
  return out;
}

// Per-dart labels; empty labels are allowed.
using DartLabel = std::vector<std::int64_t>;

struct CanonicalForm {
  std::vector<std::int64_t> code;
  int automorphisms = 0;
  // relabel[d] = index of dart d in the canonical representative
  std::vector<Dart> relabel;

  std::string key() const {
    std::string s;
    for (std::size_t i = 0; i < code.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(code[i]);
    }
    return s;
  }
};

namespace detail {

// Breadth-first relabeling from `start`, emitting the code and aborting as
// soon as it exceeds `best` (returns +1), ties with it (0) or beats it (-1).
inline int traverse(const FatGraph& g, std::span<const DartLabel> labels, Dart start,
                    const std::vector<std::int64_t>* best, std::vector<std::int64_t>& code,
                    std::vector<Dart>& order, std::vector<Dart>& label_of) {
  const int n = g.num_darts();
  order.assign(1, start);
  label_of.assign(n, -1);
  label_of[start] = 0;
  code.clear();
  code.push_back(n);
  int state = best ? 0 : -1;  // 0: equal so far
  auto emit = [&](std::int64_t v) -> bool {
    const std::size_t i = code.size();
    code.push_back(v);
    if (state == 0) {
      if (v < (*best)[i]) state = -1;
      else if (v > (*best)[i]) return false;
    }
    return true;
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Dart d = order[i];
    for (Dart nb : {g.sigma(d), g.iota(d)}) {
      if (label_of[nb] < 0) {
        label_of[nb] = static_cast<int>(order.size());
        order.push_back(nb);
      }
      if (!emit(label_of[nb])) return 1;
    }
  }
  if (!labels.empty()) {
    for (Dart d : order) {
      const auto& l = labels[d];
      if (!emit(static_cast<std::int64_t>(l.size()))) return 1;
      for (auto v : l)
        if (!emit(v)) return 1;
    }
  }
  return state;
}

}  // namespace detail

// Canonical key and automorphism count. Two graphs get equal keys iff a
// dart bijection commutes with sigma and iota and preserves labels.
inline CanonicalForm canonical_form(const FatGraph& g, std::span<const DartLabel> labels = {}) {
  if (!labels.empty() && static_cast<int>(labels.size()) != g.num_darts())
    throw Error(ErrorCode::DimensionMismatch, "one label per dart expected");
  CanonicalForm best;
  std::vector<std::int64_t> code;
  std::vector<Dart> order, label_of;
  for (Dart s = 0; s < g.num_darts(); ++s) {
    int cmp = detail::traverse(g, labels, s, best.code.empty() ? nullptr : &best.code, code, order, label_of);
    if (best.code.empty() || cmp < 0) {
      best.code = code;
      best.automorphisms = 1;
      best.relabel = label_of;
    } else if (cmp == 0) {
      ++best.automorphisms;
    }
  }
  return best;
}

// The canonical representative itself: darts relabeled by canonical order.
inline FatGraph canonical_graph(const FatGraph& g, const CanonicalForm& cf) {
  const int n = g.num_darts();
  std::vector<Dart> s(n), i(n);
  for (Dart d = 0; d < n; ++d) {
    s[cf.relabel[d]] = cf.relabel[g.sigma(d)];
    i[cf.relabel[d]] = cf.relabel[g.iota(d)];
  }
  return FatGraph::build(std::move(s), std::move(i));
}

// Rebuilds the graph (and labels) from a canonical key.
inline FatGraph graph_from_key(const std::string& key, std::vector<DartLabel>* labels = nullptr) {
  std::vector<std::int64_t> v;
  std::stringstream ss(key);
  std::string tok;
  while (std::getline(ss, tok, '.')) {
    if (tok.empty()) throw Error(ErrorCode::Parse, "malformed key");
    v.push_back(std::stoll(tok));
  }
  if (v.empty()) throw Error(ErrorCode::Parse, "empty key");
  const int n = static_cast<int>(v[0]);
  if (static_cast<int>(v.size()) < 1 + 2 * n) throw Error(ErrorCode::Parse, "truncated key");
  std::vector<Dart> s(n), i(n);
  for (int d = 0; d < n; ++d) {
    s[d] = static_cast<Dart>(v[1 + 2 * d]);
    i[d] = static_cast<Dart>(v[2 + 2 * d]);
  }
  if (labels) {
    labels->clear();
    std::size_t p = 1 + 2 * n;
    if (p < v.size()) {
      labels->resize(n);
      for (int d = 0; d < n; ++d) {
        if (p >= v.size()) throw Error(ErrorCode::Parse, "truncated key labels");
        auto len = static_cast<std::size_t>(v[p++]);
        if (p + len > v.size()) throw Error(ErrorCode::Parse, "truncated key labels");
        (*labels)[d].assign(v.begin() + p, v.begin() + p + len);
        p += len;
      }
    }
  }
  return FatGraph::build(std::move(s), std::move(i));
}

// Extends d0 -> d1 to a sigma/iota-commuting bijection g -> h, if any.
inline std::optional<std::vector<Dart>> extend_isomorphism(const FatGraph& g, const FatGraph& h, Dart d0, Dart d1) {
  if (g.num_darts() != h.num_darts()) return std::nullopt;
  const int n = g.num_darts();
  std::vector<Dart> map(n, -1), inv(n, -1);
  std::vector<Dart> stack{d0};
  map[d0] = d1;
  inv[d1] = d0;
  while (!stack.empty()) {
    Dart d = stack.back();
    stack.pop_back();
    const Dart pairs[2][2] = {{g.sigma(d), h.sigma(map[d])}, {g.iota(d), h.iota(map[d])}};
    for (const auto& p : pairs) {
      if (map[p[0]] < 0) {
        if (inv[p[1]] >= 0) return std::nullopt;
        map[p[0]] = p[1];
        inv[p[1]] = p[0];
        stack.push_back(p[0]);
      } else if (map[p[0]] != p[1]) {
        return std::nullopt;
      }
    }
  }
  return map;
}

// All isomorphisms g -> h (each determined by the image of dart 0).
inline std::vector<std::vector<Dart>> isomorphisms(const FatGraph& g, const FatGraph& h) {
  std::vector<std::vector<Dart>> out;
  if (g.num_darts() != h.num_darts()) return out;
  for (Dart t = 0; t < h.num_darts(); ++t)
    if (auto m = extend_isomorphism(g, h, 0, t)) out.push_back(std::move(*m));
  return out;
}

inline std::vector<std::vector<Dart>> automorphisms(const FatGraph& g) { return isomorphisms(g, g); }

enum class CellKind { Square, Pentagon };

struct LinkStep {
  FatGraph graph;  // trivalent resolution
  Dart move;       // edge flipped to reach the next resolution
};

struct Codim2Link {
  CellKind kind;
  std::vector<LinkStep> steps;  // closed cycle; length 5 or 4
  // Darts of the degenerate graph survive with the same indices in every
  // resolution; the resolving edges use indices >= external_darts.
  int external_darts = 0;
};

// Dart bijection from the last resolution (after its move) back to the
// first one that fixes every external dart, if it exists.
inline std::optional<std::vector<Dart>> link_closure(const FatGraph& end, const FatGraph& start, int external_darts) {
  auto m = extend_isomorphism(end, start, 0, 0);
  if (!m) return std::nullopt;
  for (Dart d = 0; d < external_darts; ++d)
    if ((*m)[d] != d) return std::nullopt;
  return m;
}

// Cycle of trivalent resolutions around a graph with one 5-valent vertex
// (pentagon) or two 4-valent vertices (square), connected by moves.
inline Codim2Link link_of_codim2(const FatGraph& g4) {
  std::vector<int> high;
  for (int v = 0; v < g4.num_vertices(); ++v) {
    if (g4.valence(v) > 3) high.push_back(v);
    if (g4.valence(v) < 3) throw Error(ErrorCode::WrongDegeneracyType, "vertex of valence < 3");
  }
  Codim2Link link;
  link.external_darts = g4.num_darts();
  std::vector<Dart> cycle_edges;
  FatGraph start;
  if (high.size() == 1 && g4.valence(high[0]) == 5) {
    link.kind = CellKind::Pentagon;
    auto e1 = expand_vertex(g4, high[0], 0, 2);  // (p, d0, d1) and (p', d2, d3, d4)
    const int v4 = e1.graph.vertex(e1.second_new);
    const int pos = e1.graph.position(e1.second_new);
    // split (p', d2 | d3, d4)
    auto e2 = expand_vertex(e1.graph, v4, pos, 2);
    start = e2.graph;
    const Dart p = e1.first_new, q = e2.first_new;
    cycle_edges = {p, q, p, q, p};
  } else if (high.size() == 2 && g4.valence(high[0]) == 4 && g4.valence(high[1]) == 4) {
    link.kind = CellKind::Square;
    auto e1 = expand_vertex(g4, high[0], 0, 2);
    // vertex ids can shift after expansion; locate the second by a dart
    const Dart w_dart = g4.vertex_darts(high[1])[0];
    auto e2 = expand_vertex(e1.graph, e1.graph.vertex(w_dart), e1.graph.position(w_dart), 2);
    start = e2.graph;
    const Dart p = e1.first_new, q = e2.first_new;
    cycle_edges = {p, q, p, q};
  } else {
    throw Error(ErrorCode::WrongDegeneracyType, "expected one 5-valent or two 4-valent vertices");
  }
  FatGraph cur = start;
  for (Dart e : cycle_edges) {
    auto mr = whitehead_move(cur, e);
    link.steps.push_back({cur, e});
    cur = std::move(mr.graph);
  }
  if (!link_closure(cur, start, link.external_darts))
    throw Error(ErrorCode::OpenBoundary, "codimension-two link does not close");
  return link;
}

// Pairs of edges whose joint collapse is a codimension-two degeneration of
// a trivalent graph, in increasing order of edge representatives.
inline std::vector<std::pair<Dart, Dart>> codim2_edge_pairs(const FatGraph& g) {
  std::vector<std::pair<Dart, Dart>> out;
  const auto es = g.edges();
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (g.is_loop(es[i])) continue;
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      if (g.is_loop(es[j])) continue;
      // collapsing both must not contract a cycle (a double edge)
      const int a = g.vertex(es[i]), b = g.vertex(g.iota(es[i]));
      const int c = g.vertex(es[j]), d = g.vertex(g.iota(es[j]));
      if ((a == c && b == d) || (a == d && b == c)) continue;
      out.emplace_back(es[i], es[j]);
    }
  }
  return out;
}

inline FatGraph collapse_pair(const FatGraph& g, Dart e, Dart f, std::vector<Dart>* dart_map = nullptr) {
  auto c1 = collapse_edge(g, e);
  const Dart f1 = c1.dart_map[f];
  auto c2 = collapse_edge(c1.graph, f1);
  if (dart_map) {
    dart_map->assign(g.num_darts(), -1);
    for (Dart d = 0; d < g.num_darts(); ++d)
      if (c1.dart_map[d] >= 0) (*dart_map)[d] = c2.dart_map[c1.dart_map[d]];
  }
  return c2.graph;
}

// Text format:
//   fatgraph <2E>
//   iota: p0 ... p(2E-1)
//   sigma: q0 ... q(2E-1)
//   label <dart> <string>        (optional, repeatable)
// Other keyword lines (hmark, pimark) are returned untouched in `extra`.
struct FgFile {
  FatGraph graph;
  std::map<Dart, std::string> labels;
  std::vector<std::string> extra;
};

inline FgFile parse_fg(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<Dart> sigma, iota;
  bool have_sigma = false, have_iota = false;
  FgFile f;
  auto read_perm = [&](std::istringstream& ss) {
    std::vector<Dart> p;
    long long v;
    while (ss >> v) p.push_back(static_cast<Dart>(v));
    if (!ss.eof()) throw Error(ErrorCode::Parse, "non-integer in permutation");
    if (static_cast<int>(p.size()) != n) throw Error(ErrorCode::Parse, "permutation length does not match header");
    return p;
  };
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (kw == "fatgraph") {
      if (!(ss >> n) || n <= 0) throw Error(ErrorCode::Parse, "bad fatgraph header");
    } else if (kw == "iota:") {
      if (n < 0) throw Error(ErrorCode::Parse, "iota before header");
      iota = read_perm(ss);
      have_iota = true;
    } else if (kw == "sigma:") {
      if (n < 0) throw Error(ErrorCode::Parse, "sigma before header");
      sigma = read_perm(ss);
      have_sigma = true;
    } else if (kw == "label") {
      Dart d;
      std::string s;
      if (!(ss >> d >> s)) throw Error(ErrorCode::Parse, "bad label line");
      f.labels[d] = s;
    } else {
      f.extra.push_back(line);
    }
  }
  if (!have_sigma || !have_iota) throw Error(ErrorCode::Parse, "missing sigma or iota");
  f.graph = FatGraph::build(std::move(sigma), std::move(iota));
  for (const auto& [d, s] : f.labels)
    if (d < 0 || d >= f.graph.num_darts()) throw Error(ErrorCode::Parse, "label dart out of range");
  return f;
}

inline std::string format_fg(const FatGraph& g, const std::map<Dart, std::string>& labels = {}) {
  std::ostringstream os;
  os << "fatgraph " << g.num_darts() << "\niota:";
  for (Dart d = 0; d < g.num_darts(); ++d) os << ' ' << g.iota(d);
  os << "\nsigma:";
  for (Dart d = 0; d < g.num_darts(); ++d) os << ' ' << g.sigma(d);
  os << '\n';
  for (const auto& [d, s] : labels) os << "label " << d << ' ' << s << '\n';
  return os.str();
}

// Opaque string labels as canonical-form labels (bytes as integers).
inline std::vector<DartLabel> string_labels(const FatGraph& g, const std::map<Dart, std::string>& labels) {
  std::vector<DartLabel> out(g.num_darts());
  for (const auto& [d, s] : labels)
    for (unsigned char ch : s) out[d].push_back(ch);
  return out;
}

inline FatGraph theta_graph() { return FatGraph::build({1, 2, 0, 4, 5, 3}, {3, 4, 5, 0, 1, 2}); }

}  // namespace torelli
