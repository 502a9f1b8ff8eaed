// The Lambda^3 H valued cochain j on Whitehead moves, its path sums,
// cocycle and equivariance checks, Alexander-Whitney cup powers on 2-cells
// and chains, contraction cocycles and the torus bounding pair identities.
#pragma once

#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torelli/core.hpp"
#include "torelli/exterior.hpp"
#include "torelli/fatgraph.hpp"
#include "torelli/marking.hpp"

namespace torelli {

// Antisymmetry and vertex conditions only (full rank is preserved by
// moves and is checked by check_marking).
inline void check_marking_local(const FatGraph& g, const HomologyMarking& m) {
  if (static_cast<int>(m.values.size()) != g.num_darts()) throw Error(ErrorCode::InvalidMarking, "value count differs from dart count");
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (!is_zero(add(m.values[d], m.values[g.iota(d)])))
      throw Error(ErrorCode::InvalidMarking, "antisymmetry fails on dart " + std::to_string(d));
  for (int v = 0; v < g.num_vertices(); ++v) {
    IntVector s(m.rank(), 0);
    for (Dart d : g.vertex_darts(v)) s = add(s, m.values[d]);
    if (!is_zero(s)) throw Error(ErrorCode::InvalidMarking, "vertex condition fails at vertex " + std::to_string(v));
  }
}

// j(W_e) = a ^ b ^ c with the neighbors of the move.
inline Wedge3 j_move(const FatGraph& g, const HomologyMarking& m, Dart e) {
  check_movable(g, e);
  const auto [a, b, c, d] = move_quad(g, e);
  (void)d;
  return wedge3(m[a], m[b], m[c]);
}

struct MarkedGraph {
  FatGraph graph;
  HomologyMarking marking;
};

struct MoveSequence {
  FatGraph start;
  HomologyMarking marking;
  std::vector<Dart> steps;

  MarkedGraph end() const {
    MarkedGraph cur{start, marking};
    for (Dart e : steps) {
      auto mr = whitehead_move(cur.graph, e);
      cur.marking = apply_move(cur.marking, mr);
      cur.graph = std::move(mr.graph);
    }
    return cur;
  }

  MoveSequence reversed() const {
    MoveSequence r{end().graph, end().marking, {steps.rbegin(), steps.rend()}};
    return r;
  }
};

// Per-step values of j along the sequence.
inline std::vector<Wedge3> j_steps(const MoveSequence& s) {
  std::vector<Wedge3> out;
  FatGraph g = s.start;
  HomologyMarking m = s.marking;
  for (Dart e : s.steps) {
    out.push_back(j_move(g, m, e));
    auto mr = whitehead_move(g, e);
    m = apply_move(m, mr);
    g = std::move(mr.graph);
  }
  return out;
}

inline Wedge3 j_path(const MoveSequence& s) {
  Wedge3 total(s.marking.rank());
  for (const auto& w : j_steps(s)) total += w;
  return total;
}

enum class TwoCellKind { Square, Pentagon };

// Boundary of a 2-cell: graphs[i] --moves[i]--> graphs[i+1], the last move
// returning to graphs[0] through `closure` (a dart bijection fixing the
// external darts).
struct TwoCell {
  TwoCellKind kind = TwoCellKind::Square;
  std::vector<FatGraph> graphs;
  std::vector<HomologyMarking> markings;
  std::vector<Dart> moves;
  std::vector<Dart> closure;
  int external_darts = 0;

  int size() const { return static_cast<int>(moves.size()); }
};

// The 2-cell of a codimension-two degeneration with the marking given on
// its darts (one fewer value per collapsed edge). Internal edges are
// filled in by the vertex conditions.
inline TwoCell make_two_cell(const FatGraph& degenerate, const std::vector<IntVector>& values, const IntMatrix& om) {
  auto link = link_of_codim2(degenerate);
  TwoCell cell;
  cell.kind = link.kind == CellKind::Pentagon ? TwoCellKind::Pentagon : TwoCellKind::Square;
  cell.external_darts = link.external_darts;
  const FatGraph& s0 = link.steps.front().graph;
  std::vector<std::optional<IntVector>> partial(s0.num_darts());
  for (int d = 0; d < link.external_darts; ++d) partial[d] = values[d];
  HomologyMarking m = extend_marking(s0, partial, om);
  FatGraph g = s0;
  for (const auto& st : link.steps) {
    cell.graphs.push_back(g);
    cell.markings.push_back(m);
    cell.moves.push_back(st.move);
    auto mr = whitehead_move(g, st.move);
    m = apply_move(m, mr);
    g = std::move(mr.graph);
  }
  auto cl = link_closure(g, s0, link.external_darts);
  if (!cl) throw Error(ErrorCode::OpenBoundary, "2-cell boundary does not close");
  cell.closure = *cl;
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (m.values[d] != cell.markings.front().values[(*cl)[d]])
      throw Error(ErrorCode::OpenBoundary, "marking does not close around the 2-cell");
  return cell;
}

// The 2-cell obtained by collapsing edges e and f of a marked trivalent graph.
inline TwoCell two_cell_at(const FatGraph& g, const HomologyMarking& m, Dart e, Dart f) {
  std::vector<Dart> map;
  FatGraph deg = collapse_pair(g, e, f, &map);
  std::vector<IntVector> vals(deg.num_darts());
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (map[d] >= 0) vals[map[d]] = m.values[d];
  return make_two_cell(deg, vals, m.omega);
}

// j(i, i+1) for every boundary edge of the cell.
inline std::vector<Wedge3> boundary_values(const TwoCell& c) {
  std::vector<Wedge3> out;
  for (int i = 0; i < c.size(); ++i) {
    check_marking_local(c.graphs[i], c.markings[i]);
    out.push_back(j_move(c.graphs[i], c.markings[i], c.moves[i]));
  }
  return out;
}

struct CocycleCheck {
  bool ok = false;
  Wedge3 residual;
};

inline CocycleCheck verify_cocycle(const TwoCell& c) {
  if (c.graphs.empty()) throw Error(ErrorCode::OpenBoundary, "empty 2-cell");
  // re-check closure of the stored boundary
  {
    auto mr = whitehead_move(c.graphs.back(), c.moves.back());
    auto m = apply_move(c.markings.back(), mr);
    if (!link_closure(mr.graph, c.graphs.front(), c.external_darts))
      throw Error(ErrorCode::OpenBoundary, "2-cell boundary does not close");
    for (Dart d = 0; d < mr.graph.num_darts(); ++d)
      if (m.values[d] != c.markings.front().values[c.closure[d]])
        throw Error(ErrorCode::OpenBoundary, "marking does not close around the 2-cell");
  }
  CocycleCheck r;
  r.residual = Wedge3(c.markings.front().rank());
  for (const auto& w : boundary_values(c)) r.residual += w;
  r.ok = r.residual.is_zero();
  return r;
}

// Graph isomorphism phi: start -> target together with the basis change M
// it induces on markings.
struct Relabeling {
  FatGraph target;
  HomologyMarking target_marking;
  std::vector<Dart> phi;
  IntMatrix M;
};

inline bool equivariance_check(const MoveSequence& s, const Relabeling& r) {
  auto ext = extend_isomorphism(s.start, r.target, 0, r.phi.empty() ? -1 : r.phi[0]);
  if (r.phi.size() != static_cast<std::size_t>(s.start.num_darts()) || !ext || *ext != r.phi)
    throw Error(ErrorCode::InvalidRelabeling, "dart map is not a graph isomorphism");
  for (Dart d = 0; d < s.start.num_darts(); ++d)
    if (r.M * s.marking.values[d] != r.target_marking.values[r.phi[d]])
      throw Error(ErrorCode::InvalidRelabeling, "basis change is not induced by the isomorphism");
  MoveSequence t{r.target, r.target_marking, {}};
  for (Dart e : s.steps) t.steps.push_back(r.phi[e]);
  const auto a = j_steps(s);
  const auto b = j_steps(t);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (transform(r.M, a[i]) != b[i]) return false;
  return true;
}

// Boundary values as a lookup j(p, q) along the forward boundary path.
inline Wedge3 forward_path_value(const std::vector<Wedge3>& jv, int p, int q) {
  const int n = static_cast<int>(jv.size());
  Wedge3 s(jv.front().dim());
  for (int i = p; i != q; i = (i + 1) % n) s += jv[i];
  return s;
}

// Fan triangulation from `apex`: for each triangle with sorted vertices
// (u < v < w) add j(v, w) ^ j(u, v).
inline MultiWedge cup_square_from_boundary(const std::vector<Wedge3>& jv, int apex) {
  const int n = static_cast<int>(jv.size());
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "2-cell needs at least 3 vertices");
  if (apex < 0 || apex >= n) throw Error(ErrorCode::InvalidArgument, "apex out of range");
  MultiWedge total(jv.front().dim(), 2);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if (i == apex || j == apex) continue;
    std::array<int, 3> t{apex, i, j};
    std::sort(t.begin(), t.end());
    total += wedge_product(forward_path_value(jv, t[1], t[2]), forward_path_value(jv, t[0], t[1]));
  }
  return total;
}

inline MultiWedge cup_square_on_cell(const TwoCell& c, int apex) {
  verify_cocycle(c);
  return cup_square_from_boundary(boundary_values(c), apex);
}

struct Simplex {
  std::vector<int> vertices;
  int sign = 1;
};

struct SimplicialChain {
  std::vector<Simplex> simplices;
  // value on the oriented edge (p, q); (q, p) is its negative
  std::map<std::pair<int, int>, Wedge3> edge_values;
  int dim = 0;

  Wedge3 value(int p, int q) const {
    if (auto it = edge_values.find({p, q}); it != edge_values.end()) return it->second;
    if (auto it = edge_values.find({q, p}); it != edge_values.end()) return -it->second;
    throw Error(ErrorCode::UnlabeledEdge, "edge (" + std::to_string(p) + ", " + std::to_string(q) + ") has no value");
  }
};

// Alexander-Whitney: j^m(v0..vm) = j(v_{m-1}, v_m) ^ ... ^ j(v0, v1).
inline MultiWedge cup_power_on_chain(const SimplicialChain& ch) {
  if (ch.simplices.empty()) throw Error(ErrorCode::InvalidArgument, "empty chain");
  const int m = static_cast<int>(ch.simplices.front().vertices.size()) - 1;
  MultiWedge total(ch.dim, m);
  for (const auto& s : ch.simplices) {
    if (static_cast<int>(s.vertices.size()) != m + 1) throw Error(ErrorCode::GradeMismatch, "simplices of mixed dimension");
    MultiWedge acc = MultiWedge::from(ch.value(s.vertices[m - 1], s.vertices[m]));
    for (int i = m - 2; i >= 0; --i) acc = wedge_product(acc, MultiWedge::from(ch.value(s.vertices[i], s.vertices[i + 1])));
    total += s.sign * acc;
  }
  return total;
}

// Fan chain of a cell, for cup_power_on_chain.
inline SimplicialChain fan_chain(const std::vector<Wedge3>& jv, int apex) {
  const int n = static_cast<int>(jv.size());
  SimplicialChain ch;
  ch.dim = jv.front().dim();
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if (i == apex || j == apex) continue;
    std::vector<int> t{apex, i, j};
    std::sort(t.begin(), t.end());
    ch.simplices.push_back({t, 1});
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) ch.edge_values[{t[a], t[b]}] = forward_path_value(jv, t[a], t[b]);
  }
  return ch;
}

inline std::int64_t contraction_cocycle(const TwoCell& c, const PairingGraph& pg, const IntMatrix& om, int apex = 0) {
  if (pg.vertices != 2) throw Error(ErrorCode::GradeMismatch, "2-cells pair with 2-vertex graphs");
  return contract_graph(pg, cup_square_on_cell(c, apex), om);
}

// Formal expressions in free vectors a, b, c, d.
struct LinearForm {
  std::array<std::int64_t, 4> coef{};
  IntVector eval(const std::array<IntVector, 4>& v) const {
    IntVector r(v[0].size(), 0);
    for (int i = 0; i < 4; ++i) r = add(r, scale(coef[i], v[i]));
    return r;
  }
};

struct WedgeTerm {
  int sign;
  std::array<LinearForm, 3> slots;
};

struct CorpusExpression {
  std::string name;
  std::vector<WedgeTerm> terms;

  Wedge3 eval(const std::array<IntVector, 4>& v) const {
    Wedge3 w(static_cast<int>(v[0].size()));
    for (const auto& t : terms) w += t.sign * wedge3(t.slots[0].eval(v), t.slots[1].eval(v), t.slots[2].eval(v));
    return w;
  }
};

// Contributions of the torus bounding pair map: the first Dehn twist, the
// second Dehn twist, and the two pairs of Whitehead moves.
inline std::vector<CorpusExpression> torus_bp_corpus() {
  auto L = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) { return LinearForm{{a, b, c, d}}; };
  const auto a = L(1, 0, 0, 0), b = L(0, 1, 0, 0), c = L(0, 0, 1, 0), d = L(0, 0, 0, 1);
  return {
      {"first Dehn twist",
       {{-1, {d, c, L(1, 0, -1, 1)}},
        {-1, {L(0, 1, 0, 1), b, L(1, 0, 0, 1)}},
        {-1, {L(1, 1, 0, 1), a, L(1, 1, 0, 1)}},
        {+1, {L(1, 1, -1, 1), c, L(2, 1, 0, 1)}},
        {+1, {L(1, 0, -1, 1), b, L(2, 1, -1, 1)}}}},
      {"second Dehn twist",
       {{-1, {L(1, 1, 0, 1), a, L(1, 0, 0, 1)}},
        {-1, {L(2, 0, -1, 1), L(1, 0, -1, 0), d}},
        {+1, {L(1, 0, -1, 1), a, L(1, 0, -1, 1)}},
        {-1, {L(2, 1, -1, 1), L(1, 1, 0, 0), L(0, 0, -1, 1)}},
        {-1, {L(1, 1, 0, 1), L(-1, 0, 1, 0), L(1, 1, -1, 1)}}}},
      {"Whitehead move pairs",
       {{-1, {L(2, 1, 0, 1), L(2, 1, -1, 1), L(1, 0, -1, 1)}},
        {-1, {L(1, 0, 0, 1), L(1, 1, 0, 1), L(2, 1, -1, 1)}},
        {+1, {L(1, 1, -1, 1), L(0, 0, -1, 1), d}},
        {+1, {L(1, 0, -1, 1), d, L(0, 1, 0, 1)}}}},
  };
}

struct CorpusReport {
  std::vector<std::string> names;
  std::vector<Wedge3> basis_values;  // at a, b, c, d = e1..e4
  Wedge3 total;
  int random_points = 0;
};

// Each expression must equal 2 a^b^c at the basis and at random points.
inline CorpusReport verify_identity_corpus(int random_points = 50, std::uint64_t seed = 1) {
  const auto corpus = torus_bp_corpus();
  CorpusReport rep;
  auto check_at = [&](const std::array<IntVector, 4>& v, const std::string& where) {
    const Wedge3 target = 2 * wedge3(v[0], v[1], v[2]);
    for (const auto& e : corpus)
      if (e.eval(v) != target) throw Error(ErrorCode::IdentityFailure, e.name + " differs from 2 a^b^c at " + where);
  };
  std::array<IntVector, 4> basis;
  for (int i = 0; i < 4; ++i) {
    basis[i] = IntVector(4, 0);
    basis[i][i] = 1;
  }
  check_at(basis, "the standard basis");
  rep.total = Wedge3(4);
  for (const auto& e : corpus) {
    rep.names.push_back(e.name);
    rep.basis_values.push_back(e.eval(basis));
    rep.total += rep.basis_values.back();
  }
  if (rep.total != 6 * wedge3(basis[0], basis[1], basis[2]))
    throw Error(ErrorCode::IdentityFailure, "sum of contributions differs from 6 a^b^c");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(-9, 9), dimd(3, 6);
  for (int p = 0; p < random_points; ++p) {
    const int n = dimd(rng);
    std::array<IntVector, 4> v;
    for (auto& x : v) {
      x.resize(n);
      for (auto& y : x) y = coord(rng);
    }
    check_at(v, "random point " + std::to_string(p));
    ++rep.random_points;
  }
  return rep;
}

// The five j values around the pentagon, in the form b^c^d, e^a^b,
// c^d^e, a^b^c, d^e^a with e = -(a+b+c+d).
inline std::vector<Wedge3> pentagon_terms(const IntVector& a, const IntVector& b, const IntVector& c, const IntVector& d) {
  const IntVector e = negate(add(add(a, b), add(c, d)));
  return {wedge3(b, c, d), wedge3(e, a, b), wedge3(c, d, e), wedge3(a, b, c), wedge3(d, e, a)};
}

// Boundary of the pentagon 1 -> 2 -> 3 -> 4 -> 5 -> 1 with
// j(2,1) = abc, j(3,2) = cde, j(4,3) = eab, j(5,4) = bcd, j(1,5) = dea.
inline std::vector<Wedge3> pentagon_boundary(const IntVector& a, const IntVector& b, const IntVector& c, const IntVector& d) {
  const IntVector e = negate(add(add(a, b), add(c, d)));
  return {-wedge3(a, b, c), -wedge3(c, d, e), -wedge3(e, a, b), -wedge3(b, c, d), -wedge3(d, e, a)};
}

// cde^abc + eab^abc + eab^cde + dea^bcd
inline MultiWedge pentagon_cup_value(const IntVector& a, const IntVector& b, const IntVector& c, const IntVector& d) {
  const IntVector e = negate(add(add(a, b), add(c, d)));
  auto W = [](const IntVector& x, const IntVector& y, const IntVector& z) { return wedge3(x, y, z); };
  return wedge_product(W(c, d, e), W(a, b, c)) + wedge_product(W(e, a, b), W(a, b, c)) +
         wedge_product(W(e, a, b), W(c, d, e)) + wedge_product(W(d, e, a), W(b, c, d));
}

// adb^abc + dab^cda + bcd^dca + 2(dca^abc + cba^abc + dab^cdb), the
// expansion with e eliminated.
inline MultiWedge pentagon_cup_eliminated(const IntVector& a, const IntVector& b, const IntVector& c, const IntVector& d) {
  auto W = [](const IntVector& x, const IntVector& y, const IntVector& z) { return wedge3(x, y, z); };
  MultiWedge twice = wedge_product(W(d, c, a), W(a, b, c)) + wedge_product(W(c, b, a), W(a, b, c)) +
                     wedge_product(W(d, a, b), W(c, d, b));
  return wedge_product(W(a, d, b), W(a, b, c)) + wedge_product(W(d, a, b), W(c, d, a)) +
         wedge_product(W(b, c, d), W(d, c, a)) + 2 * twice;
}

// .mv scripts: `start <file>` then `move <dart>` lines.
struct MoveScript {
  std::string start;
  std::vector<Dart> moves;
};

inline MoveScript parse_mv(std::istream& in) {
  MoveScript s;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (kw == "start") {
      if (!(ss >> s.start)) throw Error(ErrorCode::Parse, "bad start line");
    } else if (kw == "move") {
      long long d;
      if (!(ss >> d)) throw Error(ErrorCode::Parse, "bad move line");
      s.moves.push_back(static_cast<Dart>(d));
    } else {
      throw Error(ErrorCode::Parse, "unknown keyword " + kw);
    }
  }
  return s;
}

}  // namespace torelli
