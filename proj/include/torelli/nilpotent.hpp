// pi_1- and N_k-markings on spines, canonical coordinates in the nilpotent
// quotients of the surface group, and the maps lambda_k.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "torelli/core.hpp"
#include "torelli/fatgraph.hpp"
#include "torelli/free_group.hpp"
#include "torelli/lie.hpp"
#include "torelli/marking.hpp"

namespace torelli {

// Words per dart in the free group on the 2g non-tree arcs. The product
// around the root vertex is the surface relator.
struct PiMarking {
  int rank = 0;
  std::vector<FreeWord> values;
  FreeWord relator;
  const FreeWord& operator[](Dart d) const { return values[d]; }
  friend bool operator==(const PiMarking&, const PiMarking&) = default;
};

inline FreeWord vertex_product(const FatGraph& g, const std::vector<FreeWord>& vals, int v) {
  FreeWord w;
  for (Dart d : g.vertex_darts(v)) w = w * vals[d];
  return w;
}

// Non-tree arc i is generator i+1; tree arcs are eliminated from the leaves
// toward the root vertex through alpha_p alpha_q alpha_r = 1.
inline PiMarking tautological_pi_marking(const FatGraph& g, const CycleBasis& cb) {
  PiMarking pm;
  pm.rank = static_cast<int>(cb.nontree_darts.size());
  std::vector<std::optional<FreeWord>> val(g.num_darts());
  for (std::size_t i = 0; i < cb.nontree_darts.size(); ++i) {
    const Dart x = cb.nontree_darts[i];
    val[x] = FreeWord::gen(static_cast<int>(i) + 1);
    val[g.iota(x)] = val[x]->inverse();
  }
  for (auto it = cb.bfs_order.rbegin(); it != cb.bfs_order.rend(); ++it) {
    const int w = *it;
    const Dart p = cb.parent_dart[w];
    if (p < 0) continue;
    FreeWord rest;
    for (Dart d = g.sigma(p); d != p; d = g.sigma(d)) {
      if (!val[d]) throw Error(ErrorCode::InvalidArgument, "tree elimination reached an unknown arc");
      rest = rest * *val[d];
    }
    val[p] = rest.inverse();
    val[g.iota(p)] = rest;
  }
  for (auto& v : val) {
    if (!v) throw Error(ErrorCode::InvalidArgument, "arc left without a word");
    pm.values.push_back(*v);
  }
  pm.relator = vertex_product(g, pm.values, 0);
  return pm;
}

inline PiMarking tautological_pi_marking(const FatGraph& g) { return tautological_pi_marking(g, cycle_basis(g)); }

// Dual diagonal flip: the flipped arc becomes alpha_b alpha_c.
inline PiMarking apply_move_pi(const PiMarking& pm, const MoveResult& mr) {
  PiMarking out = pm;
  const auto [a, b, c, d] = mr.quad;
  (void)a;
  (void)d;
  const Dart x = mr.flipped, y = mr.graph.iota(x);
  out.values[x] = pm.values[b] * pm.values[c];
  out.values[y] = out.values[x].inverse();
  return out;
}

// Is w conjugate to r or r^-1 in the free group?
inline bool conjugate_to_relator(const FreeWord& w, const FreeWord& r) {
  const auto cw = w.cyclically_reduced().letters();
  for (const auto& target : {r.cyclically_reduced(), r.inverse().cyclically_reduced()}) {
    const auto& t = target.letters();
    if (t.size() != cw.size()) continue;
    if (t.empty()) return true;
    for (std::size_t s = 0; s < t.size(); ++s) {
      bool eq = true;
      for (std::size_t i = 0; i < t.size() && eq; ++i) eq = cw[(s + i) % t.size()] == t[i];
      if (eq) return true;
    }
  }
  return false;
}

// Conditions of a pi_1-marking read upstairs: antisymmetry in the free
// group, every vertex product trivial or a conjugate of the relator, and
// the values generate the free group.
inline std::optional<std::string> pi_marking_violation(const FatGraph& g, const PiMarking& pm) {
  if (static_cast<int>(pm.values.size()) != g.num_darts()) return "value count differs from dart count";
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (pm.values[g.iota(d)] != pm.values[d].inverse()) return "antisymmetry fails on dart " + std::to_string(d);
  int defects = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    const FreeWord w = vertex_product(g, pm.values, v);
    if (w.empty()) continue;
    if (!conjugate_to_relator(w, pm.relator)) return "vertex product at " + std::to_string(v) + " is not trivial";
    ++defects;
  }
  if (defects > 1) return "more than one vertex carries the relator";
  if (!generates_free_group(pm.values, pm.rank)) return "values do not generate the free group";
  return std::nullopt;
}

// Exponent sums of the words mapped through the homology classes of the
// generator arcs.
inline std::vector<IntVector> abelianized_marking(const PiMarking& pm, const std::vector<IntVector>& generator_classes) {
  std::vector<IntVector> out;
  for (const auto& w : pm.values) {
    const IntVector ab = w.abelianize(pm.rank);
    IntVector v(generator_classes.front().size(), 0);
    for (int i = 0; i < pm.rank; ++i) v = add(v, scale(ab[i], generator_classes[i]));
    out.push_back(std::move(v));
  }
  return out;
}

// Non-tree darts in the order met by the boundary of the ribbon
// neighborhood of the maximal tree, starting at the first dart of vertex 0:
// tree darts are crossed (d -> sigma(iota d)), non-tree darts are passed
// (d -> sigma d).
inline std::vector<Dart> tree_contour(const FatGraph& g, const CycleBasis& cb) {
  std::vector<char> tree(g.num_darts(), 0);
  for (Dart e : cb.tree_edges) tree[e] = tree[g.iota(e)] = 1;
  std::vector<Dart> out;
  const Dart s = g.vertex_darts(0).front();
  Dart d = s;
  do {
    if (tree[d]) d = g.sigma(g.iota(d));
    else {
      out.push_back(d);
      d = g.sigma(d);
    }
  } while (d != s);
  return out;
}

// Product of the arc words along the boundary of the polygon obtained by
// cutting the surface along the non-tree arcs; a rotation of the start
// gives a conjugate.
inline FreeWord boundary_word(const FatGraph& g, const PiMarking& pm, int start_index = 0) {
  if (g.num_boundaries() != 1) throw Error(ErrorCode::NotSpine, "boundary word needs one boundary cycle");
  const auto contour = tree_contour(g, cycle_basis(g));
  FreeWord w;
  for (std::size_t i = 0; i < contour.size(); ++i) w = w * pm.values[contour[(start_index + i) % contour.size()]];
  return w;
}

// Tables for N_k arithmetic over a fixed relator: Lyndon basis, ideal
// lattices and group-level lifts of basis and ideal generators.
class NilpotentContext {
 public:
  NilpotentContext(int rank, int K, const MagnusSeries& relator) : n_(rank), K_(K) {
    if (K < 2) throw Error(ErrorCode::InvalidArgument, "truncation must be at least 2");
    relator_ = relator.truncate(K);
    if (relator_.lowest_degree() < 2) throw Error(ErrorCode::InvalidArgument, "relator is not a product of commutators");
    lb_ = std::make_shared<LyndonBasis>(n_, K_);
    const LieElement omega = lb_->coordinates(relator_.degree(2), 2);
    quotient_ = std::make_unique<SurfaceQuotient>(lb_, omega);
    build_lifts();
  }

  NilpotentContext(int rank, int K, const FreeWord& relator) : NilpotentContext(rank, K, magnus(relator, rank, K)) {}

  // Standard relator prod [x_{2i-1}, x_{2i}].
  static FreeWord standard_relator(int g) {
    FreeWord r;
    for (int i = 0; i < g; ++i) r = r * commutator(FreeWord::gen(2 * i + 1), FreeWord::gen(2 * i + 2));
    return r;
  }

  int rank() const { return n_; }
  int truncation() const { return K_; }
  const LyndonBasis& basis() const { return *lb_; }
  const SurfaceQuotient& quotient() const { return *quotient_; }
  const MagnusSeries& relator() const { return relator_; }

  MagnusSeries series(const FreeWord& w) const { return magnus(w, n_, K_); }

  // Group lift of Lyndon basis element i of degree d (iterated commutator
  // of the generators along the standard bracketing).
  const MagnusSeries& basic_commutator(int d, int i) const { return basic_[d][i]; }

  // x_1^h_1 ... x_n^h_n
  MagnusSeries abelian_lift(const IntVector& h) const {
    MagnusSeries s = MagnusSeries::one(n_, K_);
    for (int i = 0; i < n_; ++i) {
      if (!h[i]) continue;
      MagnusSeries x = MagnusSeries::letter(n_, K_, h[i] > 0 ? i + 1 : -(i + 1));
      for (std::int64_t t = 0; t < std::abs(h[i]); ++t) s = s * x;
    }
    return s;
  }

  MagnusSeries power(const MagnusSeries& x, const BigInt& e) const {
    MagnusSeries base = e < 0 ? x.inverse() : x, r = MagnusSeries::one(n_, K_);
    BigInt k = e < 0 ? BigInt(-e) : e;
    while (k > 0) {
      if (k & 1) r = r * base;
      base = base * base;
      k >>= 1;
    }
    return r;
  }

  // Group element with leading term sum_i c_i P_i in degree d.
  MagnusSeries basis_lift(const LieElement& x) const {
    MagnusSeries s = MagnusSeries::one(n_, K_);
    for (std::size_t i = 0; i < x.coords.size(); ++i)
      if (x.coords[i]) s = s * power(basic_[x.degree][i], x.coords[i]);
    return s;
  }

  // Element of the normal closure of the relator with leading term the
  // given combination of ideal generators in degree d.
  MagnusSeries ideal_lift(int d, const std::vector<BigInt>& comb) const {
    MagnusSeries s = MagnusSeries::one(n_, K_);
    for (std::size_t j = 0; j < comb.size(); ++j)
      if (comb[j] != 0) s = s * power(ideal_[d][j], comb[j]);
    return s;
  }

 private:
  void build_lifts() {
    basic_.assign(K_ + 1, {});
    std::map<Word, MagnusSeries> by_word;
    for (int d = 1; d <= K_; ++d)
      for (const auto& w : lb_->words(d)) {
        MagnusSeries s;
        if (d == 1) s = MagnusSeries::letter(n_, K_, w[0] + 1);
        else {
          auto [u, v] = standard_factorization(w);
          s = group_commutator(by_word.at(u), by_word.at(v));
        }
        by_word[w] = s;
        basic_[d].push_back(s);
      }
    ideal_.assign(K_ + 1, {});
    for (int d = 2; d <= K_; ++d)
      for (const auto& w : quotient_->degree(d).generators) {
        MagnusSeries s = relator_;
        for (int p = static_cast<int>(w.size()) - 1; p >= 0; --p)
          s = group_commutator(MagnusSeries::letter(n_, K_, w[p] + 1), s);
        ideal_[d].push_back(s);
      }
  }

  int n_;
  int K_;
  MagnusSeries relator_;
  std::shared_ptr<LyndonBasis> lb_;
  std::unique_ptr<SurfaceQuotient> quotient_;
  std::vector<std::vector<MagnusSeries>> basic_;
  std::vector<std::vector<MagnusSeries>> ideal_;
};

// Coordinates of an element of N_k = pi / Gamma_k: its abelianization and
// one canonical coset representative per degree 2..k.
struct NkCoordinates {
  IntVector h;
  std::vector<LieElement> layers;  // degrees 2..k
  bool is_trivial() const {
    if (!is_zero(h)) return false;
    for (const auto& l : layers)
      if (!l.is_zero()) return false;
    return true;
  }
  friend bool operator==(const NkCoordinates&, const NkCoordinates&) = default;
};

inline NkCoordinates nk_coordinates(const NilpotentContext& ctx, const MagnusSeries& s, int k) {
  if (k > ctx.truncation()) throw Error(ErrorCode::DegreeTooHigh, "k exceeds the truncation degree");
  NkCoordinates c;
  c.h = s.degree(1);
  MagnusSeries cur = ctx.abelian_lift(c.h).inverse() * s;
  for (int d = 2; d <= k; ++d) {
    const LieElement lead = series_component(ctx.basis(), cur, d);
    std::vector<BigInt> comb;
    const LieElement rep = ctx.quotient().reduce(lead, &comb);
    cur = ctx.basis_lift(rep).inverse() * ctx.ideal_lift(d, comb).inverse() * cur;
    c.layers.push_back(rep);
  }
  return c;
}

inline bool surface_nilpotent_equal(const NilpotentContext& ctx, const FreeWord& w1, const FreeWord& w2, int k) {
  return nk_coordinates(ctx, ctx.series(w1 * w2.inverse()), k).is_trivial();
}

// Canonical coset representative of x modulo the ideal.
inline LieElement surface_reduce(const LieElement& x, const SurfaceQuotient& q) { return q.reduce(x); }

// Marking by group elements of F / Gamma_K (upstairs), one series per dart.
struct NkMarking {
  std::vector<MagnusSeries> values;
};

inline NkMarking to_nk_marking(const NilpotentContext& ctx, const PiMarking& pm) {
  NkMarking m;
  for (const auto& w : pm.values) m.values.push_back(ctx.series(w));
  return m;
}

inline NkMarking apply_move_nk(const NkMarking& m, const MoveResult& mr) {
  NkMarking out = m;
  const auto [a, b, c, d] = mr.quad;
  (void)a;
  (void)d;
  const Dart x = mr.flipped, y = mr.graph.iota(x);
  out.values[x] = m.values[b] * m.values[c];
  out.values[y] = out.values[x].inverse();
  return out;
}

// Residual N_k-marking: canonical coordinates of every dart value.
inline std::vector<NkCoordinates> residual_nk(const NilpotentContext& ctx, const PiMarking& pm, int k) {
  if (k > ctx.truncation()) throw Error(ErrorCode::DegreeTooHigh, "k exceeds the configured bound");
  std::vector<NkCoordinates> out;
  for (const auto& w : pm.values) out.push_back(nk_coordinates(ctx, ctx.series(w), k));
  return out;
}

// Conditions of an N_k-marking: antisymmetry and vertex relations in N_k,
// abelianization of full rank.
inline std::optional<std::string> nk_marking_violation(const NilpotentContext& ctx, const FatGraph& g, const NkMarking& m, int k) {
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (!nk_coordinates(ctx, m.values[d] * m.values[g.iota(d)], k).is_trivial())
      return "antisymmetry fails on dart " + std::to_string(d);
  for (int v = 0; v < g.num_vertices(); ++v) {
    MagnusSeries p = MagnusSeries::one(ctx.rank(), ctx.truncation());
    for (Dart d : g.vertex_darts(v)) p = p * m.values[d];
    if (!nk_coordinates(ctx, p, k).is_trivial()) return "vertex relation fails at vertex " + std::to_string(v);
  }
  std::vector<IntVector> ab;
  for (const auto& s : m.values) ab.push_back(s.degree(1));
  if (!spans_lattice(ab, ctx.rank())) return "values do not generate";
  return std::nullopt;
}

struct LambdaResult {
  std::vector<Dart> correspondence;      // start dart -> end dart
  std::vector<LieElement> values;        // per start dart, degree k+1, reduced
};

// lambda_k(e) = mu(e) mu'(e')^-1 in Gamma_k / Gamma_{k+1}, where e' is the
// image of e under an isomorphism of the end graph with the start graph
// that preserves the residual N_k-marking.
inline LambdaResult lambda_k(const NilpotentContext& ctx, const FatGraph& start, const PiMarking& pm,
                             const std::vector<Dart>& steps, int k) {
  if (k < 1 || k + 1 > ctx.truncation()) throw Error(ErrorCode::DegreeTooHigh, "lambda_k needs truncation k+1");
  const NkMarking mu = to_nk_marking(ctx, pm);
  NkMarking cur = mu;
  FatGraph g = start;
  for (Dart e : steps) {
    auto mr = whitehead_move(g, e);
    cur = apply_move_nk(cur, mr);
    g = std::move(mr.graph);
  }
  for (const auto& psi : isomorphisms(start, g)) {
    LambdaResult res;
    bool ok = true;
    for (Dart e = 0; e < start.num_darts() && ok; ++e) {
      const auto c = nk_coordinates(ctx, mu.values[e] * cur.values[psi[e]].inverse(), k + 1);
      ok = is_zero(c.h);
      for (std::size_t i = 0; ok && i + 1 < c.layers.size(); ++i) ok = c.layers[i].is_zero();
      if (ok) res.values.push_back(c.layers.back());
    }
    if (ok) {
      res.correspondence = psi;
      return res;
    }
  }
  throw Error(ErrorCode::NotNkTrivial, "no isomorphism preserves the N_" + std::to_string(k) + "-marking");
}

// Is the residual N_k-marking carried back to itself by the sequence?
inline bool preserves_nk(const NilpotentContext& ctx, const FatGraph& start, const PiMarking& pm, const std::vector<Dart>& steps, int k) {
  try {
    lambda_k(ctx, start, pm, steps, k);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotNkTrivial) return false;
    throw;
  }
}

// Surface quotient tables, read from and written to $TORELLI_LAB_CACHE when set.
inline void sync_quotient_cache(const SurfaceQuotient& q, const std::string& tag) {
  const char* dir = std::getenv("TORELLI_LAB_CACHE");
  if (!dir || !*dir) return;
  std::filesystem::path p = std::filesystem::path(dir) / ("sq_" + tag + ".txt");
  if (std::filesystem::exists(p)) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream os(p);
  if (os) q.save(os);
}

inline std::string format_nk(const NkCoordinates& c) {
  std::ostringstream os;
  os << "h";
  for (auto x : c.h) os << ' ' << x;
  os << '\n';
  for (const auto& l : c.layers) os << format_lie(l);
  return os.str();
}

inline std::string format_pimarks(const FatGraph& g, const PiMarking& pm) {
  std::ostringstream os;
  for (Dart e : g.edges()) os << "pimark " << e << ' ' << format_word(pm.values[e]) << '\n';
  return os.str();
}

// pimark lines for one dart per edge; the relator is recomputed from the
// root vertex product.
inline std::optional<PiMarking> parse_pimarks(const FatGraph& g, const std::vector<std::string>& extra, int rank) {
  std::vector<std::optional<FreeWord>> val(g.num_darts());
  bool any = false;
  for (const auto& line : extra) {
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw != "pimark") continue;
    any = true;
    Dart d;
    if (!(ss >> d) || d < 0 || d >= g.num_darts()) throw Error(ErrorCode::Parse, "bad pimark dart");
    std::string rest;
    std::getline(ss, rest);
    FreeWord w = parse_word(rest);
    if (w.max_generator() > rank) throw Error(ErrorCode::Parse, "pimark generator beyond rank");
    val[d] = w;
    val[g.iota(d)] = w.inverse();
  }
  if (!any) return std::nullopt;
  PiMarking pm;
  pm.rank = rank;
  for (Dart d = 0; d < g.num_darts(); ++d) {
    if (!val[d]) throw Error(ErrorCode::InvalidMarking, "pimark missing for dart " + std::to_string(d));
    pm.values.push_back(*val[d]);
  }
  pm.relator = vertex_product(g, pm.values, 0);
  return pm;
}

}  // namespace torelli
