// Orbit census of spines (unmarked or level-N marked): enumeration by
// moves and collapses, the orbit database, presentation data, orbifold
// Euler characteristics and a search for closed Torelli move sequences.
#pragma once

#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "torelli/cocycle.hpp"
#include "torelli/fatgraph.hpp"
#include "torelli/marking.hpp"

namespace torelli {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr const char* kCensusVersion = "1";

// One-vertex spine x1 y1 X1 Y1 ... expanded into a trivalent graph. Seed 0
// always splits off the first two darts; other seeds pick random splits.
inline FatGraph seed_spine(int g, std::uint64_t seed = 0) {
  if (g < 1) throw Error(ErrorCode::SeedInvalid, "genus must be at least 1");
  const int n = 4 * g;
  std::vector<Dart> sigma(n), iota(n);
  for (int d = 0; d < n; ++d) sigma[d] = (d + 1) % n;
  for (int i = 0; i < g; ++i) {
    iota[4 * i] = 4 * i + 2;
    iota[4 * i + 2] = 4 * i;
    iota[4 * i + 1] = 4 * i + 3;
    iota[4 * i + 3] = 4 * i + 1;
  }
  FatGraph cur = FatGraph::build(sigma, iota);
  std::mt19937_64 rng(seed);
  while (!cur.is_trivalent()) {
    if (seed == 0) {
      int v = 0;
      while (cur.valence(v) == 3) ++v;
      cur = expand_vertex(cur, v, 0, 2).graph;
    } else {
      auto ex = all_expansions(cur);
      cur = ex[std::uniform_int_distribution<std::size_t>(0, ex.size() - 1)(rng)].graph;
    }
  }
  if (!cur.is_spine() || cur.genus() != g) throw Error(ErrorCode::SeedInvalid, "seed is not a one-boundary spine");
  return cur;
}

// Marking labels carried by census graphs: empty for unmarked graphs,
// otherwise residues mod `modulus` (0 means plain integers).
struct LabeledGraph {
  FatGraph graph;
  std::vector<DartLabel> labels;
  std::int64_t modulus = 0;

  CanonicalForm canonical() const { return canonical_form(graph, labels); }
  std::string key() const { return canonical().key(); }
};

namespace detail {

inline std::int64_t reduce_label(std::int64_t v, std::int64_t modulus) { return modulus ? mod_floor(v, modulus) : v; }

inline DartLabel label_neg(const DartLabel& a, std::int64_t N) {
  DartLabel r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = reduce_label(-a[i], N);
  return r;
}

inline DartLabel label_sum(const std::vector<const DartLabel*>& xs, std::size_t dim, std::int64_t N) {
  DartLabel r(dim, 0);
  for (const auto* x : xs)
    for (std::size_t i = 0; i < dim; ++i) r[i] = reduce_label(add_checked(r[i], (*x)[i]), N);
  return r;
}

}  // namespace detail

inline LabeledGraph labeled_move(const LabeledGraph& lg, Dart e) {
  auto mr = whitehead_move(lg.graph, e);
  LabeledGraph out{std::move(mr.graph), lg.labels, lg.modulus};
  if (!out.labels.empty()) {
    const auto [a, b, c, d] = mr.quad;
    (void)b;
    (void)c;
    const Dart x = mr.flipped;
    const std::size_t dim = lg.labels[0].size();
    out.labels[x] = detail::label_neg(detail::label_sum({&lg.labels[d], &lg.labels[a]}, dim, lg.modulus), lg.modulus);
    out.labels[out.graph.iota(x)] = detail::label_neg(out.labels[x], lg.modulus);
  }
  return out;
}

inline LabeledGraph labeled_collapse(const LabeledGraph& lg, Dart e) {
  auto cr = collapse_edge(lg.graph, e);
  LabeledGraph out{std::move(cr.graph), {}, lg.modulus};
  if (!lg.labels.empty()) {
    out.labels.resize(out.graph.num_darts());
    for (Dart d = 0; d < lg.graph.num_darts(); ++d)
      if (cr.dart_map[d] >= 0) out.labels[cr.dart_map[d]] = lg.labels[d];
  }
  return out;
}

// Every expansion; new darts get the values forced by the vertex conditions.
inline std::vector<LabeledGraph> labeled_expansions(const LabeledGraph& lg) {
  std::vector<LabeledGraph> out;
  for (auto& ex : all_expansions(lg.graph)) {
    LabeledGraph h{std::move(ex.graph), lg.labels, lg.modulus};
    if (!h.labels.empty()) {
      const std::size_t dim = lg.labels[0].size();
      std::vector<const DartLabel*> block;
      for (Dart d = h.graph.sigma(ex.first_new); d != ex.first_new; d = h.graph.sigma(d)) block.push_back(&lg.labels[d]);
      h.labels.resize(h.graph.num_darts());
      h.labels[ex.first_new] = detail::label_neg(detail::label_sum(block, dim, lg.modulus), lg.modulus);
      h.labels[ex.second_new] = detail::label_neg(h.labels[ex.first_new], lg.modulus);
    }
    out.push_back(std::move(h));
  }
  return out;
}

inline LabeledGraph labeled_from_key(const std::string& key, std::int64_t modulus) {
  LabeledGraph lg;
  lg.modulus = modulus;
  lg.graph = graph_from_key(key, &lg.labels);
  return lg;
}

inline int codimension_of(int g, int num_darts) { return 6 * g - 3 - num_darts / 2; }

// Highest codimension of a one-boundary spine: a single vertex.
inline int top_codimension(int g) { return 4 * g - 3; }

enum class CensusType { Unmarked, LevelN, Homology };

struct CensusRecord {
  std::string key;
  int codim = 0;
  int automorphisms = 0;
  // keys of the adjacent cells: expansions (codim - 1), then collapses
  // (codim + 1), with multiplicity
  std::vector<std::string> neighbors;
  friend bool operator==(const CensusRecord&, const CensusRecord&) = default;
};

struct OrbitDatabase {
  int genus = 0;
  CensusType type = CensusType::Unmarked;
  std::int64_t modulus = 0;
  int max_codim = 0;
  std::string version = kCensusVersion;
  std::map<std::string, CensusRecord> records;
  int completed_codim = -1;  // last layer with a checkpoint

  // Re-inserting an identical record is a no-op.
  void insert(const CensusRecord& r) {
    auto [it, fresh] = records.emplace(r.key, r);
    if (!fresh && it->second != r) throw Error(ErrorCode::InvalidArgument, "conflicting record for key " + r.key);
  }
  const CensusRecord* find(const std::string& key) const {
    auto it = records.find(key);
    return it == records.end() ? nullptr : &it->second;
  }
  std::vector<const CensusRecord*> layer(int codim) const {
    std::vector<const CensusRecord*> out;
    for (const auto& [k, r] : records)
      if (r.codim == codim) out.push_back(&r);
    return out;
  }
  std::size_t count(int codim) const { return layer(codim).size(); }
  LabeledGraph representative(const std::string& key) const {
    return labeled_from_key(key, type == CensusType::LevelN ? modulus : 0);
  }
};

inline std::string census_type_name(const OrbitDatabase& db) {
  switch (db.type) {
    case CensusType::Unmarked: return "unmarked";
    case CensusType::LevelN: return "levelN:" + std::to_string(db.modulus);
    case CensusType::Homology: return "hmark";
  }
  return "unmarked";
}

inline std::string format_record(const CensusRecord& r) {
  std::string s = r.key + ' ' + std::to_string(r.codim) + ' ' + std::to_string(r.automorphisms) + " :";
  for (const auto& n : r.neighbors) s += ' ' + n;
  return s;
}

inline std::string format_header(const OrbitDatabase& db) {
  return "census g=" + std::to_string(db.genus) + " type=" + census_type_name(db) + "\nmeta max_codim=" +
         std::to_string(db.max_codim) + " version=" + db.version + "\n";
}

// Layers in codimension order, each closed by a checkpoint line.
inline std::string format_database(const OrbitDatabase& db) {
  std::ostringstream os;
  os << format_header(db);
  for (int c = 0; c <= db.max_codim; ++c) {
    for (const auto* r : db.layer(c)) os << format_record(*r) << '\n';
    if (c <= db.completed_codim) os << "checkpoint codim=" << c << '\n';
  }
  return os.str();
}

inline OrbitDatabase parse_database(std::istream& in) {
  OrbitDatabase db;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "empty census file");
  {
    std::istringstream ss(line);
    std::string kw, gs, ts;
    if (!(ss >> kw >> gs >> ts) || kw != "census" || gs.rfind("g=", 0) != 0 || ts.rfind("type=", 0) != 0)
      throw Error(ErrorCode::Parse, "bad census header");
    db.genus = std::stoi(gs.substr(2));
    const std::string t = ts.substr(5);
    if (t == "unmarked") db.type = CensusType::Unmarked;
    else if (t == "hmark") db.type = CensusType::Homology;
    else if (t.rfind("levelN:", 0) == 0) {
      db.type = CensusType::LevelN;
      db.modulus = std::stoll(t.substr(7));
    } else throw Error(ErrorCode::Parse, "unknown census type " + t);
  }
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first == "meta") {
      std::string kv;
      while (ss >> kv) {
        if (kv.rfind("max_codim=", 0) == 0) db.max_codim = std::stoi(kv.substr(10));
        else if (kv.rfind("version=", 0) == 0) db.version = kv.substr(8);
      }
    } else if (first == "checkpoint") {
      std::string kv;
      if (!(ss >> kv) || kv.rfind("codim=", 0) != 0) throw Error(ErrorCode::Parse, "bad checkpoint line");
      db.completed_codim = std::max(db.completed_codim, std::stoi(kv.substr(6)));
    } else {
      CensusRecord r;
      r.key = first;
      std::string colon;
      if (!(ss >> r.codim >> r.automorphisms >> colon) || colon != ":") throw Error(ErrorCode::Parse, "bad census record");
      std::string n;
      while (ss >> n) r.neighbors.push_back(n);
      db.insert(r);
    }
  }
  return db;
}

namespace detail {

// Deterministic parallel map: results are stored by input index.
template <class T, class F>
auto parallel_map(const std::vector<T>& in, int jobs, F f) {
  using R = decltype(f(in[0]));
  std::vector<R> out(in.size());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(in.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
    return out;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < in.size(); i += jobs) out[i] = f(in[i]);
    });
  for (auto& th : pool) th.join();
  return out;
}

inline std::vector<std::string> move_neighbors(const LabeledGraph& lg) {
  std::vector<std::string> out;
  for (Dart e : lg.graph.edges())
    if (!lg.graph.is_loop(e)) out.push_back(labeled_move(lg, e).key());
  return out;
}

inline std::vector<std::string> collapse_neighbors(const LabeledGraph& lg) {
  std::vector<std::string> out;
  for (Dart e : lg.graph.edges())
    if (!lg.graph.is_loop(e)) out.push_back(labeled_collapse(lg, e).key());
  return out;
}

inline std::vector<std::string> expansion_neighbors(const LabeledGraph& lg) {
  std::vector<std::string> out;
  for (const auto& h : labeled_expansions(lg)) out.push_back(h.key());
  return out;
}

}  // namespace detail

struct CensusOptions {
  int max_codim = 2;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string checkpoint;  // database file to resume from and append to
};

namespace detail {

inline void write_layer(std::ostream& os, const OrbitDatabase& db, int c) {
  for (const auto* r : db.layer(c)) os << format_record(*r) << '\n';
  os << "checkpoint codim=" << c << '\n';
  os.flush();
}

// Shared driver. The seed determines only the starting point.
inline OrbitDatabase enumerate(int g, CensusType type, std::int64_t N, const CensusOptions& opt) {
  if (opt.max_codim < 0) throw Error(ErrorCode::InvalidArgument, "max codimension must be nonnegative");
  const int max_codim = std::min(opt.max_codim, top_codimension(g));
  OrbitDatabase db;
  db.genus = g;
  db.type = type;
  db.modulus = N;
  db.max_codim = max_codim;
  const std::int64_t label_mod = type == CensusType::LevelN ? N : 0;

  // resume: keep checkpointed layers below the last one, which is redone
  // to pick up its collapse neighbors
  int resume_from = 0;
  std::vector<std::string> resumed_keys;
  if (!opt.checkpoint.empty()) {
    std::ifstream in(opt.checkpoint);
    if (in) {
      OrbitDatabase old = parse_database(in);
      if (old.genus != g || old.type != type || old.modulus != N)
        throw Error(ErrorCode::InvalidArgument, "checkpoint belongs to a different census");
      if (old.completed_codim >= 0) {
        resume_from = std::min(old.completed_codim, max_codim);
        for (const auto& [k, r] : old.records) {
          if (r.codim < resume_from) db.insert(r);
          else if (r.codim == resume_from) resumed_keys.push_back(k);
        }
        db.completed_codim = resume_from - 1;
      }
    }
  }
  std::ofstream ckpt;
  if (!opt.checkpoint.empty()) {
    ckpt.open(opt.checkpoint, std::ios::trunc);
    ckpt << format_header(db);
    for (int c = 0; c < resume_from; ++c) write_layer(ckpt, db, c);
  }

  std::vector<std::string> layer;
  if (resume_from == 0 && resumed_keys.empty()) {
    LabeledGraph seed{seed_spine(g, opt.seed), {}, label_mod};
    if (type == CensusType::LevelN) {
      if (N < 2) throw Error(ErrorCode::InvalidModulus, "modulus must be at least 2");
      // tautological marking in a symplectic basis, so the key set does not
      // depend on the seed
      auto m = tautological_marking(seed.graph);
      const IntMatrix binv = unimodular_inverse(symplectic_basis(m.omega));
      for (const auto& v : m.values) {
        IntVector w = binv * v;
        for (auto& x : w) x = mod_floor(x, N);
        seed.labels.push_back(w);
      }
    }
    // codimension 0: closure under moves
    std::set<std::string> seen{seed.key()};
    std::vector<std::string> frontier{*seen.begin()};
    while (!frontier.empty()) {
      auto nbrs = parallel_map(frontier, opt.jobs, [&](const std::string& k) { return move_neighbors(labeled_from_key(k, label_mod)); });
      std::set<std::string> next;
      for (const auto& ns : nbrs)
        for (const auto& k : ns)
          if (seen.insert(k).second) next.insert(k);
      frontier.assign(next.begin(), next.end());
    }
    layer.assign(seen.begin(), seen.end());
  } else {
    layer = resumed_keys;
  }

  for (int c = resume_from; c <= max_codim; ++c) {
    const bool last = c == max_codim;
    struct Incidence {
      int aut = 0;
      std::vector<std::string> down, up;
    };
    auto inc = parallel_map(layer, opt.jobs, [&](const std::string& k) {
      const LabeledGraph lg = labeled_from_key(k, label_mod);
      Incidence r;
      r.aut = lg.canonical().automorphisms;
      if (c > 0) r.down = expansion_neighbors(lg);
      if (!last) r.up = collapse_neighbors(lg);
      return r;
    });
    std::set<std::string> next;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      CensusRecord r{layer[i], c, inc[i].aut, inc[i].down};
      r.neighbors.insert(r.neighbors.end(), inc[i].up.begin(), inc[i].up.end());
      db.insert(r);
      next.insert(inc[i].up.begin(), inc[i].up.end());
    }
    db.completed_codim = c;
    if (ckpt.is_open()) write_layer(ckpt, db, c);
    layer.assign(next.begin(), next.end());
  }
  return db;
}

}  // namespace detail

inline OrbitDatabase enumerate_unmarked(int g, const CensusOptions& opt = {}) {
  return detail::enumerate(g, CensusType::Unmarked, 0, opt);
}

inline OrbitDatabase enumerate_levelN(int g, std::int64_t N, const CensusOptions& opt = {}) {
  if (g < 1) throw Error(ErrorCode::SeedInvalid, "genus must be at least 1");
  if (N < 2) throw Error(ErrorCode::InvalidModulus, "modulus must be at least 2");
  return detail::enumerate(g, CensusType::LevelN, N, opt);
}

inline bool is_complete(const OrbitDatabase& db) {
  return !db.records.empty() && db.completed_codim >= top_codimension(db.genus);
}

// Sum over orbits of (-1)^codim / |Aut|; needs every codimension.
inline Rational orbifold_euler(const OrbitDatabase& db) {
  if (db.records.empty()) throw Error(ErrorCode::IncompleteCensus, "empty census");
  if (!is_complete(db)) throw Error(ErrorCode::IncompleteCensus, "census stops below the top codimension");
  Rational chi = 0;
  for (const auto& [k, r] : db.records) chi += Rational(r.codim % 2 ? -1 : 1, r.automorphisms);
  return chi;
}

inline std::string format_rational(const Rational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << '/' << denominator(q);
  return os.str();
}

// |Sp(2g, Z/N)| = N^(2g^2+g) prod_{p | N} prod_{i=1..g} (1 - p^(-2i)).
inline BigInt symplectic_group_order(int g, std::int64_t N) {
  if (N < 2) throw Error(ErrorCode::InvalidModulus, "modulus must be at least 2");
  Rational r = 1;
  for (int i = 0; i < 2 * g * g + g; ++i) r *= N;
  std::int64_t m = N;
  for (std::int64_t p = 2; p <= m; ++p) {
    if (m % p) continue;
    while (m % p == 0) m /= p;
    BigInt pp = 1;
    for (int i = 1; i <= g; ++i) {
      pp *= p * p;
      r *= Rational(pp - 1, pp);
    }
  }
  if (denominator(r) != 1) throw Error(ErrorCode::InvalidArgument, "group order is not integral");
  return numerator(r);
}

// Symplectic transvections along e_i and e_i + e_j for the standard form;
// they generate Sp(2g, Z).
inline std::vector<IntMatrix> symplectic_generators(int g) {
  const IntMatrix J = standard_form(g);
  std::vector<IntMatrix> out;
  for (int i = 0; i < 2 * g; ++i) {
    IntVector v(2 * g, 0);
    v[i] = 1;
    out.push_back(transvection(v, 1, J));
    for (int j = i + 1; j < 2 * g; ++j) {
      IntVector w = v;
      w[j] = 1;
      out.push_back(transvection(w, 1, J));
    }
  }
  return out;
}

// Applies M to every label and returns the key of the result.
inline std::string act_on_labels(const LabeledGraph& lg, const IntMatrix& M) {
  LabeledGraph h = lg;
  for (auto& l : h.labels) {
    IntVector w = M * IntVector(l.begin(), l.end());
    for (auto& x : w) x = detail::reduce_label(x, lg.modulus);
    l.assign(w.begin(), w.end());
  }
  return h.key();
}

// Is every record of the given codimension carried into the census by the
// generators of Sp(2g, Z/N)?
inline bool closed_under_symplectic(const OrbitDatabase& db, int codim = 0) {
  if (db.type != CensusType::LevelN) throw Error(ErrorCode::InvalidArgument, "not a level-N census");
  const auto gens = symplectic_generators(db.genus);
  for (const auto* r : db.layer(codim)) {
    const LabeledGraph lg = db.representative(r->key);
    for (const auto& M : gens)
      if (!db.find(act_on_labels(lg, M))) return false;
  }
  return true;
}

// Strips the labels from a level-N key.
inline std::string unmarked_key(const std::string& key) {
  return canonical_form(graph_from_key(key)).key();
}

enum class RelationKind { Involutivity, Commutativity, Pentagon };

inline std::string_view to_string(RelationKind k) {
  switch (k) {
    case RelationKind::Involutivity: return "involutivity";
    case RelationKind::Commutativity: return "commutativity";
    case RelationKind::Pentagon: return "pentagon";
  }
  return "";
}

struct Relation {
  RelationKind kind;
  std::string cell;                     // codim-1 key (involutivity) or codim-2 key
  std::vector<std::string> generators;  // codim-1 faces
  // for commutativity: the faces grouped by the vertex that was resolved
  std::vector<std::vector<std::string>> supports;
};

struct PresentationReport {
  std::vector<std::string> generators;
  std::vector<Relation> relations;
  // labeled slots for user-supplied generators (Johnson, Sp lifts)
  std::vector<std::string> opaque_generators;

  std::size_t count(RelationKind k) const {
    std::size_t n = 0;
    for (const auto& r : relations) n += r.kind == k;
    return n;
  }
};

inline PresentationReport extract_presentation(const OrbitDatabase& db, std::vector<std::string> opaque = {}) {
  if (db.records.empty() || db.completed_codim < 2) throw Error(ErrorCode::IncompleteCensus, "census must reach codimension 2");
  PresentationReport rep;
  rep.opaque_generators = std::move(opaque);
  for (const auto* r : db.layer(1)) {
    rep.generators.push_back(r->key);
    rep.relations.push_back({RelationKind::Involutivity, r->key, {r->key}, {}});
  }
  const std::int64_t label_mod = db.type == CensusType::LevelN ? db.modulus : 0;
  for (const auto* r : db.layer(2)) {
    const LabeledGraph lg = labeled_from_key(r->key, label_mod);
    Relation rel;
    rel.cell = r->key;
    for (const auto& n : r->neighbors)
      if (const auto* nr = db.find(n); nr && nr->codim == 1) rel.generators.push_back(n);
    std::vector<int> high;
    for (int v = 0; v < lg.graph.num_vertices(); ++v)
      if (lg.graph.valence(v) > 3) high.push_back(v);
    if (high.size() == 1) {
      rel.kind = RelationKind::Pentagon;
    } else {
      rel.kind = RelationKind::Commutativity;
      // expansions are listed vertex by vertex, two per 4-valent vertex
      rel.supports = {{rel.generators.begin(), rel.generators.begin() + 2}, {rel.generators.begin() + 2, rel.generators.end()}};
    }
    for (const auto& gk : rel.generators)
      if (!db.find(gk)) throw Error(ErrorCode::IncompleteCensus, "relation references a missing generator");
    rep.relations.push_back(std::move(rel));
  }
  return rep;
}

// Closed move sequences that fix the tautological homology marking of the
// first codim-0 record. Loops of the codim-0 move graph (one per edge
// outside a BFS spanning tree, both directions) act on marked graphs;
// a breadth-first search over their words records every pair of words
// that reach the same marked graph, closing the pair into one sequence.
struct TorelliSearchOptions {
  int max_loops = 2;        // words in the loop generators up to this length
  int max_words = 32;       // stop after this many sequences
  int max_moves = 400;      // discard longer sequences
};

namespace detail {

struct Walker {
  FatGraph graph;
  HomologyMarking marking;
  std::vector<Dart> path;
};

inline std::vector<DartLabel> marking_labels(const HomologyMarking& m) {
  std::vector<DartLabel> out;
  for (const auto& v : m.values) out.emplace_back(v.begin(), v.end());
  return out;
}

inline void walk(Walker& w, Dart e) {
  auto mr = whitehead_move(w.graph, e);
  w.marking = apply_move(w.marking, mr);
  w.graph = std::move(mr.graph);
  w.path.push_back(e);
}

inline std::vector<Dart> inverse_permutation(const std::vector<Dart>& p) {
  std::vector<Dart> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<Dart>(i);
  return q;
}

}  // namespace detail

inline std::vector<MoveSequence> torelli_word_search(const OrbitDatabase& db, const TorelliSearchOptions& opt = {}) {
  if (db.type != CensusType::Unmarked || db.count(0) == 0) throw Error(ErrorCode::IncompleteCensus, "needs an unmarked codim-0 census");
  // codim-0 move graph on canonical representatives
  struct Arc {
    Dart dart;
    std::string target;
  };
  std::map<std::string, std::vector<Arc>> arcs;
  for (const auto* r : db.layer(0)) {
    const FatGraph g = graph_from_key(r->key);
    for (Dart e : g.edges()) {
      if (g.is_loop(e)) continue;
      const std::string t = canonical_form(whitehead_move(g, e).graph).key();
      if (!db.find(t)) throw Error(ErrorCode::IncompleteCensus, "move leaves the census");
      arcs[r->key].push_back({e, t});
    }
  }
  const std::string base = db.layer(0).front()->key;
  // BFS tree: parent arc of every node
  std::map<std::string, std::pair<std::string, Dart>> parent;
  std::deque<std::string> q{base};
  parent[base] = {"", -1};
  while (!q.empty()) {
    const std::string k = q.front();
    q.pop_front();
    for (const auto& a : arcs[k])
      if (!parent.count(a.target)) {
        parent[a.target] = {k, a.dart};
        q.push_back(a.target);
      }
  }
  auto tree_path = [&](std::string k) {  // arcs from base to k
    std::vector<std::pair<std::string, Dart>> p;
    while (k != base) {
      p.push_back(parent[k]);
      k = parent[k].first;
    }
    std::reverse(p.begin(), p.end());
    return p;
  };
  auto back_arc = [&](const std::string& child) -> Dart {  // child -> parent
    for (const auto& a : arcs[child])
      if (a.target == parent[child].first) return a.dart;
    throw Error(ErrorCode::IncompleteCensus, "move graph is not symmetric");
  };

  // Moves on a concrete graph isomorphic to `node`, given in canonical darts.
  auto concrete = [](const FatGraph& g, Dart canonical_dart) {
    const auto cf = canonical_form(g);
    return detail::inverse_permutation(cf.relabel)[canonical_dart];
  };

  // loop generators as move sequences starting at the canonical base graph
  const FatGraph g0 = graph_from_key(base);
  struct Loop {
    std::vector<Dart> moves;
    std::vector<Dart> closing;  // end graph -> g0
  };
  std::vector<Loop> loops;
  for (const auto& [k, as] : arcs) {
    for (const auto& a : as) {
      const auto& pk = parent[a.target];
      if (pk.first == k && pk.second == a.dart) continue;       // tree arc
      if (parent[k].first == a.target && back_arc(k) == a.dart) continue;  // its return
      FatGraph cur = g0;
      std::vector<Dart> mv;
      auto step = [&](Dart cd) {
        const Dart d = concrete(cur, cd);
        mv.push_back(d);
        cur = whitehead_move(cur, d).graph;
      };
      for (const auto& [node, d] : tree_path(k)) step(d);
      step(a.dart);
      for (std::string t = a.target; t != base; t = parent[t].first) step(back_arc(t));
      auto cf_end = canonical_form(cur);
      auto cf_0 = canonical_form(g0);
      std::vector<Dart> closing(g0.num_darts());
      const auto inv0 = detail::inverse_permutation(cf_0.relabel);
      for (Dart d = 0; d < g0.num_darts(); ++d) closing[d] = inv0[cf_end.relabel[d]];
      loops.push_back({mv, closing});
    }
  }

  const HomologyMarking m0 = tautological_marking(g0);
  struct State {
    detail::Walker w;
    std::vector<Dart> phi;  // g0 darts -> current darts
    int depth = 0;
  };
  std::map<std::string, State> visited;
  auto marked_key = [](const detail::Walker& w) { return canonical_form(w.graph, detail::marking_labels(w.marking)); };
  std::vector<Dart> id(g0.num_darts());
  std::iota(id.begin(), id.end(), 0);
  State s0{{g0, m0, {}}, id, 0};
  const std::string key0 = marked_key(s0.w).key();
  visited.emplace(key0, s0);
  std::vector<std::string> frontier{key0};
  std::vector<MoveSequence> out;
  std::set<std::vector<Dart>> found;
  for (int depth = 1; depth <= opt.max_loops && static_cast<int>(out.size()) < opt.max_words; ++depth) {
    std::vector<std::string> next;
    for (const auto& fk : frontier) {
      for (const auto& L : loops) {
        if (static_cast<int>(out.size()) >= opt.max_words) break;
        State s = visited.at(fk);
        for (Dart d : L.moves) detail::walk(s.w, s.phi[d]);
        // current darts relate to the end graph of the loop through phi
        std::vector<Dart> phi(s.phi.size());
        const auto inv_closing = detail::inverse_permutation(L.closing);
        for (Dart d = 0; d < g0.num_darts(); ++d) phi[d] = s.phi[inv_closing[d]];
        s.phi = phi;
        s.depth = depth;
        const auto cf = marked_key(s.w);
        const std::string k = cf.key();
        auto it = visited.find(k);
        if (it == visited.end()) {
          visited.emplace(k, s);
          next.push_back(k);
          continue;
        }
        // close: retrace the other path through a marked isomorphism
        const detail::Walker& other = it->second.w;
        const auto cf_other = marked_key(other);
        const auto inv_cf = detail::inverse_permutation(cf.relabel);
        detail::Walker w = s.w;
        for (auto p = other.path.rbegin(); p != other.path.rend(); ++p) detail::walk(w, inv_cf[cf_other.relabel[*p]]);
        if (static_cast<int>(w.path.size()) > opt.max_moves || w.path.empty()) continue;
        if (marked_key(w).key() != key0) throw Error(ErrorCode::IdentityFailure, "closed Torelli word does not close");
        if (!found.insert(w.path).second) continue;
        out.push_back({g0, m0, w.path});
      }
    }
    frontier = std::move(next);
  }
  return out;
}

struct CellSweep {
  std::size_t states = 0;
  std::size_t cells = 0;
  std::size_t failures = 0;  // cells with nonzero residual
  std::size_t equivariance_checks = 0;
  std::size_t equivariance_failures = 0;
  bool ok() const { return states > 0 && failures == 0 && equivariance_failures == 0; }
};

// Every codimension-two cell incident to a marked graph within `radius`
// moves of (g, m): cocycle residuals, and equivariance of j under the
// automorphisms of each visited graph.
inline CellSweep verify_cells(const FatGraph& g, const HomologyMarking& m, int radius) {
  CellSweep out;
  std::set<std::string> seen, cells;
  std::vector<detail::Walker> frontier{{g, m, {}}};
  seen.insert(canonical_form(g, detail::marking_labels(m)).key());
  for (int r = 0; r <= radius && !frontier.empty(); ++r) {
    std::vector<detail::Walker> next;
    for (const auto& w : frontier) {
      ++out.states;
      for (auto [e, f] : codim2_edge_pairs(w.graph)) {
        std::vector<Dart> map;
        LabeledGraph deg{collapse_pair(w.graph, e, f, &map), {}, 0};
        deg.labels.resize(deg.graph.num_darts());
        for (Dart d = 0; d < w.graph.num_darts(); ++d)
          if (map[d] >= 0) deg.labels[map[d]].assign(w.marking.values[d].begin(), w.marking.values[d].end());
        if (!cells.insert(deg.key()).second) continue;
        ++out.cells;
        if (!verify_cocycle(two_cell_at(w.graph, w.marking, e, f)).ok) ++out.failures;
      }
      for (const auto& phi : automorphisms(w.graph)) {
        auto M = induced_basis_change(w.graph, w.marking, w.marking, phi);
        if (!M) {
          ++out.equivariance_failures;
          continue;
        }
        for (Dart e : w.graph.edges()) {
          if (w.graph.is_loop(e)) continue;
          ++out.equivariance_checks;
          if (!equivariance_check({w.graph, w.marking, {e}}, {w.graph, w.marking, phi, *M})) ++out.equivariance_failures;
        }
      }
      if (r == radius) continue;
      for (Dart e : w.graph.edges()) {
        if (w.graph.is_loop(e)) continue;
        detail::Walker n = w;
        detail::walk(n, e);
        if (seen.insert(canonical_form(n.graph, detail::marking_labels(n.marking)).key()).second) next.push_back(std::move(n));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace torelli
