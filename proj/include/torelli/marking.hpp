// Integer homology of a spine: cycle basis, intersection form, homology
// markings, their transport under Whitehead moves, reduction mod N and
// symplectic utilities.
#pragma once

#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torelli/core.hpp"
#include "torelli/fatgraph.hpp"

namespace torelli {

// Closed walk as the sequence of darts traversed. Traversing dart d goes
// from vertex(iota d) to vertex(d).
using DartCycle = std::vector<Dart>;

struct CycleBasis {
  std::vector<Dart> tree_edges;      // edge representatives in the maximal tree
  std::vector<Dart> nontree_darts;   // generator dart of each basis cycle
  std::vector<DartCycle> cycles;
  std::vector<int> parent_dart;      // per vertex: dart at that vertex on its tree edge to the parent (-1 at root)
  std::vector<int> bfs_order;        // vertices, root first
};

namespace detail {
struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[b] = a;
    return true;
  }
};
}  // namespace detail

// Maximal tree by lowest edge representative first; one fundamental cycle
// per remaining edge, in increasing order of representative.
inline CycleBasis cycle_basis(const FatGraph& g) {
  if (!g.is_spine()) throw Error(ErrorCode::NotSpine, "graph is not a spine (one boundary, genus >= 1)");
  CycleBasis cb;
  detail::UnionFind uf(g.num_vertices());
  std::vector<char> in_tree(g.num_darts(), 0);
  for (Dart e : g.edges()) {
    if (uf.unite(g.vertex(e), g.vertex(g.iota(e)))) {
      cb.tree_edges.push_back(e);
      in_tree[e] = in_tree[g.iota(e)] = 1;
    } else {
      cb.nontree_darts.push_back(e);
    }
  }
  // root the tree at vertex 0
  cb.parent_dart.assign(g.num_vertices(), -1);
  std::vector<char> seen(g.num_vertices(), 0);
  cb.bfs_order = {0};
  seen[0] = 1;
  for (std::size_t i = 0; i < cb.bfs_order.size(); ++i) {
    const int v = cb.bfs_order[i];
    for (Dart d : g.vertex_darts(v)) {
      if (!in_tree[d]) continue;
      const Dart o = g.iota(d);
      const int w = g.vertex(o);
      if (seen[w]) continue;
      seen[w] = 1;
      cb.parent_dart[w] = o;
      cb.bfs_order.push_back(w);
    }
  }
  auto path_to_root = [&](int v) {
    // darts traversed walking from v up to the root
    std::vector<Dart> p;
    while (cb.parent_dart[v] >= 0) {
      const Dart up = g.iota(cb.parent_dart[v]);  // points into the parent
      p.push_back(up);
      v = g.vertex(up);
    }
    return p;
  };
  for (Dart x : cb.nontree_darts) {
    // traverse x, then walk the tree from vertex(x) back to vertex(iota x)
    auto up = path_to_root(g.vertex(x));
    auto down_rev = path_to_root(g.vertex(g.iota(x)));
    // strip the common part near the root
    while (!up.empty() && !down_rev.empty() && up.back() == down_rev.back()) {
      up.pop_back();
      down_rev.pop_back();
    }
    DartCycle cyc{x};
    cyc.insert(cyc.end(), up.begin(), up.end());
    for (auto it = down_rev.rbegin(); it != down_rev.rend(); ++it) cyc.push_back(g.iota(*it));
    cb.cycles.push_back(std::move(cyc));
  }
  if (static_cast<int>(cb.cycles.size()) != 2 * g.genus())
    throw Error(ErrorCode::NotSpine, "cycle count differs from 2g");
  return cb;
}

// Signed number of traversals of dart a minus traversals of iota(a).
inline int traversal_count(const FatGraph& g, const DartCycle& z, Dart a) {
  int c = 0;
  for (Dart d : z) {
    if (d == a) ++c;
    if (d == g.iota(a)) --c;
  }
  return c;
}

namespace detail {

// Algebraic intersection of gamma with the left push-off of delta, summed
// over the vertex disks where they meet.
inline int intersect(const FatGraph& g, const DartCycle& gamma, const DartCycle& delta, bool left = true) {
  int total = 0;
  const int m = static_cast<int>(gamma.size()), n = static_cast<int>(delta.size());
  for (int i = 0; i < m; ++i) {
    const Dart p = gamma[i], q = g.iota(gamma[(i + 1) % m]);
    const int v = g.vertex(p);
    const int k = g.valence(v);
    const int P = 4 * g.position(p), Q = 4 * g.position(q);
    for (int j = 0; j < n; ++j) {
      const Dart p2 = delta[j];
      if (g.vertex(p2) != v) continue;
      const Dart q2 = g.iota(delta[(j + 1) % n]);
      const int off = left ? 1 : -1;
      const int A = (4 * g.position(p2) - off + 4 * k) % (4 * k);
      const int B = (4 * g.position(q2) + off + 4 * k) % (4 * k);
      // inside the counterclockwise open arc from P to Q
      auto inside = [&](int x) {
        const int len = ((Q - P) % (4 * k) + 4 * k) % (4 * k);
        const int off2 = ((x - P) % (4 * k) + 4 * k) % (4 * k);
        return off2 > 0 && off2 < len;
      };
      const bool a_in = inside(A), b_in = inside(B);
      if (a_in && !b_in) ++total;
      if (!a_in && b_in) --total;
    }
  }
  return total;
}

}  // namespace detail

// Omega(i, j) = algebraic intersection number of cycles z_i and z_j.
inline IntMatrix intersection_form(const FatGraph& g, const CycleBasis& cb) {
  const int n = static_cast<int>(cb.cycles.size());
  IntMatrix om(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) om(i, j) = detail::intersect(g, cb.cycles[i], cb.cycles[j]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (om(i, j) != -om(j, i)) throw Error(ErrorCode::NonUnimodular, "intersection form is not alternating");
  if (determinant(om) != 1) throw Error(ErrorCode::NonUnimodular, "intersection form is not unimodular");
  return om;
}

// Intersection computed with the right push-off instead; equal to
// intersection_form on any spine.
inline IntMatrix intersection_form_right(const FatGraph& g, const CycleBasis& cb) {
  const int n = static_cast<int>(cb.cycles.size());
  IntMatrix om(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) om(i, j) = detail::intersect(g, cb.cycles[i], cb.cycles[j], false);
  return om;
}

inline std::int64_t pair(const IntVector& x, const IntMatrix& om, const IntVector& y) {
  std::int64_t s = 0;
  for (int i = 0; i < om.rows; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < om.cols; ++j)
      if (om(i, j) && y[j]) s = add_checked(s, mul_checked(mul_checked(x[i], om(i, j)), y[j]));
  }
  return s;
}

struct HomologyMarking {
  std::vector<IntVector> values;  // per dart
  IntMatrix omega;
  int rank() const { return omega.rows; }
  const IntVector& operator[](Dart d) const { return values[d]; }
  friend bool operator==(const HomologyMarking& a, const HomologyMarking& b) {
    return a.values == b.values && a.omega == b.omega;
  }
};

// Reports the first violated marking condition, or nullopt.
inline std::optional<std::string> marking_violation(const FatGraph& g, const HomologyMarking& m) {
  const int r = m.rank();
  if (static_cast<int>(m.values.size()) != g.num_darts()) return "value count differs from dart count";
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (static_cast<int>(m.values[d].size()) != r) return "value of dart " + std::to_string(d) + " has wrong length";
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (add(m.values[d], m.values[g.iota(d)]) != IntVector(r, 0))
      return "antisymmetry fails on dart " + std::to_string(d);
  for (int v = 0; v < g.num_vertices(); ++v) {
    IntVector s(r, 0);
    for (Dart d : g.vertex_darts(v)) s = add(s, m.values[d]);
    if (!is_zero(s)) return "vertex condition fails at vertex " + std::to_string(v);
  }
  if (!spans_lattice(m.values, r)) return "values do not span the lattice";
  return std::nullopt;
}

inline void check_marking(const FatGraph& g, const HomologyMarking& m) {
  if (auto why = marking_violation(g, m)) throw Error(ErrorCode::InvalidMarking, *why);
}

// Values x_a with x_a . z_j = (signed count of a in z_j), in the
// coordinates of the cycle basis, where x . y = x^T Omega y.
inline HomologyMarking tautological_marking(const FatGraph& g, const CycleBasis& cb, const IntMatrix& om) {
  const int n = om.rows;
  // x . z_j = sum_i x_i Omega(i, j) = (Omega^T x)_j
  const IntMatrix inv = unimodular_inverse(om.transpose());
  HomologyMarking m;
  m.omega = om;
  m.values.assign(g.num_darts(), IntVector(n, 0));
  for (Dart a = 0; a < g.num_darts(); ++a) {
    IntVector r(n);
    for (int j = 0; j < n; ++j) r[j] = traversal_count(g, cb.cycles[j], a);
    m.values[a] = inv * r;
  }
  return m;
}

inline HomologyMarking tautological_marking(const FatGraph& g) {
  auto cb = cycle_basis(g);
  auto om = intersection_form(g, cb);
  return tautological_marking(g, cb, om);
}

// Transport across a move: every dart keeps its value except the flipped
// edge, which now closes the triangle (flipped, d, a).
inline HomologyMarking apply_move(const HomologyMarking& m, const MoveResult& mr) {
  HomologyMarking out = m;
  const auto [a, b, c, d] = mr.quad;
  const Dart x = mr.flipped;
  const Dart y = mr.graph.iota(x);
  out.values[x] = negate(add(m.values[d], m.values[a]));
  out.values[y] = negate(out.values[x]);
  (void)b;
  (void)c;
  return out;
}

// Fills unknown dart values from known ones using antisymmetry and the
// vertex conditions. Throws InvalidMarking if some value stays undetermined.
inline HomologyMarking extend_marking(const FatGraph& g, std::vector<std::optional<IntVector>> partial, const IntMatrix& om) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (Dart d = 0; d < g.num_darts(); ++d)
      if (!partial[d] && partial[g.iota(d)]) {
        partial[d] = negate(*partial[g.iota(d)]);
        progress = true;
      }
    for (int v = 0; v < g.num_vertices(); ++v) {
      int unknown = -1, count = 0;
      IntVector s(om.rows, 0);
      for (Dart d : g.vertex_darts(v)) {
        if (partial[d]) s = add(s, *partial[d]);
        else {
          unknown = d;
          ++count;
        }
      }
      if (count == 1) {
        partial[unknown] = negate(s);
        progress = true;
      }
    }
  }
  HomologyMarking m;
  m.omega = om;
  for (Dart d = 0; d < g.num_darts(); ++d) {
    if (!partial[d]) throw Error(ErrorCode::InvalidMarking, "marking is underdetermined at dart " + std::to_string(d));
    m.values.push_back(*partial[d]);
  }
  return m;
}

// Basis change M with m2[phi(d)] = M m1[d] for every dart, if one exists.
inline std::optional<IntMatrix> induced_basis_change(const FatGraph& g, const HomologyMarking& m1,
                                                     const HomologyMarking& m2, const std::vector<Dart>& phi) {
  const int n = m1.rank();
  // choose n darts whose values form a basis of the lattice
  auto h = hermite_form(m1.values, n, true);
  if (h.rank() != n) return std::nullopt;
  // express the standard basis through the dart values: unimodular rows
  // of h have pivots 1 when the values span Z^n
  for (int i = 0; i < n; ++i)
    if (h.pivots[i] != i || h.rows[i][i] != 1) return std::nullopt;
  // e_i = sum_d T(i, d) m1[d] with T from the transform, so
  // M e_i = sum_d T(i, d) m2[phi(d)]
  IntMatrix M(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<BigInt> col(n, 0);
    for (int d = 0; d < g.num_darts(); ++d) {
      const BigInt& t = h.transform[i][d];
      if (t == 0) continue;
      for (int r = 0; r < n; ++r) col[r] += t * m2.values[phi[d]][r];
    }
    for (int r = 0; r < n; ++r) M(r, i) = to_int64(col[r]);
  }
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (M * m1.values[d] != m2.values[phi[d]]) return std::nullopt;
  return M;
}

struct LevelNMarking {
  std::int64_t modulus = 0;
  std::vector<IntVector> values;
  friend bool operator==(const LevelNMarking&, const LevelNMarking&) = default;
};

inline bool spans_mod(const std::vector<IntVector>& vals, int n, std::int64_t N) {
  std::vector<IntVector> rows = vals;
  for (int i = 0; i < n; ++i) {
    IntVector e(n, 0);
    e[i] = N;
    rows.push_back(e);
  }
  return spans_lattice(rows, n);
}

inline LevelNMarking reduce_mod(const std::vector<IntVector>& values, int rank, std::int64_t N) {
  if (N < 2) throw Error(ErrorCode::InvalidModulus, "modulus must be at least 2");
  LevelNMarking out;
  out.modulus = N;
  for (const auto& v : values) {
    IntVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = mod_floor(v[i], N);
    out.values.push_back(std::move(r));
  }
  if (!spans_mod(out.values, rank, N)) throw Error(ErrorCode::RankDropModN, "values do not span (Z/N)^2g");
  return out;
}

inline LevelNMarking reduce_mod(const HomologyMarking& m, std::int64_t N) { return reduce_mod(m.values, m.rank(), N); }

inline LevelNMarking apply_move(const LevelNMarking& m, const MoveResult& mr) {
  LevelNMarking out = m;
  const auto [a, b, c, d] = mr.quad;
  (void)b;
  (void)c;
  const Dart x = mr.flipped, y = mr.graph.iota(x);
  for (std::size_t i = 0; i < out.values[x].size(); ++i) {
    out.values[x][i] = mod_floor(-(m.values[d][i] + m.values[a][i]), m.modulus);
    out.values[y][i] = mod_floor(-out.values[x][i], m.modulus);
  }
  return out;
}

inline IntMatrix standard_form(int g) {
  IntMatrix j(2 * g, 2 * g);
  for (int i = 0; i < g; ++i) {
    j(2 * i, 2 * i + 1) = 1;
    j(2 * i + 1, 2 * i) = -1;
  }
  return j;
}

inline bool is_symplectic(const IntMatrix& m, const IntMatrix& om) { return m.transpose() * om * m == om; }

inline bool is_symplectic_mod(const IntMatrix& m, const IntMatrix& om, std::int64_t N) {
  IntMatrix l = m.transpose() * om * m;
  for (int i = 0; i < om.rows; ++i)
    for (int j = 0; j < om.cols; ++j)
      if (mod_floor(l(i, j) - om(i, j), N) != 0) return false;
  return true;
}

// x -> x + k (x . v) v
inline IntMatrix transvection(const IntVector& v, std::int64_t k, const IntMatrix& om) {
  const int n = om.rows;
  IntMatrix t = IntMatrix::identity(n);
  const IntVector w = om * v;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = add_checked(t(i, j), mul_checked(k, mul_checked(v[i], w[j])));
  return t;
}

// Product of `factors` random transvections with small vectors.
inline IntMatrix random_symplectic(const IntMatrix& om, std::uint64_t seed, int factors = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(-1, 1), sign(0, 1);
  IntMatrix m = IntMatrix::identity(om.rows);
  for (int f = 0; f < factors; ++f) {
    IntVector v(om.rows);
    for (auto& x : v) x = coord(rng);
    m = m * transvection(v, sign(rng) ? 1 : -1, om);
  }
  return m;
}

inline IntMatrix random_symplectic(int g, std::uint64_t seed, int factors = 6) {
  if (g < 1) throw Error(ErrorCode::InvalidArgument, "genus must be positive");
  return random_symplectic(standard_form(g), seed, factors);
}

// Change of basis B (columns = new basis vectors) with B^T Omega B equal to
// the standard form.
inline IntMatrix symplectic_basis(const IntMatrix& om) {
  const int n = om.rows;
  std::vector<IntVector> pool;
  for (int i = 0; i < n; ++i) {
    IntVector e(n, 0);
    e[i] = 1;
    pool.push_back(e);
  }
  IntMatrix B(n, n);
  int col = 0;
  while (!pool.empty()) {
    // pick e = pool[0]; the row (e . pool[j]) is primitive since the form is
    // unimodular on the span of the pool; combine into f with e . f = 1
    const IntVector e = pool[0];
    std::vector<std::int64_t> r;
    for (std::size_t j = 1; j < pool.size(); ++j) r.push_back(pair(e, om, pool[j]));
    // extended gcd over r
    std::int64_t gcur = 0;
    std::vector<std::int64_t> coef(r.size(), 0);
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] == 0) continue;
      // solve s*gcur + t*r[j] = gcd
      std::int64_t a = gcur, b = r[j], s0 = 1, s1 = 0, t0 = 0, t1 = 1;
      while (b != 0) {
        std::int64_t q = a / b;
        std::int64_t tmp = a - q * b;
        a = b;
        b = tmp;
        tmp = s0 - q * s1;
        s0 = s1;
        s1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
      }
      for (auto& c : coef) c = mul_checked(c, s0);
      coef[j] = t0;
      gcur = a;
    }
    if (gcur < 0) {
      gcur = -gcur;
      for (auto& c : coef) c = -c;
    }
    if (gcur != 1) throw Error(ErrorCode::NonUnimodular, "form is not unimodular");
    IntVector f(n, 0);
    for (std::size_t j = 0; j < r.size(); ++j) f = add(f, scale(coef[j], pool[j + 1]));
    for (int i = 0; i < n; ++i) {
      B(i, col) = e[i];
      B(i, col + 1) = f[i];
    }
    col += 2;
    // project the rest onto the orthogonal complement of <e, f>
    std::vector<IntVector> rest;
    for (std::size_t j = 1; j < pool.size(); ++j) {
      IntVector v = pool[j];
      const std::int64_t ve = pair(v, om, e), vf = pair(v, om, f);
      // v - (v.f) e + (v.e) f is orthogonal to e and f
      v = add(v, add(scale(-vf, e), scale(ve, f)));
      rest.push_back(v);
    }
    // rest spans a rank n-col lattice with n-col+1 vectors; take a basis
    auto h = hermite_form(rest, n);
    pool.clear();
    for (const auto& row : h.rows) {
      IntVector v(n);
      for (int i = 0; i < n; ++i) v[i] = to_int64(row[i]);
      pool.push_back(v);
    }
  }
  return B;
}

// hmark lines: one per edge representative.
inline std::string format_hmarks(const FatGraph& g, const HomologyMarking& m) {
  std::ostringstream os;
  for (Dart e : g.edges()) {
    os << "hmark " << e;
    for (auto x : m.values[e]) os << ' ' << x;
    os << '\n';
  }
  return os.str();
}

inline std::optional<HomologyMarking> parse_hmarks(const FatGraph& g, const std::vector<std::string>& extra, const IntMatrix& om) {
  std::vector<std::optional<IntVector>> partial(g.num_darts());
  bool any = false;
  for (const auto& line : extra) {
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw != "hmark") continue;
    any = true;
    Dart d;
    if (!(ss >> d) || d < 0 || d >= g.num_darts()) throw Error(ErrorCode::Parse, "bad hmark dart");
    IntVector v;
    long long x;
    while (ss >> x) v.push_back(x);
    if (!ss.eof()) throw Error(ErrorCode::Parse, "non-integer in hmark");
    if (static_cast<int>(v.size()) != om.rows) throw Error(ErrorCode::Parse, "hmark length differs from 2g");
    partial[d] = v;
    partial[g.iota(d)] = negate(v);
  }
  if (!any) return std::nullopt;
  for (Dart d = 0; d < g.num_darts(); ++d)
    if (!partial[d]) throw Error(ErrorCode::InvalidMarking, "hmark missing for dart " + std::to_string(d));
  HomologyMarking m;
  m.omega = om;
  for (auto& p : partial) m.values.push_back(*p);
  return m;
}

// `omega <n> <row-major entries>`
inline std::string format_omega(const IntMatrix& om) {
  std::ostringstream os;
  os << "omega " << om.rows;
  for (int i = 0; i < om.rows; ++i)
    for (int j = 0; j < om.cols; ++j) os << ' ' << om(i, j);
  os << '\n';
  return os.str();
}

inline std::optional<IntMatrix> parse_omega(const std::vector<std::string>& extra) {
  for (const auto& line : extra) {
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw != "omega") continue;
    int n;
    if (!(ss >> n) || n <= 0 || n % 2) throw Error(ErrorCode::Parse, "bad omega size");
    IntMatrix om(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!(ss >> om(i, j))) throw Error(ErrorCode::Parse, "omega has too few entries");
    std::string rest;
    if (ss >> rest) throw Error(ErrorCode::Parse, "omega has too many entries");
    bool alternating = true;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) alternating = alternating && om(i, j) == -om(j, i);
    if (!alternating || abs(determinant(om)) != 1)
      throw Error(ErrorCode::NonUnimodular, "omega is not a unimodular alternating form");
    return om;
  }
  return std::nullopt;
}

}  // namespace torelli
