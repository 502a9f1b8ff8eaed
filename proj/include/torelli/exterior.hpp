// Exact exterior algebra: Lambda^3 H and Lambda^m(Lambda^3 H) over Z, and
// contractions of Lambda^2k(Lambda^3 H) indexed by trivalent graphs.
#pragma once

#include <array>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "torelli/core.hpp"

namespace torelli {

using Triple = std::array<int, 3>;  // 0-based, strictly increasing

// Rank of the triple in the lexicographic order of 3-subsets of {0..n-1}.
inline int triple_index(int n, const Triple& t) {
  auto c2 = [](int m) { return m * (m - 1) / 2; };
  int idx = 0;
  for (int a = 0; a < t[0]; ++a) idx += c2(n - 1 - a);
  for (int b = t[0] + 1; b < t[1]; ++b) idx += n - 1 - b;
  idx += t[2] - t[1] - 1;
  return idx;
}

inline Triple triple_at(int n, int idx) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (idx-- == 0) return {i, j, k};
  throw Error(ErrorCode::InvalidArgument, "triple index out of range");
}

inline int lambda3_dim(int n) { return n * (n - 1) * (n - 2) / 6; }

class Wedge3 {
 public:
  Wedge3() = default;
  explicit Wedge3(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::map<Triple, std::int64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::int64_t coeff(const Triple& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? 0 : it->second;
  }
  void add_term(const Triple& t, std::int64_t c) {
    if (c == 0) return;
    auto& x = terms_[t];
    x = add_checked(x, c);
    if (x == 0) terms_.erase(t);
  }

  Wedge3& operator+=(const Wedge3& o) {
    check_dim(o);
    for (const auto& [t, c] : o.terms_) add_term(t, c);
    return *this;
  }
  Wedge3& operator-=(const Wedge3& o) {
    check_dim(o);
    for (const auto& [t, c] : o.terms_) add_term(t, -c);
    return *this;
  }
  friend Wedge3 operator+(Wedge3 a, const Wedge3& b) { return a += b; }
  friend Wedge3 operator-(Wedge3 a, const Wedge3& b) { return a -= b; }
  friend Wedge3 operator-(const Wedge3& a) { return Wedge3(a.dim_) - a; }
  friend Wedge3 operator*(std::int64_t k, const Wedge3& a) {
    Wedge3 r(a.dim_);
    for (const auto& [t, c] : a.terms_) r.add_term(t, mul_checked(k, c));
    return r;
  }
  friend bool operator==(const Wedge3& a, const Wedge3& b) { return a.dim_ == b.dim_ && a.terms_ == b.terms_; }

  // gcd of all coefficients (0 for the zero element)
  std::int64_t content() const {
    std::int64_t g = 0;
    for (const auto& [t, c] : terms_) g = std::gcd(g, c);
    return g;
  }

 private:
  void check_dim(const Wedge3& o) {
    if (dim_ == 0) dim_ = o.dim_;
    if (o.dim_ != 0 && o.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "Wedge3 dimensions differ");
  }
  int dim_ = 0;
  std::map<Triple, std::int64_t> terms_;
};

inline std::int64_t det3(std::int64_t a00, std::int64_t a01, std::int64_t a02, std::int64_t a10, std::int64_t a11,
                         std::int64_t a12, std::int64_t a20, std::int64_t a21, std::int64_t a22) {
  auto m = [](std::int64_t x, std::int64_t y) { return mul_checked(x, y); };
  auto s = [](std::int64_t x, std::int64_t y) { return sub_checked(x, y); };
  auto ad = [](std::int64_t x, std::int64_t y) { return add_checked(x, y); };
  return ad(s(m(a00, s(m(a11, a22), m(a12, a21))), m(a01, s(m(a10, a22), m(a12, a20)))),
            m(a02, s(m(a10, a21), m(a11, a20))));
}

// a ^ b ^ c expanded by 3x3 minors.
inline Wedge3 wedge3(const IntVector& a, const IntVector& b, const IntVector& c) {
  if (a.size() != b.size() || a.size() != c.size()) throw Error(ErrorCode::DimensionMismatch, "wedge3 of vectors of different lengths");
  const int n = static_cast<int>(a.size());
  Wedge3 w(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        w.add_term({i, j, k}, det3(a[i], a[j], a[k], b[i], b[j], b[k], c[i], c[j], c[k]));
  return w;
}

// M applied to every slot.
inline Wedge3 transform(const IntMatrix& M, const Wedge3& w) {
  const int n = w.dim();
  Wedge3 out(n);
  for (const auto& [t, c] : w.terms()) {
    IntVector cols[3];
    for (int s = 0; s < 3; ++s) {
      cols[s].resize(n);
      for (int i = 0; i < n; ++i) cols[s][i] = M(i, t[s]);
    }
    out += c * wedge3(cols[0], cols[1], cols[2]);
  }
  return out;
}

// Element of Lambda^m(Lambda^3 H); keys are strictly increasing tuples of
// triple indices.
class MultiWedge {
 public:
  MultiWedge() = default;
  MultiWedge(int dim, int grade) : dim_(dim), grade_(grade) {}

  static MultiWedge from(const Wedge3& w) {
    MultiWedge m(w.dim(), 1);
    for (const auto& [t, c] : w.terms()) m.add_term({triple_index(w.dim(), t)}, c);
    return m;
  }

  int dim() const { return dim_; }
  int grade() const { return grade_; }
  const std::map<std::vector<int>, std::int64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Adds c times the wedge of the given triple indices in the given order.
  void add_term(std::vector<int> idx, std::int64_t c) {
    if (c == 0) return;
    if (static_cast<int>(idx.size()) != grade_) throw Error(ErrorCode::WrongGrade, "term length differs from grade");
    int sign = 1;
    // insertion sort tracking transpositions
    for (std::size_t i = 1; i < idx.size(); ++i)
      for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
        if (idx[j - 1] == idx[j]) return;
        std::swap(idx[j - 1], idx[j]);
        sign = -sign;
      }
    auto& x = terms_[idx];
    x = add_checked(x, sign * c);
    if (x == 0) terms_.erase(idx);
  }

  MultiWedge& operator+=(const MultiWedge& o) {
    check(o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  MultiWedge& operator-=(const MultiWedge& o) {
    check(o);
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  friend MultiWedge operator+(MultiWedge a, const MultiWedge& b) { return a += b; }
  friend MultiWedge operator-(MultiWedge a, const MultiWedge& b) { return a -= b; }
  friend MultiWedge operator*(std::int64_t k, const MultiWedge& a) {
    MultiWedge r(a.dim_, a.grade_);
    for (const auto& [t, c] : a.terms_) r.add_term(t, mul_checked(k, c));
    return r;
  }
  friend bool operator==(const MultiWedge& a, const MultiWedge& b) {
    return a.dim_ == b.dim_ && a.grade_ == b.grade_ && a.terms_ == b.terms_;
  }

 private:
  void check(const MultiWedge& o) const {
    if (o.dim_ != dim_ || o.grade_ != grade_) throw Error(ErrorCode::DimensionMismatch, "MultiWedge shapes differ");
  }
  int dim_ = 0;
  int grade_ = 0;
  std::map<std::vector<int>, std::int64_t> terms_;
};

inline MultiWedge wedge_product(const MultiWedge& u, const MultiWedge& v) {
  if (u.dim() != v.dim()) throw Error(ErrorCode::DimensionMismatch, "wedge of different ambient dimensions");
  MultiWedge r(u.dim(), u.grade() + v.grade());
  for (const auto& [ku, cu] : u.terms())
    for (const auto& [kv, cv] : v.terms()) {
      std::vector<int> k = ku;
      k.insert(k.end(), kv.begin(), kv.end());
      r.add_term(std::move(k), mul_checked(cu, cv));
    }
  return r;
}

inline MultiWedge wedge_product(const Wedge3& a, const Wedge3& b) {
  return wedge_product(MultiWedge::from(a), MultiWedge::from(b));
}

// Trivalent graph on 2k vertices; an edge joins (vertex, slot) pairs.
struct PairingGraph {
  using Port = std::pair<int, int>;
  int vertices = 0;
  std::vector<std::pair<Port, Port>> edges;

  void validate() const {
    std::vector<std::array<int, 3>> used(vertices, {0, 0, 0});
    if (static_cast<int>(edges.size()) * 2 != vertices * 3) throw Error(ErrorCode::InvalidArgument, "pairing graph is not trivalent");
    for (const auto& [p, q] : edges)
      for (const auto& [v, s] : {p, q}) {
        if (v < 0 || v >= vertices || s < 0 || s > 2) throw Error(ErrorCode::InvalidArgument, "port out of range");
        if (used[v][s]++) throw Error(ErrorCode::InvalidArgument, "port used twice");
      }
  }
};

// Two loops joined by a bridge.
inline PairingGraph two_loop_graph() { return {2, {{{0, 0}, {0, 1}}, {{1, 0}, {1, 1}}, {{0, 2}, {1, 2}}}}; }
// The letter theta.
inline PairingGraph theta_pairing_graph() { return {2, {{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}}, {{0, 2}, {1, 2}}}}; }

// Text form: `pgraph <vertices>` then `edge v s w t` lines.
inline PairingGraph parse_pairing_graph(std::istream& in) {
  PairingGraph pg;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (kw == "pgraph") {
      if (!(ss >> pg.vertices) || pg.vertices <= 0) throw Error(ErrorCode::Parse, "bad pgraph header");
      header = true;
    } else if (kw == "edge") {
      int v, s, w, t;
      if (!(ss >> v >> s >> w >> t)) throw Error(ErrorCode::Parse, "bad edge line");
      pg.edges.push_back({{v, s}, {w, t}});
    } else {
      throw Error(ErrorCode::Parse, "unknown keyword " + kw);
    }
  }
  if (!header) throw Error(ErrorCode::Parse, "missing pgraph header");
  pg.validate();
  return pg;
}

// Vertex permutations preserving the multiset of vertex-level edges.
inline int vertex_automorphisms(const PairingGraph& pg) {
  auto edge_multiset = [&](const std::vector<int>& p) {
    std::vector<std::pair<int, int>> es;
    for (const auto& [a, b] : pg.edges) {
      int x = p[a.first], y = p[b.first];
      es.emplace_back(std::min(x, y), std::max(x, y));
    }
    std::sort(es.begin(), es.end());
    return es;
  };
  std::vector<int> p(pg.vertices);
  std::iota(p.begin(), p.end(), 0);
  const auto base = edge_multiset(p);
  int count = 0;
  do {
    if (edge_multiset(p) == base) ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

namespace detail {

// f_Gamma on basis factors: antisymmetrized over slot orders at every vertex,
// one Omega pairing per edge.
inline std::int64_t contract_factors(const PairingGraph& pg, const std::vector<Triple>& factors, const IntMatrix& om) {
  static const std::array<std::array<int, 3>, 6> perms = {{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}}};
  static const std::array<int, 6> sgn = {1, 1, 1, -1, -1, -1};
  const int V = pg.vertices;
  std::vector<int> choice(V, 0);
  std::int64_t total = 0;
  while (true) {
    std::int64_t prod = 1;
    int s = 1;
    for (int v = 0; v < V; ++v) s *= sgn[choice[v]];
    for (const auto& [p, q] : pg.edges) {
      const int i = factors[p.first][perms[choice[p.first]][p.second]];
      const int j = factors[q.first][perms[choice[q.first]][q.second]];
      prod *= om(i, j);
      if (prod == 0) break;
    }
    if (prod) total = add_checked(total, s * prod);
    int v = 0;
    while (v < V && ++choice[v] == 6) choice[v++] = 0;
    if (v == V) break;
  }
  return total;
}

}  // namespace detail

// C_Gamma(x) = (1/|Aut_v|) sum over factor orders of sgn * f_Gamma.
inline std::int64_t contract_graph(const PairingGraph& pg, const MultiWedge& x, const IntMatrix& om) {
  pg.validate();
  if (x.grade() != pg.vertices) throw Error(ErrorCode::GradeMismatch, "grade differs from vertex count");
  if (om.rows != x.dim()) throw Error(ErrorCode::DimensionMismatch, "form and element dimensions differ");
  const int aut = vertex_automorphisms(pg);
  BigInt total = 0;
  const int m = x.grade();
  for (const auto& [key, c] : x.terms()) {
    std::vector<Triple> base;
    for (int t : key) base.push_back(triple_at(x.dim(), t));
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    std::int64_t sum = 0;
    do {
      std::vector<Triple> f(m);
      for (int i = 0; i < m; ++i) f[i] = base[p[i]];
      sum = add_checked(sum, permutation_sign(p) * detail::contract_factors(pg, f, om));
    } while (std::next_permutation(p.begin(), p.end()));
    total += BigInt(c) * sum;
  }
  if (total % aut != 0) throw Error(ErrorCode::Overflow, "contraction not divisible by the automorphism count");
  return to_int64(total / aut);
}

inline std::int64_t contract_C1(const MultiWedge& x, const IntMatrix& om) {
  if (x.grade() != 2) throw Error(ErrorCode::WrongGrade, "C1 needs grade 2");
  return contract_graph(two_loop_graph(), x, om);
}

inline std::int64_t contract_C2(const MultiWedge& x, const IntMatrix& om) {
  if (x.grade() != 2) throw Error(ErrorCode::WrongGrade, "C2 needs grade 2");
  return contract_graph(theta_pairing_graph(), x, om);
}

// Serialization with 1-based indices.
inline std::string format_wedge3(const Wedge3& w) {
  std::ostringstream os;
  for (const auto& [t, c] : w.terms()) os << "w3 " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << ' ' << c << '\n';
  return os.str();
}

inline Wedge3 parse_wedge3(std::istream& in, int dim) {
  Wedge3 w(dim);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (kw != "w3") throw Error(ErrorCode::Parse, "expected w3 line");
    Triple t;
    long long c;
    if (!(ss >> t[0] >> t[1] >> t[2] >> c)) throw Error(ErrorCode::Parse, "bad w3 line");
    for (auto& x : t) {
      if (x < 1 || x > dim) throw Error(ErrorCode::Parse, "w3 index out of range");
      --x;
    }
    if (!(t[0] < t[1] && t[1] < t[2])) throw Error(ErrorCode::Parse, "w3 indices must increase");
    w.add_term(t, c);
  }
  return w;
}

inline std::string format_multiwedge(const MultiWedge& m) {
  std::ostringstream os;
  os << "mw " << m.grade() << '\n';
  for (const auto& [k, c] : m.terms()) {
    os << "term";
    for (int t : k) os << ' ' << t + 1;
    os << ' ' << c << '\n';
  }
  return os.str();
}

inline MultiWedge parse_multiwedge(std::istream& in, int dim) {
  std::string line;
  MultiWedge m;
  bool header = false;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (kw == "mw") {
      int grade;
      if (!(ss >> grade) || grade < 0) throw Error(ErrorCode::Parse, "bad mw header");
      m = MultiWedge(dim, grade);
      header = true;
    } else if (kw == "term") {
      if (!header) throw Error(ErrorCode::Parse, "term before mw header");
      std::vector<long long> v;
      long long x;
      while (ss >> x) v.push_back(x);
      if (static_cast<int>(v.size()) != m.grade() + 1) throw Error(ErrorCode::Parse, "term length differs from grade");
      std::vector<int> k;
      for (int i = 0; i < m.grade(); ++i) {
        if (v[i] < 1 || v[i] > lambda3_dim(dim)) throw Error(ErrorCode::Parse, "triple index out of range");
        k.push_back(static_cast<int>(v[i] - 1));
      }
      m.add_term(k, v.back());
    } else {
      throw Error(ErrorCode::Parse, "unknown keyword " + kw);
    }
  }
  if (!header) throw Error(ErrorCode::Parse, "missing mw header");
  return m;
}

}  // namespace torelli
