// Free Lie algebra over Z in the Lyndon basis, and its quotient by the
// ideal generated by a degree-2 class omega_0.
#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "torelli/core.hpp"
#include "torelli/free_group.hpp"

namespace torelli {

// Homogeneous tensor of degree d over n letters, dense in base n.
using Tensor = IntVector;

inline std::size_t ipow(int n, int d) {
  std::size_t r = 1;
  for (int i = 0; i < d; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

inline Tensor tensor_product(const Tensor& a, const Tensor& b) {
  Tensor r(a.size() * b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (b[j]) r[i * b.size() + j] = add_checked(r[i * b.size() + j], mul_checked(a[i], b[j]));
  }
  return r;
}

inline Tensor bracket(const Tensor& a, const Tensor& b) {
  Tensor ab = tensor_product(a, b), ba = tensor_product(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) ab[i] = sub_checked(ab[i], ba[i]);
  return ab;
}

inline Tensor letter_tensor(int n, int i) {
  Tensor t(n, 0);
  t[i] = 1;
  return t;
}

using Word = std::vector<int>;  // 0-based letters

inline std::size_t word_index(const Word& w, int n) {
  std::size_t idx = 0;
  for (int l : w) idx = idx * n + l;
  return idx;
}

// Lyndon words of length exactly d over n letters, in lexicographic order
// (Duval's algorithm).
inline std::vector<Word> lyndon_words(int n, int d) {
  std::vector<Word> out;
  Word w{-1};
  while (!w.empty()) {
    ++w.back();
    if (static_cast<int>(w.size()) == d) out.push_back(w);
    const std::size_t m = w.size();
    while (static_cast<int>(w.size()) < d) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == n - 1) w.pop_back();
  }
  return out;
}

inline bool is_lyndon(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i) {
    Word rot(w.begin() + i, w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + i);
    if (!(w < rot)) return false;
  }
  return !w.empty();
}

// Standard factorization w = uv with v the longest proper Lyndon suffix.
inline std::pair<Word, Word> standard_factorization(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i) {
    Word v(w.begin() + i, w.end());
    if (is_lyndon(v)) return {Word(w.begin(), w.begin() + i), v};
  }
  throw Error(ErrorCode::InvalidArgument, "word of length 1 has no factorization");
}

// Witt's formula for the rank of the degree-d part of the free Lie algebra.
inline std::int64_t mobius(int m) {
  int r = 1;
  for (int p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      m /= p;
      if (m % p == 0) return 0;
      r = -r;
    }
  return m > 1 ? -r : r;
}

inline std::int64_t witt_dimension(int n, int d) {
  std::int64_t s = 0;
  for (int e = 1; e <= d; ++e)
    if (d % e == 0) s += mobius(d / e) * static_cast<std::int64_t>(ipow(n, e));
  return s / d;
}

// Rank of the degree-d part of the graded Lie algebra of the genus-g
// surface group: (1/d) sum mu(d/e) p_e, p_e = 2g p_{e-1} - p_{e-2}.
inline std::int64_t labute_dimension(int g, int d) {
  std::vector<std::int64_t> p(d + 1);
  p[0] = 2;
  if (d >= 1) p[1] = 2 * g;
  for (int e = 2; e <= d; ++e) p[e] = 2 * g * p[e - 1] - p[e - 2];
  std::int64_t s = 0;
  for (int e = 1; e <= d; ++e)
    if (d % e == 0) s += mobius(d / e) * p[e];
  return s / d;
}

struct LieElement {
  int degree = 0;
  IntVector coords;  // Lyndon coordinates
  bool is_zero() const { return torelli::is_zero(coords); }
  friend bool operator==(const LieElement&, const LieElement&) = default;
};

class LyndonBasis {
 public:
  LyndonBasis(int n, int max_degree) : n_(n), max_degree_(max_degree), words_(max_degree + 1), poly_(max_degree + 1) {
    for (int d = 1; d <= max_degree; ++d) {
      words_[d] = lyndon_words(n, d);
      for (const auto& w : words_[d]) {
        index_[w] = static_cast<int>(poly_[d].size());
        if (d == 1) poly_[d].push_back(letter_tensor(n, w[0]));
        else {
          auto [u, v] = standard_factorization(w);
          poly_[d].push_back(torelli::bracket(poly(u), poly(v)));
        }
      }
    }
  }

  int rank() const { return n_; }
  int max_degree() const { return max_degree_; }
  int dimension(int d) const { return static_cast<int>(words_.at(d).size()); }
  const std::vector<Word>& words(int d) const { return words_.at(d); }
  const Tensor& poly(const Word& w) const { return poly_[w.size()][index_.at(w)]; }
  const Tensor& poly(int d, int i) const { return poly_[d][i]; }

  // Lyndon coordinates of a homogeneous Lie polynomial; the smallest word
  // in the support of P_w is w itself with coefficient 1.
  LieElement coordinates(const Tensor& t, int d) const {
    check_degree(d);
    if (t.size() != ipow(n_, d)) throw Error(ErrorCode::DimensionMismatch, "tensor size differs from degree");
    Tensor r = t;
    LieElement out{d, IntVector(words_[d].size(), 0)};
    for (std::size_t i = 0; i < words_[d].size(); ++i) {
      const std::int64_t c = r[word_index(words_[d][i], n_)];
      if (c == 0) continue;
      out.coords[i] = c;
      const Tensor& p = poly_[d][i];
      for (std::size_t j = 0; j < r.size(); ++j)
        if (p[j]) r[j] = sub_checked(r[j], mul_checked(c, p[j]));
    }
    if (!torelli::is_zero(r)) throw Error(ErrorCode::InvalidArgument, "tensor is not a Lie polynomial");
    return out;
  }

  Tensor tensor(const LieElement& x) const {
    check_degree(x.degree);
    Tensor t(ipow(n_, x.degree), 0);
    for (std::size_t i = 0; i < x.coords.size(); ++i) {
      if (!x.coords[i]) continue;
      const Tensor& p = poly_[x.degree][i];
      for (std::size_t j = 0; j < t.size(); ++j)
        if (p[j]) t[j] = add_checked(t[j], mul_checked(x.coords[i], p[j]));
    }
    return t;
  }

  LieElement bracket(const LieElement& a, const LieElement& b) const {
    return coordinates(torelli::bracket(tensor(a), tensor(b)), a.degree + b.degree);
  }

  LieElement generator(int i) const {
    LieElement e{1, IntVector(n_, 0)};
    e.coords[i] = 1;
    return e;
  }

  // sum_i [x_{2i-1}, x_{2i}]
  LieElement standard_omega() const {
    Tensor t(ipow(n_, 2), 0);
    for (int i = 0; i + 1 < n_; i += 2) {
      Tensor b = torelli::bracket(letter_tensor(n_, i), letter_tensor(n_, i + 1));
      for (std::size_t j = 0; j < t.size(); ++j) t[j] += b[j];
    }
    return coordinates(t, 2);
  }

 private:
  void check_degree(int d) const {
    if (d < 1 || d > max_degree_) throw Error(ErrorCode::DegreeTooHigh, "degree " + std::to_string(d) + " beyond basis bound");
  }
  int n_;
  int max_degree_;
  std::vector<std::vector<Word>> words_;
  std::vector<std::vector<Tensor>> poly_;
  std::map<Word, int> index_;
};

// Degree-d component of a series as a Lie element (the lowest nonvanishing
// component of a group element is always Lie).
inline LieElement series_component(const LyndonBasis& lb, const MagnusSeries& s, int d) {
  return lb.coordinates(s.degree(d), d);
}

// Lowest nonvanishing Magnus component of w in Gamma_k: degree k+1.
inline LieElement leading_lie_term(const LyndonBasis& lb, const FreeWord& w, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  const auto s = magnus(w, lb.rank(), k + 1);
  for (int d = 1; d <= k; ++d)
    if (!is_zero(s.degree(d))) throw Error(ErrorCode::NotInGammaK, "word has a nonzero Magnus term in degree " + std::to_string(d));
  return series_component(lb, s, k + 1);
}

// Quotient of the free Lie algebra by the ideal generated by omega_0, one
// integer lattice per degree 2..K.
class SurfaceQuotient {
 public:
  struct Degree {
    HermiteForm hnf;                    // ideal lattice in Lyndon coordinates, with transform
    std::vector<Word> generators;       // generator i = ad(x_w1) ... ad(x_w(d-2)) omega_0
    std::vector<BigInt> divisors;       // elementary divisors of the ideal lattice
    bool torsion_free() const {
      for (const auto& x : divisors)
        if (x != 1) return false;
      return true;
    }
  };

  SurfaceQuotient(std::shared_ptr<const LyndonBasis> lb, LieElement omega0) : lb_(std::move(lb)), omega_(std::move(omega0)) {
    if (omega_.degree != 2) throw Error(ErrorCode::InvalidArgument, "omega_0 must have degree 2");
    const int n = lb_->rank();
    degrees_.resize(lb_->max_degree() + 1);
    for (int d = 2; d <= lb_->max_degree(); ++d) {
      auto& D = degrees_[d];
      std::vector<std::vector<BigInt>> rows;
      const std::size_t count = ipow(n, d - 2);
      for (std::size_t idx = 0; idx < count; ++idx) {
        Word w(d - 2);
        std::size_t x = idx;
        for (int p = d - 3; p >= 0; --p) {
          w[p] = static_cast<int>(x % n);
          x /= n;
        }
        LieElement e = omega_;
        for (int p = d - 3; p >= 0; --p) e = lb_->bracket(lb_->generator(w[p]), e);
        D.generators.push_back(w);
        rows.push_back(to_big(e.coords));
      }
      D.hnf = hermite_form(rows, lb_->dimension(d), true);
      D.divisors = elementary_divisors(D.hnf.rows, lb_->dimension(d));
    }
  }

  const LyndonBasis& basis() const { return *lb_; }
  std::shared_ptr<const LyndonBasis> basis_ptr() const { return lb_; }
  const LieElement& omega() const { return omega_; }
  int max_degree() const { return lb_->max_degree(); }
  const Degree& degree(int d) const {
    if (d < 2 || d > max_degree()) throw Error(ErrorCode::DegreeTooHigh, "degree outside the quotient tables");
    return degrees_[d];
  }
  int ideal_rank(int d) const { return degree(d).hnf.rank(); }
  int quotient_rank(int d) const { return d == 1 ? lb_->rank() : lb_->dimension(d) - ideal_rank(d); }

  // Canonical coset representative; `combination` receives the ideal
  // element as integer multiples of the generators.
  LieElement reduce(const LieElement& x, std::vector<BigInt>* combination = nullptr) const {
    if (x.degree > max_degree()) throw Error(ErrorCode::DegreeTooHigh, "degree beyond quotient bound");
    if (x.degree < 2) {
      if (combination) combination->clear();
      return x;
    }
    const auto& D = degree(x.degree);
    std::vector<BigInt> q;
    auto r = D.hnf.reduce(to_big(x.coords), &q);
    LieElement out{x.degree, IntVector(r.size())};
    for (std::size_t i = 0; i < r.size(); ++i) out.coords[i] = to_int64(r[i]);
    if (combination) {
      combination->assign(D.generators.size(), 0);
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] == 0) continue;
        for (std::size_t j = 0; j < D.generators.size(); ++j) (*combination)[j] += q[i] * D.hnf.transform[i][j];
      }
    }
    return out;
  }

  bool in_ideal(const LieElement& x) const { return reduce(x).is_zero(); }

  // Text cache of the per-degree lattices.
  void save(std::ostream& os) const {
    os << "sq " << lb_->rank() << ' ' << max_degree() << '\n';
    for (int d = 2; d <= max_degree(); ++d) {
      const auto& h = degrees_[d].hnf;
      os << "degree " << d << ' ' << h.rank() << '\n';
      for (int i = 0; i < h.rank(); ++i) {
        os << h.pivots[i];
        for (const auto& x : h.rows[i]) os << ' ' << x;
        for (const auto& x : h.transform[i]) os << ' ' << x;
        os << '\n';
      }
    }
  }

  bool load(std::istream& is) {
    std::string kw;
    int n, K;
    if (!(is >> kw >> n >> K) || kw != "sq" || n != lb_->rank() || K != max_degree()) return false;
    for (int d = 2; d <= K; ++d) {
      int dd, r;
      if (!(is >> kw >> dd >> r) || kw != "degree" || dd != d) return false;
      auto& D = degrees_[d];
      HermiteForm h;
      h.ambient = lb_->dimension(d);
      for (int i = 0; i < r; ++i) {
        int p;
        is >> p;
        h.pivots.push_back(p);
        std::vector<BigInt> row(h.ambient), tr(D.generators.size());
        for (auto& x : row) is >> x;
        for (auto& x : tr) is >> x;
        h.rows.push_back(std::move(row));
        h.transform.push_back(std::move(tr));
      }
      if (!is) return false;
      D.hnf = std::move(h);
    }
    return true;
  }

 private:
  std::shared_ptr<const LyndonBasis> lb_;
  LieElement omega_;
  std::vector<Degree> degrees_;
};

inline std::string format_lie(const LieElement& x) {
  std::ostringstream os;
  os << "lie " << x.degree << '\n';
  for (std::size_t i = 0; i < x.coords.size(); ++i)
    if (x.coords[i]) os << "lynd " << i + 1 << ' ' << x.coords[i] << '\n';
  return os.str();
}

inline LieElement parse_lie(std::istream& in, const LyndonBasis& lb) {
  std::string line;
  LieElement x;
  bool header = false;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    if (kw == "lie") {
      if (!(ss >> x.degree) || x.degree < 1 || x.degree > lb.max_degree()) throw Error(ErrorCode::Parse, "bad lie header");
      x.coords.assign(lb.dimension(x.degree), 0);
      header = true;
    } else if (kw == "lynd") {
      long long i, c;
      if (!header || !(ss >> i >> c) || i < 1 || i > static_cast<long long>(x.coords.size()))
        throw Error(ErrorCode::Parse, "bad lynd line");
      x.coords[i - 1] += c;
    } else {
      throw Error(ErrorCode::Parse, "unknown keyword " + kw);
    }
  }
  if (!header) throw Error(ErrorCode::Parse, "missing lie header");
  return x;
}

}  // namespace torelli
