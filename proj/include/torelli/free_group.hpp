// Free group words and truncated Magnus expansions.
#pragma once

#include <map>
#include <set>
#include <tuple>
#include <sstream>
#include <string>
#include <vector>

#include "torelli/core.hpp"

namespace torelli {

// Letters are +i for generator x_i and -i for its inverse (i >= 1).
class FreeWord {
 public:
  FreeWord() = default;
  explicit FreeWord(const std::vector<int>& letters) {
    for (int l : letters) push(l);
  }
  static FreeWord gen(int i) { return FreeWord({i}); }

  const std::vector<int>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  std::size_t length() const { return letters_.size(); }

  void push(int l) {
    if (l == 0) throw Error(ErrorCode::InvalidArgument, "letter 0");
    if (!letters_.empty() && letters_.back() == -l) letters_.pop_back();
    else letters_.push_back(l);
  }

  FreeWord inverse() const {
    FreeWord w;
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) w.letters_.push_back(-*it);
    return w;
  }

  friend FreeWord operator*(FreeWord a, const FreeWord& b) {
    for (int l : b.letters_) a.push(l);
    return a;
  }
  friend bool operator==(const FreeWord&, const FreeWord&) = default;
  friend auto operator<=>(const FreeWord&, const FreeWord&) = default;

  FreeWord pow(int k) const {
    FreeWord base = k < 0 ? inverse() : *this, r;
    for (int i = 0; i < std::abs(k); ++i) r = r * base;
    return r;
  }

  int max_generator() const {
    int m = 0;
    for (int l : letters_) m = std::max(m, std::abs(l));
    return m;
  }

  // Exponent sums per generator.
  IntVector abelianize(int n) const {
    IntVector v(n, 0);
    for (int l : letters_) {
      if (std::abs(l) > n) throw Error(ErrorCode::DimensionMismatch, "generator beyond rank");
      v[std::abs(l) - 1] += l > 0 ? 1 : -1;
    }
    return v;
  }

  // Cyclic reduction: strips matching letters from both ends.
  FreeWord cyclically_reduced() const {
    std::size_t i = 0, j = letters_.size();
    while (j - i >= 2 && letters_[i] == -letters_[j - 1]) {
      ++i;
      --j;
    }
    FreeWord w;
    w.letters_.assign(letters_.begin() + i, letters_.begin() + j);
    return w;
  }

 private:
  std::vector<int> letters_;
};

inline FreeWord commutator(const FreeWord& a, const FreeWord& b) { return a * b * a.inverse() * b.inverse(); }

// Tokens `x<i>` (generator) and `X<i>` (inverse); `1` is the empty word.
inline FreeWord parse_word(const std::string& s) {
  std::istringstream ss(s);
  std::string tok;
  FreeWord w;
  while (ss >> tok) {
    if (tok == "1") continue;
    if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'X')) throw Error(ErrorCode::Parse, "bad letter " + tok);
    int i = 0;
    for (std::size_t k = 1; k < tok.size(); ++k) {
      if (tok[k] < '0' || tok[k] > '9') throw Error(ErrorCode::Parse, "bad letter " + tok);
      i = i * 10 + (tok[k] - '0');
    }
    if (i < 1) throw Error(ErrorCode::Parse, "generator index must be positive");
    w.push(tok[0] == 'x' ? i : -i);
  }
  return w;
}

inline std::string format_word(const FreeWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (int l : w.letters()) {
    if (!s.empty()) s += ' ';
    s += (l > 0 ? 'x' : 'X') + std::to_string(std::abs(l));
  }
  return s;
}

// Does the subgroup generated by `words` equal the free group of rank n?
// Stallings folding of the bouquet of the words.
inline bool generates_free_group(const std::vector<FreeWord>& words, int n) {
  // edge (u, l, v): u --x_l--> v with l > 0
  std::vector<std::tuple<int, int, int>> edges;
  int V = 1;
  for (const auto& w : words) {
    const auto& ls = w.letters();
    int cur = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const int nxt = (i + 1 == ls.size()) ? 0 : V++;
      if (ls[i] > 0) edges.emplace_back(cur, ls[i], nxt);
      else edges.emplace_back(nxt, -ls[i], cur);
      cur = nxt;
    }
  }
  std::vector<int> rep(V);
  std::iota(rep.begin(), rep.end(), 0);
  auto find = [&](int x) {
    while (rep[x] != x) x = rep[x] = rep[rep[x]];
    return x;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, int>, int> target;  // (vertex, signed letter) -> vertex
    for (auto [u, l, v] : edges) {
      const int a = find(u), b = find(v);
      for (auto [x, s, y] : {std::tuple{a, l, b}, std::tuple{b, -l, a}}) {
        auto [it, fresh] = target.emplace(std::pair{x, s}, y);
        if (!fresh && find(it->second) != find(y)) {
          rep[find(y)] = find(it->second);
          changed = true;
        }
      }
    }
  }
  // one vertex carrying a loop for every generator
  std::set<int> letters;
  for (auto [u, l, v] : edges) {
    if (find(u) != find(0) || find(v) != find(0)) return false;
    letters.insert(l);
  }
  return static_cast<int>(letters.size()) == n;
}

// Truncated power series in noncommuting X_1..X_n; degree-d coefficients
// are stored densely, words indexed in base n with the first letter most
// significant.
class MagnusSeries {
 public:
  MagnusSeries() = default;
  MagnusSeries(int n, int K) : n_(n), K_(K), deg_(K + 1) {
    std::size_t sz = 1;
    for (int d = 0; d <= K; ++d) {
      deg_[d].assign(sz, 0);
      sz *= n;
    }
  }
  static MagnusSeries one(int n, int K) {
    MagnusSeries s(n, K);
    s.deg_[0][0] = 1;
    return s;
  }
  // 1 + X_i, or its inverse 1 - X_i + X_i^2 - ...
  static MagnusSeries letter(int n, int K, int l) {
    MagnusSeries s = one(n, K);
    const int i = std::abs(l) - 1;
    if (i >= n) throw Error(ErrorCode::DimensionMismatch, "generator beyond rank");
    std::size_t idx = 0;
    for (int d = 1; d <= K; ++d) {
      idx = idx * n + i;
      if (l > 0 && d > 1) break;
      s.deg_[d][idx] = (l > 0) ? 1 : ((d % 2) ? -1 : 1);
    }
    return s;
  }

  int rank() const { return n_; }
  int truncation() const { return K_; }
  const IntVector& degree(int d) const { return deg_[d]; }
  IntVector& degree(int d) { return deg_[d]; }

  friend MagnusSeries operator*(const MagnusSeries& a, const MagnusSeries& b) {
    if (a.n_ != b.n_ || a.K_ != b.K_) throw Error(ErrorCode::DimensionMismatch, "series shapes differ");
    MagnusSeries r(a.n_, a.K_);
    std::vector<std::size_t> pw(a.K_ + 1, 1);
    for (int d = 1; d <= a.K_; ++d) pw[d] = pw[d - 1] * a.n_;
    for (int da = 0; da <= a.K_; ++da)
      for (int db = 0; da + db <= a.K_; ++db) {
        const auto& A = a.deg_[da];
        const auto& B = b.deg_[db];
        auto& R = r.deg_[da + db];
        for (std::size_t i = 0; i < A.size(); ++i) {
          if (A[i] == 0) continue;
          const std::size_t base = i * pw[db];
          for (std::size_t j = 0; j < B.size(); ++j)
            if (B[j]) R[base + j] = add_checked(R[base + j], mul_checked(A[i], B[j]));
        }
      }
    return r;
  }

  MagnusSeries operator-(const MagnusSeries& o) const {
    MagnusSeries r = *this;
    for (int d = 0; d <= K_; ++d)
      for (std::size_t i = 0; i < r.deg_[d].size(); ++i) r.deg_[d][i] = sub_checked(r.deg_[d][i], o.deg_[d][i]);
    return r;
  }

  // Inverse of a series with constant term 1.
  MagnusSeries inverse() const {
    if (deg_[0][0] != 1) throw Error(ErrorCode::InvalidArgument, "series is not invertible over Z");
    MagnusSeries r = one(n_, K_);
    std::vector<std::size_t> pw(K_ + 1, 1);
    for (int d = 1; d <= K_; ++d) pw[d] = pw[d - 1] * n_;
    // r_d = -sum_{i=1..d} s_i r_{d-i}
    for (int d = 1; d <= K_; ++d) {
      auto& R = r.deg_[d];
      for (int i = 1; i <= d; ++i) {
        const auto& S = deg_[i];
        const auto& P = r.deg_[d - i];
        for (std::size_t a = 0; a < S.size(); ++a) {
          if (!S[a]) continue;
          for (std::size_t b = 0; b < P.size(); ++b)
            if (P[b]) R[a * pw[d - i] + b] = sub_checked(R[a * pw[d - i] + b], mul_checked(S[a], P[b]));
        }
      }
    }
    return r;
  }

  // Lowest degree >= 1 with a nonzero coefficient, or K+1.
  int lowest_degree() const {
    for (int d = 1; d <= K_; ++d)
      if (!is_zero(deg_[d])) return d;
    return K_ + 1;
  }

  bool is_one() const { return deg_[0][0] == 1 && lowest_degree() == K_ + 1; }

  MagnusSeries truncate(int K) const {
    MagnusSeries r(n_, K);
    for (int d = 0; d <= std::min(K, K_); ++d) r.deg_[d] = deg_[d];
    return r;
  }

  friend bool operator==(const MagnusSeries&, const MagnusSeries&) = default;

 private:
  int n_ = 0;
  int K_ = 0;
  std::vector<IntVector> deg_;
};

inline MagnusSeries group_commutator(const MagnusSeries& a, const MagnusSeries& b) {
  return a * b * a.inverse() * b.inverse();
}

inline MagnusSeries magnus(const FreeWord& w, int n, int K) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "truncation degree must be positive");
  MagnusSeries s = MagnusSeries::one(n, K);
  // letter series are cached per call
  std::map<int, MagnusSeries> cache;
  for (int l : w.letters()) {
    auto it = cache.find(l);
    if (it == cache.end()) it = cache.emplace(l, MagnusSeries::letter(n, K, l)).first;
    s = s * it->second;
  }
  return s;
}

inline MagnusSeries magnus(const FreeWord& w, int K) { return magnus(w, std::max(1, w.max_generator()), K); }

// Equality in F/Gamma_k: the Magnus expansion of w1 w2^-1 vanishes in
// degrees 1..k.
inline bool free_nilpotent_equal(const FreeWord& w1, const FreeWord& w2, int k, int n = 0) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  const int rank = std::max({n, w1.max_generator(), w2.max_generator(), 1});
  return magnus(w1 * w2.inverse(), rank, k).is_one();
}

}  // namespace torelli
