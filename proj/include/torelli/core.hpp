// Shared error type, overflow-checked integer helpers and small exact
// integer linear algebra used across the library.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace torelli {

enum class ErrorCode {
  NotInvolution,
  FixedPointInInvolution,
  Disconnected,
  LoopEdge,
  NotTrivalent,
  WrongDegeneracyType,
  NotSpine,
  NonUnimodular,
  RankDropModN,
  InvalidModulus,
  InvalidMarking,
  DimensionMismatch,
  WrongGrade,
  GradeMismatch,
  OpenBoundary,
  InvalidRelabeling,
  UnlabeledEdge,
  IdentityFailure,
  NotInGammaK,
  DegreeTooHigh,
  NotNkTrivial,
  SeedInvalid,
  IncompleteCensus,
  Overflow,
  Parse,
  InvalidArgument,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotInvolution: return "NotInvolution";
    case ErrorCode::FixedPointInInvolution: return "FixedPointInInvolution";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::LoopEdge: return "LoopEdge";
    case ErrorCode::NotTrivalent: return "NotTrivalent";
    case ErrorCode::WrongDegeneracyType: return "WrongDegeneracyType";
    case ErrorCode::NotSpine: return "NotSpine";
    case ErrorCode::NonUnimodular: return "NonUnimodular";
    case ErrorCode::RankDropModN: return "RankDropModN";
    case ErrorCode::InvalidModulus: return "InvalidModulus";
    case ErrorCode::InvalidMarking: return "InvalidMarking";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::WrongGrade: return "WrongGrade";
    case ErrorCode::GradeMismatch: return "GradeMismatch";
    case ErrorCode::OpenBoundary: return "OpenBoundary";
    case ErrorCode::InvalidRelabeling: return "InvalidRelabeling";
    case ErrorCode::UnlabeledEdge: return "UnlabeledEdge";
    case ErrorCode::IdentityFailure: return "IdentityFailure";
    case ErrorCode::NotInGammaK: return "NotInGammaK";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::NotNkTrivial: return "NotNkTrivial";
    case ErrorCode::SeedInvalid: return "SeedInvalid";
    case ErrorCode::IncompleteCensus: return "IncompleteCensus";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using BigInt = boost::multiprecision::cpp_int;

// Checked int64 arithmetic. Every coefficient in the library goes through
// these so an overflow surfaces as an error instead of a wrong answer.
inline std::int64_t add_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "int64 addition");
  return r;
}
inline std::int64_t sub_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "int64 subtraction");
  return r;
}
inline std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "int64 multiplication");
  return r;
}
inline std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorCode::Overflow, "big integer does not fit in int64");
  return static_cast<std::int64_t>(v);
}

// Non-negative residue.
inline std::int64_t mod_floor(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

using IntVector = std::vector<std::int64_t>;

// Dense row-major integer matrix.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::int64_t& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  std::int64_t operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

  IntMatrix transpose() const {
    IntMatrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

inline IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols != b.rows) throw Error(ErrorCode::DimensionMismatch, "matrix product");
  IntMatrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      std::int64_t aik = a(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols; ++j) c(i, j) = add_checked(c(i, j), mul_checked(aik, b(k, j)));
    }
  return c;
}

inline IntVector operator*(const IntMatrix& a, const IntVector& v) {
  if (a.cols != static_cast<int>(v.size())) throw Error(ErrorCode::DimensionMismatch, "matrix-vector product");
  IntVector r(a.rows, 0);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r[i] = add_checked(r[i], mul_checked(a(i, j), v[j]));
  return r;
}

inline IntVector add(const IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vector sum");
  IntVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = add_checked(a[i], b[i]);
  return r;
}
inline IntVector negate(const IntVector& a) {
  IntVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = sub_checked(0, a[i]);
  return r;
}
inline IntVector scale(std::int64_t k, const IntVector& a) {
  IntVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = mul_checked(k, a[i]);
  return r;
}
inline bool is_zero(const IntVector& a) {
  return std::all_of(a.begin(), a.end(), [](std::int64_t x) { return x == 0; });
}

// Determinant by fraction-free Bareiss elimination.
inline BigInt determinant(const IntMatrix& m) {
  if (m.rows != m.cols) throw Error(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  const int n = m.rows;
  if (n == 0) return 1;
  std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = m(i, j);
  BigInt sign = 1;
  BigInt prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int swap = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i][k] != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

// Row-style Hermite normal form over Z of a list of integer row vectors.
// The result rows form a basis of the row lattice: pivots are positive,
// strictly increasing in column, and entries above each pivot are reduced
// into [0, pivot).
struct HermiteForm {
  std::vector<std::vector<BigInt>> rows;
  std::vector<int> pivots;
  // transform[i] expresses rows[i] as an integer combination of the inputs.
  std::vector<std::vector<BigInt>> transform;
  int ambient = 0;

  int rank() const { return static_cast<int>(rows.size()); }

  // Reduces v to the canonical coset representative of v modulo the row
  // lattice; quotient[i] receives the multiple of rows[i] that was removed.
  std::vector<BigInt> reduce(std::vector<BigInt> v, std::vector<BigInt>* quotient = nullptr) const {
    if (quotient) quotient->assign(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int p = pivots[i];
      const BigInt& piv = rows[i][p];
      // floor division toward -inf keeps the residue in [0, piv)
      BigInt q = v[p] / piv;
      if (v[p] - q * piv < 0) q -= 1;
      if (q == 0) continue;
      for (int j = p; j < ambient; ++j) v[j] -= q * rows[i][j];
      if (quotient) (*quotient)[i] = q;
    }
    return v;
  }

  bool contains(const std::vector<BigInt>& v) const {
    auto r = reduce(v);
    return std::all_of(r.begin(), r.end(), [](const BigInt& x) { return x == 0; });
  }
};

inline HermiteForm hermite_form(const std::vector<std::vector<BigInt>>& input, int ambient, bool track = false) {
  const int m = static_cast<int>(input.size());
  std::vector<std::vector<BigInt>> a = input;
  std::vector<std::vector<BigInt>> u;
  if (track) {
    u.assign(m, std::vector<BigInt>(m, 0));
    for (int i = 0; i < m; ++i) u[i][i] = 1;
  }
  auto row_op = [&](int dst, int src, const BigInt& q) {  // a[dst] -= q a[src]
    for (int j = 0; j < ambient; ++j) a[dst][j] -= q * a[src][j];
    if (track)
      for (int j = 0; j < m; ++j) u[dst][j] -= q * u[src][j];
  };
  auto row_swap = [&](int i, int j) {
    std::swap(a[i], a[j]);
    if (track) std::swap(u[i], u[j]);
  };
  auto row_neg = [&](int i) {
    for (auto& x : a[i]) x = -x;
    if (track)
      for (auto& x : u[i]) x = -x;
  };

  HermiteForm h;
  h.ambient = ambient;
  int r = 0;
  for (int col = 0; col < ambient && r < m; ++col) {
    // Euclid on column `col` among rows r..m-1
    while (true) {
      int best = -1;
      for (int i = r; i < m; ++i)
        if (a[i][col] != 0 && (best < 0 || abs(a[i][col]) < abs(a[best][col]))) best = i;
      if (best < 0) break;
      row_swap(r, best);
      bool done = true;
      for (int i = r + 1; i < m; ++i) {
        if (a[i][col] == 0) continue;
        BigInt q = a[i][col] / a[r][col];
        row_op(i, r, q);
        if (a[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (a[r][col] == 0) continue;
    if (a[r][col] < 0) row_neg(r);
    for (int i = 0; i < r; ++i) {
      BigInt q = a[i][col] / a[r][col];
      if (a[i][col] - q * a[r][col] < 0) q -= 1;
      if (q != 0) row_op(i, r, q);
    }
    h.pivots.push_back(col);
    ++r;
  }
  a.resize(r);
  h.rows = std::move(a);
  if (track) {
    u.resize(r);
    h.transform = std::move(u);
  }
  return h;
}

inline std::vector<BigInt> to_big(const IntVector& v) { return {v.begin(), v.end()}; }

inline HermiteForm hermite_form(const std::vector<IntVector>& input, int ambient, bool track = false) {
  std::vector<std::vector<BigInt>> rows;
  rows.reserve(input.size());
  for (const auto& v : input) rows.push_back(to_big(v));
  return hermite_form(rows, ambient, track);
}

// True iff the integer vectors span all of Z^ambient.
inline bool spans_lattice(const std::vector<IntVector>& vecs, int ambient) {
  auto h = hermite_form(vecs, ambient);
  if (h.rank() != ambient) return false;
  for (int i = 0; i < ambient; ++i)
    if (h.rows[i][h.pivots[i]] != 1) return false;
  return true;
}

// Elementary divisors (Smith invariants) of the row lattice; zeros omitted.
inline std::vector<BigInt> elementary_divisors(std::vector<std::vector<BigInt>> a, int ambient) {
  const int m = static_cast<int>(a.size());
  std::vector<BigInt> out;
  int t = 0;
  while (t < m && t < ambient) {
    // pick smallest nonzero entry in the remaining block
    int bi = -1, bj = -1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < ambient; ++j)
        if (a[i][j] != 0 && (bi < 0 || abs(a[i][j]) < abs(a[bi][bj]))) {
          bi = i;
          bj = j;
        }
    if (bi < 0) break;
    std::swap(a[t], a[bi]);
    for (auto& row : a) std::swap(row[t], row[bj]);
    bool clean = true;
    for (int i = t + 1; i < m; ++i) {
      if (a[i][t] == 0) continue;
      BigInt q = a[i][t] / a[t][t];
      for (int j = t; j < ambient; ++j) a[i][j] -= q * a[t][j];
      if (a[i][t] != 0) clean = false;
    }
    for (int j = t + 1; j < ambient; ++j) {
      if (a[t][j] == 0) continue;
      BigInt q = a[t][j] / a[t][t];
      for (int i = t; i < m; ++i) a[i][j] -= q * a[i][t];
      if (a[t][j] != 0) clean = false;
    }
    if (!clean) continue;
    // divisibility condition for the remaining block
    bool divides = true;
    for (int i = t + 1; i < m && divides; ++i)
      for (int j = t + 1; j < ambient; ++j)
        if (a[i][j] % a[t][t] != 0) {
          for (int k = t; k < ambient; ++k) a[t][k] += a[i][k];
          divides = false;
          break;
        }
    if (!divides) continue;
    out.push_back(abs(a[t][t]));
    ++t;
  }
  return out;
}

// Inverse of a unimodular integer matrix (throws if |det| != 1).
inline IntMatrix unimodular_inverse(const IntMatrix& m) {
  const int n = m.rows;
  if (m.rows != m.cols) throw Error(ErrorCode::DimensionMismatch, "inverse of non-square matrix");
  std::vector<std::vector<BigInt>> rows(n, std::vector<BigInt>(2 * n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) rows[i][j] = m(i, j);
    rows[i][n + i] = 1;
  }
  auto h = hermite_form(rows, 2 * n);
  if (h.rank() < n) throw Error(ErrorCode::NonUnimodular, "singular matrix");
  for (int i = 0; i < n; ++i)
    if (h.pivots[i] != i || h.rows[i][i] != 1) throw Error(ErrorCode::NonUnimodular, "matrix is not unimodular");
  IntMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = to_int64(h.rows[i][n + j]);
  return inv;
}

inline int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  return sign;
}

}  // namespace torelli
