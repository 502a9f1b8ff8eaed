// Brute-force oracles shared by the unit tests and the acceptance binary.
#pragma once

#include <array>
#include <cstdint>

#include "torelli/exterior.hpp"
#include "torelli/marking.hpp"

namespace oracle {

using torelli::IntMatrix;
using torelli::IntVector;

using Perm = std::array<int, 3>;
inline const std::array<Perm, 6> kPerms = {{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
inline const std::array<int, 6> kSigns = {1, -1, -1, 1, 1, -1};

// sum over sigma, tau in S3 of sgn sgn (a_s1.a_s2)(b_t1.b_t2)(a_s3.b_t3)
inline std::int64_t literal_C1(const std::array<IntVector, 3>& a, const std::array<IntVector, 3>& b, const IntMatrix& om) {
  std::int64_t s = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const Perm& p = kPerms[i];
      const Perm& q = kPerms[j];
      s += kSigns[i] * kSigns[j] * torelli::pair(a[p[0]], om, a[p[1]]) * torelli::pair(b[q[0]], om, b[q[1]]) *
           torelli::pair(a[p[2]], om, b[q[2]]);
    }
  return s;
}

// sum over sigma, tau in S3 of sgn sgn prod_i (a_si.b_ti)
inline std::int64_t literal_C2(const std::array<IntVector, 3>& a, const std::array<IntVector, 3>& b, const IntMatrix& om) {
  std::int64_t s = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const Perm& p = kPerms[i];
      const Perm& q = kPerms[j];
      s += kSigns[i] * kSigns[j] * torelli::pair(a[p[0]], om, b[q[0]]) * torelli::pair(a[p[1]], om, b[q[1]]) *
           torelli::pair(a[p[2]], om, b[q[2]]);
    }
  return s;
}

inline torelli::MultiWedge decomposable(const std::array<IntVector, 3>& a, const std::array<IntVector, 3>& b) {
  return torelli::wedge_product(torelli::wedge3(a[0], a[1], a[2]), torelli::wedge3(b[0], b[1], b[2]));
}

}  // namespace oracle
