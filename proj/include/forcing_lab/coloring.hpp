#pragma once

// Edge colorings of pairs of naturals read off a seeded bit stream, and the
// homogeneous-set posets built on them.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/seq.hpp"

namespace forcing_lab {

/// x_{k+1} = a x_k + c mod 2^64 from x_0 = seed; bit(k) is the top bit of x_{k+1}.
class BitSource {
 public:
  static constexpr std::uint64_t kMul = 6364136223846793005ULL;
  static constexpr std::uint64_t kInc = 1442695040888963407ULL;

  explicit BitSource(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// x_k by composing the affine step k times (square-and-multiply).
  std::uint64_t state(std::uint64_t k) const {
    std::uint64_t mul = 1, inc = 0;  // accumulated map x -> mul*x + inc
    std::uint64_t step_mul = kMul, step_inc = kInc;
    while (k) {
      if (k & 1) {
        mul *= step_mul;
        inc = inc * step_mul + step_inc;
      }
      step_inc = step_inc * (step_mul + 1);
      step_mul *= step_mul;
      k >>= 1;
    }
    return mul * seed_ + inc;
  }

  int bit(std::uint64_t k) const { return static_cast<int>(state(k + 1) >> 63); }

 private:
  std::uint64_t seed_;
};

inline std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  if (s < a || s > 6'000'000'000ULL) throw ResourceBound("pair too large for the Cantor pairing");
  return s * (s + 1) / 2 + b;
}

/// Color of {beta, alpha} for beta < alpha.
inline int color_edge(const BitSource& src, Nat alpha, Nat beta) {
  if (!(beta < alpha)) throw PreconditionError("color_edge needs beta < alpha");
  return src.bit(cantor_pair(alpha, beta));
}

inline bool homogeneous(const BitSource& src, const std::set<Nat>& H, int i) {
  if (i != 0 && i != 1) throw PreconditionError("color must be 0 or 1");
  for (auto a = H.begin(); a != H.end(); ++a)
    for (auto b = H.begin(); b != a; ++b)
      if (color_edge(src, *a, *b) != i) return false;
  return true;
}

/// H1 ∪ H2 is i-homogeneous.
inline bool homog_compatible(const BitSource& src, const std::set<Nat>& H1, const std::set<Nat>& H2, int i) {
  std::set<Nat> u = H1;
  u.insert(H2.begin(), H2.end());
  return homogeneous(src, u, i);
}

/// Finite i-homogeneous sets ordered by inclusion.
struct P6Condition {
  std::set<Nat> H;
  int color = 0;

  friend bool operator==(const P6Condition&, const P6Condition&) = default;
};

inline bool p6_check(const BitSource& src, const P6Condition& c) { return homogeneous(src, c.H, c.color); }

inline bool p6_leq(const P6Condition& a, const P6Condition& b) {
  return a.color == b.color && std::includes(b.H.begin(), b.H.end(), a.H.begin(), a.H.end());
}

struct NonTransitive {
  std::set<Nat> h1, h2, h3;
  int color = 0;
};

/// Singletons {a}, {b}, {c} with H1~H2 and H2~H3 compatible but H1, H3 not,
/// searched over a < bound, b < bound, c < bound in lexicographic order.
inline std::optional<NonTransitive> find_non_transitive(const BitSource& src, int i, Nat bound) {
  for (Nat a = 0; a < bound; ++a)
    for (Nat b = 0; b < bound; ++b) {
      if (a == b || !homog_compatible(src, {a}, {b}, i)) continue;
      for (Nat c = 0; c < bound; ++c) {
        if (c == a || c == b) continue;
        if (homog_compatible(src, {b}, {c}, i) && !homog_compatible(src, {a}, {c}, i))
          return NonTransitive{{a}, {b}, {c}, i};
      }
    }
  return std::nullopt;
}

}  // namespace forcing_lab
