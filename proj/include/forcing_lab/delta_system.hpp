#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <optional>
#include <set>
#include <vector>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/seq.hpp"

namespace forcing_lab {

using NatSet = std::set<Nat>;

struct DeltaSystem {
  NatSet kernel;
  std::vector<std::size_t> indices;
};

namespace detail {

inline NatSet intersect(const NatSet& a, const NatSet& b) {
  NatSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace detail

/// Families up to this size are searched exhaustively in lexicographic index
/// order, so the first sunflower found is the lexicographically least one.
inline constexpr std::size_t kDeltaExhaustiveLimit = 24;

/// Finds k members whose pairwise intersections all equal one kernel (equal
/// sets count, with empty petals). Larger families first try a greedy pass
/// per candidate kernel, then fall back to the exhaustive search.
inline std::optional<DeltaSystem> delta_system(const std::vector<NatSet>& family, std::size_t k) {
  if (k < 2) throw PreconditionError("delta_system needs k >= 2");
  const std::size_t n = family.size();
  if (k > n) return std::nullopt;

  auto verify = [&](const std::vector<std::size_t>& idx, const NatSet& kernel) {
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (detail::intersect(family[idx[a]], family[idx[b]]) != kernel) return false;
      }
    }
    return true;
  };

  if (n > kDeltaExhaustiveLimit) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const NatSet kernel = detail::intersect(family[a], family[b]);
        std::vector<std::size_t> chosen{a, b};
        for (std::size_t c = b + 1; c < n && chosen.size() < k; ++c) {
          bool ok = true;
          for (auto d : chosen) {
            if (detail::intersect(family[c], family[d]) != kernel) { ok = false; break; }
          }
          if (ok) chosen.push_back(c);
        }
        if (chosen.size() == k) return DeltaSystem{kernel, chosen};
      }
    }
  }

  // Exhaustive: the first two members fix the kernel, later ones must meet
  // every chosen member exactly in it.
  std::vector<std::size_t> chosen;
  NatSet kernel;
  auto search = [&](auto&& self, std::size_t from) -> bool {
    if (chosen.size() == k) return true;
    for (std::size_t c = from; c + (k - chosen.size()) <= n; ++c) {
      if (chosen.size() == 1) {
        kernel = detail::intersect(family[chosen[0]], family[c]);
      } else if (chosen.size() >= 2) {
        bool ok = true;
        for (auto d : chosen) {
          if (detail::intersect(family[c], family[d]) != kernel) { ok = false; break; }
        }
        if (!ok) continue;
      }
      chosen.push_back(c);
      if (self(self, c + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (search(search, 0)) {
    if (!verify(chosen, kernel)) throw Error("delta_system produced an invalid sunflower");
    return DeltaSystem{kernel, chosen};
  }
  return std::nullopt;
}

}  // namespace forcing_lab
