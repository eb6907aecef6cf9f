#pragma once

// Eventually-zero branches of 2^ω, the σ-centered poset P4 of (n, F) pairs,
// the split function h, the Hechler order, and the finite b-homogeneity and
// predictor utilities.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/seq.hpp"

namespace forcing_lab {

/// A 0/1 prefix followed by zeros forever. Stored without trailing zeros.
class Branch {
 public:
  Branch() = default;
  explicit Branch(std::string bits) : bits_(std::move(bits)) {
    for (char c : bits_)
      if (c != '0' && c != '1') throw ParseError("not a bitstring: " + bits_);
    while (!bits_.empty() && bits_.back() == '0') bits_.pop_back();
  }

  static Branch parse(const std::string& s) { return Branch(s); }

  int value(std::size_t k) const { return k < bits_.size() ? bits_[k] - '0' : 0; }

  /// x restricted to n, as a bitstring of length n.
  std::string restrict(std::size_t n) const {
    std::string out = bits_.substr(0, std::min(n, bits_.size()));
    out.resize(n, '0');
    return out;
  }

  const std::string& prefix() const { return bits_; }
  std::string to_string() const { return bits_.empty() ? "0" : bits_; }

  friend bool operator==(const Branch& a, const Branch& b) { return a.bits_ == b.bits_; }
  friend bool operator<(const Branch& a, const Branch& b) { return a.bits_ < b.bits_; }

 private:
  std::string bits_;
};

/// h(x, y) = min{n : x(n) != y(n)}.
inline std::size_t h_split(const Branch& x, const Branch& y) {
  if (x == y) throw EqualBranches(x.to_string());
  const std::size_t len = std::max(x.prefix().size(), y.prefix().size());
  for (std::size_t k = 0; k < len; ++k)
    if (x.value(k) != y.value(k)) return k;
  throw Error("unreachable: distinct branches agree on their prefixes");
}

inline std::set<std::string> traces(const std::set<Branch>& F, std::size_t n) {
  std::set<std::string> out;
  for (const auto& x : F) out.insert(x.restrict(n));
  return out;
}

struct P4Condition {
  std::size_t n = 0;
  std::set<Branch> F;

  P4Condition() = default;
  P4Condition(std::size_t n_, std::set<Branch> F_) : n(n_), F(std::move(F_)) {
    if (traces(F, n).size() != F.size()) throw InvalidCondition("branches not distinct at level " + std::to_string(n));
  }

  friend bool operator==(const P4Condition& a, const P4Condition& b) { return a.n == b.n && a.F == b.F; }
  friend bool operator<(const P4Condition& a, const P4Condition& b) {
    if (a.n != b.n) return a.n < b.n;
    return a.F < b.F;
  }
};

inline bool p4_leq(const P4Condition& c1, const P4Condition& c2) {
  if (c1.n > c2.n) return false;
  if (!std::includes(c2.F.begin(), c2.F.end(), c1.F.begin(), c1.F.end())) return false;
  return traces(c1.F, c1.n) == traces(c2.F, c1.n);
}

/// Union of same-cell conditions at the least level separating all branches.
inline P4Condition p4_merge(const std::vector<P4Condition>& cs) {
  if (cs.empty()) throw PreconditionError("p4_merge of an empty list");
  const std::size_t n = cs.front().n;
  const auto tr = traces(cs.front().F, n);
  std::set<Branch> all;
  for (const auto& c : cs) {
    if (c.n != n || traces(c.F, n) != tr) throw PreconditionError("conditions are not in one cell");
    all.insert(c.F.begin(), c.F.end());
  }
  std::size_t m = n;
  for (auto a = all.begin(); a != all.end(); ++a)
    for (auto b = std::next(a); b != all.end(); ++b) m = std::max(m, h_split(*a, *b) + 1);
  P4Condition out(m, std::move(all));
  for (const auto& c : cs)
    if (!p4_leq(c, out)) throw Error("merge does not extend an input");
  return out;
}

struct HechlerCondition {
  std::size_t n = 0;
  std::map<Nat, Nat> f;  // zero values are not stored

  HechlerCondition() = default;
  HechlerCondition(std::size_t n_, std::map<Nat, Nat> f_) : n(n_) {
    for (auto [k, v] : f_)
      if (v != 0) f.emplace(k, v);
  }

  Nat at(Nat k) const {
    auto it = f.find(k);
    return it == f.end() ? 0 : it->second;
  }

  friend bool operator==(const HechlerCondition& a, const HechlerCondition& b) {
    return a.n == b.n && a.f == b.f;
  }
};

/// n1 <= n2, same stem below n1, pointwise domination.
inline bool hechler_leq(const HechlerCondition& c1, const HechlerCondition& c2) {
  if (c1.n > c2.n) return false;
  for (Nat k = 0; k < c1.n; ++k)
    if (c1.at(k) != c2.at(k)) return false;
  for (auto [k, v] : c1.f)
    if (v > c2.at(k)) return false;
  return true;
}

/// Common extension of two conditions with the same stem: pointwise max.
inline HechlerCondition hechler_upper_bound(const HechlerCondition& c1, const HechlerCondition& c2) {
  if (c1.n != c2.n) throw PreconditionError("stems have different lengths");
  for (Nat k = 0; k < c1.n; ++k)
    if (c1.at(k) != c2.at(k)) throw PreconditionError("stems differ at " + std::to_string(k));
  std::map<Nat, Nat> g = c1.f;
  for (auto [k, v] : c2.f) g[k] = std::max(g[k], v);
  return HechlerCondition(c1.n, std::move(g));
}

inline void check_separated(const std::vector<Branch>& X, std::size_t m) {
  for (std::size_t a = 0; a < X.size(); ++a)
    for (std::size_t b = a + 1; b < X.size(); ++b)
      if (h_split(X[a], X[b]) >= m)
        throw PreconditionError("branches " + X[a].to_string() + " and " + X[b].to_string() +
                                " agree below " + std::to_string(m));
}

inline constexpr std::size_t kExactPartitionLimit = 12;

struct Partition {
  std::vector<std::vector<std::size_t>> classes;  // indices into X
  bool exact = true;
};

/// Fewest classes with every in-class h-value in b: a minimum clique cover of
/// the graph x ~ y iff h(x, y) in b. Subset DP up to 12 branches, greedy above.
inline Partition b_homog_partition(const std::vector<Branch>& X, const std::set<Nat>& b, std::size_t m) {
  check_separated(X, m);
  const std::size_t k = X.size();
  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) adj[i][j] = adj[j][i] = b.count(h_split(X[i], X[j])) > 0;

  Partition out;
  if (k == 0) return out;
  if (k <= kExactPartitionLimit) {
    const std::size_t full = (std::size_t{1} << k) - 1;
    std::vector<bool> clique(full + 1, false);
    clique[0] = true;
    for (std::size_t s = 1; s <= full; ++s) {
      const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(s));
      const std::size_t rest = s & (s - 1);
      bool ok = clique[rest];
      for (std::size_t j = 0; ok && j < k; ++j)
        if ((rest >> j & 1) && !adj[low][j]) ok = false;
      clique[s] = ok;
    }
    std::vector<std::size_t> best(full + 1, k + 1), pick(full + 1, 0);
    best[0] = 0;
    for (std::size_t s = 1; s <= full; ++s) {
      const std::size_t low = s & (~s + 1);
      // Classes containing the lowest element, largest first for a canonical pick.
      const std::size_t rest = s ^ low;
      for (std::size_t sub = rest;; sub = (sub - 1) & rest) {
        const std::size_t cls = sub | low;
        if (clique[cls] && best[s ^ cls] + 1 < best[s]) {
          best[s] = best[s ^ cls] + 1;
          pick[s] = cls;
        }
        if (sub == 0) break;
      }
    }
    for (std::size_t s = full; s != 0; s ^= pick[s]) {
      std::vector<std::size_t> cls;
      for (std::size_t j = 0; j < k; ++j)
        if (pick[s] >> j & 1) cls.push_back(j);
      out.classes.push_back(cls);
    }
  } else {
    out.exact = false;
    for (std::size_t i = 0; i < k; ++i) {
      bool placed = false;
      for (auto& cls : out.classes) {
        if (std::all_of(cls.begin(), cls.end(), [&](std::size_t j) { return adj[i][j]; })) {
          cls.push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) out.classes.push_back({i});
    }
  }
  std::sort(out.classes.begin(), out.classes.end());
  return out;
}

struct PredictorResult {
  std::map<std::string, int> table;      // x restricted to n -> predicted x(n)
  std::vector<std::size_t> thresholds;   // per branch of X
  std::set<std::size_t> conflicts;       // levels where the table had to choose
};

/// Predicts x(n) from x restricted to n by majority (ties to 0). A branch that
/// loses at a level outside b gets that level as its threshold.
inline PredictorResult predictor_thresholds(const std::vector<Branch>& X, const std::set<Nat>& b, std::size_t m) {
  check_separated(X, m);
  PredictorResult out;
  out.thresholds.assign(X.size(), 0);
  for (std::size_t n = 0; n < m; ++n) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < X.size(); ++i) groups[X[i].restrict(n)].push_back(i);
    for (const auto& [prefix, members] : groups) {
      std::size_t ones = 0;
      for (auto i : members) ones += X[i].value(n);
      const int bit = 2 * ones > members.size() ? 1 : 0;
      out.table[prefix] = bit;
      if (ones == 0 || ones == members.size()) continue;
      // Two members agree below n and split at n.
      for (auto i : members)
        for (auto j : members)
          if (X[i].value(n) != X[j].value(n) && h_split(X[i], X[j]) != n)
            throw Error("conflict away from a split level");
      out.conflicts.insert(n);
      if (b.count(n)) continue;
      for (auto i : members)
        if (X[i].value(n) != bit) out.thresholds[i] = std::max(out.thresholds[i], n);
    }
  }
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t n = out.thresholds[i] + 1; n < m; ++n)
      if (!b.count(n) && out.table.at(X[i].restrict(n)) != X[i].value(n))
        throw Error("predictor contradicts branch " + X[i].to_string() + " at " + std::to_string(n));
  return out;
}

/// Indices k with b ∩ [cuts[k], cuts[k+1]) empty.
inline std::vector<std::size_t> interval_gaps(const std::set<Nat>& b, const std::vector<Nat>& cuts) {
  for (std::size_t k = 1; k < cuts.size(); ++k)
    if (cuts[k] <= cuts[k - 1]) throw PreconditionError("cuts are not strictly increasing");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    auto it = b.lower_bound(cuts[k]);
    if (it == b.end() || *it >= cuts[k + 1]) out.push_back(k);
  }
  return out;
}

}  // namespace forcing_lab
