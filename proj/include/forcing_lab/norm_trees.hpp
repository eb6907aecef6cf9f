#pragma once

// Creature-style norms on successor sets of the tree T*, the parameter
// tables f and g, the finite-tree poset Q_eta, truncated P2 conditions and
// the H' search for families of norm-bounded tuples.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/rational.hpp"
#include "forcing_lab/seq.hpp"

namespace forcing_lab {

using NatSet = std::set<Nat>;

enum class ParamMode { Exact, Toy };

inline std::string to_string(ParamMode m) { return m == ParamMode::Exact ? "exact" : "toy"; }

inline ParamMode parse_mode(const std::string& s) {
  if (s == "exact") return ParamMode::Exact;
  if (s == "toy") return ParamMode::Toy;
  throw BadParams("mode must be exact or toy, got " + s);
}

/// f and g on the nodes of T* that carry parameters, listed in level order
/// (length first, then lexicographic).
struct TreeParams {
  ParamMode mode = ParamMode::Toy;
  std::size_t depth = 0;
  unsigned toy_scale = 2;
  std::vector<FinSeq> order;
  std::map<FinSeq, BigInt> f, g;

  bool has(const FinSeq& node) const { return f.count(node) != 0; }

  const BigInt& f_of(const FinSeq& node) const {
    auto it = f.find(node);
    if (it == f.end()) throw PreconditionError("no parameters for node <" + node.to_string() + ">");
    return it->second;
  }
  const BigInt& g_of(const FinSeq& node) const {
    auto it = g.find(node);
    if (it == g.end()) throw PreconditionError("no parameters for node <" + node.to_string() + ">");
    return it->second;
  }

  std::size_t level_size(std::size_t level) const {
    return static_cast<std::size_t>(std::count_if(
        order.begin(), order.end(), [&](const FinSeq& s) { return s.size() == level; }));
  }

  /// Hand-made tables (tests, fixtures). No inequality is enforced here.
  static TreeParams custom(ParamMode mode, std::map<FinSeq, BigInt> f, std::map<FinSeq, BigInt> g,
                           unsigned toy_scale = 2) {
    TreeParams p;
    p.mode = mode;
    p.toy_scale = toy_scale;
    for (const auto& kv : f) {
      if (!g.count(kv.first)) throw BadParams("node <" + kv.first.to_string() + "> has f but no g");
      if (kv.second <= 0 || g.at(kv.first) <= 0) throw BadParams("f and g must be positive");
      p.order.push_back(kv.first);
      p.depth = std::max(p.depth, kv.first.size() + 1);
    }
    if (g.size() != f.size()) throw BadParams("g has nodes without f");
    std::sort(p.order.begin(), p.order.end(), [](const FinSeq& a, const FinSeq& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    p.f = std::move(f);
    p.g = std::move(g);
    return p;
  }
};

inline constexpr std::size_t kMaxParamNodes = 1u << 16;
inline constexpr std::size_t kDefaultDigitCap = 2000;

/// Minimal f, g on T* levels below `depth`, filled in level order. Exact:
/// g > |level| * prod f(nu) * (100 + lh), f > g * prod 2^f(nu). Toy replaces
/// 2^f(nu) by f(nu) and 100 by toy_scale. The products run over nodes with
/// smaller f, which are exactly the earlier nodes.
inline TreeParams build_params(std::size_t depth, ParamMode mode, unsigned toy_scale = 2,
                               std::size_t digit_cap = kDefaultDigitCap) {
  if (depth == 0) throw PreconditionError("depth must be >= 1");
  TreeParams p;
  p.mode = mode;
  p.depth = depth;
  p.toy_scale = toy_scale;
  const BigInt bit_cap = BigInt(digit_cap) * 10 / 3;

  BigInt prod_f = 1;       // prod of f over earlier nodes
  BigInt exp_sum = 0;      // sum of f over earlier nodes (Exact)
  BigInt prod_pow = 1;     // prod of 2^f or f over earlier nodes
  std::vector<FinSeq> level{FinSeq{}};
  for (std::size_t lh = 0; lh < depth; ++lh) {
    if (p.order.size() + level.size() > kMaxParamNodes) {
      throw ResourceBound("level " + std::to_string(lh) + " has too many nodes to tabulate");
    }
    const BigInt count = level.size();
    const BigInt factor = (mode == ParamMode::Exact ? 100 : toy_scale) + BigInt(lh);
    for (const auto& node : level) {
      const BigInt g = count * prod_f * factor + 1;
      const BigInt f = g * prod_pow + 1;
      if (boost::multiprecision::msb(f) > bit_cap) {
        throw ResourceBound("f exceeds the " + std::to_string(digit_cap) + "-digit cap");
      }
      p.order.push_back(node);
      p.f.emplace(node, f);
      p.g.emplace(node, g);
      prod_f *= f;
      if (mode == ParamMode::Exact) {
        exp_sum += f;
        if (exp_sum > bit_cap) {
          // The next node would need 2^exp_sum; stop only if one is needed.
          if (&node != &level.back() || lh + 1 < depth) {
            throw ResourceBound("2^f products exceed the " + std::to_string(digit_cap) + "-digit cap");
          }
        } else {
          prod_pow = BigInt(1) << static_cast<unsigned>(exp_sum);
        }
      } else {
        prod_pow *= f;
      }
    }
    if (lh + 1 == depth) break;
    std::vector<FinSeq> next;
    for (const auto& node : level) {
      const BigInt& fn = p.f.at(node);
      if (fn + next.size() > kMaxParamNodes) {
        throw ResourceBound("level " + std::to_string(lh + 1) + " has too many nodes to tabulate");
      }
      for (Nat c = 0; c < static_cast<Nat>(fn); ++c) next.push_back(node.appended(c));
    }
    level = std::move(next);
  }
  return p;
}

/// prod{2^f(nu) : f(nu) < f(node)} (Exact) or prod{f(nu) : ...} (Toy) is >= m.
inline bool product_bound_at_least(const TreeParams& p, const FinSeq& node, const BigInt& m) {
  const BigInt& fn = p.f_of(node);
  BigInt prod = 1;
  for (const auto& [nu, fv] : p.f) {
    if (!(fv < fn)) continue;
    if (p.mode == ParamMode::Exact) {
      if (fv >= 64) return true;
      prod <<= static_cast<unsigned>(fv);
    } else {
      prod *= fv;
    }
    if (prod >= m) return true;
  }
  return prod >= m;
}

/// First failing clause of the parameter inequalities, if any.
inline std::optional<std::string> params_violation(const TreeParams& p) {
  for (std::size_t k = 1; k < p.order.size(); ++k) {
    if (!(p.f_of(p.order[k - 1]) < p.f_of(p.order[k]))) {
      return "f does not increase at <" + p.order[k].to_string() + ">";
    }
  }
  for (const auto& node : p.order) {
    const BigInt& fn = p.f_of(node);
    BigInt prod_f = 1, prod_pow = 1;
    for (const auto& [nu, fv] : p.f) {
      if (!(fv < fn)) continue;
      prod_f *= fv;
      if (p.mode == ParamMode::Exact) {
        if (fv > 100000) return "2^f too large to verify at <" + node.to_string() + ">";
        prod_pow <<= static_cast<unsigned>(fv);
      } else {
        prod_pow *= fv;
      }
    }
    const BigInt factor = (p.mode == ParamMode::Exact ? 100 : p.toy_scale) + BigInt(node.size());
    if (!(p.g_of(node) > BigInt(p.level_size(node.size())) * prod_f * factor)) {
      return "g too small at <" + node.to_string() + ">";
    }
    if (!(fn > p.g_of(node) * prod_pow)) return "f too small at <" + node.to_string() + ">";
  }
  return std::nullopt;
}

/// A ⊆ f(node), stored by its complement.
struct SuccSet {
  FinSeq node;
  NatSet removed;

  bool operator==(const SuccSet&) const = default;
  auto operator<=>(const SuccSet&) const = default;
};

inline void check_removed(const TreeParams& p, const FinSeq& node, const NatSet& removed) {
  if (!removed.empty() && !(BigInt(*removed.rbegin()) < p.f_of(node))) {
    throw PreconditionError("removed element " + std::to_string(*removed.rbegin()) +
                            " not below f(<" + node.to_string() + ">)");
  }
}

/// g / |removed|, infinite when nothing is removed.
inline Norm norm_value(const BigInt& g, std::size_t removed_count) {
  if (removed_count == 0) return Norm::infinity();
  return Norm::finite(ExactRational(g, BigInt(removed_count)));
}

inline Norm norm_of(const TreeParams& p, const FinSeq& node, const NatSet& removed) {
  check_removed(p, node, removed);
  return norm_value(p.g_of(node), removed.size());
}

inline Norm norm_of(const TreeParams& p, const SuccSet& a) { return norm_of(p, a.node, a.removed); }

struct IntersectResult {
  SuccSet set;
  Norm norm;
  bool nonempty = true;
};

inline IntersectResult intersect_norm(const TreeParams& p, const std::vector<SuccSet>& sets) {
  if (sets.empty()) throw PreconditionError("intersect_norm needs at least one set");
  SuccSet out{sets.front().node, {}};
  for (const auto& s : sets) {
    if (s.node != out.node) {
      throw NodeMismatch("<" + s.node.to_string() + "> vs <" + out.node.to_string() + ">");
    }
    check_removed(p, s.node, s.removed);
    out.removed.insert(s.removed.begin(), s.removed.end());
  }
  const bool nonempty = BigInt(out.removed.size()) < p.f_of(out.node);
  Norm n = norm_of(p, out);
  return {std::move(out), std::move(n), nonempty};
}

// ---------------------------------------------------------------------------
// Finite trees.

/// A finite tree of the given height above `root`. Interior nodes (relative
/// depth < height) keep all successors except their `removed` entry; nodes
/// without an entry keep everything.
class FiniteNormTree {
 public:
  FiniteNormTree() = default;
  FiniteNormTree(FinSeq root, std::size_t height, std::map<FinSeq, NatSet> removed = {})
      : root_(std::move(root)), height_(height) {
    for (const auto& [node, rem] : removed) {
      if (rem.empty()) continue;
      if (!root_.is_prefix_of(node) || node.size() >= root_.size() + height_) {
        throw InvalidCondition("<" + node.to_string() + "> is not an interior node");
      }
      for (std::size_t l = root_.size(); l < node.size(); ++l) {
        auto it = removed.find(node.restrict(l));
        if (it != removed.end() && it->second.count(node[l])) {
          throw InvalidCondition("<" + node.to_string() + "> lies under a removed successor");
        }
      }
      removed_.emplace(node, rem);
    }
  }

  const FinSeq& root() const { return root_; }
  std::size_t height() const { return height_; }
  const std::map<FinSeq, NatSet>& removed() const { return removed_; }

  const NatSet& removed_at(const FinSeq& node) const {
    static const NatSet kEmpty;
    auto it = removed_.find(node);
    return it == removed_.end() ? kEmpty : it->second;
  }

  FiniteNormTree truncated(std::size_t h) const {
    std::map<FinSeq, NatSet> keep;
    for (const auto& [node, rem] : removed_) {
      if (node.size() < root_.size() + h) keep.emplace(node, rem);
    }
    return FiniteNormTree(root_, std::min(h, height_), std::move(keep));
  }

  bool operator==(const FiniteNormTree&) const = default;

 private:
  FinSeq root_;
  std::size_t height_ = 0;
  std::map<FinSeq, NatSet> removed_;
};

inline constexpr std::size_t kMaxInteriorNodes = 1u << 20;

/// Interior nodes in level order. Needs f on every interior node.
inline std::vector<FinSeq> interior_nodes(const TreeParams& p, const FiniteNormTree& t) {
  std::vector<FinSeq> out;
  if (t.height() == 0) return out;
  std::vector<FinSeq> level{t.root()};
  for (std::size_t d = 0; d < t.height(); ++d) {
    out.insert(out.end(), level.begin(), level.end());
    if (d + 1 == t.height()) break;
    std::vector<FinSeq> next;
    for (const auto& node : level) {
      const BigInt& fn = p.f_of(node);
      const NatSet& rem = t.removed_at(node);
      check_removed(p, node, rem);
      if (fn - rem.size() + next.size() + out.size() > kMaxInteriorNodes) {
        throw ResourceBound("too many interior nodes to enumerate");
      }
      for (Nat c = 0; c < static_cast<Nat>(fn); ++c) {
        if (!rem.count(c)) next.push_back(node.appended(c));
      }
    }
    level = std::move(next);
  }
  return out;
}

struct TreeCheck {
  bool ok = true;
  std::optional<FinSeq> node;
  std::string reason;
};

/// Every interior node nu has nor_nu(suc(nu)) >= lh(nu).
inline TreeCheck qeta_check(const TreeParams& p, const FiniteNormTree& t) {
  for (const auto& node : interior_nodes(p, t)) {
    if (norm_of(p, node, t.removed_at(node)) < Norm::finite(ExactRational(node.size()))) {
      return {false, node, "norm below length"};
    }
  }
  return {};
}

/// t2 end-extends t1.
inline bool qeta_leq(const FiniteNormTree& t1, const FiniteNormTree& t2) {
  if (t1.root() != t2.root()) throw RootMismatch("<" + t1.root().to_string() + "> vs <" +
                                                 t2.root().to_string() + ">");
  return t2.height() >= t1.height() && t2.truncated(t1.height()) == t1;
}

/// A truncated P2 condition: per-level lower bounds for the minimum norm at
/// represented levels (absent levels mean 0), plus the declared per-level
/// growth of the bound beyond them, which must be positive.
struct P2Approx {
  std::optional<FiniteNormTree> tree;
  std::map<std::size_t, ExactRational> schedule;
  ExactRational tail_growth = 1;
};

inline TreeCheck p2_check(const TreeParams& p, const P2Approx& a) {
  if (!a.tree) return {false, std::nullopt, "no root"};
  if (a.tail_growth <= 0) return {false, std::nullopt, "schedule does not diverge"};
  for (const auto& node : interior_nodes(p, *a.tree)) {
    auto it = a.schedule.find(node.size());
    if (it == a.schedule.end()) continue;
    if (norm_of(p, node, a.tree->removed_at(node)) < Norm::finite(it->second)) {
      return {false, node, "norm below schedule at level " + std::to_string(node.size())};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// The H' search.

/// A tuple (a_k)_{k<k#}; a_k is a successor set of rho_k.
using NormTuple = std::vector<SuccSet>;

/// Looks for H' ⊆ H sharing a node at level n#+1 of every s-tree and with
/// empty intersection in each coordinate. Scans the families
/// H_rho = {a : rho in s_a} for rho in sorted order. s_trees[j] belongs to H[j].
inline std::optional<std::vector<std::size_t>> claim_search(const TreeParams& p,
                                                            const std::vector<NormTuple>& H,
                                                            const std::vector<std::set<FinSeq>>& s_trees,
                                                            std::size_t n_sharp) {
  if (s_trees.size() != H.size()) throw PreconditionError("one s-tree per tuple");
  const Norm bound = Norm::finite(ExactRational(n_sharp));
  for (std::size_t j = 0; j < H.size(); ++j) {
    if (j > 0 && H[j].size() != H[0].size()) throw PreconditionError("tuples differ in length");
    for (std::size_t k = 0; k < H[j].size(); ++k) {
      if (j > 0 && H[j][k].node != H[0][k].node) throw NodeMismatch("tuple coordinates differ");
      if (norm_of(p, H[j][k]) < bound) {
        throw PreconditionError("tuple " + std::to_string(j) + " has norm below n# at coordinate " +
                                std::to_string(k));
      }
    }
  }
  std::set<FinSeq> rhos;
  for (const auto& s : s_trees) {
    for (const auto& node : s) {
      if (node.size() == n_sharp + 1) rhos.insert(node);
    }
  }
  for (const auto& rho : rhos) {
    std::vector<std::size_t> fam;
    for (std::size_t j = 0; j < H.size(); ++j) {
      if (s_trees[j].count(rho)) fam.push_back(j);
    }
    bool all_empty = true;
    for (std::size_t k = 0; all_empty && !H.empty() && k < H[0].size(); ++k) {
      std::vector<SuccSet> col;
      for (auto j : fam) col.push_back(H[j][k]);
      all_empty = !intersect_norm(p, col).nonempty;
    }
    if (all_empty) return fam;
  }
  return std::nullopt;
}

/// All successor sets of `node` with norm >= min_norm (needs small f).
inline std::vector<SuccSet> norm_bounded_sets(const TreeParams& p, const FinSeq& node,
                                              const ExactRational& min_norm) {
  const BigInt& fn = p.f_of(node);
  if (fn > 20) throw ResourceBound("f too large to enumerate subsets");
  const unsigned f = static_cast<unsigned>(fn);
  std::vector<SuccSet> out;
  for (unsigned mask = 0; mask < (1u << f); ++mask) {
    SuccSet s{node, {}};
    for (unsigned c = 0; c < f; ++c) {
      if (mask >> c & 1) s.removed.insert(c);
    }
    if (norm_of(p, s) >= Norm::finite(min_norm)) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive check of the intersection bounds.

/// One orbit of m removed sets inside f(node) under permutations of f(node):
/// how many elements lie in exactly the sets of each membership type.
struct RemovedOrbit {
  unsigned f = 0;
  unsigned m = 0;
  std::vector<unsigned> counts;  // indexed by type bitmask, 2^m entries

  std::vector<NatSet> sets() const {
    std::vector<NatSet> out(m);
    Nat next = 0;
    for (std::size_t t = 0; t < counts.size(); ++t)
      for (unsigned k = 0; k < counts[t]; ++k, ++next)
        for (unsigned l = 0; l < m; ++l)
          if (t >> l & 1) out[l].insert(next);
    return out;
  }
};

/// Calls visit(orbit) for every orbit with the given f and m.
template <class Visit>
void for_each_removed_orbit(unsigned f, unsigned m, Visit&& visit) {
  RemovedOrbit o{f, m, std::vector<unsigned>(std::size_t{1} << m, 0)};
  auto rec = [&](auto&& self, std::size_t t, unsigned left) -> void {
    if (t + 1 == o.counts.size()) {
      o.counts[t] = left;
      visit(static_cast<const RemovedOrbit&>(o));
      return;
    }
    for (unsigned c = 0; c <= left; ++c) {
      o.counts[t] = c;
      self(self, t + 1, left - c);
    }
  };
  rec(rec, 0, f);
}

struct NormLemmaReport {
  std::uint64_t orbits = 0;
  std::uint64_t signatures = 0;
  std::uint64_t checks = 0;
  std::uint64_t nonempty_checks = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// For every f <= f_max, g <= g_max, m <= m_max and every choice of m removed
/// sets: nor(intersection) >= min nor / m, and the intersection is nonempty
/// when every norm is >= 1 and m <= P with f > g * P. The norms depend on the
/// sets only through their sizes and the size of their union, so each
/// distinct (sizes, union) signature is checked once per g.
inline NormLemmaReport norm_lemma_exhaustive(unsigned f_max, unsigned g_max, unsigned m_max,
                                        std::size_t max_violations = 10) {
  NormLemmaReport rep;
  const FinSeq node{};
  for (unsigned f = 1; f <= f_max; ++f) {
    for (unsigned m = 1; m <= m_max; ++m) {
      // Signature (sorted sizes, union size) packed in base f + 1.
      std::size_t slots = f + 1;
      for (unsigned l = 0; l < m; ++l) slots *= f + 1;
      std::vector<std::int32_t> seen(slots, -1);
      std::vector<std::pair<std::vector<unsigned>, unsigned>> sigs;
      std::vector<RemovedOrbit> reps;
      std::vector<unsigned> sizes(m);
      for_each_removed_orbit(f, m, [&](const RemovedOrbit& o) {
        ++rep.orbits;
        std::fill(sizes.begin(), sizes.end(), 0u);
        for (std::size_t t = 1; t < o.counts.size(); ++t)
          for (unsigned l = 0; l < m; ++l)
            if (t >> l & 1) sizes[l] += o.counts[t];
        std::sort(sizes.begin(), sizes.end());
        std::size_t key = f - o.counts[0];
        for (auto v : sizes) key = key * (f + 1) + v;
        if (seen[key] >= 0) return;
        seen[key] = static_cast<std::int32_t>(reps.size());
        sigs.emplace_back(sizes, f - o.counts[0]);
        reps.push_back(o);
      });
      rep.signatures += reps.size();
      for (unsigned g = 1; g <= g_max; ++g) {
        const TreeParams p = TreeParams::custom(ParamMode::Toy, {{node, BigInt(f)}}, {{node, BigInt(g)}});
        const unsigned P = (f - 1) / g;
        for (std::size_t k = 0; k < reps.size(); ++k) {
          const auto& sig = sigs[k];
          const auto& o = reps[k];
          std::vector<SuccSet> sets;
          Norm zeta = Norm::infinity();
          for (auto& r : o.sets()) {
            sets.push_back(SuccSet{node, std::move(r)});
            const Norm n = norm_of(p, sets.back());
            if (n < zeta) zeta = n;
          }
          const IntersectResult res = intersect_norm(p, sets);
          ++rep.checks;
          const Norm bound = zeta.infinite ? zeta : Norm::finite(zeta.value / m);
          auto report = [&](const std::string& what) {
            if (rep.violations.size() < max_violations) {
              std::string sizes;
              for (auto v : sig.first) sizes += (sizes.empty() ? "" : ",") + std::to_string(v);
              rep.violations.push_back(what + " at f=" + std::to_string(f) + " g=" + std::to_string(g) +
                                       " m=" + std::to_string(m) + " sizes=" + sizes +
                                       " union=" + std::to_string(sig.second));
            }
          };
          if (res.norm < bound) report("norm " + res.norm.to_string() + " below " + bound.to_string());
          if (m <= P && zeta >= Norm::finite(1)) {
            ++rep.nonempty_checks;
            if (!res.nonempty) report("empty intersection");
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace forcing_lab
