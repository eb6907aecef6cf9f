#pragma once

// Clopen binary trees with exact dyadic measure, the poset P3 of
// (n, tree) pairs, the linked cells U(W, n, m) and the classifier cells
// Q(n, W, sigma).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/rational.hpp"
#include "forcing_lab/seq.hpp"

namespace forcing_lab {

inline constexpr std::size_t kMaxClopenDepth = 24;

/// Index of a 0/1 string of length m among the level-m nodes, first bit most
/// significant.
inline std::uint64_t bits_index(const FinSeq& t) {
  std::uint64_t idx = 0;
  for (auto b : t.items()) {
    if (b > 1) throw PreconditionError("not a bitstring: <" + t.to_string() + ">");
    idx = idx << 1 | b;
  }
  return idx;
}

inline FinSeq bits_of(std::uint64_t idx, std::size_t m) {
  std::vector<Nat> v(m);
  for (std::size_t i = 0; i < m; ++i) v[m - 1 - i] = idx >> i & 1;
  return FinSeq(std::move(v));
}

inline std::string bits_string(const FinSeq& t) {
  std::string s;
  for (auto b : t.items()) s += static_cast<char>('0' + b);
  return s;
}

inline FinSeq parse_bits(const std::string& s) {
  std::vector<Nat> v;
  for (char c : s) {
    if (c != '0' && c != '1') throw ParseError("not a bitstring: " + s);
    v.push_back(static_cast<Nat>(c - '0'));
  }
  return FinSeq(std::move(v));
}

/// A subtree of 2^{<=m} whose maximal nodes all have length m, stored as its
/// set of level-m nodes. The branches above it form a clopen set.
class ClopenTree {
 public:
  using Bits = boost::dynamic_bitset<std::uint64_t>;

  ClopenTree() : leaves_(1) {}
  ClopenTree(std::size_t depth, Bits leaves) : depth_(depth), leaves_(std::move(leaves)) {
    if (depth_ > kMaxClopenDepth) throw ResourceBound("clopen depth above " + std::to_string(kMaxClopenDepth));
    if (leaves_.size() != (std::size_t{1} << depth_)) throw PreconditionError("leaf bitset has wrong size");
  }

  static ClopenTree from_leaves(std::size_t depth, const std::vector<FinSeq>& leaves) {
    if (depth > kMaxClopenDepth) throw ResourceBound("clopen depth above " + std::to_string(kMaxClopenDepth));
    Bits b(std::size_t{1} << depth);
    for (const auto& s : leaves) {
      if (s.size() != depth) throw InvalidCondition("leaf <" + s.to_string() + "> not at depth " + std::to_string(depth));
      b.set(bits_index(s));
    }
    return ClopenTree(depth, std::move(b));
  }

  static ClopenTree full(std::size_t depth) {
    Bits b(std::size_t{1} << depth);
    b.set();
    return ClopenTree(depth, std::move(b));
  }

  std::size_t depth() const { return depth_; }
  const Bits& leaves() const { return leaves_; }
  std::size_t leaf_count() const { return leaves_.count(); }
  bool empty() const { return leaves_.none(); }

  /// W(t): level-m nodes of the tree above t.
  std::size_t count_above(const FinSeq& t) const {
    if (t.size() > depth_) throw PreconditionError("node longer than the tree depth");
    const std::size_t span = std::size_t{1} << (depth_ - t.size());
    const std::size_t lo = bits_index(t) * span;
    std::size_t n = 0;
    for (std::size_t i = lo; i < lo + span; ++i) n += leaves_[i];
    return n;
  }

  bool contains(const FinSeq& t) const { return count_above(t) > 0; }

  /// The nodes of the tree at level k, as a bitset over 2^k.
  Bits trace(std::size_t k) const {
    if (k > depth_) throw PreconditionError("trace level above depth");
    Bits out(std::size_t{1} << k);
    const std::size_t shift = depth_ - k;
    for (auto i = leaves_.find_first(); i != Bits::npos; i = leaves_.find_next(i)) out.set(i >> shift);
    return out;
  }

  std::vector<FinSeq> nodes_at(std::size_t k) const {
    std::vector<FinSeq> out;
    const Bits tr = trace(k);
    for (auto i = tr.find_first(); i != Bits::npos; i = tr.find_next(i)) out.push_back(bits_of(i, k));
    return out;
  }

  std::vector<FinSeq> leaf_strings() const { return nodes_at(depth_); }

  /// The same clopen set described at a larger depth.
  ClopenTree refined(std::size_t m) const {
    if (m < depth_) throw PreconditionError("cannot refine to a smaller depth");
    if (m == depth_) return *this;
    if (m > kMaxClopenDepth) throw ResourceBound("clopen depth above " + std::to_string(kMaxClopenDepth));
    const std::size_t span = std::size_t{1} << (m - depth_);
    Bits b(std::size_t{1} << m);
    for (auto i = leaves_.find_first(); i != Bits::npos; i = leaves_.find_next(i)) {
      for (std::size_t j = 0; j < span; ++j) b.set(i * span + j);
    }
    return ClopenTree(m, std::move(b));
  }

  /// Only the leaves above t.
  ClopenTree cone(const FinSeq& t) const {
    if (t.size() > depth_) throw PreconditionError("node longer than the tree depth");
    const std::size_t span = std::size_t{1} << (depth_ - t.size());
    const std::size_t lo = bits_index(t) * span;
    Bits b(leaves_.size());
    for (std::size_t i = lo; i < lo + span; ++i) b[i] = leaves_[i];
    return ClopenTree(depth_, std::move(b));
  }

  friend bool operator==(const ClopenTree& a, const ClopenTree& b) {
    return a.depth_ == b.depth_ && a.leaves_ == b.leaves_;
  }
  friend bool operator<(const ClopenTree& a, const ClopenTree& b) {
    if (a.depth_ != b.depth_) return a.depth_ < b.depth_;
    return a.leaves_ < b.leaves_;
  }

 private:
  std::size_t depth_ = 0;
  Bits leaves_;
};

/// Both trees described at the larger of their depths.
inline std::pair<ClopenTree, ClopenTree> co_refine(const ClopenTree& a, const ClopenTree& b) {
  const std::size_t m = std::max(a.depth(), b.depth());
  return {a.refined(m), b.refined(m)};
}

inline ClopenTree intersect(const ClopenTree& a, const ClopenTree& b) {
  auto [x, y] = co_refine(a, b);
  return ClopenTree(x.depth(), x.leaves() & y.leaves());
}

/// Measure of the branches of the tree through t; 0 when t is not in the tree.
inline DyadicRational mu_cone(const ClopenTree& tree, const FinSeq& t) {
  if (tree.depth() > 62) throw ResourceBound("depth above 62 has no int64 dyadic measure");
  return DyadicRational(static_cast<std::int64_t>(tree.count_above(t)), static_cast<unsigned>(tree.depth()));
}

struct P3Condition {
  std::size_t n = 0;
  ClopenTree tree;

  P3Condition() = default;
  P3Condition(std::size_t n_, ClopenTree t) : n(n_), tree(std::move(t)) {
    if (tree.depth() < n) throw InvalidCondition("tree depth below n");
    // Every level-n node of a nonempty clopen tree carries positive measure.
    if (tree.empty()) throw InvalidCondition("condition tree is empty");
  }

  friend bool operator==(const P3Condition& a, const P3Condition& b) {
    return a.n == b.n && a.tree == b.tree;
  }
  friend bool operator<(const P3Condition& a, const P3Condition& b) {
    if (a.n != b.n) return a.n < b.n;
    return a.tree < b.tree;
  }
};

/// c1 <= c2: n1 <= n2, W2 inside W1, and equal traces up to level n1.
inline bool p3_leq(const P3Condition& c1, const P3Condition& c2) {
  if (c1.n > c2.n) return false;
  auto [w1, w2] = co_refine(c1.tree, c2.tree);
  if (!w2.leaves().is_subset_of(w1.leaves())) return false;
  return w1.trace(c1.n) == w2.trace(c1.n);
}

struct CellIndex {
  std::size_t n = 0;
  std::size_t m = 0;
  ClopenTree w;  // depth m

  friend bool operator==(const CellIndex& a, const CellIndex& b) {
    return a.n == b.n && a.m == b.m && a.w == b.w;
  }
  friend bool operator<(const CellIndex& a, const CellIndex& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.m != b.m) return a.m < b.m;
    return a.w < b.w;
  }
};

/// mu(c_t) > W(t) / 2^{m+1} for every level-n node t of W, with the level-m
/// trace of c equal to W.
inline bool in_cell(const P3Condition& c, const CellIndex& cell) {
  if (c.n != cell.n || cell.w.depth() != cell.m || cell.n >= cell.m) return false;
  const ClopenTree t = c.tree.depth() >= cell.m ? c.tree : c.tree.refined(cell.m);
  if (!(ClopenTree(cell.m, t.trace(cell.m)) == cell.w)) return false;
  for (const auto& node : cell.w.nodes_at(cell.n)) {
    const DyadicRational half(static_cast<std::int64_t>(cell.w.count_above(node)),
                              static_cast<unsigned>(cell.m + 1));
    if (!(mu_cone(t, node) > half)) return false;
  }
  return true;
}

/// The cell of c at m = max(depth, n + 1).
inline CellIndex cell_of(const P3Condition& c) {
  const std::size_t m = std::max(c.tree.depth(), c.n + 1);
  return CellIndex{c.n, m, c.tree.refined(m)};
}

namespace detail {

inline P3Condition linked_witness_general(const P3Condition& c1, const P3Condition& c2, const CellIndex& cell) {
  if (!in_cell(c1, cell) || !in_cell(c2, cell)) throw CellMismatch("conditions are not both in the cell");
  const ClopenTree inter = intersect(c1.tree, c2.tree);
  for (const auto& t : cell.w.nodes_at(cell.n)) {
    const DyadicRational wt(static_cast<std::int64_t>(cell.w.count_above(t)), static_cast<unsigned>(cell.m));
    const DyadicRational lower = mu_cone(c1.tree, t) + mu_cone(c2.tree, t) - wt;
    const DyadicRational got = mu_cone(inter, t);
    if (got < lower || !(got > DyadicRational())) {
      throw Error("linked witness bound fails at <" + t.to_string() + ">");
    }
  }
  P3Condition out(cell.n, inter);
  if (!p3_leq(c1, out) || !p3_leq(c2, out)) throw Error("linked witness is not a common extension");
  return out;
}

// Trees of depth <= 6 fit one word: bit i is leaf i, and the cone of a
// level-k node j is the bit range [j * 2^(D-k), (j+1) * 2^(D-k)).
inline constexpr std::size_t kWordDepth = 6;

inline std::uint64_t span_mask(std::size_t len) { return len >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << len) - 1; }

inline std::uint64_t leaf_word(const ClopenTree& t, std::size_t D) {
  const std::uint64_t w = t.leaves().to_ulong();
  const std::size_t span = std::size_t{1} << (D - t.depth());
  if (span == 1) return w;
  std::uint64_t out = 0;
  for (std::uint64_t rest = w; rest; rest &= rest - 1)
    out |= span_mask(span) << (static_cast<std::size_t>(__builtin_ctzll(rest)) * span);
  return out;
}

inline int cone_count(std::uint64_t w, std::size_t D, std::size_t k, std::size_t j) {
  const std::size_t span = std::size_t{1} << (D - k);
  return __builtin_popcountll((w >> (j * span)) & span_mask(span));
}

inline std::uint64_t trace_word(std::uint64_t w, std::size_t D, std::size_t k) {
  std::uint64_t out = 0;
  for (std::size_t j = 0; j < (std::size_t{1} << k); ++j)
    if (cone_count(w, D, k, j)) out |= std::uint64_t{1} << j;
  return out;
}

inline bool in_cell_word(std::uint64_t w, std::uint64_t wm, std::size_t D, std::size_t n, std::size_t m) {
  if (trace_word(w, D, m) != wm) return false;
  for (std::size_t t = 0; t < (std::size_t{1} << n); ++t) {
    const int wt = cone_count(wm, m, n, t);
    // mu(c_t) > W(t) / 2^{m+1}, both sides scaled by 2^{D+m+1}
    if (wt && !((std::uint64_t(cone_count(w, D, n, t)) << (m + 1)) > (std::uint64_t(wt) << D))) return false;
  }
  return true;
}

inline P3Condition linked_witness_word(const P3Condition& c1, const P3Condition& c2, const CellIndex& cell) {
  const std::size_t n = cell.n, m = cell.m;
  if (c1.n != n || c2.n != n || cell.w.depth() != m || n >= m)
    throw CellMismatch("conditions are not both in the cell");
  const std::size_t D = std::max({c1.tree.depth(), c2.tree.depth(), m});
  const std::uint64_t w1 = leaf_word(c1.tree, D), w2 = leaf_word(c2.tree, D), wm = cell.w.leaves().to_ulong();
  if (!in_cell_word(w1, wm, D, n, m) || !in_cell_word(w2, wm, D, n, m))
    throw CellMismatch("conditions are not both in the cell");
  const std::uint64_t w12 = w1 & w2;
  for (std::size_t t = 0; t < (std::size_t{1} << n); ++t) {
    const std::int64_t wt = cone_count(wm, m, n, t);
    if (!wt) continue;
    const std::int64_t lower = cone_count(w1, D, n, t) + cone_count(w2, D, n, t) - (wt << (D - m));
    const std::int64_t got = cone_count(w12, D, n, t);
    if (got < lower || got <= 0) throw Error("linked witness bound fails at <" + bits_of(t, n).to_string() + ">");
  }
  if (trace_word(w12, D, n) != trace_word(w1, D, n) || trace_word(w12, D, n) != trace_word(w2, D, n))
    throw Error("linked witness is not a common extension");
  // Same description as intersect(): the larger of the two tree depths.
  const std::size_t d = std::max(c1.tree.depth(), c2.tree.depth());
  ClopenTree::Bits bits(std::size_t{1} << d);
  const std::size_t span = std::size_t{1} << (D - d);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (w12 >> (i * span)) & 1;
  return P3Condition(n, ClopenTree(d, std::move(bits)));
}

}  // namespace detail

/// The intersection of two members of one cell, certified to be a common
/// extension with mu((T1 ∩ T2)_t) >= mu1(t) + mu2(t) - W(t)/2^m > 0.
inline P3Condition linked_witness(const P3Condition& c1, const P3Condition& c2, const CellIndex& cell) {
  if (std::max({c1.tree.depth(), c2.tree.depth(), cell.m}) <= detail::kWordDepth)
    return detail::linked_witness_word(c1, c2, cell);
  return detail::linked_witness_general(c1, c2, cell);
}

inline P3Condition linked_witness(const P3Condition& c1, const P3Condition& c2) {
  const CellIndex cell = cell_of(c1);
  if (!in_cell(c2, cell)) throw CellMismatch("second condition is not in the cell of the first");
  return linked_witness(c1, c2, cell);
}

/// (t, n, cone of the condition above t) -> class.
using ConeClassifier = std::function<Nat(const FinSeq&, std::size_t, const ClopenTree&)>;

struct QCellKey {
  std::size_t n = 0;
  ClopenTree trace;           // W ∩ 2^{<=n} as a depth-n tree
  std::vector<Nat> sigma;     // classifier value per level-n node, in order

  friend bool operator<(const QCellKey& a, const QCellKey& b) {
    if (a.n != b.n) return a.n < b.n;
    if (!(a.trace == b.trace)) return a.trace < b.trace;
    return a.sigma < b.sigma;
  }
};

struct QCell {
  QCellKey key;
  std::vector<std::size_t> members;  // indices into the input list
};

/// Partitions conditions by (n, level-n trace, classifier values) and checks
/// each cell: every pair meets in positive measure on every level-n cone.
inline std::vector<QCell> q_cells(const std::vector<P3Condition>& Q, const ConeClassifier& classify) {
  std::map<QCellKey, std::vector<std::size_t>> cells;
  for (std::size_t j = 0; j < Q.size(); ++j) {
    const auto& c = Q[j];
    QCellKey key{c.n, ClopenTree(c.n, c.tree.trace(c.n)), {}};
    for (const auto& t : c.tree.nodes_at(c.n)) key.sigma.push_back(classify(t, c.n, c.tree.cone(t)));
    cells[key].push_back(j);
  }
  std::vector<QCell> out;
  for (auto& [key, members] : cells) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const ClopenTree inter = intersect(Q[members[a]].tree, Q[members[b]].tree);
        for (const auto& t : key.trace.nodes_at(key.n)) {
          if (inter.count_above(t) == 0) {
            throw ClassifierViolation("conditions " + std::to_string(members[a]) + " and " +
                                      std::to_string(members[b]) + " meet in measure 0 above <" +
                                      bits_string(t) + ">");
          }
        }
      }
    }
    out.push_back(QCell{key, members});
  }
  return out;
}

}  // namespace forcing_lab
