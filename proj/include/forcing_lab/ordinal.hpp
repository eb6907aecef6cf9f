#pragma once

// Ordinals below epsilon_0 in Cantor normal form, and the interval posets Q
// and Q* over them.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forcing_lab/errors.hpp"

namespace forcing_lab {

/// Sum of w^(e_i) * c_i with e_0 > e_1 > ... and every c_i > 0.
class OrdinalCNF {
 public:
  struct Term;

  OrdinalCNF() = default;
  static OrdinalCNF finite(std::uint64_t n);
  static OrdinalCNF omega_pow(const OrdinalCNF& e, std::uint64_t c = 1);
  static OrdinalCNF omega() { return omega_pow(finite(1)); }
  /// Checks strict descent and positive coefficients.
  static OrdinalCNF from_terms(std::vector<Term> terms);
  static OrdinalCNF parse(const std::string& text);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const;
  std::string to_string() const;

 private:
  std::vector<Term> terms_;
};

struct OrdinalCNF::Term {
  OrdinalCNF exp;
  std::uint64_t coef = 1;
};

inline std::strong_ordering ord_compare(const OrdinalCNF& a, const OrdinalCNF& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (auto c = ord_compare(x[i].exp, y[i].exp); c != 0) return c;
    if (auto c = x[i].coef <=> y[i].coef; c != 0) return c;
  }
  return x.size() <=> y.size();
}

inline bool operator==(const OrdinalCNF& a, const OrdinalCNF& b) { return ord_compare(a, b) == 0; }
inline std::strong_ordering operator<=>(const OrdinalCNF& a, const OrdinalCNF& b) { return ord_compare(a, b); }

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > UINT64_MAX - b) throw ResourceBound("ordinal coefficient overflow");
  return a + b;
}

inline OrdinalCNF OrdinalCNF::finite(std::uint64_t n) {
  OrdinalCNF o;
  if (n) o.terms_.push_back(Term{OrdinalCNF(), n});
  return o;
}

inline OrdinalCNF OrdinalCNF::omega_pow(const OrdinalCNF& e, std::uint64_t c) {
  OrdinalCNF o;
  if (c) o.terms_.push_back(Term{e, c});
  return o;
}

inline OrdinalCNF OrdinalCNF::from_terms(std::vector<Term> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coef == 0) throw InvalidCondition("zero coefficient in CNF");
    if (i && !(terms[i].exp < terms[i - 1].exp)) throw InvalidCondition("CNF exponents not strictly decreasing");
  }
  OrdinalCNF o;
  o.terms_ = std::move(terms);
  return o;
}

inline bool OrdinalCNF::is_finite() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exp.is_zero()); }

inline std::string OrdinalCNF::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    if (t.exp.is_zero()) {
      out += std::to_string(t.coef);
      continue;
    }
    out += "w^(" + t.exp.to_string() + ")";
    if (t.coef != 1) out += "*" + std::to_string(t.coef);
  }
  return out;
}

/// a + b: terms of a below the leading exponent of b are absorbed.
inline OrdinalCNF ord_add(const OrdinalCNF& a, const OrdinalCNF& b) {
  if (b.is_zero()) return a;
  const auto& lead = b.terms().front();
  std::vector<OrdinalCNF::Term> out;
  std::uint64_t carry = 0;
  for (const auto& t : a.terms()) {
    const auto c = ord_compare(t.exp, lead.exp);
    if (c > 0) out.push_back(t);
    else if (c == 0) carry = t.coef;
    else break;
  }
  out.push_back({lead.exp, checked_add(lead.coef, carry)});
  out.insert(out.end(), b.terms().begin() + 1, b.terms().end());
  return OrdinalCNF::from_terms(std::move(out));
}

/// The unique g with a + g = b.
inline OrdinalCNF ord_left_subtract(const OrdinalCNF& a, const OrdinalCNF& b) {
  if (a > b) throw SubtractUnderflow(a.to_string() + " > " + b.to_string());
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::size_t i = 0;
  while (i < x.size() && i < y.size() && x[i].exp == y[i].exp && x[i].coef == y[i].coef) ++i;
  if (i == y.size()) return OrdinalCNF();
  std::vector<OrdinalCNF::Term> out(y.begin() + static_cast<std::ptrdiff_t>(i), y.end());
  if (i < x.size() && x[i].exp == y[i].exp) out.front().coef -= x[i].coef;
  return OrdinalCNF::from_terms(std::move(out));
}

/// Hessenberg sum: coefficients of equal exponents add, nothing is absorbed.
inline OrdinalCNF natural_sum(const OrdinalCNF& a, const OrdinalCNF& b) {
  std::vector<OrdinalCNF::Term> out;
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].exp > y[j].exp)) out.push_back(x[i++]);
    else if (i == x.size() || y[j].exp > x[i].exp) out.push_back(y[j++]);
    else {
      out.push_back({x[i].exp, checked_add(x[i].coef, y[j].coef)});
      ++i, ++j;
    }
  }
  return OrdinalCNF::from_terms(std::move(out));
}

/// a = w^g for some g.
inline bool is_indecomposable(const OrdinalCNF& a) {
  if (a.is_zero()) throw PreconditionError("0 is not a positive ordinal");
  return a.terms().size() == 1 && a.terms()[0].coef == 1;
}

namespace detail {

class CnfParser {
 public:
  explicit CnfParser(const std::string& s) : s_(s) {}

  OrdinalCNF parse_all() {
    OrdinalCNF o = sum();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return o;
  }

 private:
  OrdinalCNF sum() {
    OrdinalCNF o = term();
    for (skip(); peek() == '+'; skip()) {
      ++pos_;
      o = ord_add(o, term());
    }
    return o;
  }

  OrdinalCNF term() {
    skip();
    if (std::isdigit(static_cast<unsigned char>(peek()))) return OrdinalCNF::finite(number());
    if (peek() != 'w') fail("expected a number or w");
    ++pos_;
    OrdinalCNF e = OrdinalCNF::finite(1);
    skip();
    if (peek() == '^') {
      ++pos_;
      e = atom();
    }
    std::uint64_t c = 1;
    skip();
    if (peek() == '*') {
      ++pos_;
      skip();
      c = number();
    }
    return OrdinalCNF::omega_pow(e, c);
  }

  OrdinalCNF atom() {
    skip();
    if (peek() == '(') {
      ++pos_;
      OrdinalCNF o = sum();
      skip();
      if (peek() != ')') fail("expected )");
      ++pos_;
      return o;
    }
    if (peek() == 'w') {
      ++pos_;
      return OrdinalCNF::omega();
    }
    return OrdinalCNF::finite(number());
  }

  std::uint64_t number() {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a number");
    std::uint64_t v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      const std::uint64_t d = static_cast<std::uint64_t>(s_[pos_++] - '0');
      if (v > (UINT64_MAX - d) / 10) fail("number too large");
      v = v * 10 + d;
    }
    return v;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(why + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline OrdinalCNF OrdinalCNF::parse(const std::string& text) { return detail::CnfParser(text).parse_all(); }

/// [lo, hi)
struct OrdRange {
  OrdinalCNF lo, hi;

  OrdRange() = default;
  OrdRange(OrdinalCNF l, OrdinalCNF h) : lo(std::move(l)), hi(std::move(h)) {
    if (!(lo < hi)) throw InvalidCondition("empty range [" + lo.to_string() + ", " + hi.to_string() + ")");
  }

  friend bool operator==(const OrdRange&, const OrdRange&) = default;
  friend bool operator<(const OrdRange& a, const OrdRange& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi < b.hi;
  }
};

/// Order type of a union of pairwise disjoint ranges.
inline OrdinalCNF range_order_type(std::vector<OrdRange> ranges) {
  std::sort(ranges.begin(), ranges.end());
  OrdinalCNF total;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (i && ranges[i].lo < ranges[i - 1].hi)
      throw OverlappingRanges("[" + ranges[i - 1].lo.to_string() + ", " + ranges[i - 1].hi.to_string() +
                              ") meets [" + ranges[i].lo.to_string() + ", " + ranges[i].hi.to_string() + ")");
    total = ord_add(total, ord_left_subtract(ranges[i].lo, ranges[i].hi));
  }
  return total;
}

using OrdPair = std::pair<OrdinalCNF, OrdinalCNF>;

inline bool pairs_separated(const OrdPair& p, const OrdPair& q) {
  return p == q || p.second < q.first || q.second < p.first;
}

struct IntervalCondition {
  std::set<OrdPair> pairs;

  IntervalCondition() = default;
  explicit IntervalCondition(std::set<OrdPair> ps) : pairs(std::move(ps)) {
    for (const auto& p : pairs)
      if (p.first > p.second) throw InvalidCondition("pair with alpha > beta");
    for (auto a = pairs.begin(); a != pairs.end(); ++a)
      for (auto b = std::next(a); b != pairs.end(); ++b)
        if (!pairs_separated(*a, *b))
          throw InvalidCondition("pairs (" + a->first.to_string() + ", " + a->second.to_string() + ") and (" +
                                 b->first.to_string() + ", " + b->second.to_string() + ") overlap");
  }

  friend bool operator==(const IntervalCondition&, const IntervalCondition&) = default;
};

inline bool q_leq(const IntervalCondition& a, const IntervalCondition& b) {
  return std::includes(b.pairs.begin(), b.pairs.end(), a.pairs.begin(), a.pairs.end());
}

inline bool q_compatible(const IntervalCondition& a, const IntervalCondition& b) {
  for (const auto& p : a.pairs)
    for (const auto& q : b.pairs)
      if (!pairs_separated(p, q)) return false;
  return true;
}

/// Finitely many pairs alpha < beta (the heart) and singleton pairs described
/// by disjoint ranges.
struct QStarCondition {
  std::set<OrdPair> heart;
  std::vector<OrdRange> singles;  // sorted

  QStarCondition() = default;
  QStarCondition(std::set<OrdPair> h, std::vector<OrdRange> s) : heart(std::move(h)), singles(std::move(s)) {
    for (const auto& p : heart)
      if (!(p.first < p.second)) throw InvalidCondition("heart pair needs alpha < beta");
    std::sort(singles.begin(), singles.end());
  }

  friend bool operator==(const QStarCondition&, const QStarCondition&) = default;
};

inline const std::set<OrdPair>& heart(const QStarCondition& w) { return w.heart; }

struct QStarCheck {
  bool ok = true;
  std::string reason;
};

/// Order type of the first coordinates: the ranges plus one point per heart pair.
inline OrdinalCNF qstar_order_type(const QStarCondition& w) {
  std::vector<OrdRange> parts = w.singles;
  for (const auto& p : w.heart) parts.emplace_back(p.first, ord_add(p.first, OrdinalCNF::finite(1)));
  return range_order_type(std::move(parts));
}

namespace detail {

inline std::string pair_text(const OrdPair& p) {
  return "(" + p.first.to_string() + ", " + p.second.to_string() + ")";
}
inline std::string range_text(const OrdRange& r) {
  return "[" + r.lo.to_string() + ", " + r.hi.to_string() + ")";
}

inline QStarCheck qstar_separation(const QStarCondition& w) {
  for (auto a = w.heart.begin(); a != w.heart.end(); ++a)
    for (auto b = std::next(a); b != w.heart.end(); ++b)
      if (!pairs_separated(*a, *b)) return {false, "heart pairs " + pair_text(*a) + " and " + pair_text(*b) + " overlap"};
  for (std::size_t i = 1; i < w.singles.size(); ++i)
    if (w.singles[i].lo < w.singles[i - 1].hi)
      return {false, "ranges " + range_text(w.singles[i - 1]) + " and " + range_text(w.singles[i]) + " overlap"};
  for (const auto& p : w.heart)
    for (const auto& r : w.singles)
      if (!(r.hi <= p.first || p.second < r.lo))
        return {false, "heart pair " + pair_text(p) + " meets range " + range_text(r)};
  return {};
}

inline void require_indecomposable(const OrdinalCNF& delta) {
  if (delta.is_zero() || !is_indecomposable(delta)) throw NotIndecomposable(delta.to_string());
}

}  // namespace detail

inline QStarCheck qstar_check(const QStarCondition& w, const OrdinalCNF& delta) {
  detail::require_indecomposable(delta);
  if (auto sep = detail::qstar_separation(w); !sep.ok) return sep;
  const OrdinalCNF ot = qstar_order_type(w);
  if (!(ot < delta)) return {false, "order type " + ot.to_string() + " is not below " + delta.to_string()};
  return {};
}

/// Heart union plus the singles merged into maximal disjoint ranges.
inline QStarCondition qstar_union(const QStarCondition& a, const QStarCondition& b) {
  std::set<OrdPair> h = a.heart;
  h.insert(b.heart.begin(), b.heart.end());
  std::vector<OrdRange> all = a.singles;
  all.insert(all.end(), b.singles.begin(), b.singles.end());
  std::sort(all.begin(), all.end());
  std::vector<OrdRange> merged;
  for (const auto& r : all) {
    if (!merged.empty() && r.lo <= merged.back().hi) {
      if (merged.back().hi < r.hi) merged.back().hi = r.hi;
    } else {
      merged.push_back(r);
    }
  }
  return QStarCondition(std::move(h), std::move(merged));
}

struct QStarDecision {
  bool compatible = false;
  bool fast_path = false;
};

/// Separation is checked on the union. The order-type clause is accepted at
/// once when the natural sum of the two order types stays below delta (it
/// bounds the order type of the union); otherwise the merge decides.
inline QStarDecision qstar_decide(const QStarCondition& a, const QStarCondition& b, const OrdinalCNF& delta) {
  if (!qstar_check(a, delta).ok || !qstar_check(b, delta).ok)
    throw PreconditionError("qstar_compatible needs two valid conditions");
  const QStarCondition u = qstar_union(a, b);
  if (!detail::qstar_separation(u).ok) return {false, false};
  if (natural_sum(qstar_order_type(a), qstar_order_type(b)) < delta) return {true, true};
  return {qstar_order_type(u) < delta, false};
}

inline bool qstar_compatible(const QStarCondition& a, const QStarCondition& b, const OrdinalCNF& delta) {
  return qstar_decide(a, b, delta).compatible;
}

/// The decision without the fast path.
inline bool qstar_compatible_exact(const QStarCondition& a, const QStarCondition& b, const OrdinalCNF& delta) {
  if (!qstar_check(a, delta).ok || !qstar_check(b, delta).ok)
    throw PreconditionError("qstar_compatible needs two valid conditions");
  return qstar_check(qstar_union(a, b), delta).ok;
}

}  // namespace forcing_lab
