#pragma once

// The Gamma-coded poset P1, its Knaster-failure witness family, the
// real-coded wrapper (p, w), and the poset P1* of converging sequences.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/rational.hpp"
#include "forcing_lab/seq.hpp"
#include "forcing_lab/sigma_family.hpp"

namespace forcing_lab {

/// A member of Gamma at desk scale: the ordered set A_x as a finite list of
/// distinct reals; its last element plays pi_2(x).
class GammaElem {
 public:
  GammaElem() = default;
  explicit GammaElem(std::vector<EvConstSeq> chain) : chain_(std::move(chain)) {
    if (chain_.empty()) throw InvalidCondition("Gamma element needs a nonempty chain");
    std::set<EvConstSeq> seen(chain_.begin(), chain_.end());
    if (seen.size() != chain_.size()) throw InvalidCondition("Gamma chain repeats a real");
  }

  const std::vector<EvConstSeq>& chain() const { return chain_; }
  const EvConstSeq& last() const { return chain_.back(); }

  auto operator<=>(const GammaElem&) const = default;
  bool operator==(const GammaElem&) const = default;

 private:
  std::vector<EvConstSeq> chain_;
};

/// x <_Gamma y: chain(x) is a proper initial segment of chain(y).
inline bool gamma_lt(const GammaElem& x, const GammaElem& y) {
  const auto& a = x.chain();
  const auto& b = y.chain();
  return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
}

inline bool gamma_equiv(const GammaElem& x, const GammaElem& y) { return x.chain() == y.chain(); }

/// Default index bound for F-membership when the two reals coincide.
inline constexpr std::size_t kDefaultMembershipBound = 64;

struct P1Condition {
  std::set<GammaElem> elems;
  std::size_t precision = 1;

  bool operator==(const P1Condition&) const = default;
  auto operator<=>(const P1Condition&) const = default;
};

struct P1Check {
  enum class Status { Ok, Violation, Indeterminate };
  enum class Reason { None, PrefixClash, FLink, Unknown };
  Status status = Status::Ok;
  Reason reason = Reason::None;
  std::optional<std::pair<GammaElem, GammaElem>> pair;

  bool ok() const { return status == Status::Ok; }
};

/// Certifies the P1 invariants: last elements pairwise distinct at the given
/// precision, and pi_2(x) not in F(pi_2(y)) whenever x <_Gamma y. A
/// membership that cannot be decided fails certification as Indeterminate.
inline P1Check p1_check(const SigmaFamily& fam, const std::set<GammaElem>& elems,
                        std::size_t precision, std::size_t i_max = kDefaultMembershipBound) {
  if (precision == 0) throw PreconditionError("precision must be >= 1");
  const std::vector<GammaElem> v(elems.begin(), elems.end());
  for (std::size_t a = 0; a < v.size(); ++a) {
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      if (v[a].last().restrict(precision) == v[b].last().restrict(precision)) {
        return {P1Check::Status::Violation, P1Check::Reason::PrefixClash, std::make_pair(v[a], v[b])};
      }
    }
  }
  std::optional<P1Check> undecided;
  for (const auto& x : v) {
    for (const auto& y : v) {
      if (!gamma_lt(x, y)) continue;
      const auto m = f_membership(fam, x.last(), y.last(), i_max);
      if (m.kind == Membership::Kind::Yes) {
        return {P1Check::Status::Violation, P1Check::Reason::FLink, std::make_pair(x, y)};
      }
      if (m.kind == Membership::Kind::Unknown && !undecided) {
        undecided = P1Check{P1Check::Status::Indeterminate, P1Check::Reason::Unknown,
                            std::make_pair(x, y)};
      }
    }
  }
  if (undecided) return *undecided;
  return {};
}

inline P1Check p1_check(const SigmaFamily& fam, const P1Condition& p,
                        std::size_t i_max = kDefaultMembershipBound) {
  return p1_check(fam, p.elems, p.precision, i_max);
}

inline std::set<GammaElem> union_of(const std::set<GammaElem>& a, const std::set<GammaElem>& b) {
  std::set<GammaElem> out = a;
  out.insert(b.begin(), b.end());
  return out;
}

/// Compatibility in P1 (ordered by inclusion): the union is a condition.
inline P1Check p1_compatibility(const SigmaFamily& fam, const P1Condition& p, const P1Condition& q,
                                std::size_t i_max = kDefaultMembershipBound) {
  if (p.precision != q.precision) throw PreconditionError("conditions carry different precisions");
  return p1_check(fam, union_of(p.elems, q.elems), p.precision, i_max);
}

inline bool p1_compatible(const SigmaFamily& fam, const P1Condition& p, const P1Condition& q,
                          std::size_t i_max = kDefaultMembershipBound) {
  return p1_compatibility(fam, p, q, i_max).ok();
}

/// Least precision at which the given reals are pairwise distinct.
inline std::size_t separating_precision(const std::vector<EvConstSeq>& xs) {
  std::size_t m = 1;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = a + 1; b < xs.size(); ++b) {
      if (auto d = first_disagreement(xs[a], xs[b])) m = std::max(m, *d + 1);
    }
  }
  return m;
}

/// Singletons p_alpha = {y_alpha} with chain(y_alpha) = <x_0, ..., x_alpha>.
/// For alpha < beta, p_alpha and p_beta are compatible iff x_alpha is not in
/// F(x_beta).
inline std::vector<P1Condition> knaster_witness_family(const std::vector<EvConstSeq>& xs) {
  std::set<EvConstSeq> seen;
  for (const auto& x : xs) {
    if (!seen.insert(x).second) throw DuplicateReal("real " + x.to_string() + " repeats");
  }
  const std::size_t precision = separating_precision(xs);
  std::vector<P1Condition> out;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    std::vector<EvConstSeq> chain(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(a + 1));
    out.push_back(P1Condition{{GammaElem(std::move(chain))}, precision});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Real-coded wrapper.

/// Injective code of a Gamma element as a real: chain length, then for each
/// member its prefix length, prefix values and tail value; tail 0.
inline EvConstSeq gamma_code(const GammaElem& x) {
  std::vector<Nat> out{x.chain().size()};
  for (const auto& r : x.chain()) {
    out.push_back(r.prefix().size());
    for (auto v : r.prefix().items()) out.push_back(v);
    out.push_back(r.tail());
  }
  return EvConstSeq(FinSeq(std::move(out)), 0);
}

struct RCCondition {
  P1Condition p;
  std::set<FinSeq> w;

  bool operator==(const RCCondition&) const = default;
  auto operator<=>(const RCCondition&) const = default;
};

/// (p1, w1) <= (p2, w2): p1 within p2, w1 within w2, and no prefix of the code
/// of any x in p1 lies in w2 \ w1.
inline bool rc_leq(const RCCondition& q1, const RCCondition& q2) {
  if (!std::includes(q2.p.elems.begin(), q2.p.elems.end(), q1.p.elems.begin(), q1.p.elems.end())) {
    return false;
  }
  if (!std::includes(q2.w.begin(), q2.w.end(), q1.w.begin(), q1.w.end())) return false;
  for (const auto& x : q1.p.elems) {
    const EvConstSeq code = gamma_code(x);
    for (const auto& s : q2.w) {
      if (q1.w.count(s)) continue;
      if (code.restrict(s.size()) == s) return false;
    }
  }
  return true;
}

/// Pool members (p, w) with w within r and, for every x in p and every prefix
/// length occurring in r, code(x)|n in r iff code(x)|n in w.
inline std::vector<RCCondition> rc_decode(const std::set<FinSeq>& r,
                                          const std::vector<RCCondition>& pool) {
  std::vector<RCCondition> out;
  for (const auto& q : pool) {
    if (!std::includes(r.begin(), r.end(), q.w.begin(), q.w.end())) continue;
    bool ok = true;
    for (const auto& x : q.p.elems) {
      const EvConstSeq code = gamma_code(x);
      for (const auto& s : r) {
        const bool in_r = code.restrict(s.size()) == s;
        if (in_r && !q.w.count(s)) { ok = false; break; }
      }
      if (!ok) break;
    }
    if (ok) out.push_back(q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// P1*: finite sets of converging sequences with lim s not in t.

class ConvSeq {
 public:
  ConvSeq() = default;
  ConvSeq(std::vector<ExactRational> terms, ExactRational limit) : limit_(std::move(limit)) {
    std::sort(terms.begin(), terms.end());
    if (std::adjacent_find(terms.begin(), terms.end()) != terms.end()) {
      throw InvalidCondition("sequence terms repeat");
    }
    if (terms.empty()) throw InvalidCondition("sequence needs at least one term");
    if (std::binary_search(terms.begin(), terms.end(), limit_)) {
      throw InvalidCondition("limit belongs to the sequence");
    }
    terms_ = std::move(terms);
  }

  const std::vector<ExactRational>& terms() const { return terms_; }
  const ExactRational& limit() const { return limit_; }
  bool contains(const ExactRational& v) const {
    return std::binary_search(terms_.begin(), terms_.end(), v);
  }

  ConvSeq translated(const ExactRational& d) const {
    std::vector<ExactRational> t;
    for (const auto& v : terms_) t.push_back(v + d);
    return ConvSeq(std::move(t), limit_ + d);
  }

  bool operator==(const ConvSeq& o) const { return terms_ == o.terms_ && limit_ == o.limit_; }
  bool operator<(const ConvSeq& o) const {
    if (limit_ != o.limit_) return limit_ < o.limit_;
    return terms_ < o.terms_;
  }

 private:
  std::vector<ExactRational> terms_;
  ExactRational limit_;
};

using P1StarCondition = std::set<ConvSeq>;

inline bool p1star_check(const P1StarCondition& p) {
  for (const auto& s : p) {
    for (const auto& t : p) {
      if (!(s == t) && t.contains(s.limit())) return false;
    }
  }
  return true;
}

inline P1StarCondition translate(const P1StarCondition& p, const ExactRational& d) {
  P1StarCondition out;
  for (const auto& s : p) out.insert(s.translated(d));
  return out;
}

/// The fixed enumeration of the rationals: 0, 1, -1, 2, -2, 1/2, -1/2, 3, ...
/// ordered by height |p| + q, then by increasing denominator.
class RationalEnumeration {
 public:
  ExactRational next() {
    if (first_) {
      first_ = false;
      return ExactRational(0);
    }
    while (true) {
      if (negative_pending_) {
        negative_pending_ = false;
        return ExactRational(-static_cast<long long>(height_ - den_), static_cast<long long>(den_));
      }
      ++den_;
      if (den_ >= height_) {
        ++height_;
        den_ = 1;
      }
      const auto num = height_ - den_;
      if (std::gcd(num, den_) == 1) {
        negative_pending_ = true;
        return ExactRational(static_cast<long long>(num), static_cast<long long>(den_));
      }
    }
  }

 private:
  bool first_ = true;
  bool negative_pending_ = false;
  unsigned long long height_ = 1;
  unsigned long long den_ = 0;
};

/// Least rational d (in RationalEnumeration order) with -d outside
/// {a - b : a in s or lim s, b in r or lim r, s in p1, r in p2}; the
/// translate of p1 by d is then compatible with p2.
inline ExactRational find_translation(const P1StarCondition& p1, const P1StarCondition& p2) {
  std::set<ExactRational> forbidden;
  for (const auto& s : p1) {
    std::vector<ExactRational> as(s.terms());
    as.push_back(s.limit());
    for (const auto& r : p2) {
      std::vector<ExactRational> bs(r.terms());
      bs.push_back(r.limit());
      for (const auto& a : as) {
        for (const auto& b : bs) forbidden.insert(a - b);
      }
    }
  }
  RationalEnumeration en;
  while (true) {
    ExactRational d = en.next();
    if (!forbidden.count(-d)) return d;
  }
}

}  // namespace forcing_lab
