#pragma once

// One front end over every poset: seeded generation, checking, pairwise
// compatibility with replayable witnesses, compatibility graphs, antichain
// search and cell decompositions. Conditions travel as JSON.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "forcing_lab/serialize.hpp"

namespace forcing_lab {

enum class PosetKind { Knaster, P1, P1Star, Qeta, P2, P3, P4, Hechler, QInt, QStar, Homog0, Homog1 };

inline const std::vector<std::pair<PosetKind, std::string>>& kind_names() {
  static const std::vector<std::pair<PosetKind, std::string>> names{
      {PosetKind::Knaster, "knaster"}, {PosetKind::P1, "p1"},         {PosetKind::P1Star, "p1star"},
      {PosetKind::Qeta, "qeta"},       {PosetKind::P2, "p2"},         {PosetKind::P3, "p3"},
      {PosetKind::P4, "p4"},           {PosetKind::Hechler, "hechler"}, {PosetKind::QInt, "qint"},
      {PosetKind::QStar, "qstar"},     {PosetKind::Homog0, "homog0"}, {PosetKind::Homog1, "homog1"}};
  return names;
}

inline std::string to_string(PosetKind k) {
  for (const auto& [kind, name] : kind_names())
    if (kind == k) return name;
  throw Error("unnamed poset kind");
}

inline PosetKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kind_names())
    if (name == s) return kind;
  throw BadParams("unknown poset kind '" + s + "'");
}

// Fixed thresholds, echoed by the CLI help.
inline constexpr std::uint64_t kFamilySteps = 16;          // schedule entries built into the base family
inline constexpr std::size_t kExhaustiveAntichainLimit = 20;
inline constexpr std::size_t kGenAttempts = 64;            // rejection-sampling tries per condition
inline constexpr std::size_t kGenericMaxSteps = 64;

struct PosetParams {
  std::uint64_t seed = 0;
  std::size_t precision = 2;
  std::size_t depth = 2;
  std::string delta = "w^2";
  ParamMode mode = ParamMode::Toy;
  std::size_t search_bound = 0;
};

struct PosetHandle {
  PosetKind kind = PosetKind::P4;
  PosetParams params;
};

inline void to_json(json& j, const PosetParams& p) {
  j = json{{"seed", p.seed},   {"precision", p.precision},   {"depth", p.depth},
           {"delta", p.delta}, {"mode", to_string(p.mode)}, {"search_bound", p.search_bound}};
}
inline void from_json(const json& j, PosetParams& p) {
  PosetParams d;
  p.seed = j.value("seed", d.seed);
  p.precision = j.value("precision", d.precision);
  p.depth = j.value("depth", d.depth);
  p.delta = j.value("delta", d.delta);
  p.mode = parse_mode(j.value("mode", to_string(d.mode)));
  p.search_bound = j.value("search_bound", d.search_bound);
}

struct CheckResult {
  bool ok = true;
  std::string reason;
};

enum class Compat { Compatible, Incompatible, Undecided };

inline std::string to_string(Compat c) {
  switch (c) {
    case Compat::Compatible: return "compatible";
    case Compat::Incompatible: return "incompatible";
    case Compat::Undecided: return "undecided";
  }
  return "?";
}

struct CompatResult {
  Compat status = Compat::Incompatible;
  json witness;  // null unless compatible
  std::string note;
};

struct Cell {
  json key;
  std::vector<std::size_t> members;
  json bound;  // common extension of all members, when the cell is centered
};

namespace detail {

inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

inline bool includes_all(const std::set<GammaElem>& big, const std::set<GammaElem>& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

inline std::vector<OrdinalCNF> ordinal_pool() {
  std::vector<OrdinalCNF> out;
  for (const char* s : {"0", "1", "2", "3", "w", "w+1", "w+2", "w*2", "w*2+1", "w^2", "w^2+1", "w^2*2"})
    out.push_back(OrdinalCNF::parse(s));
  return out;
}

}  // namespace detail

class Poset {
 public:
  explicit Poset(PosetHandle h) : h_(std::move(h)) {
    const auto& p = h_.params;
    switch (h_.kind) {
      case PosetKind::Knaster:
      case PosetKind::P1: {
        if (h_.kind == PosetKind::Knaster && p.depth > 6) throw BadParams("knaster depth above 6");
        if (h_.kind == PosetKind::P1 && (p.precision == 0 || p.precision > 8))
          throw BadParams("p1 precision must lie in 1..8");
        SigmaFamily fam(ScheduleConfig{3, 3, p.seed});
        fam.extend(kFamilySteps);
        fam_ = std::move(fam);
        break;
      }
      case PosetKind::Qeta:
      case PosetKind::P2:
        if (p.depth == 0) throw BadParams("tree depth must be >= 1");
        try {
          tree_ = build_params(p.depth, p.mode);
        } catch (const ResourceBound& e) {
          throw BadParams(std::string("parameters too large: ") + e.what());
        }
        break;
      case PosetKind::P3:
        if (p.depth == 0 || p.depth > 10) throw BadParams("p3 depth must lie in 1..10");
        break;
      case PosetKind::P4:
      case PosetKind::Hechler:
        if (p.depth > 16) throw BadParams("depth above 16");
        break;
      case PosetKind::QStar:
        try {
          delta_ = OrdinalCNF::parse(p.delta);
          detail::require_indecomposable(delta_);
        } catch (const Error& e) {
          throw BadParams(std::string("bad delta: ") + e.what());
        }
        break;
      case PosetKind::Homog0:
      case PosetKind::Homog1:
        bits_ = BitSource(p.seed);
        break;
      case PosetKind::QInt:
      case PosetKind::P1Star:
        break;
    }
  }

  const PosetHandle& handle() const { return h_; }
  PosetKind kind() const { return h_.kind; }
  const SigmaFamily& family() const { return *fam_; }

  // -------------------------------------------------------------------------
  // Generation.

  std::vector<json> generate(std::size_t count) const {
    std::mt19937_64 rng(detail::splitmix64(h_.params.seed ^ 0x9e3779b97f4a7c15ULL));
    std::vector<json> out;
    if (h_.kind == PosetKind::Knaster) {
      // Shared base entries so that generated pairs often agree on common indices.
      std::vector<FinSeq> base;
      for (Nat idx = 0; idx < 6; ++idx) base.push_back(random_seq(rng, h_.params.depth));
      for (std::size_t c = 0; c < count; ++c) out.push_back(gen_knaster(rng, base));
      return out;
    }
    for (std::size_t c = 0; c < count; ++c) out.push_back(gen_one(rng));
    return out;
  }

  // -------------------------------------------------------------------------
  // Checking.

  CheckResult check(const json& c) const {
    try {
      switch (h_.kind) {
        case PosetKind::Knaster: (void)c.get<QCondition>(); return {};
        case PosetKind::P1: {
          const auto r = p1_check(*fam_, c.get<P1Condition>());
          if (r.status == P1Check::Status::Ok) return {};
          return {false, r.status == P1Check::Status::Indeterminate ? "membership undecided"
                         : r.reason == P1Check::Reason::PrefixClash ? "last elements clash at the precision"
                                                                     : "F-link between comparable elements"};
        }
        case PosetKind::P1Star:
          return p1star_check(c.get<P1StarCondition>()) ? CheckResult{} : CheckResult{false, "a limit lies in another sequence"};
        case PosetKind::Qeta: {
          const auto r = qeta_check(*tree_, c.get<FiniteNormTree>());
          return {r.ok, r.ok ? "" : r.reason + " at <" + r.node->to_string() + ">"};
        }
        case PosetKind::P2: {
          const auto r = p2_check(*tree_, c.get<P2Approx>());
          return {r.ok, r.reason};
        }
        case PosetKind::P3: (void)c.get<P3Condition>(); return {};
        case PosetKind::P4: (void)c.get<P4Condition>(); return {};
        case PosetKind::Hechler: (void)c.get<HechlerCondition>(); return {};
        case PosetKind::QInt: (void)c.get<IntervalCondition>(); return {};
        case PosetKind::QStar: {
          const auto r = qstar_check(c.get<QStarCondition>(), delta_);
          return {r.ok, r.reason};
        }
        case PosetKind::Homog0:
        case PosetKind::Homog1: {
          const auto p = c.get<P6Condition>();
          if (p.color != color()) return {false, "wrong color"};
          return p6_check(*bits_, p) ? CheckResult{} : CheckResult{false, "not homogeneous"};
        }
      }
    } catch (const Error& e) {
      return {false, e.what()};
    } catch (const json::exception& e) {
      return {false, std::string("malformed: ") + e.what()};
    }
    return {false, "unknown kind"};
  }

  // -------------------------------------------------------------------------
  // Order: a <= b means b is stronger. `family` overrides the base family.

  bool leq(const json& a, const json& b, const SigmaFamily* family = nullptr) const {
    switch (h_.kind) {
      case PosetKind::Knaster: return q_leq(family ? *family : *fam_, a.get<QCondition>(), b.get<QCondition>());
      case PosetKind::P1: {
        const auto x = a.get<P1Condition>(), y = b.get<P1Condition>();
        return x.precision == y.precision && detail::includes_all(y.elems, x.elems);
      }
      case PosetKind::P1Star: {
        const auto x = a.get<P1StarCondition>(), y = b.get<P1StarCondition>();
        return std::includes(y.begin(), y.end(), x.begin(), x.end());
      }
      case PosetKind::Qeta: return qeta_leq(a.get<FiniteNormTree>(), b.get<FiniteNormTree>());
      case PosetKind::P2: return p2_leq(a.get<P2Approx>(), b.get<P2Approx>());
      case PosetKind::P3: return p3_leq(a.get<P3Condition>(), b.get<P3Condition>());
      case PosetKind::P4: return p4_leq(a.get<P4Condition>(), b.get<P4Condition>());
      case PosetKind::Hechler: return hechler_leq(a.get<HechlerCondition>(), b.get<HechlerCondition>());
      case PosetKind::QInt: return q_leq(a.get<IntervalCondition>(), b.get<IntervalCondition>());
      case PosetKind::QStar: return qstar_leq(a.get<QStarCondition>(), b.get<QStarCondition>());
      case PosetKind::Homog0:
      case PosetKind::Homog1: return p6_leq(a.get<P6Condition>(), b.get<P6Condition>());
    }
    return false;
  }

  // -------------------------------------------------------------------------
  // Compatibility.

  CompatResult compat(const json& a, const json& b) const {
    switch (h_.kind) {
      case PosetKind::Knaster: return compat_knaster(a.get<QCondition>(), b.get<QCondition>());
      case PosetKind::P1: {
        const auto x = a.get<P1Condition>(), y = b.get<P1Condition>();
        if (x.precision != y.precision) throw PreconditionError("conditions carry different precisions");
        const auto r = p1_compatibility(*fam_, x, y);
        if (r.status == P1Check::Status::Indeterminate) return {Compat::Undecided, nullptr, "membership undecided"};
        if (r.status == P1Check::Status::Violation) return {Compat::Incompatible, nullptr, ""};
        return {Compat::Compatible, json(P1Condition{union_of(x.elems, y.elems), x.precision}), ""};
      }
      case PosetKind::P1Star: {
        auto u = a.get<P1StarCondition>();
        const auto y = b.get<P1StarCondition>();
        u.insert(y.begin(), y.end());
        return exact(p1star_check(u), u);
      }
      case PosetKind::Qeta: {
        auto x = a.get<FiniteNormTree>(), y = b.get<FiniteNormTree>();
        if (x.height() > y.height()) std::swap(x, y);
        if (x.root() != y.root()) return {Compat::Incompatible, nullptr, "roots differ"};
        return exact(y.truncated(x.height()) == x, y);
      }
      case PosetKind::P2: {
        auto x = a.get<P2Approx>(), y = b.get<P2Approx>();
        if (!x.tree || !y.tree) return {Compat::Incompatible, nullptr, "no root"};
        if (x.tree->height() > y.tree->height()) std::swap(x, y);
        if (x.tree->root() != y.tree->root() || !(y.tree->truncated(x.tree->height()) == *x.tree))
          return {Compat::Incompatible, nullptr, "trees disagree"};
        P2Approx w = y;
        for (const auto& [lvl, v] : x.schedule) w.schedule[lvl] = std::max(w.schedule[lvl], v);
        w.tail_growth = std::max(x.tail_growth, y.tail_growth);
        return exact(p2_check(*tree_, w).ok, w);
      }
      case PosetKind::P3: {
        const auto x = a.get<P3Condition>(), y = b.get<P3Condition>();
        const ClopenTree inter = intersect(x.tree, y.tree);
        if (inter.empty()) return {Compat::Incompatible, nullptr, "disjoint"};
        const P3Condition w(std::max(x.n, y.n), inter);
        return exact(p3_leq(x, w) && p3_leq(y, w), w);
      }
      case PosetKind::P4: {
        const auto x = a.get<P4Condition>(), y = b.get<P4Condition>();
        std::set<Branch> all = x.F;
        all.insert(y.F.begin(), y.F.end());
        std::size_t m = std::max(x.n, y.n);
        for (auto i = all.begin(); i != all.end(); ++i)
          for (auto j = std::next(i); j != all.end(); ++j) m = std::max(m, h_split(*i, *j) + 1);
        const P4Condition w(m, std::move(all));
        return exact(p4_leq(x, w) && p4_leq(y, w), w);
      }
      case PosetKind::Hechler: {
        auto x = a.get<HechlerCondition>(), y = b.get<HechlerCondition>();
        if (x.n > y.n) std::swap(x, y);
        // y fixes its stem, so x must agree below x.n and stay below y on [x.n, y.n).
        for (Nat k = 0; k < y.n; ++k) {
          if (k < x.n ? x.at(k) != y.at(k) : x.at(k) > y.at(k)) return {Compat::Incompatible, nullptr, ""};
        }
        std::map<Nat, Nat> g = y.f;
        for (auto [k, v] : x.f)
          if (k >= y.n) g[k] = std::max(g[k], v);
        return {Compat::Compatible, json(HechlerCondition(y.n, std::move(g))), ""};
      }
      case PosetKind::QInt: {
        const auto x = a.get<IntervalCondition>(), y = b.get<IntervalCondition>();
        if (!q_compatible(x, y)) return {Compat::Incompatible, nullptr, ""};
        std::set<OrdPair> u = x.pairs;
        u.insert(y.pairs.begin(), y.pairs.end());
        return {Compat::Compatible, json(IntervalCondition(std::move(u))), ""};
      }
      case PosetKind::QStar: {
        const auto x = a.get<QStarCondition>(), y = b.get<QStarCondition>();
        const auto d = qstar_decide(x, y, delta_);
        if (!d.compatible) return {Compat::Incompatible, nullptr, ""};
        return {Compat::Compatible, json(qstar_union(x, y)), d.fast_path ? "fast path" : "merged"};
      }
      case PosetKind::Homog0:
      case PosetKind::Homog1: {
        auto x = a.get<P6Condition>();
        const auto y = b.get<P6Condition>();
        if (!homog_compatible(*bits_, x.H, y.H, color())) return {Compat::Incompatible, nullptr, ""};
        x.H.insert(y.H.begin(), y.H.end());
        return {Compat::Compatible, json(x), ""};
      }
    }
    return {};
  }

  /// Nullopt when the witness is a valid condition above both a and b.
  std::optional<std::string> replay(const json& a, const json& b, const json& witness) const {
    try {
      if (h_.kind == PosetKind::Knaster) {
        const SigmaFamily fam = family_from_json(detail::field(witness, "family"));
        const json base = family_to_json(*fam_).at("blocks");
        const json got = family_to_json(fam).at("blocks");
        if (got.size() < base.size() || !std::equal(base.begin(), base.end(), got.begin()))
          return "witness family does not extend the base family";
        const json& w = detail::field(witness, "condition");
        (void)w.get<QCondition>();
        if (!leq(a, w, &fam) || !leq(b, w, &fam)) return "witness is not above both conditions";
        return std::nullopt;
      }
      if (auto c = check(witness); !c.ok) return "witness fails its check: " + c.reason;
      if (!leq(a, witness) || !leq(b, witness)) return "witness is not above both conditions";
      return std::nullopt;
    } catch (const std::exception& e) {
      return std::string("witness does not decode: ") + e.what();
    }
  }

  // -------------------------------------------------------------------------
  // Cells.

  std::vector<Cell> decompose(const std::vector<json>& conds) const {
    std::map<std::string, Cell> cells;
    auto add = [&](const json& key, std::size_t idx) {
      Cell& c = cells[key.dump()];
      c.key = key;
      c.members.push_back(idx);
    };
    switch (h_.kind) {
      case PosetKind::P3:
        for (std::size_t i = 0; i < conds.size(); ++i) {
          const CellIndex cell = cell_of(conds[i].get<P3Condition>());
          add(json{{"n", cell.n}, {"m", cell.m}, {"W", cell.w}}, i);
        }
        break;
      case PosetKind::P4:
        for (std::size_t i = 0; i < conds.size(); ++i) {
          const auto c = conds[i].get<P4Condition>();
          add(json{{"n", c.n}, {"traces", traces(c.F, c.n)}}, i);
        }
        break;
      case PosetKind::Hechler:
        for (std::size_t i = 0; i < conds.size(); ++i) {
          const auto c = conds[i].get<HechlerCondition>();
          std::vector<Nat> stem;
          for (Nat k = 0; k < c.n; ++k) stem.push_back(c.at(k));
          add(json{{"n", c.n}, {"stem", stem}}, i);
        }
        break;
      default:
        throw BadParams("decompose supports p3, p4 and hechler");
    }
    std::vector<Cell> out;
    for (auto& [_, c] : cells) {
      if (h_.kind == PosetKind::P4) {
        std::vector<P4Condition> cs;
        for (auto i : c.members) cs.push_back(conds[i].get<P4Condition>());
        c.bound = p4_merge(cs);
      } else if (h_.kind == PosetKind::Hechler) {
        HechlerCondition acc = conds[c.members.front()].get<HechlerCondition>();
        for (auto i : c.members) acc = hechler_upper_bound(acc, conds[i].get<HechlerCondition>());
        c.bound = acc;
      }
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  int color() const { return h_.kind == PosetKind::Homog1 ? 1 : 0; }

  template <class T>
  static CompatResult exact(bool ok, const T& witness) {
    if (!ok) return {Compat::Incompatible, nullptr, ""};
    return {Compat::Compatible, json(witness), ""};
  }

  static bool p2_leq(const P2Approx& a, const P2Approx& b) {
    if (!a.tree || !b.tree || a.tree->root() != b.tree->root() || !qeta_leq(*a.tree, *b.tree)) return false;
    for (const auto& [lvl, v] : a.schedule) {
      auto it = b.schedule.find(lvl);
      if ((it == b.schedule.end() ? ExactRational(0) : it->second) < v) return false;
    }
    return a.tail_growth <= b.tail_growth;
  }

  static bool qstar_leq(const QStarCondition& a, const QStarCondition& b) {
    if (!std::includes(b.heart.begin(), b.heart.end(), a.heart.begin(), a.heart.end())) return false;
    const QStarCondition merged = qstar_union(b, b);
    for (const auto& r : a.singles) {
      bool covered = false;
      for (const auto& s : merged.singles)
        if (s.lo <= r.lo && r.hi <= s.hi) covered = true;
      if (!covered) return false;
    }
    return true;
  }

  CompatResult compat_knaster(const QCondition& qa, const QCondition& qb) const {
    const std::size_t lo = std::min(qa.level(), qb.level());
    for (const auto& [idx, s] : qa.entries())
      if (qb.contains(idx) && s.restrict(lo) != qb.at(idx).restrict(lo))
        return {Compat::Incompatible, nullptr, "entries disagree at index " + std::to_string(idx)};
    auto pack = [](const Amalgamation& am) {
      return json{{"condition", am.condition}, {"family", family_to_json(am.family)}};
    };
    if (!alignment_failure(qa, qb)) return {Compat::Compatible, pack(amalgamate(*fam_, qa, qb)), "aligned"};
    if (h_.params.search_bound == 0) return {Compat::Undecided, nullptr, "not aligned"};
    // Bounded attempt: raise the lower side to the common level, then merge
    // regardless of alignment and keep the result only if it verifies.
    try {
      SigmaFamily fam = *fam_;
      QCondition x = qa, y = qb;
      for (std::size_t step = 0; step < h_.params.search_bound && x.level() != y.level(); ++step) {
        QCondition& low = x.level() < y.level() ? x : y;
        auto am = extend_level(fam, low);
        low = std::move(am.condition);
        fam = std::move(am.family);
      }
      if (x.level() == y.level()) {
        auto am = detail::amalgamate_impl(fam, x, y, std::nullopt, {});
        if (q_leq(am.family, qa, am.condition) && q_leq(am.family, qb, am.condition))
          return {Compat::Compatible, pack(am), "bounded search"};
      }
    } catch (const Error&) {
    }
    return {Compat::Undecided, nullptr, "bounded search failed"};
  }

  static FinSeq random_seq(std::mt19937_64& rng, std::size_t len) {
    std::vector<Nat> v(len);
    for (auto& x : v) x = detail::below(rng, 3);
    return FinSeq(std::move(v));
  }

  json gen_knaster(std::mt19937_64& rng, const std::vector<FinSeq>& base) const {
    const std::size_t level = h_.params.depth;
    for (std::size_t attempt = 0; attempt < kGenAttempts; ++attempt) {
      const std::size_t size = level == 0 ? 1 : 1 + detail::below(rng, 3);
      std::map<Nat, FinSeq> entries;
      while (entries.size() < size) {
        const Nat idx = detail::below(rng, base.size());
        entries[idx] = detail::below(rng, 4) ? base[idx] : random_seq(rng, level);
      }
      try {
        return QCondition(std::move(entries), level);
      } catch (const InvalidCondition&) {
      }
    }
    return QCondition({{0, base[0]}}, level);
  }

  FiniteNormTree random_tree(std::mt19937_64& rng, std::size_t height) const {
    std::map<FinSeq, NatSet> removed;
    std::vector<FinSeq> level{FinSeq{}};
    for (std::size_t d = 0; d < height; ++d) {
      std::vector<FinSeq> next;
      for (const auto& node : level) {
        const BigInt& fn = tree_->f_of(node);
        const Nat cap = fn > 8 ? 8 : static_cast<Nat>(fn);
        NatSet rem;
        const std::size_t k = detail::below(rng, std::min<Nat>(3, cap));  // never removes everything
        while (rem.size() < k) rem.insert(detail::below(rng, cap));
        if (d + 1 < height) {
          if (fn > 64) throw ResourceBound("tree level too wide to generate");
          for (Nat c = 0; c < static_cast<Nat>(fn); ++c)
            if (!rem.count(c)) next.push_back(node.appended(c));
        }
        if (!rem.empty()) removed.emplace(node, std::move(rem));
      }
      level = std::move(next);
    }
    return FiniteNormTree(FinSeq{}, height, std::move(removed));
  }

  json gen_one(std::mt19937_64& rng) const {
    const auto& p = h_.params;
    for (std::size_t attempt = 0;; ++attempt) {
      const bool last = attempt + 1 >= kGenAttempts;  // last try takes a condition valid by construction
      json c;
      switch (h_.kind) {
        case PosetKind::P1: {
          std::vector<EvConstSeq> pool;
          for (int r = 0; r < 6; ++r) {
            std::vector<Nat> v(1 + detail::below(rng, p.precision + 1));
            for (auto& x : v) x = detail::below(rng, 3);
            pool.emplace_back(FinSeq(std::move(v)), detail::below(rng, 3));
          }
          P1Condition cond;
          cond.precision = p.precision;
          const std::size_t n = last ? 1 : 1 + detail::below(rng, 2);
          while (cond.elems.size() < n) {
            std::vector<EvConstSeq> chain{pool[detail::below(rng, pool.size())]};
            if (!last && detail::below(rng, 2)) chain.push_back(pool[detail::below(rng, pool.size())]);
            if (chain.size() == 2 && chain[0] == chain[1]) chain.pop_back();
            cond.elems.insert(GammaElem(std::move(chain)));
          }
          c = cond;
          break;
        }
        case PosetKind::P1Star: {
          auto rat = [&] { return ExactRational(static_cast<long long>(detail::below(rng, 9)) - 4, 2); };
          P1StarCondition cond;
          const std::size_t n = last ? 1 : 1 + detail::below(rng, 2);
          while (cond.size() < n) {
            std::set<ExactRational> terms;
            const std::size_t k = 1 + detail::below(rng, 3);
            while (terms.size() < k) terms.insert(rat());
            ExactRational lim = rat();
            while (terms.count(lim)) lim += 5;
            cond.insert(ConvSeq({terms.begin(), terms.end()}, lim));
          }
          c = cond;
          break;
        }
        case PosetKind::Qeta:
          c = random_tree(rng, detail::below(rng, p.depth + 1));
          break;
        case PosetKind::P2: {
          P2Approx a;
          a.tree = random_tree(rng, detail::below(rng, p.depth + 1));
          if (!last) {
            for (std::size_t l = 0; l < a.tree->height(); ++l) {
              static const int kBounds[] = {0, 1, 2, 5, 50};
              if (detail::below(rng, 2)) a.schedule[l] = ExactRational(kBounds[detail::below(rng, 5)]);
            }
          }
          a.tail_growth = ExactRational(static_cast<long long>(1 + detail::below(rng, 2)),
                                        static_cast<long long>(1 + detail::below(rng, 2)));
          c = a;
          break;
        }
        case PosetKind::P3: {
          const std::size_t d = p.depth;
          ClopenTree::Bits bits(std::size_t{1} << d);
          for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = detail::below(rng, 2);
          if (bits.none()) bits[detail::below(rng, bits.size())] = true;
          c = P3Condition(detail::below(rng, d + 1), ClopenTree(d, std::move(bits)));
          break;
        }
        case PosetKind::P4: {
          const std::size_t n = detail::below(rng, p.depth + 1);
          std::set<Branch> F;
          const std::size_t k = last ? 1 : 1 + detail::below(rng, 3);
          while (F.size() < k) {
            std::string bitstr(detail::below(rng, p.depth + 3), '0');
            for (auto& ch : bitstr) ch = detail::below(rng, 2) ? '1' : '0';
            F.insert(Branch(bitstr));
          }
          if (traces(F, n).size() != F.size()) continue;
          c = P4Condition(n, std::move(F));
          break;
        }
        case PosetKind::Hechler: {
          std::map<Nat, Nat> f;
          for (Nat k = 0; k < p.depth + 2; ++k) f[k] = detail::below(rng, 3);
          c = HechlerCondition(detail::below(rng, p.depth + 1), std::move(f));
          break;
        }
        case PosetKind::QInt: {
          static const auto pool = detail::ordinal_pool();
          std::set<OrdPair> pairs;
          const std::size_t k = last ? 0 : 1 + detail::below(rng, 2);
          for (std::size_t i = 0; i < k; ++i) {
            auto x = pool[detail::below(rng, pool.size())], y = pool[detail::below(rng, pool.size())];
            if (y < x) std::swap(x, y);
            pairs.emplace(x, y);
          }
          try {
            c = IntervalCondition(std::move(pairs));
          } catch (const InvalidCondition&) {
            continue;
          }
          break;
        }
        case PosetKind::QStar: {
          static const auto pool = detail::ordinal_pool();
          std::set<OrdPair> heart;
          std::vector<OrdRange> singles;
          const std::size_t hk = last ? 0 : detail::below(rng, 3), sk = last ? 0 : detail::below(rng, 3);
          for (std::size_t i = 0; i < hk; ++i) {
            auto x = pool[detail::below(rng, pool.size())], y = pool[detail::below(rng, pool.size())];
            if (x == y) continue;
            if (y < x) std::swap(x, y);
            heart.emplace(x, y);
          }
          for (std::size_t i = 0; i < sk; ++i) {
            auto x = pool[detail::below(rng, pool.size())], y = pool[detail::below(rng, pool.size())];
            if (x == y) continue;
            if (y < x) std::swap(x, y);
            singles.emplace_back(x, y);
          }
          c = QStarCondition(std::move(heart), std::move(singles));
          break;
        }
        case PosetKind::Homog0:
        case PosetKind::Homog1: {
          P6Condition cond{{}, color()};
          const std::size_t k = last ? 1 : 1 + detail::below(rng, 4);
          for (std::size_t i = 0; i < 4 * k && cond.H.size() < k; ++i) {
            const Nat v = detail::below(rng, 12);
            std::set<Nat> h = cond.H;
            h.insert(v);
            if (homogeneous(*bits_, h, cond.color)) cond.H = std::move(h);
          }
          if (cond.H.empty()) cond.H.insert(detail::below(rng, 12));
          c = cond;
          break;
        }
        case PosetKind::Knaster:
          throw Error("knaster generation goes through gen_knaster");
      }
      if (check(c).ok) return c;
      if (last) throw Error("generator produced an invalid condition");
    }
  }

  PosetHandle h_;
  std::optional<SigmaFamily> fam_;
  std::optional<TreeParams> tree_;
  OrdinalCNF delta_;
  std::optional<BitSource> bits_;
};

// ---------------------------------------------------------------------------
// Graphs.

struct CompatEdge {
  std::size_t u = 0, v = 0;
  json witness;
};

struct CompatGraph {
  std::vector<json> vertices;
  std::vector<CompatEdge> edges;
  std::vector<std::pair<std::size_t, std::size_t>> undecided;
};

/// Pairs in lexicographic order, so the output is canonical.
inline CompatGraph compat_graph(const Poset& poset, const std::vector<json>& conds) {
  CompatGraph g;
  g.vertices = conds;
  for (std::size_t u = 0; u < conds.size(); ++u)
    for (std::size_t v = u + 1; v < conds.size(); ++v) {
      auto r = poset.compat(conds[u], conds[v]);
      if (r.status == Compat::Compatible) g.edges.push_back({u, v, std::move(r.witness)});
      else if (r.status == Compat::Undecided) g.undecided.emplace_back(u, v);
    }
  return g;
}

inline json graph_to_json(const Poset& poset, const CompatGraph& g) {
  json edges = json::array(), und = json::array();
  for (const auto& e : g.edges) edges.push_back(json{{"u", e.u}, {"v", e.v}, {"witness", e.witness}});
  for (const auto& [u, v] : g.undecided) und.push_back(json::array({u, v}));
  return json{{"kind", to_string(poset.kind())},
              {"params", poset.handle().params},
              {"vertices", g.vertices},
              {"edges", edges},
              {"undecided", und}};
}

inline std::string graph_to_dot(const CompatGraph& g) {
  std::ostringstream os;
  os << "graph compat {\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v) os << "  v" << v << " [label=\"" << v << "\"];\n";
  for (const auto& e : g.edges) os << "  v" << e.u << " -- v" << e.v << ";\n";
  for (const auto& [u, v] : g.undecided) os << "  v" << u << " -- v" << v << " [style=dashed];\n";
  os << "}\n";
  return os.str();
}

/// First edge whose witness fails to replay, as "u-v: reason".
inline std::optional<std::string> verify_graph(const Poset& poset, const CompatGraph& g) {
  for (const auto& e : g.edges)
    if (auto why = poset.replay(g.vertices[e.u], g.vertices[e.v], e.witness))
      return std::to_string(e.u) + "-" + std::to_string(e.v) + ": " + *why;
  return std::nullopt;
}

struct AntichainResult {
  bool found = false;
  std::vector<std::size_t> vertices;
  bool exhaustive = true;
};

/// Pairwise incompatible vertices; undecided pairs count as compatible.
/// Lexicographically first subset up to the exhaustive limit, greedy beyond.
inline AntichainResult find_antichain(const CompatGraph& g, std::size_t size) {
  if (size < 2) throw PreconditionError("antichain size must be >= 2");
  const std::size_t n = g.vertices.size();
  std::vector<std::vector<char>> blocked(n, std::vector<char>(n, 0));
  for (const auto& e : g.edges) blocked[e.u][e.v] = blocked[e.v][e.u] = 1;
  for (const auto& [u, v] : g.undecided) blocked[u][v] = blocked[v][u] = 1;

  AntichainResult out;
  std::vector<std::size_t> pick;
  auto fits = [&](std::size_t v) {
    return std::none_of(pick.begin(), pick.end(), [&](std::size_t u) { return blocked[u][v]; });
  };
  if (n > kExhaustiveAntichainLimit) {
    out.exhaustive = false;
    for (std::size_t v = 0; v < n && pick.size() < size; ++v)
      if (fits(v)) pick.push_back(v);
  } else {
    auto rec = [&](auto&& self, std::size_t from) -> bool {
      if (pick.size() == size) return true;
      for (std::size_t v = from; v + (size - pick.size()) <= n; ++v) {
        if (!fits(v)) continue;
        pick.push_back(v);
        if (self(self, v + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    rec(rec, 0);
  }
  out.found = pick.size() == size;
  if (out.found) out.vertices = pick;
  return out;
}

}  // namespace forcing_lab
