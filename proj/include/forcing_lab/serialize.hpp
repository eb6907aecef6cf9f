#pragma once

// JSON forms of every condition type. Big integers and rationals are decimal
// strings; ordinals use their CNF text; bitstrings are "0101" strings.

#include <string>

#include "json.hpp"

#include "forcing_lab/centered.hpp"
#include "forcing_lab/coloring.hpp"
#include "forcing_lab/gamma.hpp"
#include "forcing_lab/knaster.hpp"
#include "forcing_lab/measure_trees.hpp"
#include "forcing_lab/norm_trees.hpp"
#include "forcing_lab/ordinal.hpp"

namespace forcing_lab {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline void to_json(json& j, const FinSeq& s) { j = s.items(); }
inline void from_json(const json& j, FinSeq& s) { s = FinSeq(j.get<std::vector<Nat>>()); }

inline void to_json(json& j, const EvConstSeq& x) { j = json{{"prefix", x.prefix()}, {"tail", x.tail()}}; }
inline void from_json(const json& j, EvConstSeq& x) {
  x = EvConstSeq(detail::get_field<FinSeq>(j, "prefix"), detail::get_field<Nat>(j, "tail"));
}

inline void to_json(json& j, const QCondition& q) {
  json entries = json::array();
  for (const auto& [idx, s] : q.entries()) entries.push_back(json{{"index", idx}, {"seq", s}});
  j = json{{"level", q.level()}, {"entries", entries}};
}
inline void from_json(const json& j, QCondition& q) {
  std::map<Nat, FinSeq> entries;
  for (const auto& e : detail::field(j, "entries")) {
    if (!entries.emplace(detail::get_field<Nat>(e, "index"), detail::get_field<FinSeq>(e, "seq")).second)
      throw ParseError("duplicate index in Q condition");
  }
  q = QCondition(std::move(entries), detail::get_field<std::size_t>(j, "level"));
}

inline void to_json(json& j, const StarRequest& r) {
  json rows = json::array();
  for (const auto& row : r.phis) {
    json out = json::array();
    for (const auto& v : row) out.push_back(v ? json(*v) : json(nullptr));
    rows.push_back(out);
  }
  j = json{{"size", r.size}, {"phis", rows}};
}
inline void from_json(const json& j, StarRequest& r) {
  r.size = detail::get_field<std::size_t>(j, "size");
  r.phis.clear();
  for (const auto& row : detail::field(j, "phis")) {
    std::vector<std::optional<Nat>> out;
    for (const auto& v : row) out.push_back(v.is_null() ? std::nullopt : std::optional<Nat>(v.get<Nat>()));
    r.phis.push_back(std::move(out));
  }
}

inline void to_json(json& j, const ScheduleConfig& c) {
  j = json{{"max_size", c.max_size}, {"max_value", c.max_value}, {"seed", c.seed}};
}
inline void from_json(const json& j, ScheduleConfig& c) {
  c.max_size = detail::get_field<std::size_t>(j, "max_size");
  c.max_value = detail::get_field<Nat>(j, "max_value");
  c.seed = detail::get_field<std::uint64_t>(j, "seed");
}

/// The construction history: schedule blocks as their position, on-demand
/// blocks as their request. Replaying it rebuilds an equal family.
inline json family_to_json(const SigmaFamily& fam) {
  json blocks = json::array();
  const auto& od = fam.on_demand_blocks();
  for (std::size_t b = 0; b < fam.blocks().size(); ++b) {
    if (std::find(od.begin(), od.end(), b) != od.end()) blocks.push_back(json{{"request", fam.block_request(b)}});
    else blocks.push_back(json{{"schedule", fam.blocks()[b].schedule_pos}});
  }
  return json{{"config", fam.config()}, {"blocks", blocks}};
}

inline SigmaFamily family_from_json(const json& j) {
  SigmaFamily fam(detail::get_field<ScheduleConfig>(j, "config"));
  for (const auto& b : detail::field(j, "blocks")) {
    if (b.contains("request")) {
      fam.add_request(b.at("request").get<StarRequest>());
    } else {
      if (b.at("schedule").get<std::uint64_t>() != fam.completed_entries())
        throw ParseError("schedule blocks out of order");
      fam.extend(1);
    }
  }
  return fam;
}

inline void to_json(json& j, const GammaElem& x) { j = x.chain(); }
inline void from_json(const json& j, GammaElem& x) { x = GammaElem(j.get<std::vector<EvConstSeq>>()); }

inline void to_json(json& j, const P1Condition& p) {
  j = json{{"precision", p.precision}, {"elems", p.elems}};
}
inline void from_json(const json& j, P1Condition& p) {
  p.precision = detail::get_field<std::size_t>(j, "precision");
  p.elems = detail::get_field<std::set<GammaElem>>(j, "elems");
}

inline json rational_json(const ExactRational& r) { return to_string(r); }
inline ExactRational rational_from(const json& j) {
  if (j.is_number_integer()) return ExactRational(j.get<std::int64_t>());
  if (!j.is_string()) throw ParseError("rational must be a string");
  return parse_rational(j.get<std::string>());
}

inline void to_json(json& j, const ConvSeq& s) {
  json terms = json::array();
  for (const auto& t : s.terms()) terms.push_back(rational_json(t));
  j = json{{"terms", terms}, {"limit", rational_json(s.limit())}};
}
inline void from_json(const json& j, ConvSeq& s) {
  std::vector<ExactRational> terms;
  for (const auto& t : detail::field(j, "terms")) terms.push_back(rational_from(t));
  s = ConvSeq(std::move(terms), rational_from(detail::field(j, "limit")));
}

inline void to_json(json& j, const FiniteNormTree& t) {
  json removed = json::array();
  for (const auto& [node, rem] : t.removed()) removed.push_back(json{{"node", node}, {"removed", rem}});
  j = json{{"root", t.root()}, {"height", t.height()}, {"removed", removed}};
}
inline void from_json(const json& j, FiniteNormTree& t) {
  std::map<FinSeq, NatSet> removed;
  for (const auto& e : detail::field(j, "removed"))
    removed.emplace(detail::get_field<FinSeq>(e, "node"), detail::get_field<NatSet>(e, "removed"));
  t = FiniteNormTree(detail::get_field<FinSeq>(j, "root"), detail::get_field<std::size_t>(j, "height"),
                     std::move(removed));
}

inline void to_json(json& j, const P2Approx& a) {
  json sched = json::array();
  for (const auto& [lvl, b] : a.schedule) sched.push_back(json{{"level", lvl}, {"bound", rational_json(b)}});
  j = json{{"tree", a.tree ? json(*a.tree) : json(nullptr)},
           {"schedule", sched},
           {"tail_growth", rational_json(a.tail_growth)}};
}
inline void from_json(const json& j, P2Approx& a) {
  const json& t = detail::field(j, "tree");
  a.tree = t.is_null() ? std::nullopt : std::optional<FiniteNormTree>(t.get<FiniteNormTree>());
  a.schedule.clear();
  for (const auto& e : detail::field(j, "schedule"))
    a.schedule[detail::get_field<std::size_t>(e, "level")] = rational_from(detail::field(e, "bound"));
  a.tail_growth = rational_from(detail::field(j, "tail_growth"));
}

inline void to_json(json& j, const TreeParams& p) {
  json nodes = json::array();
  for (const auto& node : p.order)
    nodes.push_back(json{{"node", node}, {"f", p.f.at(node).str()}, {"g", p.g.at(node).str()}});
  j = json{{"mode", to_string(p.mode)}, {"depth", p.depth}, {"toy_scale", p.toy_scale}, {"nodes", nodes}};
}

inline void to_json(json& j, const ClopenTree& t) {
  json leaves = json::array();
  for (const auto& s : t.leaf_strings()) leaves.push_back(bits_string(s));
  j = json{{"depth", t.depth()}, {"leaves", leaves}};
}
inline void from_json(const json& j, ClopenTree& t) {
  std::vector<FinSeq> leaves;
  for (const auto& s : detail::field(j, "leaves")) leaves.push_back(parse_bits(s.get<std::string>()));
  t = ClopenTree::from_leaves(detail::get_field<std::size_t>(j, "depth"), leaves);
}

inline void to_json(json& j, const P3Condition& c) { j = json{{"n", c.n}, {"tree", c.tree}}; }
inline void from_json(const json& j, P3Condition& c) {
  c = P3Condition(detail::get_field<std::size_t>(j, "n"), detail::get_field<ClopenTree>(j, "tree"));
}

inline void to_json(json& j, const Branch& b) { j = b.to_string(); }
inline void from_json(const json& j, Branch& b) { b = Branch(j.get<std::string>()); }

inline void to_json(json& j, const P4Condition& c) { j = json{{"n", c.n}, {"F", c.F}}; }
inline void from_json(const json& j, P4Condition& c) {
  c = P4Condition(detail::get_field<std::size_t>(j, "n"), detail::get_field<std::set<Branch>>(j, "F"));
}

inline void to_json(json& j, const HechlerCondition& c) {
  json f = json::array();
  for (const auto& [k, v] : c.f) f.push_back(json::array({k, v}));
  j = json{{"n", c.n}, {"f", f}};
}
inline void from_json(const json& j, HechlerCondition& c) {
  std::map<Nat, Nat> f;
  for (const auto& kv : detail::field(j, "f")) {
    if (!kv.is_array() || kv.size() != 2) throw ParseError("Hechler entries are [k, v] pairs");
    f[kv[0].get<Nat>()] = kv[1].get<Nat>();
  }
  c = HechlerCondition(detail::get_field<std::size_t>(j, "n"), std::move(f));
}

inline void to_json(json& j, const OrdinalCNF& o) { j = o.to_string(); }
inline void from_json(const json& j, OrdinalCNF& o) {
  if (j.is_number_unsigned() || j.is_number_integer()) o = OrdinalCNF::finite(j.get<std::uint64_t>());
  else o = OrdinalCNF::parse(j.get<std::string>());
}

inline json ord_pair_json(const OrdPair& p) { return json::array({p.first, p.second}); }
inline OrdPair ord_pair_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("ordinal pairs are [alpha, beta]");
  return {j[0].get<OrdinalCNF>(), j[1].get<OrdinalCNF>()};
}

inline void to_json(json& j, const IntervalCondition& c) {
  json pairs = json::array();
  for (const auto& p : c.pairs) pairs.push_back(ord_pair_json(p));
  j = json{{"pairs", pairs}};
}
inline void from_json(const json& j, IntervalCondition& c) {
  std::set<OrdPair> pairs;
  for (const auto& p : detail::field(j, "pairs")) pairs.insert(ord_pair_from(p));
  c = IntervalCondition(std::move(pairs));
}

inline void to_json(json& j, const OrdRange& r) { j = json::array({r.lo, r.hi}); }
inline void from_json(const json& j, OrdRange& r) {
  if (!j.is_array() || j.size() != 2) throw ParseError("ranges are [lo, hi]");
  r = OrdRange(j[0].get<OrdinalCNF>(), j[1].get<OrdinalCNF>());
}

inline void to_json(json& j, const QStarCondition& w) {
  json heart = json::array();
  for (const auto& p : w.heart) heart.push_back(ord_pair_json(p));
  j = json{{"heart", heart}, {"singles", w.singles}};
}
inline void from_json(const json& j, QStarCondition& w) {
  std::set<OrdPair> heart;
  for (const auto& p : detail::field(j, "heart")) heart.insert(ord_pair_from(p));
  w = QStarCondition(std::move(heart), detail::get_field<std::vector<OrdRange>>(j, "singles"));
}

inline void to_json(json& j, const P6Condition& c) { j = json{{"H", c.H}, {"color", c.color}}; }
inline void from_json(const json& j, P6Condition& c) {
  c.H = detail::get_field<std::set<Nat>>(j, "H");
  c.color = detail::get_field<int>(j, "color");
}

}  // namespace forcing_lab
