#pragma once

// Property suites run by `forcing-lab verify`. Each property returns the first
// counterexample it meets, or nothing.

#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "forcing_lab/explorer.hpp"

namespace forcing_lab {

using Counterexample = std::optional<std::string>;

struct Property {
  std::string name;
  std::function<Counterexample()> run;
};

struct PropertyResult {
  std::string suite, name;
  Counterexample counterexample;
};

struct SuiteReport {
  std::vector<PropertyResult> results;

  bool ok() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return !r.counterexample; });
  }

  std::string to_text() const {
    std::ostringstream os;
    for (const auto& r : results) {
      os << (r.counterexample ? "FAIL " : "PASS ") << r.suite << "/" << r.name;
      if (r.counterexample) os << ": " << *r.counterexample;
      os << "\n";
    }
    os << (ok() ? "all properties hold\n" : "some properties failed\n");
    return os.str();
  }
};

namespace suites {

inline std::vector<Property> star_construction() {
  return {{"verify_star on every scheduled entry", [] {
             SigmaFamily fam(ScheduleConfig{3, 3, 0});
             const auto len = fam.schedule().length();
             fam.extend(len);
             for (std::uint64_t k = 0; k < len; ++k) {
               const StarRequest req = fam.schedule().entry(k);
               auto w = verify_star(fam, req);
               if (!w || !satisfies_star(fam, req, *w)) return Counterexample("entry " + std::to_string(k));
             }
             return Counterexample();
           }}};
}

// Conditions over indices {0,1,2}, level n, values below 3.
inline std::vector<QCondition> small_q_universe(std::size_t n) {
  std::vector<FinSeq> seqs{FinSeq{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<FinSeq> next;
    for (const auto& s : seqs)
      for (Nat v = 0; v < 3; ++v) next.push_back(s.appended(v));
    seqs = std::move(next);
  }
  std::vector<QCondition> out;
  for (unsigned mask = 0; mask < 8; ++mask) {
    std::vector<Nat> idx;
    for (Nat i = 0; i < 3; ++i)
      if (mask >> i & 1) idx.push_back(i);
    std::vector<std::size_t> pick(idx.size(), 0);
    while (true) {
      std::map<Nat, FinSeq> m;
      std::set<FinSeq> seen;
      bool ok = true;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        ok &= seen.insert(seqs[pick[k]]).second;
        m.emplace(idx[k], seqs[pick[k]]);
      }
      if (ok) out.emplace_back(std::move(m), n);
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == seqs.size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }
  return out;
}

inline std::vector<Property> amalgamation() {
  return {{"aligned pairs at levels <= 2 amalgamate above both", [] {
             const SigmaFamily fam = sigma_extend(SigmaFamily(), kFamilySteps);
             for (std::size_t n = 0; n <= 2; ++n) {
               const auto qs = small_q_universe(n);
               for (const auto& a : qs)
                 for (const auto& b : qs) {
                   if (alignment_failure(a, b)) continue;
                   const auto am = amalgamate(fam, a, b);
                   if (am.condition.level() != n + 1 || !q_leq(am.family, a, am.condition) ||
                       !q_leq(am.family, b, am.condition))
                     return Counterexample(a.to_text() + " / " + b.to_text());
                 }
             }
             return Counterexample();
           }}};
}

inline std::vector<Property> linking() {
  return {{"link_amalgamate forces the relation", [] {
             std::mt19937_64 rng(8);
             SigmaFamily fam = sigma_extend(SigmaFamily(), 60);
             for (int trial = 0; trial < 300; ++trial) {
               const std::size_t n = 1 + rng() % 3;
               auto rnd = [&] {
                 std::vector<Nat> v(n);
                 for (auto& x : v) x = rng() % 4;
                 return FinSeq(std::move(v));
               };
               std::map<Nat, FinSeq> common;
               std::set<FinSeq> used;
               for (Nat i = 0, k = rng() % 3; i < k; ++i) {
                 auto s = rnd();
                 if (used.insert(s).second) common.emplace(i, s);
               }
               const FinSeq s = rnd();
               if (used.count(s)) continue;
               auto a = common, b = common;
               a.emplace(10, s);
               b.emplace(11, s);
               const QCondition qa(a, n), qb(b, n);
               auto out = link_amalgamate(fam, qa, qb, 10, 11);
               fam = out.family;
               if (!rel_R(fam, n, out.condition.at(10), out.condition.at(11)))
                 return Counterexample(qa.to_text() + " / " + qb.to_text());
             }
             return Counterexample();
           }}};
}

inline std::vector<Property> norm_lemma() {
  return {{"intersection norm bound, f <= 12, g <= 24, m <= 4", [] {
             const auto rep = norm_lemma_exhaustive(12, 24, 4);
             if (!rep.ok()) return Counterexample(rep.violations.front());
             return Counterexample();
           }}};
}

inline std::vector<P3Condition> p3_universe(std::size_t max_depth) {
  std::vector<P3Condition> out;
  for (std::size_t d = 0; d <= max_depth; ++d) {
    const std::size_t slots = std::size_t{1} << d;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << slots); ++mask) {
      ClopenTree::Bits bits(slots, mask);
      const ClopenTree t(d, bits);
      for (std::size_t n = 0; n <= d; ++n) out.emplace_back(n, t);
    }
  }
  return out;
}

inline std::vector<Property> linked_cells() {
  return {{"pairs in a cell (depth <= 3, m <= 4) have linked witnesses", [] {
             std::map<CellIndex, std::vector<std::size_t>> cells;
             const auto cs = p3_universe(3);
             for (std::size_t i = 0; i < cs.size(); ++i) {
               for (std::size_t m = cs[i].n + 1; m <= 4; ++m) {
                 const ClopenTree& t = cs[i].tree;
                 const ClopenTree full = t.depth() >= m ? t : t.refined(m);
                 const CellIndex cell{cs[i].n, m, ClopenTree(m, full.trace(m))};
                 if (in_cell(cs[i], cell)) cells[cell].push_back(i);
               }
             }
             for (const auto& [cell, members] : cells)
               for (auto a : members)
                 for (auto b : members) {
                   try {
                     (void)linked_witness(cs[a], cs[b], cell);
                   } catch (const Error& e) {
                     return Counterexample(e.what());
                   }
                 }
             return Counterexample();
           }},
          {"every condition lies in its cell", [] {
             for (const auto& c : p3_universe(3))
               if (!in_cell(c, cell_of(c))) return Counterexample("n=" + std::to_string(c.n));
             return Counterexample();
           }}};
}

inline std::vector<Property> centered_merge() {
  return {{"same-cell P4 conditions merge above all inputs", [] {
             std::mt19937_64 rng(5);
             for (int trial = 0; trial < 2000; ++trial) {
               const std::size_t n = rng() % 4;
               // A cell: n and a set of level-n traces; members add longer branches above them.
               std::set<std::string> cell_traces;
               for (std::size_t k = 0, t = 1 + rng() % 3; k < t; ++k) {
                 std::string s(n, '0');
                 for (auto& ch : s) ch = rng() % 2 ? '1' : '0';
                 cell_traces.insert(s);
               }
               std::vector<P4Condition> cs;
               for (std::size_t k = 0, count = 1 + rng() % 5; k < count; ++k) {
                 std::set<Branch> F;
                 for (const auto& t : cell_traces) {
                   std::string s = t;
                   for (std::size_t e = 0, extra = rng() % 4; e < extra; ++e) s += rng() % 2 ? '1' : '0';
                   F.insert(Branch(s));
                 }
                 if (traces(F, n).size() != F.size()) continue;
                 cs.emplace_back(n, std::move(F));
               }
               if (cs.empty()) continue;
               const P4Condition m = p4_merge(cs);
               for (const auto& c : cs)
                 if (!p4_leq(c, m)) return Counterexample("trial " + std::to_string(trial));
             }
             return Counterexample();
           }}};
}

inline std::vector<Property> witness_family() {
  return {{"compatibility is the complement of F-links", [] {
             const SigmaFamily fam = sigma_extend(SigmaFamily(), 200);
             std::mt19937_64 rng(21);
             std::vector<EvConstSeq> xs;
             std::set<EvConstSeq> seen;
             while (xs.size() < 8) {
               EvConstSeq x = !xs.empty() && rng() % 2
                                  ? f_apply(fam, rng() % 3, xs[rng() % xs.size()])
                                  : EvConstSeq(FinSeq({rng() % 6, rng() % 6}), rng() % 3);
               if (seen.insert(x).second) xs.push_back(x);
             }
             const auto ps = knaster_witness_family(xs);
             for (std::size_t a = 0; a < xs.size(); ++a)
               for (std::size_t b = a + 1; b < xs.size(); ++b) {
                 const auto m = f_membership(fam, xs[a], xs[b], kDefaultMembershipBound);
                 if (m.kind == Membership::Kind::Unknown) continue;
                 if (p1_compatible(fam, ps[a], ps[b]) != (m.kind == Membership::Kind::No))
                   return Counterexample(std::to_string(a) + "," + std::to_string(b));
               }
             return Counterexample();
           }}};
}

inline std::vector<Property> rc_decode_suite() {
  return {{"decoding a chain recovers it", [] {
             std::mt19937_64 rng(3);
             auto rnd_real = [&] { return EvConstSeq(FinSeq({rng() % 3, rng() % 3}), rng() % 2); };
             auto rnd_seq = [&] {
               std::vector<Nat> v(1 + rng() % 3);
               for (auto& x : v) x = rng() % 4;
               return FinSeq(std::move(v));
             };
             for (int trial = 0; trial < 300; ++trial) {
               std::vector<RCCondition> chain{RCCondition{{{}, 1}, {}}};
               while (chain.size() < 5) {
                 RCCondition next = chain.back();
                 if (rng() % 2) next.p.elems.insert(GammaElem({rnd_real()}));
                 next.w.insert(rnd_seq());
                 if (rc_leq(chain.back(), next)) chain.push_back(std::move(next));
               }
               std::set<FinSeq> r;
               for (const auto& g : chain) r.insert(g.w.begin(), g.w.end());
               const auto dec = rc_decode(r, chain);
               if (dec.size() != chain.size()) return Counterexample("trial " + std::to_string(trial));
             }
             return Counterexample();
           }}};
}

inline std::vector<Property> translation() {
  return {{"translated unions satisfy the invariant", [] {
             PosetHandle h{PosetKind::P1Star, {}};
             h.params.seed = 11;
             const auto cs = Poset(h).generate(60);
             for (const auto& a : cs)
               for (const auto& b : cs) {
                 const auto p1 = a.get<P1StarCondition>(), p2 = b.get<P1StarCondition>();
                 auto u = translate(p1, find_translation(p1, p2));
                 u.insert(p2.begin(), p2.end());
                 if (!p1star_check(u)) return Counterexample(a.dump() + " / " + b.dump());
               }
             return Counterexample();
           }}};
}

inline std::vector<Property> ordinal_arith() {
  std::vector<OrdinalCNF> uni = detail::ordinal_pool();
  return {{"associativity and absorption",
           [uni] {
             if (!(ord_add(OrdinalCNF::finite(1), OrdinalCNF::omega()) == OrdinalCNF::omega()))
               return Counterexample("1+w != w");
             for (const auto& a : uni)
               for (const auto& b : uni)
                 for (const auto& c : uni)
                   if (!(ord_add(ord_add(a, b), c) == ord_add(a, ord_add(b, c))))
                     return Counterexample(a.to_string() + ", " + b.to_string() + ", " + c.to_string());
             return Counterexample();
           }},
          {"left subtraction inverts addition",
           [uni] {
             for (const auto& a : uni)
               for (const auto& b : uni) {
                 if (b < a) continue;
                 if (!(ord_add(a, ord_left_subtract(a, b)) == b)) return Counterexample(a.to_string() + ", " + b.to_string());
               }
             return Counterexample();
           }},
          {"fast accept agrees with the exact merge", [] {
             for (const char* d : {"w", "w^2", "w^3"}) {
               PosetHandle h{PosetKind::QStar, {}};
               h.params.delta = d;
               h.params.seed = 2;
               const auto cs = Poset(h).generate(40);
               const OrdinalCNF delta = OrdinalCNF::parse(d);
               for (const auto& a : cs)
                 for (const auto& b : cs) {
                   const auto x = a.get<QStarCondition>(), y = b.get<QStarCondition>();
                   if (qstar_compatible(x, y, delta) != qstar_compatible_exact(x, y, delta))
                     return Counterexample(a.dump() + " / " + b.dump());
                 }
             }
             return Counterexample();
           }}};
}

inline std::vector<Property> coloring() {
  return {{"homogeneity matches edge colors on subsets of 0..6",
           [] {
             const BitSource src(1);
             for (unsigned mask = 0; mask < 128; ++mask) {
               std::set<Nat> H;
               for (Nat v = 0; v < 7; ++v)
                 if (mask >> v & 1) H.insert(v);
               for (int i = 0; i < 2; ++i) {
                 bool direct = true;
                 for (Nat a : H)
                   for (Nat b : H)
                     if (b < a && color_edge(src, a, b) != i) direct = false;
                 if (homogeneous(src, H, i) != direct) return Counterexample("mask " + std::to_string(mask));
               }
             }
             return Counterexample();
           }},
          {"non-transitive triple exists and verifies", [] {
             const BitSource src(1);
             for (int i = 0; i < 2; ++i) {
               auto t = find_non_transitive(src, i, 32);
               if (!t) return Counterexample("none for color " + std::to_string(i));
               if (!homog_compatible(src, t->h1, t->h2, i) || !homog_compatible(src, t->h2, t->h3, i) ||
                   homog_compatible(src, t->h1, t->h3, i))
                 return Counterexample("unverified triple");
             }
             return Counterexample();
           }}};
}

inline std::vector<Property> explorer() {
  return {{"generated conditions check and every edge witness replays", [] {
             for (const auto& [kind, name] : kind_names()) {
               PosetHandle h{kind, {}};
               h.params.seed = 7;
               const Poset p(h);
               const auto cs = p.generate(10);
               for (const auto& c : cs)
                 if (!p.check(c).ok) return Counterexample(name + ": " + c.dump());
               if (auto why = verify_graph(p, compat_graph(p, cs))) return Counterexample(name + ": " + *why);
             }
             return Counterexample();
           }}};
}

}  // namespace suites

inline const std::vector<std::pair<std::string, std::function<std::vector<Property>()>>>& suite_table() {
  static const std::vector<std::pair<std::string, std::function<std::vector<Property>()>>> table{
      {"star-construction", suites::star_construction},
      {"amalgamation", suites::amalgamation},
      {"linking", suites::linking},
      {"norm-lemma", suites::norm_lemma},
      {"linked-cells", suites::linked_cells},
      {"centered-merge", suites::centered_merge},
      {"witness-family", suites::witness_family},
      {"rc-decode", suites::rc_decode_suite},
      {"translation", suites::translation},
      {"ordinal-arith", suites::ordinal_arith},
      {"coloring", suites::coloring},
      {"explorer", suites::explorer}};
  return table;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : suite_table()) out.push_back(name);
  out.push_back("all");
  return out;
}

/// Runs one suite, or every suite for "all".
inline SuiteReport run_suite(const std::string& name) {
  SuiteReport rep;
  bool known = false;
  for (const auto& [suite, make] : suite_table()) {
    if (name != "all" && name != suite) continue;
    known = true;
    for (const auto& prop : make()) {
      Counterexample ce;
      try {
        ce = prop.run();
      } catch (const std::exception& e) {
        ce = std::string("exception: ") + e.what();
      }
      rep.results.push_back({suite, prop.name, std::move(ce)});
    }
  }
  if (!known) throw UnknownSuite(name);
  return rep;
}

}  // namespace forcing_lab
