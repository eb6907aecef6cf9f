// Acceptance run: one PASS/FAIL line per criterion. Every check compares the
// library against a small independent reimplementation kept in this file.
//
//   acceptance            run everything
//   acceptance 4 7        run only criteria 4 and 7

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "forcing_lab/forcing_lab.hpp"

#ifndef FORCING_LAB_CLI
#define FORCING_LAB_CLI "forcing-lab"
#endif

namespace fl = forcing_lab;
using fl::FinSeq;
using fl::Nat;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_secs(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

// ---------------------------------------------------------------------------
// Sequence oracles: R_i and the order on Q, straight from their definitions.

bool o_rel(const fl::SigmaFamily& fam, std::size_t i, const FinSeq& s, const FinSeq& t) {
  if (!(i < s.size() && s.size() == t.size())) return false;
  for (std::size_t k = 0; k < i; ++k)
    if (s[k] != t[k]) return false;
  for (std::size_t l = i; l < s.size(); ++l)
    if (s[l] != fam.sigma(i, t[l])) return false;
  return true;
}

bool o_prefix(const FinSeq& a, const FinSeq& b) {
  if (a.size() > b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != b[k]) return false;
  return true;
}

bool o_qleq(const fl::SigmaFamily& fam, const fl::QCondition& q, const fl::QCondition& p) {
  for (const auto& [idx, s] : q.entries())
    if (!p.contains(idx) || !o_prefix(s, p.at(idx))) return false;
  for (const auto& [a, sa] : q.entries())
    for (const auto& [b, sb] : q.entries()) {
      if (!(a < b)) continue;
      for (std::size_t i = 0; i < q.level(); ++i)
        if (o_rel(fam, i, sa, sb) && !o_rel(fam, i, p.at(a), p.at(b))) return false;
    }
  return true;
}

// Clause checks on an output condition: level, lengths, distinct entries.
std::optional<std::string> o_qcond(const fl::QCondition& q, std::size_t level) {
  if (q.level() != level) return "level " + std::to_string(q.level());
  std::set<std::vector<Nat>> seen;
  for (const auto& [idx, s] : q.entries()) {
    if (s.size() != level) return "entry " + std::to_string(idx) + " has the wrong length";
    if (!seen.insert(s.items()).second) return "entries repeat";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// 1. Star construction.

Outcome c1_star() {
  const auto t0 = Clock::now();
  fl::SigmaFamily fam(fl::ScheduleConfig{3, 3, 0});
  const auto len = fam.schedule().length();
  fam.extend(len);

  std::set<std::uint64_t> positions;
  std::uint64_t checked = 0;
  for (std::size_t N = 1; N <= 3; ++N) {
    const std::size_t cells = N * N;
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < cells; ++k) total *= 3;
    for (std::uint64_t code = 0; code < total; ++code) {
      std::vector<std::vector<Nat>> phis(N, std::vector<Nat>(N));
      std::uint64_t c = code;
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j, c /= 3) phis[i][j] = c % 3;
      const auto req = fl::StarRequest::total(N, phis);
      const auto pos = fam.schedule().position_of(req);
      if (!pos) return fail("request missing from the schedule (N=" + std::to_string(N) + ")");
      positions.insert(*pos);
      const auto w = fl::verify_star(fam, req);
      if (!w) return fail("verify_star found nothing for schedule entry " + std::to_string(*pos));
      // (*) directly: N distinct naturals, phi_i(j0) = j1 < N forces sigma_i(n_j0) = n_j1.
      if (w->size() != N || std::set<Nat>(w->begin(), w->end()).size() != N)
        return fail("witness is not N distinct naturals at entry " + std::to_string(*pos));
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j0 = 0; j0 < N; ++j0) {
          const Nat j1 = phis[i][j0];
          if (j1 < N && fam.sigma(i, (*w)[j0]) != (*w)[j1])
            return fail("sigma_" + std::to_string(i) + " breaks the request at entry " + std::to_string(*pos));
        }
      const auto blk = fam.block_of_entry(*pos);
      if (!blk || fam.block_witness(*blk) != *w)
        return fail("witness differs from the recorded block at entry " + std::to_string(*pos));
      ++checked;
    }
  }
  if (positions.size() != len) return fail("schedule has entries outside the oracle enumeration");
  if (!fl::verify_star(fam, fl::StarRequest{}) || !fl::verify_star(fam, fl::StarRequest{})->empty())
    return fail("N = 0 does not give the empty witness");
  const double s = seconds_since(t0);
  if (s >= 5) return fail("took " + fmt_secs(s));
  return {true, std::to_string(checked) + " entries, " + fmt_secs(s)};
}

// ---------------------------------------------------------------------------
// 2. Amalgamation.

std::optional<std::string> check_amalgam(const fl::SigmaFamily& fam, const fl::QCondition& a, const fl::QCondition& b) {
  fl::Amalgamation am;
  try {
    am = fl::amalgamate(fam, a, b);
  } catch (const fl::Error& e) {
    return std::string("threw: ") + e.what();
  }
  const auto& q = am.condition;
  if (auto why = o_qcond(q, a.level() + 1)) return *why;
  std::set<Nat> dom;
  for (const auto& kv : a.entries()) dom.insert(kv.first);
  for (const auto& kv : b.entries()) dom.insert(kv.first);
  if (q.domain() != dom) return std::string("domain is not the union");
  if (!o_qleq(am.family, a, q) || !o_qleq(am.family, b, q)) return std::string("output is not above both inputs");
  if (!fl::q_leq(am.family, a, q) || !fl::q_leq(am.family, b, q)) return std::string("library q_leq disagrees");
  return std::nullopt;
}

std::vector<fl::QCondition> q_universe(std::size_t n) {
  std::vector<FinSeq> seqs{FinSeq{}};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<FinSeq> next;
    for (const auto& s : seqs)
      for (Nat v = 0; v < 3; ++v) next.push_back(s.appended(v));
    seqs = std::move(next);
  }
  std::vector<fl::QCondition> out;
  const std::size_t S = seqs.size();
  // index i in {0,1,2} holds seqs[c_i - 1], or nothing when c_i = 0
  for (std::size_t c0 = 0; c0 <= S; ++c0)
    for (std::size_t c1 = 0; c1 <= S; ++c1)
      for (std::size_t c2 = 0; c2 <= S; ++c2) {
        const std::size_t cs[3] = {c0, c1, c2};
        std::map<Nat, FinSeq> m;
        std::set<std::size_t> used;
        bool ok = true;
        for (Nat i = 0; i < 3; ++i) {
          if (!cs[i]) continue;
          ok &= used.insert(cs[i]).second;
          m.emplace(i, seqs[cs[i] - 1]);
        }
        if (ok) out.emplace_back(std::move(m), n);
      }
  return out;
}

bool o_aligned(const fl::QCondition& a, const fl::QCondition& b) {
  if (a.level() != b.level()) return false;
  std::vector<Nat> common, priv;
  for (const auto& [i, s] : a.entries()) {
    if (b.contains(i)) {
      if (b.at(i) != s) return false;
      common.push_back(i);
    } else {
      priv.push_back(i);
    }
  }
  for (const auto& [i, s] : b.entries())
    if (!a.contains(i)) priv.push_back(i);
  for (auto c : common)
    for (auto p : priv)
      if (c > p) return false;
  return true;
}

Outcome c2_amalgamation() {
  const auto t0 = Clock::now();
  const fl::SigmaFamily fam = fl::sigma_extend(fl::SigmaFamily(), 16);
  std::uint64_t exhaustive = 0, related = 0;
  for (std::size_t n = 0; n <= 2; ++n) {
    const auto qs = q_universe(n);
    for (const auto& a : qs)
      for (const auto& b : qs) {
        const bool aligned = o_aligned(a, b);
        if (aligned != !fl::alignment_failure(a, b).has_value()) return fail("alignment test disagrees at " + a.to_text());
        if (!aligned) continue;
        for (const auto& [x, sx] : a.entries())
          for (const auto& [y, sy] : a.entries())
            for (std::size_t i = 0; i < n; ++i) related += x < y && o_rel(fam, i, sx, sy);
        if (auto why = check_amalgam(fam, a, b)) return fail(*why + " for " + a.to_text() + " / " + b.to_text());
        ++exhaustive;
      }
  }

  // Larger random aligned pairs, with R_i relations planted through f_i.
  const fl::SigmaFamily big = fl::sigma_extend(fl::SigmaFamily(), 200);
  std::mt19937_64 rng(20240611);
  std::uint64_t random = 0;
  while (random < 10000) {
    const std::size_t n = rng() % 5;
    auto rnd = [&] {
      std::vector<Nat> v(n);
      for (auto& x : v) x = rng() % 6;
      return FinSeq(std::move(v));
    };
    std::map<Nat, FinSeq> common, pa, pb;
    std::set<FinSeq> ua, ub;
    auto pick = [&](std::map<Nat, FinSeq>& into, std::set<FinSeq>& used, Nat idx, const std::map<Nat, FinSeq>& pool) {
      FinSeq s = rnd();
      if (n && !pool.empty() && rng() % 2) {
        auto it = pool.begin();
        std::advance(it, rng() % pool.size());
        s = fl::f_apply(big, rng() % n, it->second);
      }
      if (used.insert(s).second) into.emplace(idx, s);
    };
    for (Nat i = 0, k = rng() % 4; i < k; ++i) pick(common, ua, rng() % 4, common);
    ub = ua;
    for (Nat i = 0, k = rng() % 4; i < k; ++i) pick(pa, ua, 4 + rng() % 8, common);
    for (Nat i = 0, k = rng() % 4; i < k; ++i) pick(pb, ub, 4 + rng() % 8, common);
    // a private index on both sides would be common, and out of order
    bool clash = false;
    for (const auto& kv : pb) clash |= pa.count(kv.first) > 0;
    if (clash) continue;
    auto a = common, b = common;
    a.insert(pa.begin(), pa.end());
    b.insert(pb.begin(), pb.end());
    const fl::QCondition qa(a, n), qb(b, n);
    if (!o_aligned(qa, qb)) continue;
    if (auto why = check_amalgam(big, qa, qb)) return fail(*why + " for " + qa.to_text() + " / " + qb.to_text());
    ++random;
  }
  const double s = seconds_since(t0);
  if (s >= 60) return fail("took " + fmt_secs(s));
  return {true, std::to_string(exhaustive) + " exhaustive pairs (" + std::to_string(related) + " related pairs), " +
                    std::to_string(random) + " random, " + fmt_secs(s)};
}

// ---------------------------------------------------------------------------
// 3. Linking.

Outcome c3_linking() {
  const fl::SigmaFamily fam = fl::sigma_extend(fl::SigmaFamily(), 60);
  std::mt19937_64 rng(77);
  int done = 0;
  while (done < 1000) {
    const std::size_t n = rng() % 4;
    auto rnd = [&] {
      std::vector<Nat> v(n);
      for (auto& x : v) x = rng() % 5;
      return FinSeq(std::move(v));
    };
    std::map<Nat, FinSeq> common;
    std::set<FinSeq> used;
    for (Nat i = 0, k = rng() % 4; i < k; ++i) {
      auto s = rnd();
      if (used.insert(s).second) common.emplace(i, s);
    }
    const FinSeq s = rnd();
    if (used.count(s)) continue;
    const Nat alpha = 10 + rng() % 5, beta = alpha + 1 + rng() % 5;
    auto a = common, b = common;
    a.emplace(alpha, s);
    b.emplace(beta, s);
    // an extra private entry on one side now and then
    if (rng() % 3 == 0) {
      auto t = rnd();
      if (!used.count(t) && t != s) a.emplace(20 + rng() % 5, t);
    }
    const fl::QCondition qa(a, n), qb(b, n);
    fl::Amalgamation out;
    try {
      out = fl::link_amalgamate(fam, qa, qb, alpha, beta);
    } catch (const fl::Error& e) {
      return fail(std::string("threw ") + e.what() + " for " + qa.to_text() + " / " + qb.to_text());
    }
    const auto& q = out.condition;
    if (!o_rel(out.family, n, q.at(alpha), q.at(beta)))
      return fail("R_n fails for " + qa.to_text() + " / " + qb.to_text());
    if (auto why = o_qcond(q, n + 1)) return fail(*why);
    if (!o_qleq(out.family, qa, q) || !o_qleq(out.family, qb, q)) return fail("link output is not above both inputs");
    ++done;
  }
  return {true, std::to_string(done) + " pairs"};
}

// ---------------------------------------------------------------------------
// 4. Intersection norms.

Outcome c4_norms() {
  const auto t0 = Clock::now();
  const FinSeq node{};
  std::uint64_t sig_count = 0, checks = 0, nonempty_checks = 0;

  auto verify = [&](unsigned f, unsigned g, unsigned m, const std::vector<fl::NatSet>& sets, const fl::TreeParams& p,
                    unsigned amax, unsigned u) -> std::optional<std::string> {
    std::vector<fl::SuccSet> ss;
    for (const auto& r : sets) ss.push_back(fl::SuccSet{node, r});
    const auto res = fl::intersect_norm(p, ss);
    ++checks;
    const std::string at = " at f=" + std::to_string(f) + " g=" + std::to_string(g) + " m=" + std::to_string(m);
    // nor = g / |removed|, infinite for nothing removed
    if (u == 0) {
      if (!res.norm.infinite) return "finite norm for a full set" + at;
    } else {
      if (res.norm.infinite || res.norm.value != fl::ExactRational(fl::BigInt(g), fl::BigInt(u)))
        return "norm " + res.norm.to_string() + " is not g/" + std::to_string(u) + at;
      // g/u >= (g/amax)/m  <=>  u <= m * amax
      if (!(u <= m * amax)) return "norm below zeta/m" + at;
      const fl::Norm zeta = fl::Norm::finite(fl::ExactRational(fl::BigInt(g), fl::BigInt(amax)));
      if (res.norm < fl::Norm::finite(zeta.value / m)) return "library norm below zeta/m" + at;
    }
    if (res.nonempty != (u < f)) return "nonempty flag wrong" + at;
    // hypotheses of the nonemptiness part: every norm >= 1 and m <= P with f > g * P
    const unsigned P = (f - 1) / g;
    if (amax <= g && m <= P) {
      ++nonempty_checks;
      if (!res.nonempty) return "empty intersection under the hypotheses" + at;
    }
    return std::nullopt;
  };

  for (unsigned f = 1; f <= 12; ++f) {
    for (unsigned m = 1; m <= 4; ++m) {
      // Signatures: sorted sizes a_1 <= ... <= a_m and union size u with
      // max a <= u <= min(f, sum a). One explicit realization each.
      struct Sig {
        std::vector<fl::NatSet> sets;
        unsigned amax, u;
      };
      std::vector<Sig> sigs;
      std::vector<unsigned> a(m, 0);
      std::function<void(unsigned, unsigned)> rec = [&](unsigned l, unsigned lo) {
        if (l == m) {
          const unsigned amax = a.back();
          unsigned sum = 0;
          for (auto v : a) sum += v;
          for (unsigned u = amax; u <= std::min(f, sum); ++u) {
            // largest set is [0, amax); the others draw fresh elements from [amax, u)
            std::vector<fl::NatSet> sets(m);
            for (Nat x = 0; x < amax; ++x) sets[m - 1].insert(x);
            Nat fresh = amax;
            for (unsigned k = 0; k + 1 < m; ++k) {
              const unsigned take = std::min<unsigned>(a[k], u - fresh);
              for (unsigned t = 0; t < take; ++t) sets[k].insert(fresh++);
              for (Nat x = 0; sets[k].size() < a[k]; ++x) sets[k].insert(x);
            }
            if (fresh != u) continue;  // cannot happen when u <= sum a; caught below
            sigs.push_back({std::move(sets), amax, u});
          }
          return;
        }
        for (unsigned v = lo; v <= f; ++v) {
          a[l] = v;
          rec(l + 1, v);
        }
      };
      rec(0, 0);
      for (const auto& s : sigs) {
        fl::NatSet uni;
        for (const auto& r : s.sets) uni.insert(r.begin(), r.end());
        if (uni.size() != s.u) return fail("oracle construction broke at f=" + std::to_string(f));
      }
      sig_count += sigs.size();
      for (unsigned g = 1; g <= 24; ++g) {
        const auto p = fl::TreeParams::custom(fl::ParamMode::Toy, {{node, fl::BigInt(f)}}, {{node, fl::BigInt(g)}});
        for (const auto& s : sigs)
          if (auto why = verify(f, g, m, s.sets, p, s.amax, s.u)) return fail(*why);
      }
    }
  }

  // Every removed-set tuple literally, at a scale where that is cheap.
  std::uint64_t literal = 0;
  for (unsigned f = 1; f <= 5; ++f)
    for (unsigned m = 1; m <= 3; ++m)
      for (unsigned g = 1; g <= 12; ++g) {
        const auto p = fl::TreeParams::custom(fl::ParamMode::Toy, {{node, fl::BigInt(f)}}, {{node, fl::BigInt(g)}});
        const unsigned subsets = 1u << f;
        std::vector<unsigned> masks(m, 0);
        while (true) {
          std::vector<fl::NatSet> sets(m);
          unsigned uni = 0, amax = 0;
          for (unsigned l = 0; l < m; ++l) {
            for (unsigned x = 0; x < f; ++x)
              if (masks[l] >> x & 1) sets[l].insert(x);
            uni |= masks[l];
            amax = std::max<unsigned>(amax, std::popcount(masks[l]));
          }
          if (auto why = verify(f, g, m, sets, p, amax, std::popcount(uni))) return fail("literal: " + *why);
          ++literal;
          unsigned k = 0;
          while (k < m && ++masks[k] == subsets) masks[k++] = 0;
          if (k == m) break;
        }
      }

  const auto rep = fl::norm_lemma_exhaustive(12, 24, 4);
  if (!rep.ok()) return fail("norm_lemma_exhaustive: " + rep.violations.front());
  if (rep.signatures != sig_count)
    return fail("library enumerates " + std::to_string(rep.signatures) + " signatures, oracle " + std::to_string(sig_count));
  const double s = seconds_since(t0);
  if (s >= 120) return fail("took " + fmt_secs(s));
  return {true, std::to_string(sig_count) + " signatures, " + std::to_string(checks) + " checks (" +
                    std::to_string(nonempty_checks) + " nonemptiness, " + std::to_string(literal) + " literal tuples), " +
                    fmt_secs(s)};
}

// ---------------------------------------------------------------------------
// 5. Linked cells. Depth-4 trees as 16-bit leaf masks; the cone of the
// level-k node j covers leaves [j * 2^(D-k), (j+1) * 2^(D-k)).

unsigned cone(std::uint64_t mask, unsigned D, unsigned k, unsigned j) {
  const unsigned span = 1u << (D - k);
  const std::uint64_t bits = span >= 64 ? ~0ULL : ((1ULL << span) - 1);
  return std::popcount((mask >> (j * span)) & bits);
}

std::uint64_t trace_mask(std::uint64_t mask, unsigned D, unsigned k) {
  std::uint64_t out = 0;
  for (unsigned j = 0; j < (1u << k); ++j)
    if (cone(mask, D, k, j)) out |= 1ULL << j;
  return out;
}

std::uint64_t refine_mask(std::uint64_t mask, unsigned d, unsigned D) {
  std::uint64_t out = 0;
  const unsigned span = 1u << (D - d);
  for (unsigned i = 0; i < (1u << d); ++i)
    if (mask >> i & 1)
      for (unsigned k = 0; k < span; ++k) out |= 1ULL << (i * span + k);
  return out;
}

// membership in U(W, n, m) for a tree at depth D >= m
bool o_in_cell(std::uint64_t S, unsigned D, unsigned n, unsigned m, std::uint64_t W) {
  if (!(n < m) || trace_mask(S, D, m) != W) return false;
  for (unsigned t = 0; t < (1u << n); ++t) {
    const unsigned wt = cone(W, m, n, t);
    // mu(S_t) > W(t) / 2^{m+1}
    if (wt && !((std::uint64_t(cone(S, D, n, t)) << (m + 1)) > (std::uint64_t(wt) << D))) return false;
  }
  return true;
}

fl::ClopenTree tree_of(unsigned d, std::uint64_t mask) {
  return fl::ClopenTree(d, fl::ClopenTree::Bits(std::size_t{1} << d, static_cast<unsigned long>(mask)));
}

Outcome c5_linked() {
  const auto t0 = Clock::now();
  constexpr unsigned D = 4;
  std::uint64_t pairs = 0, cells_seen = 0, memberships = 0;
  for (unsigned m = 1; m <= 4; ++m)
    for (unsigned n = 0; n < m; ++n) {
      std::map<std::uint64_t, std::vector<std::pair<std::uint16_t, fl::P3Condition>>> cells;
      for (std::uint64_t S = 1; S < (1u << 16); ++S) {
        const std::uint64_t W = trace_mask(S, D, m);
        const bool want = o_in_cell(S, D, n, m, W);
        const fl::P3Condition c(n, tree_of(D, S));
        const fl::CellIndex cell{n, m, tree_of(m, W)};
        if (fl::in_cell(c, cell) != want) return fail("in_cell disagrees with the oracle");
        ++memberships;
        if (want) cells[W].emplace_back(static_cast<std::uint16_t>(S), c);
      }
      for (const auto& [W, members] : cells) {
        ++cells_seen;
        const fl::CellIndex cell{n, m, tree_of(m, W)};
        for (std::size_t a = 0; a < members.size(); ++a)
          for (std::size_t b = a; b < members.size(); ++b) {
            const std::uint64_t Sa = members[a].first, Sb = members[b].first, I = Sa & Sb;
            fl::P3Condition out;
            try {
              out = fl::linked_witness(members[a].second, members[b].second, cell);
            } catch (const fl::Error& e) {
              return fail(std::string("linked_witness threw: ") + e.what());
            }
            if (out.n != n || out.tree.depth() != D || out.tree.leaves().to_ulong() != I)
              return fail("witness is not the intersection");
            for (unsigned t = 0; t < (1u << n); ++t) {
              const std::int64_t wt = cone(W, m, n, t);
              if (!wt) continue;
              // mu(I_t) >= mu_a(t) + mu_b(t) - W(t)/2^m > 0, in units of 2^-4
              const std::int64_t got = cone(I, D, n, t);
              const std::int64_t lower = std::int64_t(cone(Sa, D, n, t)) + cone(Sb, D, n, t) - (wt << (D - m));
              if (got < lower || got <= 0) return fail("measure bound fails");
            }
            ++pairs;
          }
      }
    }

  // Every condition of depth <= 4, in every representation, lies in a cell.
  std::uint64_t conds = 0;
  for (unsigned d = 0; d <= 4; ++d)
    for (std::uint64_t S = 1; S < (1ULL << (1u << d)); ++S)
      for (unsigned n = 0; n <= d; ++n) {
        const fl::P3Condition c(n, tree_of(d, S));
        const auto cell = fl::cell_of(c);
        if (!fl::in_cell(c, cell)) return fail("condition outside its own cell");
        const unsigned DD = std::max<unsigned>(d, static_cast<unsigned>(cell.m));
        if (cell.n != n || cell.w.depth() != cell.m ||
            !o_in_cell(refine_mask(S, d, DD), DD, n, cell.m, cell.w.leaves().to_ulong()))
          return fail("oracle rejects cell_of at depth " + std::to_string(d));
        ++conds;
      }
  return {true, std::to_string(cells_seen) + " cells, " + std::to_string(pairs) + " unordered pairs, " +
                    std::to_string(memberships) + " membership checks, " + std::to_string(conds) +
                    " conditions covered, " + fmt_secs(seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// 6. Centered merge. Branches with prefix length <= 6 as 6-bit integers,
// bit 5 being position 0.

fl::Branch branch_of(unsigned v) {
  std::string s(6, '0');
  for (unsigned k = 0; k < 6; ++k) s[k] = (v >> (5 - k) & 1) ? '1' : '0';
  return fl::Branch(s);
}

unsigned o_h(unsigned x, unsigned y) { return 5 - (31 - std::countl_zero(x ^ y)); }

std::optional<std::string> check_merge(std::size_t n, const std::vector<std::vector<unsigned>>& members) {
  std::vector<fl::P4Condition> cs;
  std::set<unsigned> uni;
  for (const auto& mem : members) {
    std::set<fl::Branch> F;
    for (auto v : mem) F.insert(branch_of(v));
    cs.emplace_back(n, std::move(F));
    uni.insert(mem.begin(), mem.end());
  }
  std::size_t m = n;
  for (auto a : uni)
    for (auto b : uni)
      if (a < b) m = std::max<std::size_t>(m, o_h(a, b) + 1);
  fl::P4Condition out;
  try {
    out = fl::p4_merge(cs);
  } catch (const fl::Error& e) {
    return std::string("p4_merge threw: ") + e.what();
  }
  std::set<fl::Branch> F;
  for (auto v : uni) F.insert(branch_of(v));
  if (out.n != m || out.F != F) return std::string("merge is not (m, union)");
  for (std::size_t k = 0; k < cs.size(); ++k) {
    // c <= out: n <= m, F within the union, equal n-traces
    std::set<unsigned> tc, tu;
    for (auto v : members[k]) tc.insert(v >> (6 - n));
    for (auto v : uni) tu.insert(v >> (6 - n));
    if (!(n <= out.n) || tc != tu) return std::string("oracle order fails");
    if (!fl::p4_leq(cs[k], out)) return std::string("p4_leq rejects an input");
  }
  return std::nullopt;
}

Outcome c6_centered() {
  const auto t0 = Clock::now();
  std::uint64_t sets = 0, lists = 0, sampled = 0;
  // Single-trace cells: every set of at most 5 members.
  for (std::size_t n = 0; n <= 3; ++n)
    for (unsigned t = 0; t < (1u << n); ++t) {
      std::vector<unsigned> mem;
      for (unsigned v = 0; v < 64; ++v)
        if ((v >> (6 - n)) == t) mem.push_back(v);
      std::vector<std::size_t> pick;
      std::function<std::optional<std::string>(std::size_t)> rec = [&](std::size_t from) -> std::optional<std::string> {
        if (!pick.empty()) {
          std::vector<std::vector<unsigned>> ms;
          for (auto i : pick) ms.push_back({mem[i]});
          if (auto why = check_merge(n, ms)) return why;
          ++sets;
        }
        if (pick.size() == 5) return std::nullopt;
        for (std::size_t i = from; i < mem.size(); ++i) {
          pick.push_back(i);
          if (auto why = rec(i + 1)) return why;
          pick.pop_back();
        }
        return std::nullopt;
      };
      if (auto why = rec(0)) return fail(*why + " (n=" + std::to_string(n) + ")");
      // At n = 3 also every ordered list with repeats.
      if (n == 3) {
        for (std::size_t len = 1; len <= 5; ++len) {
          std::vector<std::size_t> idx(len, 0);
          while (true) {
            std::vector<std::vector<unsigned>> ms;
            for (auto i : idx) ms.push_back({mem[i]});
            if (auto why = check_merge(n, ms)) return fail(*why + " (list)");
            ++lists;
            std::size_t k = 0;
            while (k < len && ++idx[k] == mem.size()) idx[k++] = 0;
            if (k == len) break;
          }
        }
      }
    }
  // Cells with several traces, sampled.
  std::mt19937_64 rng(606);
  while (sampled < 100000) {
    const std::size_t n = 1 + rng() % 3;
    std::vector<unsigned> T;
    for (unsigned t = 0; t < (1u << n); ++t)
      if (rng() % 2) T.push_back(t);
    if (T.size() < 2) continue;
    const std::size_t r = 1 + rng() % 5;
    std::vector<std::vector<unsigned>> ms(r);
    for (auto& mem : ms)
      for (auto t : T) mem.push_back((t << (6 - n)) | static_cast<unsigned>(rng() % (1u << (6 - n))));
    if (auto why = check_merge(n, ms)) return fail(*why + " (sampled)");
    ++sampled;
  }
  return {true, std::to_string(sets) + " single-trace sets, " + std::to_string(lists) + " ordered lists, " +
                    std::to_string(sampled) + " sampled multi-trace lists, " + fmt_secs(seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// 7. Witness family against F-links.

// x = f_i(y) for some i, evaluated position by position up to where both are constant
bool o_member(const fl::SigmaFamily& fam, const fl::EvConstSeq& x, const fl::EvConstSeq& y) {
  const std::size_t L = std::max(x.prefix().size(), y.prefix().size());
  for (std::size_t i = 0; i <= L + 1; ++i) {
    bool ok = true;
    for (std::size_t k = 0; k <= L && ok; ++k) ok = k < i ? x.value(k) == y.value(k) : x.value(k) == fam.sigma(i, y.value(k));
    if (ok) return true;
  }
  return false;
}

Outcome c7_gadget() {
  const fl::SigmaFamily base = fl::sigma_extend(fl::SigmaFamily(), 100);
  std::mt19937_64 rng(31);
  constexpr std::size_t R = 8;
  std::uint64_t patterns = 0, edges = 0, links = 0;
  for (int trial = 0; trial < 64; ++trial) {
    // thresholds: x_a = f_a(x_b) exactly for a < b <= thr[a]; trial 0 links everything
    std::vector<std::size_t> thr(R);
    for (std::size_t a = 0; a < R; ++a) thr[a] = trial == 0 ? R : a + rng() % (R + 1 - a);
    fl::StarRequest req;
    req.size = R;
    req.phis.assign(R, std::vector<std::optional<Nat>>(R));
    for (std::size_t a = 0; a + 1 < R; ++a) {
      for (std::size_t j = a; j < thr[a]; ++j) req.phis[a][j] = R - 1;
      req.phis[a][R - 1] = R - 1;
    }
    auto [fam, w] = fl::star_witness(base, req);
    std::vector<fl::EvConstSeq> xs;
    for (std::size_t a = 0; a < R; ++a)
      xs.emplace_back(FinSeq(std::vector<Nat>(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(a))), w[R - 1]);
    const auto ps = fl::knaster_witness_family(xs);
    fl::CompatGraph g;
    g.vertices.assign(R, nullptr);
    for (std::size_t a = 0; a < R; ++a)
      for (std::size_t b = a + 1; b < R; ++b) {
        const bool link = o_member(fam, xs[a], xs[b]);
        if (link != (b <= thr[a])) return fail("planted link pattern not realized at " + std::to_string(a) + "," + std::to_string(b));
        const auto lib = fl::f_membership(fam, xs[a], xs[b], fl::kDefaultMembershipBound);
        if (lib.kind == fl::Membership::Kind::Unknown || (lib.kind == fl::Membership::Kind::Yes) != link)
          return fail("f_membership disagrees with the oracle");
        const bool compat = fl::p1_compatible(fam, ps[a], ps[b]);
        if (compat == link) return fail("compatibility is not the complement of links at " + std::to_string(a) + "," + std::to_string(b));
        if (compat) g.edges.push_back({a, b, nullptr});
        edges += compat;
        links += link;
      }
    if (trial == 0) {
      const auto ac = fl::find_antichain(g, R);
      if (!ac.found) return fail("fully linked family has no full antichain");
    }
    ++patterns;
  }
  return {true, std::to_string(patterns) + " link patterns over 8 reals, " + std::to_string(links) + " links, " +
                    std::to_string(edges) + " compatible pairs"};
}

// ---------------------------------------------------------------------------
// 8. Decoding chains.

// The code of a Gamma element: chain length, then per real its prefix
// length, prefix values and tail; zeros after that.
std::vector<Nat> o_code(const fl::GammaElem& x) {
  std::vector<Nat> out{x.chain().size()};
  for (const auto& r : x.chain()) {
    out.push_back(r.prefix().size());
    for (auto v : r.prefix().items()) out.push_back(v);
    out.push_back(r.tail());
  }
  return out;
}

FinSeq o_code_prefix(const fl::GammaElem& x, std::size_t n) {
  auto c = o_code(x);
  c.resize(n, 0);
  return FinSeq(std::move(c));
}

Outcome c8_decode() {
  const fl::GammaElem g1({fl::EvConstSeq(FinSeq{1}, 0)});
  const fl::GammaElem g2({fl::EvConstSeq(FinSeq{0, 2}, 1)});
  const std::vector<fl::GammaElem> elems{g1, g2};
  // prefixes of code(g1) = 1 1 1 0 ..., code(g2) = 1 2 0 2 1 ..., and two strangers
  const std::vector<FinSeq> words{FinSeq{1}, FinSeq{1, 1}, FinSeq{1, 2}, FinSeq{0}, FinSeq{2}};
  std::vector<fl::RCCondition> uni;
  for (unsigned pm = 0; pm < 4; ++pm)
    for (unsigned wm = 0; wm < 32; ++wm) {
      fl::RCCondition q{{{}, 1}, {}};
      for (unsigned k = 0; k < 2; ++k)
        if (pm >> k & 1) q.p.elems.insert(elems[k]);
      for (unsigned k = 0; k < 5; ++k)
        if (wm >> k & 1) q.w.insert(words[k]);
      uni.push_back(q);
    }
  const std::size_t U = uni.size();
  std::vector<std::vector<char>> leq(U, std::vector<char>(U));
  for (std::size_t a = 0; a < U; ++a)
    for (std::size_t b = 0; b < U; ++b) leq[a][b] = fl::rc_leq(uni[a], uni[b]);

  const std::vector<fl::RCCondition> extras{uni[5], uni[37], uni[70], uni[127]};
  std::uint64_t chains = 0, returned = 0;
  std::vector<std::size_t> chain;
  std::function<std::optional<std::string>()> rec = [&]() -> std::optional<std::string> {
    std::set<FinSeq> r;
    std::vector<fl::RCCondition> pool;
    for (auto i : chain) {
      r.insert(uni[i].w.begin(), uni[i].w.end());
      pool.push_back(uni[i]);
    }
    pool.insert(pool.end(), extras.begin(), extras.end());
    const auto dec = fl::rc_decode(r, pool);
    ++chains;
    for (auto i : chain)
      if (std::find(dec.begin(), dec.end(), uni[i]) == dec.end()) return std::string("decode drops a chain member");
    std::set<std::size_t> lens;
    for (const auto& s : r) lens.insert(s.size());
    for (const auto& q : dec) {
      ++returned;
      for (const auto& s : q.w)
        if (!r.count(s)) return std::string("returned w is not inside r");
      for (const auto& x : q.p.elems)
        for (auto n : lens) {
          const FinSeq pre = o_code_prefix(x, n);
          if (r.count(pre) != q.w.count(pre)) return std::string("prefix equivalence fails");
        }
    }
    if (chain.size() == 5) return std::nullopt;
    for (std::size_t c = 0; c < U; ++c) {
      bool above = true;
      for (auto i : chain) above &= i != c && leq[i][c];
      if (!above) continue;
      chain.push_back(c);
      if (auto why = rec()) return why;
      chain.pop_back();
    }
    return std::nullopt;
  };
  if (auto why = rec()) return fail(*why);
  return {true, std::to_string(chains) + " chains, " + std::to_string(returned) + " returned conditions checked"};
}

// ---------------------------------------------------------------------------
// 9. Translation.

Outcome c9_translation() {
  std::mt19937_64 rng(9001);
  auto rnd_q = [&] {
    const long long num = static_cast<long long>(rng() % 13) - 6;
    const long long den = 1 + static_cast<long long>(rng() % 4);
    return fl::ExactRational(num, den);
  };
  auto rnd_cond = [&] {
    while (true) {
      fl::P1StarCondition p;
      for (std::size_t k = 0, c = rng() % 4; k < c; ++k) {
        std::set<fl::ExactRational> terms;
        for (std::size_t t = 0, len = 1 + rng() % 5; t < len; ++t) terms.insert(rnd_q());
        auto lim = rnd_q();
        if (terms.count(lim)) continue;
        p.insert(fl::ConvSeq(std::vector<fl::ExactRational>(terms.begin(), terms.end()), lim));
      }
      if (fl::p1star_check(p)) return p;
    }
  };
  auto o_valid = [](const fl::P1StarCondition& p) {
    for (const auto& s : p)
      for (const auto& t : p) {
        if (s == t) continue;
        for (const auto& v : t.terms())
          if (v == s.limit()) return false;
      }
    return true;
  };
  int nonzero = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p1 = rnd_cond(), p2 = rnd_cond();
    const auto d = fl::find_translation(p1, p2);
    nonzero += d != 0;
    auto u = fl::translate(p1, d);
    u.insert(p2.begin(), p2.end());
    if (!o_valid(u) || !fl::p1star_check(u)) return fail("union fails the invariant at trial " + std::to_string(trial));
  }
  return {true, "1000 pairs, " + std::to_string(nonzero) + " needed d != 0"};
}

// ---------------------------------------------------------------------------
// 10. Ordinals. Oracle ordinals are lists of (exponent, coefficient) with
// exponents w*p + q stored as (p, q).

using OExp = std::pair<unsigned, unsigned>;
using OOrd = std::vector<std::pair<OExp, unsigned>>;

OOrd o_add(const OOrd& a, const OOrd& b) {
  if (b.empty()) return a;
  const OExp lead = b.front().first;
  OOrd out;
  for (const auto& t : a)
    if (t.first > lead) out.push_back(t);
  for (const auto& t : a)
    if (t.first == lead) {
      out.push_back({lead, t.second + b.front().second});
      out.insert(out.end(), b.begin() + 1, b.end());
      return out;
    }
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// the gamma with a + gamma = b, for a <= b
OOrd o_sub(const OOrd& a, const OOrd& b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  if (k == a.size()) return OOrd(b.begin() + static_cast<std::ptrdiff_t>(k), b.end());
  OOrd out;
  if (a[k].first == b[k].first) {
    out.push_back({b[k].first, b[k].second - a[k].second});
    out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(k) + 1, b.end());
  } else {
    out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(k), b.end());
  }
  return out;
}

fl::OrdinalCNF to_lib(const OOrd& o) {
  std::vector<fl::OrdinalCNF::Term> ts;
  for (const auto& [e, c] : o) {
    std::vector<fl::OrdinalCNF::Term> et;
    if (e.first) et.push_back({fl::OrdinalCNF::finite(1), e.first});
    if (e.second) et.push_back({fl::OrdinalCNF(), e.second});
    ts.push_back({fl::OrdinalCNF::from_terms(std::move(et)), c});
  }
  return fl::OrdinalCNF::from_terms(std::move(ts));
}

Outcome c10_ordinals() {
  const std::vector<OExp> exps{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2}, {2, 0}};
  std::vector<OOrd> uni{{}};
  for (std::size_t i = 0; i < exps.size(); ++i)
    for (unsigned c = 1; c <= 3; ++c) {
      uni.push_back({{exps[i], c}});
      for (std::size_t j = 0; j < i; ++j)
        for (unsigned d = 1; d <= 3; ++d) uni.push_back({{exps[i], d}, {exps[j], c}});
    }
  std::vector<fl::OrdinalCNF> lib;
  for (const auto& o : uni) lib.push_back(to_lib(o));
  // 1 + w = w
  if (!(fl::ord_add(fl::OrdinalCNF::finite(1), fl::OrdinalCNF::omega()) == fl::OrdinalCNF::omega()))
    return fail("1 + w != w");
  std::uint64_t sums = 0, subs = 0, triples = 0;
  const std::size_t U = uni.size();
  std::vector<std::vector<fl::OrdinalCNF>> sum(U, std::vector<fl::OrdinalCNF>(U));
  for (std::size_t a = 0; a < U; ++a)
    for (std::size_t b = 0; b < U; ++b) {
      sum[a][b] = fl::ord_add(lib[a], lib[b]);
      if (!(sum[a][b] == to_lib(o_add(uni[a], uni[b])))) return fail("ord_add at " + lib[a].to_string() + " + " + lib[b].to_string());
      ++sums;
      // lexicographic order on (exponent, coefficient) lists is the ordinal order
      const bool le = lib[a] <= lib[b];
      if (le != (uni[a] <= uni[b])) return fail("comparison at " + lib[a].to_string() + ", " + lib[b].to_string());
      if (le) {
        const auto g = fl::ord_left_subtract(lib[a], lib[b]);
        if (!(g == to_lib(o_sub(uni[a], uni[b]))) || !(fl::ord_add(lib[a], g) == lib[b]))
          return fail("left subtraction at " + lib[a].to_string() + ", " + lib[b].to_string());
        ++subs;
      } else {
        bool threw = false;
        try {
          (void)fl::ord_left_subtract(lib[a], lib[b]);
        } catch (const fl::SubtractUnderflow&) {
          threw = true;
        }
        if (!threw) return fail("no underflow for " + lib[a].to_string() + " - " + lib[b].to_string());
      }
    }
  for (std::size_t a = 0; a < U; ++a)
    for (std::size_t b = 0; b < U; ++b) {
      for (std::size_t c = 0; c < U; ++c) {
        if (!(fl::ord_add(sum[a][b], lib[c]) == fl::ord_add(lib[a], sum[b][c])))
          return fail("associativity at " + lib[a].to_string() + ", " + lib[b].to_string() + ", " + lib[c].to_string());
        ++triples;
      }
    }

  // Fast accept against the exact merge on random Q* pairs.
  std::uint64_t pairs = 0, fast = 0, compatible = 0;
  for (const char* d : {"w", "w^2", "w^3"}) {
    const auto delta = fl::OrdinalCNF::parse(d);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      fl::PosetHandle h{fl::PosetKind::QStar, {}};
      h.params.delta = d;
      h.params.seed = seed;
      const auto cs = fl::Poset(h).generate(50);
      for (const auto& ja : cs)
        for (const auto& jb : cs) {
          const auto x = ja.get<fl::QStarCondition>(), y = jb.get<fl::QStarCondition>();
          const auto dec = fl::qstar_decide(x, y, delta);
          if (dec.compatible != fl::qstar_compatible_exact(x, y, delta))
            return fail(std::string("fast path disagrees under delta = ") + d);
          ++pairs;
          fast += dec.fast_path;
          compatible += dec.compatible;
        }
    }
  }
  return {true, std::to_string(U) + " ordinals, " + std::to_string(sums) + " sums, " + std::to_string(subs) +
                    " subtractions, " + std::to_string(triples) + " triples; " + std::to_string(pairs) + " Q* pairs (" +
                    std::to_string(fast) + " fast accepts, " + std::to_string(compatible) + " compatible)"};
}

// ---------------------------------------------------------------------------
// 11. Coloring.

Outcome c11_coloring() {
  // bit k is the top bit of x_{k+1}, stepping the LCG one state at a time
  std::vector<int> bits;
  std::uint64_t x = 1;
  for (int k = 0; k < 200; ++k) {
    x = 6364136223846793005ULL * x + 1442695040888963407ULL;
    bits.push_back(static_cast<int>(x >> 63));
  }
  auto pair = [](std::uint64_t a, std::uint64_t b) { return (a + b) * (a + b + 1) / 2 + b; };
  auto col = [&](Nat a, Nat b) { return bits[pair(std::max(a, b), std::min(a, b))]; };
  const fl::BitSource src(1);
  std::uint64_t checks = 0;
  for (unsigned m1 = 0; m1 < 128; ++m1)
    for (unsigned m2 = 0; m2 < 128; ++m2) {
      std::set<Nat> H1, H2;
      for (Nat v = 0; v < 7; ++v) {
        if (m1 >> v & 1) H1.insert(v);
        if (m2 >> v & 1) H2.insert(v);
      }
      const unsigned u = m1 | m2;
      for (int i = 0; i < 2; ++i) {
        bool want = true;
        for (Nat a = 0; a < 7; ++a)
          for (Nat b = 0; b < a; ++b)
            if ((u >> a & 1) && (u >> b & 1) && col(a, b) != i) want = false;
        if (fl::homog_compatible(src, H1, H2, i) != want) return fail("masks " + std::to_string(m1) + ", " + std::to_string(m2));
        ++checks;
      }
    }
  const auto t0 = Clock::now();
  std::string found;
  for (int i = 0; i < 2; ++i) {
    const auto t = fl::find_non_transitive(src, i, 64);
    if (!t) return fail("no non-transitive triple for color " + std::to_string(i));
    auto homog = [&](const std::set<Nat>& A, const std::set<Nat>& B) {
      std::set<Nat> u = A;
      u.insert(B.begin(), B.end());
      for (auto a : u)
        for (auto b : u)
          if (b < a && col(a, b) != i) return false;
      return true;
    };
    if (!homog(t->h1, t->h2) || !homog(t->h2, t->h3) || homog(t->h1, t->h3))
      return fail("triple does not verify edge by edge");
    found += (found.empty() ? "" : ", ") + std::to_string(*t->h1.begin()) + "/" + std::to_string(*t->h2.begin()) + "/" +
             std::to_string(*t->h3.begin());
  }
  const double s = seconds_since(t0);
  if (s >= 10) return fail("search took " + fmt_secs(s));
  return {true, std::to_string(checks) + " subset pairs; triples " + found + " in " + fmt_secs(s)};
}

// ---------------------------------------------------------------------------
// 12. Determinism of the CLI.

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome c12_determinism() {
  namespace fs = std::filesystem;
  const std::string cli = FORCING_LAB_CLI;
  const fs::path root = fs::temp_directory_path() / ("forcing_lab_accept_" + std::to_string(::getpid()));
  std::vector<std::string> cmds;
  for (const auto& [kind, name] : fl::kind_names()) {
    const std::string g = name + ".json";
    cmds.push_back("gen --poset " + name + " --seed 5 --count 6 --out " + g);
    cmds.push_back("check --in " + g + " --out " + name + "-check.json");
    cmds.push_back("compat --in " + g + " --out " + name + "-graph.json");
    cmds.push_back("compat --in " + g + " --out " + name + "-graph.dot");
    cmds.push_back("antichain --in " + g + " --size 2 --out " + name + "-antichain.json");
  }
  for (const char* k : {"p3", "p4", "hechler"})
    cmds.push_back(std::string("decompose --in ") + k + ".json --out " + k + "-cells.json");
  cmds.push_back("amalgamate --in knaster.json --pair 0 1 --out amalgam.json");
  cmds.push_back("compat --in knaster.json --search-bound 2 --out knaster-search.json");
  cmds.push_back("generic --poset knaster --seed 3 --steps 12 --out generic.json");
  cmds.push_back("verify --in p4-graph.json > verify-graph.txt");
  cmds.push_back("verify ordinal-arith > verify-suite.txt");

  std::vector<std::map<std::string, std::uint64_t>> runs;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / std::to_string(run);
    fs::create_directories(dir);
    for (const auto& c : cmds) {
      const std::string line = "cd '" + dir.string() + "' && '" + cli + "' " + c + (c.find('>') == std::string::npos ? " >/dev/null" : "");
      const int rc = std::system(line.c_str());
      if (rc != 0) return fail("command failed: " + c);
    }
    std::map<std::string, std::uint64_t> hashes;
    for (const auto& e : fs::directory_iterator(dir)) hashes[e.path().filename().string()] = fnv1a(slurp(e.path()));
    runs.push_back(std::move(hashes));
  }
  fs::remove_all(root);
  if (runs[0].size() != runs[1].size()) return fail("runs produced different file sets");
  for (const auto& [name, h] : runs[0])
    if (runs[1].at(name) != h) return fail(name + " differs between runs");
  return {true, std::to_string(cmds.size()) + " commands, " + std::to_string(runs[0].size()) + " files identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"star construction covers the schedule", c1_star},
      {"aligned amalgamation", c2_amalgamation},
      {"linking forces R_n", c3_linking},
      {"intersection norm bounds", c4_norms},
      {"linked cells, m <= 4", c5_linked},
      {"centered merge", c6_centered},
      {"witness family vs F-links", c7_gadget},
      {"decoding chains", c8_decode},
      {"translation", c9_translation},
      {"ordinal arithmetic and Q* fast path", c10_ordinals},
      {"coloring", c11_coloring},
      {"CLI determinism", c12_determinism}};
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && !only.count(k + 1)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = fail(std::string("uncaught: ") + e.what());
    }
    failed += !o.ok;
    std::cout << (o.ok ? "PASS " : "FAIL ") << "criterion " << (k + 1) << ": " << criteria[k].first << " (" << o.detail
              << ")" << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria pass")) << std::endl;
  return failed ? 1 : 0;
}
