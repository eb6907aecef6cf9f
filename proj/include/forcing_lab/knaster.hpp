#pragma once

// The poset Q of finite index -> sequence maps with a common length, its
// order, and the constructive common extensions: amalgamation of aligned
// pairs, one-level extension, and amalgamation that forces a link
// x_alpha = f_n(x_beta).

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/seq.hpp"
#include "forcing_lab/sigma_family.hpp"

namespace forcing_lab {

/// A condition of Q. Indices stand in for countable ordinals.
class QCondition {
 public:
  QCondition() = default;

  /// Validates: every entry has length `level` and entries are pairwise distinct.
  QCondition(std::map<Nat, FinSeq> entries, std::size_t level)
      : entries_(std::move(entries)), level_(level) {
    std::set<FinSeq> seen;
    for (const auto& [idx, s] : entries_) {
      if (s.size() != level_) {
        throw InvalidCondition("entry " + std::to_string(idx) + " has length " +
                               std::to_string(s.size()) + ", expected " + std::to_string(level_));
      }
      if (!seen.insert(s).second) {
        throw InvalidCondition("entries repeat the sequence <" + s.to_string() + ">");
      }
    }
  }

  const std::map<Nat, FinSeq>& entries() const { return entries_; }
  std::size_t level() const { return level_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(Nat idx) const { return entries_.count(idx) != 0; }
  const FinSeq& at(Nat idx) const { return entries_.at(idx); }

  std::set<Nat> domain() const {
    std::set<Nat> out;
    for (const auto& kv : entries_) out.insert(kv.first);
    return out;
  }

  /// Canonical text: a `# level n` header, then sorted `index: v0 ... v_{n-1}` lines.
  std::string to_text() const {
    std::ostringstream os;
    os << "# level " << level_ << "\n";
    for (const auto& [idx, s] : entries_) {
      os << idx << ":";
      for (auto v : s.items()) os << ' ' << v;
      os << "\n";
    }
    return os.str();
  }

  static QCondition from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::optional<std::size_t> level;
    std::map<Nat, FinSeq> entries;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::istringstream hs(line.substr(1));
        std::string word;
        std::size_t n = 0;
        if (!(hs >> word >> n) || word != "level") throw ParseError("bad header: " + line);
        level = n;
        continue;
      }
      const auto colon = line.find(':');
      if (colon == std::string::npos) throw ParseError("missing ':' in line: " + line);
      const Nat idx = std::stoull(line.substr(0, colon));
      std::istringstream vs(line.substr(colon + 1));
      std::vector<Nat> vals;
      Nat v;
      while (vs >> v) vals.push_back(v);
      if (!entries.emplace(idx, FinSeq(std::move(vals))).second) {
        throw ParseError("duplicate index " + std::to_string(idx));
      }
    }
    if (!level) {
      if (entries.empty()) throw ParseError("empty condition needs a '# level n' header");
      level = entries.begin()->second.size();
    }
    return QCondition(std::move(entries), *level);
  }

  bool operator==(const QCondition&) const = default;
  auto operator<=>(const QCondition&) const = default;

 private:
  std::map<Nat, FinSeq> entries_;
  std::size_t level_ = 0;
};

/// q <= p: p is stronger. Domains grow, entries end-extend, and every R_i
/// relation (i < n(q)) between entries of q survives in p.
inline bool q_leq(const SigmaFamily& fam, const QCondition& q, const QCondition& p) {
  if (q.level() > p.level()) return false;
  for (const auto& [idx, s] : q.entries()) {
    if (!p.contains(idx) || !s.is_prefix_of(p.at(idx))) return false;
  }
  for (auto a = q.entries().begin(); a != q.entries().end(); ++a) {
    for (auto b = std::next(a); b != q.entries().end(); ++b) {
      for (std::size_t i = 0; i < q.level(); ++i) {
        if (rel_R(fam, i, a->second, b->second) &&
            !rel_R(fam, i, p.at(a->first), p.at(b->first))) {
          return false;
        }
      }
    }
  }
  return true;
}

struct Amalgamation {
  QCondition condition;
  SigmaFamily family;            // possibly extended by an on-demand block
  std::vector<Nat> appended;     // n_j appended to the j-th index of the union
  StarRequest request;           // the phi_i read off the merged condition
};

/// Reason two conditions are not aligned, or nullopt when they are: equal
/// levels, agreement on the common domain, and every common index below every
/// index in only one of the domains.
inline std::optional<std::string> alignment_failure(const QCondition& qa, const QCondition& qb) {
  if (qa.level() != qb.level()) return "levels differ";
  std::optional<Nat> max_common, min_private;
  for (const auto& [idx, s] : qa.entries()) {
    if (qb.contains(idx)) {
      if (qb.at(idx) != s) return "entries differ at common index " + std::to_string(idx);
      max_common = std::max(max_common.value_or(idx), idx);
    } else {
      min_private = std::min(min_private.value_or(idx), idx);
    }
  }
  for (const auto& [idx, s] : qb.entries()) {
    if (!qa.contains(idx)) min_private = std::min(min_private.value_or(idx), idx);
  }
  if (max_common && min_private && *max_common > *min_private) {
    return "common index " + std::to_string(*max_common) + " lies above private index " +
           std::to_string(*min_private);
  }
  return std::nullopt;
}

namespace detail {

struct LinkSpec {
  Nat alpha, beta;
};

// Merge, read off phi_i from R_i relations inside each side, optionally add
// phi_n(beta slot) = alpha slot, obtain a (*) witness and append it.
inline Amalgamation amalgamate_impl(SigmaFamily fam, const QCondition& qa, const QCondition& qb,
                                    std::optional<LinkSpec> link, StarSearchLimits limits) {
  std::map<Nat, FinSeq> merged = qa.entries();
  for (const auto& kv : qb.entries()) merged.emplace(kv);
  std::vector<Nat> order;
  std::vector<FinSeq> seqs;
  for (const auto& [idx, s] : merged) {
    order.push_back(idx);
    seqs.push_back(s);
  }
  const std::size_t N = order.size();
  const std::size_t n = qa.level();

  StarRequest req;
  req.size = N;
  req.phis.assign(n + (link ? 1 : 0), std::vector<std::optional<Nat>>(N));
  auto same_side = [&](Nat x, Nat y) {
    return (qa.contains(x) && qa.contains(y)) || (qb.contains(x) && qb.contains(y));
  };
  for (std::size_t j0 = 0; j0 < N; ++j0) {
    for (std::size_t j1 = 0; j1 < j0; ++j1) {
      if (!same_side(order[j0], order[j1])) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (!rel_R(fam, i, seqs[j1], seqs[j0])) continue;
        auto& slot = req.phis[i][j0];
        if (slot && *slot != j1) {
          throw MultiValuedPhi("phi_" + std::to_string(i) + " at slot " + std::to_string(j0) +
                               " would map to both " + std::to_string(*slot) + " and " +
                               std::to_string(j1));
        }
        slot = j1;
      }
    }
  }
  if (link) {
    const auto pos = [&](Nat idx) {
      return static_cast<Nat>(std::find(order.begin(), order.end(), idx) - order.begin());
    };
    req.phis[n][pos(link->beta)] = pos(link->alpha);
  }

  auto [ext, witness] = star_witness(std::move(fam), req, limits);
  std::map<Nat, FinSeq> out;
  for (std::size_t j = 0; j < N; ++j) out.emplace(order[j], seqs[j].appended(witness[j]));
  return Amalgamation{QCondition(std::move(out), n + 1), std::move(ext), std::move(witness),
                      std::move(req)};
}

}  // namespace detail

/// Common extension of two aligned conditions at level n + 1.
inline Amalgamation amalgamate(SigmaFamily fam, const QCondition& qa, const QCondition& qb,
                               StarSearchLimits limits = {}) {
  if (auto why = alignment_failure(qa, qb)) throw NotAligned(*why);
  return detail::amalgamate_impl(std::move(fam), qa, qb, std::nullopt, limits);
}

/// A stronger condition with the same domain, one level higher, keeping every
/// R_i relation of q.
inline Amalgamation extend_level(SigmaFamily fam, const QCondition& q, StarSearchLimits limits = {}) {
  return detail::amalgamate_impl(std::move(fam), q, q, std::nullopt, limits);
}

/// Amalgamation that also sets sigma_n(q(beta)(n)) = q(alpha)(n), n = n(qa),
/// so the output satisfies q(alpha) R_n q(beta).
inline Amalgamation link_amalgamate(SigmaFamily fam, const QCondition& qa, const QCondition& qb,
                                    Nat alpha, Nat beta, StarSearchLimits limits = {}) {
  if (auto why = alignment_failure(qa, qb)) throw NotAligned(*why);
  if (!qa.contains(alpha)) throw NotAligned("alpha is not in dom(qa)");
  if (!qb.contains(beta)) throw NotAligned("beta is not in dom(qb)");
  if (!(alpha < beta)) throw NotAligned("link needs alpha < beta");
  if (qa.at(alpha) != qb.at(beta)) throw LinkImpossible("qa(alpha) differs from qb(beta)");
  return detail::amalgamate_impl(std::move(fam), qa, qb, detail::LinkSpec{alpha, beta}, limits);
}

// ---------------------------------------------------------------------------
// Mini-generic runs.

/// Dense-set actions applied by a mini-generic run.
struct ExtendAction {};
/// Adds index beta carrying a copy of the current entry at alpha.
struct CopyAction {
  Nat alpha, beta;
};
/// As CopyAction, and forces x_alpha = f_n(x_beta) at the current level n.
struct LinkAction {
  Nat alpha, beta;
};
using GenericAction = std::variant<ExtendAction, CopyAction, LinkAction>;

struct LinkRecord {
  Nat alpha, beta;
  std::size_t index;  // the i of R_i / f_i
};

struct GenericRun {
  std::map<Nat, FinSeq> prefixes;
  QCondition condition;
  SigmaFamily family;
  std::vector<LinkRecord> links;
  std::size_t fallbacks = 0;  // actions that could not apply and extended instead
};

/// Runs `steps` rounds starting from `seed`; round k applies
/// actions[k % actions.size()] (plain extension when the list is empty).
/// Copy/link actions need alpha in the domain and beta above it; otherwise the
/// round falls back to a plain extension. Every round raises the level by one.
inline GenericRun mini_generic(SigmaFamily fam, const QCondition& seed,
                               const std::vector<GenericAction>& actions, std::size_t steps,
                               StarSearchLimits limits = {}) {
  GenericRun run{seed.entries(), seed, std::move(fam), {}, 0};
  for (std::size_t k = 0; k < steps; ++k) {
    const GenericAction act = actions.empty() ? GenericAction{ExtendAction{}} : actions[k % actions.size()];
    const QCondition& p = run.condition;
    std::optional<Amalgamation> next;

    auto split = [&](Nat alpha, Nat beta) -> std::optional<QCondition> {
      if (!p.contains(alpha) || p.contains(beta) || p.entries().rbegin()->first >= beta) {
        return std::nullopt;
      }
      std::map<Nat, FinSeq> side;
      for (const auto& [idx, s] : p.entries()) {
        if (idx < alpha) side.emplace(idx, s);
      }
      side.emplace(beta, p.at(alpha));
      return QCondition(std::move(side), p.level());
    };

    if (const auto* c = std::get_if<CopyAction>(&act)) {
      if (auto qb = split(c->alpha, c->beta)) next = amalgamate(run.family, p, *qb, limits);
    } else if (const auto* l = std::get_if<LinkAction>(&act)) {
      if (auto qb = split(l->alpha, l->beta)) {
        next = link_amalgamate(run.family, p, *qb, l->alpha, l->beta, limits);
        run.links.push_back({l->alpha, l->beta, p.level()});
      }
    }
    if (!next) {
      if (!std::holds_alternative<ExtendAction>(act)) ++run.fallbacks;
      next = extend_level(run.family, p, limits);
    }
    run.condition = std::move(next->condition);
    run.family = std::move(next->family);
  }
  run.prefixes = run.condition.entries();
  return run;
}

}  // namespace forcing_lab
