#pragma once

// The family <sigma_i : i in omega> with property (*), grown block by block,
// together with the maps f_i, the relations R_i and F-membership.
//
// Representation: sigma_i is the identity except inside recorded blocks.
// Blocks tile [0, bound) in order; block b occupies [base, base + extent) and
// constrains sigma_i(base + j) = base + phi_i(j) for the i, j its request
// defines. Points at or above the bound are read as fixed points.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "forcing_lab/errors.hpp"
#include "forcing_lab/seq.hpp"

namespace forcing_lab {

/// A (*)-request: block size N and partial maps phi_i : N -> omega.
/// phis[i][j] == nullopt leaves sigma_i unconstrained at slot j.
struct StarRequest {
  std::size_t size = 0;
  std::vector<std::vector<std::optional<Nat>>> phis;

  static StarRequest total(std::size_t size, const std::vector<std::vector<Nat>>& phis) {
    StarRequest r;
    r.size = size;
    for (const auto& row : phis) {
      if (row.size() != size) throw PreconditionError("phi row length differs from N");
      std::vector<std::optional<Nat>> out(row.begin(), row.end());
      r.phis.push_back(std::move(out));
    }
    return r;
  }

  bool operator==(const StarRequest&) const = default;
};

struct ScheduleConfig {
  std::size_t max_size = 3;  // Nmax
  Nat max_value = 3;         // phi values range below this
  std::uint64_t seed = 0;

  bool operator==(const ScheduleConfig&) const = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  if (m == 1) return 0;
  __int128 t = 0, new_t = 1, r = m, new_r = a;
  while (new_r != 0) {
    __int128 q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

}  // namespace detail

/// Deterministic enumeration of every total request (N, phi_0..phi_{N-1}) with
/// 1 <= N <= max_size and phi values below max_value. Sizes are interleaved
/// round-robin: round r lists the r-th request of every size that still has
/// one, in increasing N. A nonzero seed permutes the requests of each size by
/// an affine bijection of their ranks.
class StarSchedule {
 public:
  explicit StarSchedule(ScheduleConfig config = {}) : config_(config) {
    if (config_.max_size == 0 || config_.max_value == 0) {
      throw BadParams("schedule needs max_size >= 1 and max_value >= 1");
    }
    for (std::size_t n = 1; n <= config_.max_size; ++n) {
      unsigned __int128 c = 1;
      for (std::size_t d = 0; d < n * n; ++d) {
        c *= config_.max_value;
        if (c > (static_cast<unsigned __int128>(1) << 62)) {
          throw BadParams("schedule too large: max_value^(N*N) must stay below 2^62");
        }
      }
      counts_.push_back(static_cast<std::uint64_t>(c));
      std::uint64_t mult = 1, shift = 0;
      if (config_.seed != 0) {
        const std::uint64_t h = detail::splitmix64(config_.seed ^ (n * 0x100000001b3ULL));
        mult = (h | 1) % counts_.back();
        if (mult == 0) mult = 1;
        while (std::gcd(mult, counts_.back()) != 1) ++mult;
        shift = detail::splitmix64(h) % counts_.back();
      }
      mult_.push_back(mult);
      shift_.push_back(shift);
      inv_mult_.push_back(detail::inverse_mod(mult % counts_.back(), counts_.back()));
    }
    length_ = 0;
    for (auto c : counts_) length_ += c;
  }

  const ScheduleConfig& config() const { return config_; }
  std::uint64_t length() const { return length_; }

  StarRequest entry(std::uint64_t k) const {
    if (k >= length_) throw PreconditionError("schedule position out of range");
    // Largest round R with entries_before(R) <= k.
    std::uint64_t lo = 0, hi = *std::max_element(counts_.begin(), counts_.end());
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo + 1) / 2;
      if (entries_before(mid) <= k) lo = mid; else hi = mid - 1;
    }
    const std::uint64_t round = lo;
    std::uint64_t offset = k - entries_before(round);
    for (std::size_t n = 1; n <= config_.max_size; ++n) {
      if (counts_[n - 1] <= round) continue;
      if (offset == 0) return decode(n, permute(n, round));
      --offset;
    }
    throw Error("schedule decoding failed");
  }

  /// Position of a total request in the schedule, if it belongs to it.
  std::optional<std::uint64_t> position_of(const StarRequest& req) const {
    const std::size_t n = req.size;
    if (n == 0 || n > config_.max_size || req.phis.size() != n) return std::nullopt;
    std::uint64_t rank = 0, place = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (req.phis[i].size() != n) return std::nullopt;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& v = req.phis[i][j];
        if (!v || *v >= config_.max_value) return std::nullopt;
        rank += *v * place;
        place *= config_.max_value;
      }
    }
    const std::uint64_t round = unpermute(n, rank);
    std::uint64_t pos = entries_before(round);
    for (std::size_t m = 1; m < n; ++m) {
      if (counts_[m - 1] > round) ++pos;
    }
    return pos;
  }

 private:
  std::uint64_t entries_before(std::uint64_t rounds) const {
    std::uint64_t total = 0;
    for (auto c : counts_) total += std::min(c, rounds);
    return total;
  }

  std::uint64_t permute(std::size_t n, std::uint64_t rank) const {
    const auto c = counts_[n - 1];
    return (detail::mul_mod(rank, mult_[n - 1], c) + shift_[n - 1]) % c;
  }

  std::uint64_t unpermute(std::size_t n, std::uint64_t value) const {
    const auto c = counts_[n - 1];
    const std::uint64_t shifted = (value + c - shift_[n - 1] % c) % c;
    return detail::mul_mod(shifted, inv_mult_[n - 1], c);
  }

  StarRequest decode(std::size_t n, std::uint64_t rank) const {
    StarRequest r;
    r.size = n;
    r.phis.assign(n, std::vector<std::optional<Nat>>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        r.phis[i][j] = rank % config_.max_value;
        rank /= config_.max_value;
      }
    }
    return r;
  }

  ScheduleConfig config_;
  std::vector<std::uint64_t> counts_, mult_, shift_, inv_mult_;
  std::uint64_t length_ = 0;
};

/// One block of the construction: the witness n_j = base + j for its request.
struct SigmaBlock {
  Nat base = 0;
  Nat extent = 0;
  std::uint32_t size = 0;
  std::uint32_t rows = 0;
  std::size_t phi_offset = 0;
  std::int64_t schedule_pos = -1;  // -1 for blocks added on demand
};

class SigmaFamily {
 public:
  explicit SigmaFamily(ScheduleConfig config = {})
      : state_(std::make_shared<State>(config)) {}

  const ScheduleConfig& config() const { return state_->schedule.config(); }
  const StarSchedule& schedule() const { return state_->schedule; }
  Nat bound() const { return state_->bound; }
  std::uint64_t completed_entries() const { return state_->next_entry; }
  const std::vector<SigmaBlock>& blocks() const { return state_->blocks; }
  /// Number of indices i for which some block constrains sigma_i.
  std::size_t index_count() const { return state_->rows; }

  Nat sigma(std::size_t i, Nat x) const {
    const State& s = *state_;
    if (x >= s.bound || i >= s.rows) return x;
    auto it = std::upper_bound(s.blocks.begin(), s.blocks.end(), x,
                               [](Nat v, const SigmaBlock& b) { return v < b.base; });
    const SigmaBlock& b = *(it - 1);
    const Nat j = x - b.base;
    if (j >= b.size || i >= b.rows) return x;
    const std::int64_t v = s.phi[b.phi_offset + i * b.size + j];
    return v < 0 ? x : b.base + static_cast<Nat>(v);
  }

  StarRequest block_request(std::size_t b) const {
    const SigmaBlock& blk = state_->blocks.at(b);
    StarRequest r;
    r.size = blk.size;
    r.phis.assign(blk.rows, std::vector<std::optional<Nat>>(blk.size));
    for (std::size_t i = 0; i < blk.rows; ++i) {
      for (std::size_t j = 0; j < blk.size; ++j) {
        const auto v = state_->phi[blk.phi_offset + i * blk.size + j];
        if (v >= 0) r.phis[i][j] = static_cast<Nat>(v);
      }
    }
    return r;
  }

  std::vector<Nat> block_witness(std::size_t b) const {
    const SigmaBlock& blk = state_->blocks.at(b);
    std::vector<Nat> out(blk.size);
    std::iota(out.begin(), out.end(), blk.base);
    return out;
  }

  /// Block recording the given schedule position, if it has been processed.
  std::optional<std::size_t> block_of_entry(std::uint64_t pos) const {
    if (pos >= state_->next_entry) return std::nullopt;
    std::size_t idx = pos;
    for (std::size_t d : state_->on_demand) {
      if (d <= idx) ++idx; else break;
    }
    return idx;
  }

  const std::vector<std::size_t>& on_demand_blocks() const { return state_->on_demand; }

  /// Processes the next `steps` schedule entries (fewer if it runs out).
  void extend(std::uint64_t steps) {
    State& s = mutable_state();
    for (std::uint64_t k = 0; k < steps && s.next_entry < s.schedule.length(); ++k) {
      const StarRequest req = s.schedule.entry(s.next_entry);
      append_block(s, req, static_cast<std::int64_t>(s.next_entry));
      ++s.next_entry;
    }
  }

  /// Appends a block for an arbitrary request at the current bound and
  /// returns its index. The block witnesses the request by construction.
  std::size_t add_request(const StarRequest& req) {
    for (const auto& row : req.phis) {
      if (row.size() != req.size) throw PreconditionError("phi row length differs from N");
    }
    State& s = mutable_state();
    const std::size_t idx = s.blocks.size();
    append_block(s, req, -1);
    if (s.blocks.size() > idx) s.on_demand.push_back(idx);  // an empty request adds no block
    return idx;
  }

  /// Dense tables: one line per constrained index, values of sigma_i on
  /// [0, bound), then `|` and the line's metadata.
  std::string to_table_text() const {
    std::ostringstream os;
    os << "sigma-family max_size=" << config().max_size << " max_value=" << config().max_value
       << " seed=" << config().seed << " entries=" << completed_entries()
       << " on_demand=" << state_->on_demand.size() << " bound=" << bound() << "\n";
    for (std::size_t i = 0; i < index_count(); ++i) {
      for (Nat x = 0; x < bound(); ++x) os << sigma(i, x) << ' ';
      os << "| i=" << i << " upto=" << bound() << " beyond=identity\n";
    }
    return os.str();
  }

  /// Equality of the constructed tables and construction history.
  friend bool operator==(const SigmaFamily& a, const SigmaFamily& b) {
    if (a.state_ == b.state_) return true;
    const State& x = *a.state_;
    const State& y = *b.state_;
    if (!(x.schedule.config() == y.schedule.config()) || x.bound != y.bound ||
        x.next_entry != y.next_entry || x.rows != y.rows || x.phi != y.phi ||
        x.on_demand != y.on_demand || x.blocks.size() != y.blocks.size()) {
      return false;
    }
    for (std::size_t k = 0; k < x.blocks.size(); ++k) {
      const auto& p = x.blocks[k];
      const auto& q = y.blocks[k];
      if (p.base != q.base || p.extent != q.extent || p.size != q.size || p.rows != q.rows ||
          p.phi_offset != q.phi_offset || p.schedule_pos != q.schedule_pos) {
        return false;
      }
    }
    return true;
  }

 private:
  struct State {
    explicit State(ScheduleConfig config) : schedule(config) {}
    StarSchedule schedule;
    std::vector<SigmaBlock> blocks;
    std::vector<std::int64_t> phi;
    std::vector<std::size_t> on_demand;
    Nat bound = 0;
    std::uint64_t next_entry = 0;
    std::size_t rows = 0;
  };

  State& mutable_state() {
    if (state_.use_count() != 1) state_ = std::make_shared<State>(*state_);
    return *state_;
  }

  // Sets sigma_i(m0 + j) = m0 + phi_i(j) and closes under identity up to
  // m1 = m0 + max(N, 1 + largest phi value).
  static void append_block(State& s, const StarRequest& req, std::int64_t pos) {
    SigmaBlock b;
    b.base = s.bound;
    b.size = static_cast<std::uint32_t>(req.size);
    b.rows = static_cast<std::uint32_t>(req.phis.size());
    b.phi_offset = s.phi.size();
    b.schedule_pos = pos;
    Nat extent = req.size;
    for (const auto& row : req.phis) {
      for (const auto& v : row) {
        if (v) extent = std::max<Nat>(extent, *v + 1);
        s.phi.push_back(v ? static_cast<std::int64_t>(*v) : -1);
      }
    }
    b.extent = extent;
    s.bound += extent;
    s.rows = std::max<std::size_t>(s.rows, b.rows);
    if (b.extent > 0) s.blocks.push_back(b);
    else s.phi.resize(b.phi_offset);
  }

  std::shared_ptr<State> state_;
};

/// Value-returning form of SigmaFamily::extend.
inline SigmaFamily sigma_extend(SigmaFamily fam, std::uint64_t steps) {
  fam.extend(steps);
  return fam;
}

/// Checks a candidate witness for (*) directly against the tables.
inline bool satisfies_star(const SigmaFamily& fam, const StarRequest& req,
                           const std::vector<Nat>& witness) {
  if (witness.size() != req.size) return false;
  std::vector<Nat> sorted = witness;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (std::size_t i = 0; i < req.phis.size(); ++i) {
    for (std::size_t j0 = 0; j0 < req.size; ++j0) {
      const auto& v = req.phis[i][j0];
      if (!v || *v >= req.size) continue;
      if (fam.sigma(i, witness[j0]) != witness[*v]) return false;
    }
  }
  return true;
}

namespace detail {

struct StarConstraint {
  std::size_t index, from, to;
};

inline std::vector<StarConstraint> star_constraints(const StarRequest& req) {
  std::vector<StarConstraint> out;
  for (std::size_t i = 0; i < req.phis.size(); ++i) {
    for (std::size_t j0 = 0; j0 < req.size; ++j0) {
      const auto& v = req.phis[i][j0];
      if (v && *v < req.size) out.push_back({i, j0, static_cast<std::size_t>(*v)});
    }
  }
  return out;
}

// A total request of the schedule whose block also witnesses `req`.
inline std::optional<StarRequest> canonical_completion(const SigmaFamily& fam,
                                                       const StarRequest& req) {
  const auto& cfg = fam.config();
  const std::size_t n = req.size;
  if (n == 0 || n > cfg.max_size) return std::nullopt;
  StarRequest out;
  out.size = n;
  out.phis.assign(n, std::vector<std::optional<Nat>>(n));
  for (std::size_t i = 0; i < std::max(n, req.phis.size()); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::optional<Nat> v;
      if (i < req.phis.size() && req.phis[i][j] && *req.phis[i][j] < n) v = req.phis[i][j];
      if (i >= n) {
        // Rows beyond N are the identity inside a scheduled block.
        if (v && *v != j) return std::nullopt;
        continue;
      }
      if (v) {
        if (*v >= cfg.max_value) return std::nullopt;
        out.phis[i][j] = v;
      } else {
        out.phis[i][j] = j < cfg.max_value ? j : 0;
      }
    }
  }
  return out;
}

}  // namespace detail

struct StarSearchLimits {
  std::uint64_t node_budget = 1 << 15;
};

/// Searches the constructed region [0, bound) for distinct n_0..n_{N-1} with
/// phi_i(j0) = j1 < N implying sigma_i(n_{j0}) = n_{j1}. Recorded blocks are
/// tried first, so a request of the schedule gets its own block back.
inline std::optional<std::vector<Nat>> verify_star(const SigmaFamily& fam, const StarRequest& req,
                                                   StarSearchLimits limits = {}) {
  if (req.size == 0) return std::vector<Nat>{};
  for (const auto& row : req.phis) {
    if (row.size() != req.size) throw PreconditionError("phi row length differs from N");
  }
  const auto& sched = fam.schedule();
  if (auto pos = sched.position_of(req)) {
    if (auto b = fam.block_of_entry(*pos)) return fam.block_witness(*b);
  }
  for (std::size_t b : fam.on_demand_blocks()) {
    if (fam.block_request(b) == req) return fam.block_witness(b);
  }
  if (auto canon = detail::canonical_completion(fam, req)) {
    if (auto pos = sched.position_of(*canon)) {
      if (auto b = fam.block_of_entry(*pos)) {
        auto w = fam.block_witness(*b);
        if (satisfies_star(fam, req, w)) return w;
      }
    }
  }
  const auto constraints = detail::star_constraints(req);
  for (std::size_t b = 0; b < fam.blocks().size(); ++b) {
    const auto& blk = fam.blocks()[b];
    if (blk.extent < req.size) continue;
    std::vector<Nat> w(req.size);
    std::iota(w.begin(), w.end(), blk.base);
    bool ok = true;
    for (const auto& c : constraints) {
      if (fam.sigma(c.index, w[c.from]) != w[c.to]) { ok = false; break; }
    }
    if (ok) return w;
  }

  // Bounded backtracking over the whole region, slots assigned in order.
  const std::size_t n = req.size;
  const Nat bound = fam.bound();
  std::vector<Nat> assign(n);
  std::uint64_t nodes = 0;
  auto consistent = [&](std::size_t upto) {
    for (std::size_t a = 0; a < upto; ++a) {
      if (assign[a] == assign[upto]) return false;
    }
    for (const auto& c : constraints) {
      if (c.from <= upto && c.to <= upto && (c.from == upto || c.to == upto)) {
        if (fam.sigma(c.index, assign[c.from]) != assign[c.to]) return false;
      }
    }
    return true;
  };
  auto forced = [&](std::size_t slot) -> std::optional<Nat> {
    for (const auto& c : constraints) {
      if (c.to == slot && c.from < slot) return fam.sigma(c.index, assign[c.from]);
    }
    return std::nullopt;
  };
  auto search = [&](auto&& self, std::size_t slot) -> bool {
    if (slot == n) return true;
    if (auto f = forced(slot)) {
      if (++nodes > limits.node_budget || *f >= bound) return false;
      assign[slot] = *f;
      return consistent(slot) && self(self, slot + 1);
    }
    for (Nat v = 0; v < bound; ++v) {
      if (++nodes > limits.node_budget) return false;
      assign[slot] = v;
      if (consistent(slot) && self(self, slot + 1)) return true;
    }
    return false;
  };
  if (search(search, 0)) return assign;
  return std::nullopt;
}

/// Witness for `req`, appending an on-demand block when the constructed
/// region has none. Returns the possibly extended family alongside.
inline std::pair<SigmaFamily, std::vector<Nat>> star_witness(SigmaFamily fam,
                                                             const StarRequest& req,
                                                             StarSearchLimits limits = {}) {
  if (auto w = verify_star(fam, req, limits)) return {std::move(fam), std::move(*w)};
  const std::size_t b = fam.add_request(req);
  auto w = fam.block_witness(b);
  return {std::move(fam), std::move(w)};
}

/// f_i on finite sequences: positions below i are kept, the rest go through sigma_i.
inline FinSeq f_apply(const SigmaFamily& fam, std::size_t i, const FinSeq& s) {
  std::vector<Nat> out(s.items());
  for (std::size_t k = i; k < out.size(); ++k) out[k] = fam.sigma(i, out[k]);
  return FinSeq(std::move(out));
}

/// f_i on eventually constant reals.
inline EvConstSeq f_apply(const SigmaFamily& fam, std::size_t i, const EvConstSeq& x) {
  const std::size_t len = std::max(x.prefix().size(), i);
  std::vector<Nat> out(len);
  for (std::size_t k = 0; k < len; ++k) out[k] = k < i ? x.value(k) : fam.sigma(i, x.value(k));
  return EvConstSeq(FinSeq(std::move(out)), fam.sigma(i, x.tail()));
}

/// s R_i t: i < |s| = |t|, s and t agree below i, and s(l) = sigma_i(t(l)) from i on.
inline bool rel_R(const SigmaFamily& fam, std::size_t i, const FinSeq& s, const FinSeq& t) {
  if (s.size() != t.size() || i >= s.size()) return false;
  for (std::size_t l = 0; l < i; ++l) {
    if (s[l] != t[l]) return false;
  }
  for (std::size_t l = i; l < s.size(); ++l) {
    if (s[l] != fam.sigma(i, t[l])) return false;
  }
  return true;
}

struct Membership {
  enum class Kind { Yes, No, Unknown };
  Kind kind = Kind::No;
  std::size_t index = 0;  // meaningful for Yes

  static Membership yes(std::size_t i) { return {Kind::Yes, i}; }
  static Membership no() { return {Kind::No, 0}; }
  static Membership unknown() { return {Kind::Unknown, 0}; }
  bool operator==(const Membership&) const = default;
};

/// Does x = f_i(y) for some i? For x != y only i up to the first disagreement
/// can work, so the answer is exact; for x = y indices below i_max are tried.
inline Membership f_membership(const SigmaFamily& fam, const EvConstSeq& x, const EvConstSeq& y,
                               std::size_t i_max) {
  if (i_max == 0) throw PreconditionError("f_membership needs i_max >= 1");
  const std::size_t len = std::max(x.prefix().size(), y.prefix().size());
  auto matches = [&](std::size_t i) {
    for (std::size_t k = i; k < len; ++k) {
      if (x.value(k) != fam.sigma(i, y.value(k))) return false;
    }
    return x.tail() == fam.sigma(i, y.tail());
  };
  const auto d = first_disagreement(x, y);
  if (d) {
    for (std::size_t i = 0; i <= *d; ++i) {
      if (matches(i)) return Membership::yes(i);
    }
    return Membership::no();
  }
  for (std::size_t i = 0; i < i_max; ++i) {
    if (matches(i)) return Membership::yes(i);
  }
  return Membership::unknown();
}

}  // namespace forcing_lab
