#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "forcing_lab/errors.hpp"

namespace forcing_lab {

using Nat = std::uint64_t;

/// A finite sequence of naturals, an element of omega^{<omega}.
class FinSeq {
 public:
  FinSeq() = default;
  FinSeq(std::initializer_list<Nat> items) : items_(items) {}
  explicit FinSeq(std::vector<Nat> items) : items_(std::move(items)) {}

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  Nat operator[](std::size_t k) const { return items_[k]; }
  const std::vector<Nat>& items() const { return items_; }

  /// s restricted to its first k entries; k must not exceed the length.
  FinSeq restrict(std::size_t k) const {
    if (k > items_.size()) {
      throw PreconditionError("restriction length exceeds sequence length");
    }
    return FinSeq(std::vector<Nat>(items_.begin(), items_.begin() + k));
  }

  FinSeq appended(Nat v) const {
    FinSeq out = *this;
    out.items_.push_back(v);
    return out;
  }

  bool is_prefix_of(const FinSeq& other) const {
    return items_.size() <= other.items_.size() &&
           std::equal(items_.begin(), items_.end(), other.items_.begin());
  }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < items_.size(); ++k) {
      if (k) os << ' ';
      os << items_[k];
    }
    return os.str();
  }

  auto operator<=>(const FinSeq&) const = default;
  bool operator==(const FinSeq&) const = default;

 private:
  std::vector<Nat> items_;
};

/// An eventually constant point of Baire space: prefix followed by tail^omega.
/// Stored canonically, with trailing prefix entries equal to the tail stripped,
/// so structural equality is equality of infinite sequences.
class EvConstSeq {
 public:
  EvConstSeq() = default;
  EvConstSeq(FinSeq prefix, Nat tail) : prefix_(std::move(prefix)), tail_(tail) {
    canonicalize();
  }

  static EvConstSeq constant(Nat v) { return EvConstSeq(FinSeq{}, v); }

  const FinSeq& prefix() const { return prefix_; }
  Nat tail() const { return tail_; }

  Nat value(std::size_t k) const { return k < prefix_.size() ? prefix_[k] : tail_; }

  FinSeq restrict(std::size_t n) const {
    std::vector<Nat> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = value(k);
    return FinSeq(std::move(out));
  }

  std::string to_string() const { return "[" + prefix_.to_string() + " | " + std::to_string(tail_) + "]"; }

  auto operator<=>(const EvConstSeq&) const = default;
  bool operator==(const EvConstSeq&) const = default;

 private:
  void canonicalize() {
    std::vector<Nat> items = prefix_.items();
    while (!items.empty() && items.back() == tail_) items.pop_back();
    prefix_ = FinSeq(std::move(items));
  }

  FinSeq prefix_;
  Nat tail_ = 0;
};

/// First index where x and y differ, or nullopt when they are equal.
inline std::optional<std::size_t> first_disagreement(const EvConstSeq& x, const EvConstSeq& y) {
  const std::size_t len = std::max(x.prefix().size(), y.prefix().size());
  for (std::size_t k = 0; k < len; ++k) {
    if (x.value(k) != y.value(k)) return k;
  }
  if (x.tail() != y.tail()) return len;
  return std::nullopt;
}

}  // namespace forcing_lab
