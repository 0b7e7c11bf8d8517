#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <ostream>
#include <utility>

#include "cpnray/token.hpp"

namespace cpnray {

/// Multiset of timed tokens, ordered by (value, timestamp). Untimed tokens
/// order before timed tokens of the same value.
///
/// Counts are strictly positive; removing more than is present throws
/// std::logic_error and leaves the multiset unchanged.
class Multiset {
 public:
  using Entries = std::map<TimedToken, std::int64_t>;

  Multiset() = default;
  Multiset(std::initializer_list<std::pair<std::int64_t, TimedToken>> terms);

  void add(const TimedToken& token, std::int64_t count = 1);
  void remove(const TimedToken& token, std::int64_t count = 1);
  Multiset& operator+=(const Multiset& other);
  Multiset& operator-=(const Multiset& other);

  std::int64_t count(const TimedToken& token) const;
  /// Number of tokens carrying `value`, across all timestamps.
  std::int64_t count_value(const TokenValue& value) const;
  std::int64_t ready_count(ModelTime now) const;
  std::int64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool contains(const Multiset& other) const;

  const Entries& entries() const { return entries_; }
  Entries::const_iterator begin() const { return entries_.begin(); }
  Entries::const_iterator end() const { return entries_.end(); }

  /// Removes `count` ready instances of `value`, earliest timestamp first.
  /// Returns the removed tokens.
  Multiset take_ready(const TokenValue& value, std::int64_t count, ModelTime now);

  friend bool operator==(const Multiset&, const Multiset&) = default;

 private:
  void check_invariants() const;

  Entries entries_;
  std::int64_t size_ = 0;
};

Multiset operator+(Multiset a, const Multiset& b);
Multiset operator-(Multiset a, const Multiset& b);

/// Prints in CPN notation, e.g. 1`1++7`2.
std::ostream& operator<<(std::ostream& os, const Multiset& ms);

/// Convenience for untimed tokens.
inline TimedToken untimed(TokenValue v) { return TimedToken{std::move(v), std::nullopt}; }
inline TimedToken at_time(TokenValue v, ModelTime t) { return TimedToken{std::move(v), t}; }

}  // namespace cpnray
