#include "cpnray/multiset.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace cpnray {

Multiset::Multiset(std::initializer_list<std::pair<std::int64_t, TimedToken>> terms) {
  for (const auto& [count, token] : terms) add(token, count);
}

void Multiset::add(const TimedToken& token, std::int64_t count) {
  if (count < 0) throw std::logic_error("Multiset::add: negative count");
  if (token.timestamp && *token.timestamp < 0)
    throw std::logic_error("Multiset::add: negative timestamp");
  if (count == 0) return;
  entries_[token] += count;
  size_ += count;
  check_invariants();
}

void Multiset::remove(const TimedToken& token, std::int64_t count) {
  if (count < 0) throw std::logic_error("Multiset::remove: negative count");
  if (count == 0) return;
  auto it = entries_.find(token);
  if (it == entries_.end() || it->second < count) {
    throw std::logic_error("Multiset::remove: " + std::to_string(count) + "`" +
                           to_string(token.value) + " not present");
  }
  it->second -= count;
  if (it->second == 0) entries_.erase(it);
  size_ -= count;
  check_invariants();
}

Multiset& Multiset::operator+=(const Multiset& other) {
  for (const auto& [token, count] : other.entries_) add(token, count);
  return *this;
}

Multiset& Multiset::operator-=(const Multiset& other) {
  if (!contains(other)) throw std::logic_error("Multiset::operator-=: not a sub-multiset");
  for (const auto& [token, count] : other.entries_) remove(token, count);
  return *this;
}

std::int64_t Multiset::count(const TimedToken& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? 0 : it->second;
}

std::int64_t Multiset::count_value(const TokenValue& value) const {
  std::int64_t n = 0;
  for (auto it = entries_.lower_bound(TimedToken{value, std::nullopt});
       it != entries_.end() && it->first.value == value; ++it) {
    n += it->second;
  }
  return n;
}

std::int64_t Multiset::ready_count(ModelTime now) const {
  std::int64_t n = 0;
  for (const auto& [token, count] : entries_)
    if (token.ready_at(now)) n += count;
  return n;
}

bool Multiset::contains(const Multiset& other) const {
  for (const auto& [token, count] : other.entries_)
    if (this->count(token) < count) return false;
  return true;
}

Multiset Multiset::take_ready(const TokenValue& value, std::int64_t count, ModelTime now) {
  Multiset taken;
  auto it = entries_.lower_bound(TimedToken{value, std::nullopt});
  while (count > 0 && it != entries_.end() && it->first.value == value &&
         it->first.ready_at(now)) {
    const std::int64_t n = std::min(count, it->second);
    taken.add(it->first, n);
    count -= n;
    size_ -= n;
    it->second -= n;
    it = it->second == 0 ? entries_.erase(it) : std::next(it);
  }
  if (count > 0) {
    *this += taken;
    throw std::logic_error("Multiset::take_ready: not enough ready tokens of " + to_string(value));
  }
  check_invariants();
  return taken;
}

void Multiset::check_invariants() const {
#ifndef NDEBUG
  std::int64_t total = 0;
  for (const auto& [token, count] : entries_) {
    assert(count > 0);
    total += count;
  }
  assert(total == size_);
#endif
}

Multiset operator+(Multiset a, const Multiset& b) { return a += b; }
Multiset operator-(Multiset a, const Multiset& b) { return a -= b; }

std::ostream& operator<<(std::ostream& os, const Multiset& ms) {
  if (ms.empty()) return os << "empty";
  bool first = true;
  for (const auto& [token, count] : ms) {
    if (!first) os << "++";
    first = false;
    os << count << "`" << token;
  }
  return os;
}

}  // namespace cpnray
