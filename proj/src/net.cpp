#include "cpnray/net.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace cpnray::cpn {

const TokenValue* Binding::find(std::string_view var) const {
  for (const auto& [name, value] : values_)
    if (name == var) return &value;
  return nullptr;
}

const TokenValue& Binding::at(std::string_view var) const {
  if (const TokenValue* v = find(var)) return *v;
  throw std::out_of_range("Binding: unbound variable '" + std::string(var) + "'");
}

const std::vector<TokenValue>& Binding::group(std::string_view var) const {
  for (const auto& [name, tokens] : groups_)
    if (name == var) return tokens;
  throw std::out_of_range("Binding: unbound group '" + std::string(var) + "'");
}

void Binding::bind(std::string var, TokenValue value) {
  values_.emplace_back(std::move(var), std::move(value));
}

void Binding::bind_group(std::string var, std::vector<TokenValue> tokens) {
  groups_.emplace_back(std::move(var), std::move(tokens));
}

void Binding::add_source(PlaceIndex place, const TokenValue& value, std::int64_t count) {
  sources_.push_back(BoundSource{place, value, count});
}

void Binding::pop_value() { values_.pop_back(); }
void Binding::pop_group() { groups_.pop_back(); }
void Binding::pop_source() { sources_.pop_back(); }

std::ostream& operator<<(std::ostream& os, const Binding& b) {
  os << "<";
  bool first = true;
  for (const auto& [name, value] : b.values()) {
    os << (first ? "" : ", ") << name << "=" << value;
    first = false;
  }
  for (const auto& [name, tokens] : b.groups()) {
    os << (first ? "" : ", ") << name << "=" << tokens.size() << " tokens";
    first = false;
  }
  return os << ">";
}

PlaceIndex Net::place_index(std::string_view id) const {
  auto it = place_lookup_.find(std::string(id));
  if (it == place_lookup_.end())
    throw std::invalid_argument("unknown place '" + std::string(id) + "'");
  return it->second;
}

std::size_t Net::transition_index(std::string_view id) const {
  auto it = transition_lookup_.find(std::string(id));
  if (it == transition_lookup_.end())
    throw std::invalid_argument("unknown transition '" + std::string(id) + "'");
  return it->second;
}

NetBuilder& NetBuilder::place(std::string id, Colour colour, bool timed) {
  places_.push_back(Place{std::move(id), colour, timed});
  return *this;
}

NetBuilder& NetBuilder::transition(TransitionSpec spec) {
  transitions_.push_back(std::move(spec));
  return *this;
}

Net NetBuilder::build() && {
  Net net;
  net.places_ = std::move(places_);
  for (PlaceIndex i = 0; i < net.places_.size(); ++i) {
    if (!net.place_lookup_.emplace(net.places_[i].id, i).second)
      throw std::invalid_argument("duplicate place id '" + net.places_[i].id + "'");
  }

  std::sort(transitions_.begin(), transitions_.end(),
            [](const TransitionSpec& a, const TransitionSpec& b) { return a.id < b.id; });
  for (auto& spec : transitions_) {
    Transition t;
    t.id = std::move(spec.id);
    t.guard = std::move(spec.guard);
    for (auto& arc : spec.inputs) {
      if (arc.kind == ArcKind::TakeAll && arc.expected_count < 0)
        throw std::invalid_argument("transition '" + t.id + "': negative expected count");
      t.inputs.push_back(Transition::In{net.place_index(arc.place), std::move(arc.variable),
                                        arc.kind, arc.expected_count});
    }
    for (auto& arc : spec.outputs) {
      if (!arc.expression)
        throw std::invalid_argument("transition '" + t.id + "': output arc to '" + arc.place +
                                    "' has no expression");
      t.outputs.push_back(Transition::Out{net.place_index(arc.place), std::move(arc.expression)});
    }
    if (!net.transition_lookup_.emplace(t.id, net.transitions_.size()).second)
      throw std::invalid_argument("duplicate transition id '" + t.id + "'");
    net.transitions_.push_back(std::move(t));
  }
  return net;
}

}  // namespace cpnray::cpn
