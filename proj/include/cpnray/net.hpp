#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cpnray/stochastic.hpp"
#include "cpnray/token.hpp"

namespace cpnray::cpn {

using PlaceIndex = std::size_t;

struct Place {
  std::string id;
  Colour colour = Colour::Int;
  bool timed = false;
};

/// Tokens bound from one place for one transition firing.
struct BoundSource {
  PlaceIndex place = 0;
  TokenValue value;
  std::int64_t count = 1;
};

/// Assignment of input tokens to a transition's variables.
///
/// Values are identified, not individual timed instances: on firing, the
/// ready instances of each bound value with the earliest timestamps are
/// consumed.
class Binding {
 public:
  const TokenValue& at(std::string_view var) const;
  const TokenValue* find(std::string_view var) const;
  /// Tokens bound by a take-all arc, expanded by multiplicity.
  const std::vector<TokenValue>& group(std::string_view var) const;

  const std::vector<std::pair<std::string, TokenValue>>& values() const { return values_; }
  const std::vector<std::pair<std::string, std::vector<TokenValue>>>& groups() const {
    return groups_;
  }
  const std::vector<BoundSource>& sources() const { return sources_; }

  void bind(std::string var, TokenValue value);
  void bind_group(std::string var, std::vector<TokenValue> tokens);
  void add_source(PlaceIndex place, const TokenValue& value, std::int64_t count = 1);
  void pop_value();
  void pop_group();
  void pop_source();

  friend bool operator==(const Binding& a, const Binding& b) {
    return a.values_ == b.values_ && a.groups_ == b.groups_;
  }

 private:
  std::vector<std::pair<std::string, TokenValue>> values_;
  std::vector<std::pair<std::string, std::vector<TokenValue>>> groups_;
  std::vector<BoundSource> sources_;
};

std::ostream& operator<<(std::ostream& os, const Binding& b);

enum class ArcKind {
  /// Binds one ready token to the variable. A variable that appears on
  /// several arcs must be bound to equal values.
  Single,
  /// Binds every ready token of the place (at least one) as a group.
  TakeAll,
};

struct InputArc {
  std::string place;
  std::string variable;
  ArcKind kind = ArcKind::Single;
  /// TakeAll only: when non-zero, the arc is enabled only if the place holds
  /// exactly this many ready tokens.
  std::int64_t expected_count = 0;

  static InputArc take_all(std::string place, std::string variable,
                           std::int64_t expected_count = 0) {
    return InputArc{std::move(place), std::move(variable), ArcKind::TakeAll, expected_count};
  }
};

/// What an output arc produces: one token, stamped now + delay on timed places.
struct Emission {
  TokenValue value;
  ModelTime delay = 0;
};

struct FiringContext {
  const Binding& binding;
  ModelTime now;
  stochastic::RngStream& rng;
};

using Guard = std::function<bool(const Binding&)>;
/// Output arc expression. Returning std::nullopt produces no token.
using ArcExpression = std::function<std::optional<Emission>(const FiringContext&)>;

struct OutputArc {
  std::string place;
  ArcExpression expression;
};

struct TransitionSpec {
  std::string id;
  std::vector<InputArc> inputs;
  Guard guard = nullptr;
  std::vector<OutputArc> outputs;
};

/// Transition with arcs resolved to place indices.
struct Transition {
  struct In {
    PlaceIndex place;
    std::string variable;
    ArcKind kind;
    std::int64_t expected_count;
  };
  struct Out {
    PlaceIndex place;
    ArcExpression expression;
  };

  std::string id;
  std::vector<In> inputs;
  Guard guard = nullptr;
  std::vector<Out> outputs;
};

/// Immutable net structure. Transitions are held sorted by id, which is the
/// binding enumeration order.
class Net {
 public:
  const std::vector<Place>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  PlaceIndex place_index(std::string_view id) const;
  std::size_t transition_index(std::string_view id) const;
  const Place& place(std::string_view id) const { return places_[place_index(id)]; }
  const Transition& transition(std::string_view id) const {
    return transitions_[transition_index(id)];
  }

 private:
  friend class NetBuilder;

  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  std::unordered_map<std::string, PlaceIndex> place_lookup_;
  std::unordered_map<std::string, std::size_t> transition_lookup_;
};

/// Builds a Net; build() throws std::invalid_argument on duplicate ids or
/// arcs that reference unknown places.
class NetBuilder {
 public:
  NetBuilder& place(std::string id, Colour colour, bool timed = false);
  NetBuilder& transition(TransitionSpec spec);
  Net build() &&;

 private:
  std::vector<Place> places_;
  std::vector<TransitionSpec> transitions_;
};

}  // namespace cpnray::cpn
