#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpnray/multiset.hpp"
#include "cpnray/net.hpp"
#include "cpnray/stochastic.hpp"

namespace cpnray::cpn {

/// Raised when a model is built or driven incorrectly: unknown places,
/// colour mismatches, firing a pair that is not enabled.
class ModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised by run() when the step ceiling is exceeded.
class RunawayModel : public std::runtime_error {
 public:
  explicit RunawayModel(std::int64_t steps);
  std::int64_t steps() const { return steps_; }

 private:
  std::int64_t steps_;
};

/// One multiset per place of the net, indexed like Net::places().
class Marking {
 public:
  explicit Marking(const Net& net) : per_place_(net.places().size()) {}

  const Multiset& at(PlaceIndex place) const { return per_place_.at(place); }
  Multiset& at(PlaceIndex place) { return per_place_.at(place); }
  const Multiset& at(const Net& net, std::string_view place) const {
    return per_place_.at(net.place_index(place));
  }
  std::size_t size() const { return per_place_.size(); }

  friend bool operator==(const Marking&, const Marking&) = default;

 private:
  std::vector<Multiset> per_place_;
};

struct SimState {
  Marking marking;
  ModelTime now = 0;
  stochastic::RngStream rng;
  std::int64_t steps = 0;

  SimState(Marking m, std::uint64_t seed) : marking(std::move(m)), rng(seed) {}
  SimState(Marking m, stochastic::RngStream stream)
      : marking(std::move(m)), rng(std::move(stream)) {}
};

struct EnabledBinding {
  std::size_t transition = 0;
  Binding binding;

  friend bool operator==(const EnabledBinding&, const EnabledBinding&) = default;
};

enum class StepKind { Initial, Fired, TimeAdvanced, Dead };

struct StepEvent {
  StepKind kind = StepKind::Initial;
  ModelTime time = 0;
  /// Set for Fired events.
  const Transition* transition = nullptr;
  Binding binding;

  bool fired(std::string_view transition_id) const {
    return kind == StepKind::Fired && transition->id == transition_id;
  }
};

using MonitorHook = std::function<void(const SimState&, const StepEvent&)>;
using StopPredicate = std::function<bool(const SimState&, const StepEvent&)>;

/// Adds `tokens` to `place`, checking colours and timestamp presence against
/// the place declaration.
void add_tokens(const Net& net, Marking& marking, std::string_view place, const Multiset& tokens);

/// Every enabled (transition, binding) pair at `now`, in lexicographic order
/// of transition id and then bound values in input-arc order.
std::vector<EnabledBinding> enabled_bindings(const Net& net, const Marking& marking,
                                             ModelTime now);
inline std::vector<EnabledBinding> enabled_bindings(const Net& net, const SimState& state) {
  return enabled_bindings(net, state.marking, state.now);
}

/// True if at least one binding is enabled at `now`.
bool any_enabled(const Net& net, const Marking& marking, ModelTime now);

/// Fires `transition` under `binding`. Throws ModelError if the pair is not enabled.
void fire(const Net& net, SimState& state, std::size_t transition, const Binding& binding);
void fire(const Net& net, SimState& state, std::string_view transition, const Binding& binding);

/// The earliest time after state.now at which some binding is enabled, or
/// std::nullopt for a dead marking. Throws ModelError if something is
/// already enabled at state.now.
std::optional<ModelTime> advance_time(const Net& net, const SimState& state);

/// One simulation step: fire a uniformly chosen enabled binding, or advance
/// time, or report a dead marking.
StepEvent step(const Net& net, SimState& state);

struct RunOptions {
  /// 0 disables the ceiling.
  std::int64_t max_steps = 0;
};

/// Steps until `stop` holds or the marking is dead. `stop` is also consulted
/// once before the first step with a StepKind::Initial event.
SimState run(const Net& net, SimState state, const StopPredicate& stop,
             const std::vector<MonitorHook>& hooks = {}, RunOptions options = {});

}  // namespace cpnray::cpn
