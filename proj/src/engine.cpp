#include "cpnray/engine.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cpnray::cpn {

RunawayModel::RunawayModel(std::int64_t steps)
    : std::runtime_error("run exceeded step ceiling of " + std::to_string(steps) +
                         " steps (runaway model?)"),
      steps_(steps) {}

namespace {

void check_token(const Place& place, const TimedToken& token) {
  if (colour_of(token.value) != place.colour) {
    throw ModelError("place '" + place.id + "' holds " + std::string(colour_name(place.colour)) +
                     " tokens, got " + std::string(colour_name(colour_of(token.value))) + " " +
                     to_string(token.value));
  }
  if (place.timed != token.timestamp.has_value()) {
    throw ModelError("place '" + place.id + "' is " + (place.timed ? "timed" : "untimed") +
                     " but token " + to_string(token.value) +
                     (token.timestamp ? " carries" : " lacks") + " a timestamp");
  }
  if (token.timestamp && *token.timestamp < 0)
    throw ModelError("place '" + place.id + "': negative timestamp");
}

/// Depth-first binding search over one transition's input arcs, in arc
/// order, visiting candidate values in ascending order. The visitor returns
/// true to stop the search.
class BindingSearch {
 public:
  using Visitor = std::function<bool(const Binding&)>;

  BindingSearch(const Net& net, const Transition& t, const Marking& m, ModelTime now,
                const Visitor& visit)
      : net_(net), t_(t), marking_(m), now_(now), visit_(visit) {}

  bool run() { return extend(0); }

 private:
  struct Taken {
    PlaceIndex place;
    const TokenValue* value;
  };

  std::int64_t taken_of(PlaceIndex place, const TokenValue& value) const {
    std::int64_t n = 0;
    for (const auto& tk : taken_)
      if (tk.place == place && *tk.value == value) ++n;
    return n;
  }

  bool drained(PlaceIndex place) const {
    return std::find(drained_.begin(), drained_.end(), place) != drained_.end();
  }

  std::int64_t ready_count(const Multiset& ms, PlaceIndex place) const {
    return net_.places()[place].timed ? ms.ready_count(now_) : ms.size();
  }

  bool extend(std::size_t k) {
    if (k == t_.inputs.size()) {
      if (t_.guard && !t_.guard(binding_)) return false;
      return visit_(binding_);
    }
    const auto& arc = t_.inputs[k];
    if (drained(arc.place)) return false;
    const Multiset& ms = marking_.at(arc.place);
    if (arc.kind == ArcKind::TakeAll) return extend_take_all(k, arc, ms);

    const TokenValue* fixed = binding_.find(arc.variable);
    auto it = fixed ? ms.entries().lower_bound(TimedToken{*fixed, std::nullopt})
                    : ms.entries().begin();
    const auto end = ms.entries().end();
    while (it != end) {
      const TokenValue& value = it->first.value;
      if (fixed && value != *fixed) break;
      std::int64_t ready = 0;
      auto next = it;
      for (; next != end && next->first.value == value; ++next)
        if (next->first.ready_at(now_)) ready += next->second;
      if (ready > taken_of(arc.place, value)) {
        if (!fixed) binding_.bind(arc.variable, value);
        binding_.add_source(arc.place, value);
        taken_.push_back(Taken{arc.place, &value});
        const bool stop = extend(k + 1);
        taken_.pop_back();
        binding_.pop_source();
        if (!fixed) binding_.pop_value();
        if (stop) return true;
      }
      it = next;
    }
    return false;
  }

  bool extend_take_all(std::size_t k, const Transition::In& arc, const Multiset& ms) {
    std::int64_t prior = 0;
    for (const auto& tk : taken_)
      if (tk.place == arc.place) ++prior;
    const std::int64_t available = ready_count(ms, arc.place) - prior;
    if (available < 1) return false;
    if (arc.expected_count != 0 && available != arc.expected_count) return false;

    std::vector<TokenValue> group;
    group.reserve(static_cast<std::size_t>(available));
    std::size_t pushed = 0;
    const auto end = ms.entries().end();
    for (auto it = ms.entries().begin(); it != end;) {
      const TokenValue& value = it->first.value;
      std::int64_t ready = 0;
      auto next = it;
      for (; next != end && next->first.value == value; ++next)
        if (next->first.ready_at(now_)) ready += next->second;
      const std::int64_t n = ready - taken_of(arc.place, value);
      if (n > 0) {
        group.insert(group.end(), static_cast<std::size_t>(n), value);
        binding_.add_source(arc.place, value, n);
        ++pushed;
      }
      it = next;
    }
    binding_.bind_group(arc.variable, std::move(group));
    drained_.push_back(arc.place);
    const bool stop = extend(k + 1);
    drained_.pop_back();
    binding_.pop_group();
    for (std::size_t i = 0; i < pushed; ++i) binding_.pop_source();
    return stop;
  }

  const Net& net_;
  const Transition& t_;
  const Marking& marking_;
  ModelTime now_;
  const Visitor& visit_;
  Binding binding_;
  std::vector<Taken> taken_;
  std::vector<PlaceIndex> drained_;
};

/// Sources of a binding summed per (place, value).
std::map<std::pair<PlaceIndex, TokenValue>, std::int64_t> aggregate_sources(const Binding& b) {
  std::map<std::pair<PlaceIndex, TokenValue>, std::int64_t> out;
  for (const auto& src : b.sources()) out[{src.place, src.value}] += src.count;
  return out;
}

void check_enabled(const Net& net, const SimState& state, const Transition& t,
                   const Binding& binding) {
  for (const auto& arc : t.inputs) {
    const bool bound = arc.kind == ArcKind::Single
                           ? binding.find(arc.variable) != nullptr
                           : std::any_of(binding.groups().begin(), binding.groups().end(),
                                         [&](const auto& g) { return g.first == arc.variable; });
    if (!bound)
      throw ModelError("fire '" + t.id + "': variable '" + arc.variable + "' is not bound");
  }
  for (const auto& [key, count] : aggregate_sources(binding)) {
    const auto& [place, value] = key;
    const bool is_input = std::any_of(t.inputs.begin(), t.inputs.end(),
                                      [&](const auto& arc) { return arc.place == place; });
    if (!is_input)
      throw ModelError("fire '" + t.id + "': binding draws from non-input place '" +
                       net.places()[place].id + "'");
    std::int64_t ready = 0;
    const Multiset& ms = state.marking.at(place);
    for (auto it = ms.entries().lower_bound(TimedToken{value, std::nullopt});
         it != ms.entries().end() && it->first.value == value; ++it) {
      if (it->first.ready_at(state.now)) ready += it->second;
    }
    if (ready < count) {
      throw ModelError("fire '" + t.id + "': not enabled, place '" + net.places()[place].id +
                       "' lacks " + std::to_string(count) + " ready " + to_string(value));
    }
  }
  if (t.guard && !t.guard(binding))
    throw ModelError("fire '" + t.id + "': guard is false for binding");
}

}  // namespace

void add_tokens(const Net& net, Marking& marking, std::string_view place, const Multiset& tokens) {
  PlaceIndex idx;
  try {
    idx = net.place_index(place);
  } catch (const std::invalid_argument& e) {
    throw ModelError(e.what());
  }
  const Place& p = net.places()[idx];
  for (const auto& [token, count] : tokens) check_token(p, token);
  marking.at(idx) += tokens;
}

std::vector<EnabledBinding> enabled_bindings(const Net& net, const Marking& marking,
                                             ModelTime now) {
  std::vector<EnabledBinding> out;
  for (std::size_t ti = 0; ti < net.transitions().size(); ++ti) {
    const BindingSearch::Visitor collect = [&](const Binding& b) {
      out.push_back(EnabledBinding{ti, b});
      return false;
    };
    BindingSearch(net, net.transitions()[ti], marking, now, collect).run();
  }
  return out;
}

bool any_enabled(const Net& net, const Marking& marking, ModelTime now) {
  const BindingSearch::Visitor found = [](const Binding&) { return true; };
  for (const auto& t : net.transitions())
    if (BindingSearch(net, t, marking, now, found).run()) return true;
  return false;
}

void fire(const Net& net, SimState& state, std::size_t transition, const Binding& binding) {
  if (transition >= net.transitions().size())
    throw ModelError("fire: transition index out of range");
  const Transition& t = net.transitions()[transition];
  check_enabled(net, state, t, binding);

  // Evaluate outputs before touching the marking so a failing expression
  // leaves the state intact.
  std::vector<std::pair<PlaceIndex, TimedToken>> produced;
  produced.reserve(t.outputs.size());
  const FiringContext ctx{binding, state.now, state.rng};
  for (const auto& out : t.outputs) {
    std::optional<Emission> e = out.expression(ctx);
    if (!e) continue;
    const Place& p = net.places()[out.place];
    if (e->delay < 0) throw ModelError("transition '" + t.id + "': negative output delay");
    if (!p.timed && e->delay != 0)
      throw ModelError("transition '" + t.id + "': delayed output to untimed place '" + p.id + "'");
    TimedToken token{std::move(e->value),
                     p.timed ? std::optional<ModelTime>(state.now + e->delay) : std::nullopt};
    check_token(p, token);
    produced.emplace_back(out.place, std::move(token));
  }

  for (const auto& [key, count] : aggregate_sources(binding))
    state.marking.at(key.first).take_ready(key.second, count, state.now);
  for (const auto& [place, token] : produced) state.marking.at(place).add(token);
  ++state.steps;
}

void fire(const Net& net, SimState& state, std::string_view transition, const Binding& binding) {
  fire(net, state, net.transition_index(transition), binding);
}

namespace {

std::optional<ModelTime> next_enabling_time(const Net& net, const SimState& state) {
  std::set<ModelTime> pending;
  for (std::size_t p = 0; p < state.marking.size(); ++p) {
    for (const auto& [token, count] : state.marking.at(p))
      if (token.timestamp && *token.timestamp > state.now) pending.insert(*token.timestamp);
  }
  for (ModelTime t : pending)
    if (any_enabled(net, state.marking, t)) return t;
  return std::nullopt;
}

}  // namespace

std::optional<ModelTime> advance_time(const Net& net, const SimState& state) {
  if (any_enabled(net, state.marking, state.now))
    throw ModelError("advance_time: a binding is enabled at the current time");
  return next_enabling_time(net, state);
}

StepEvent step(const Net& net, SimState& state) {
  std::vector<EnabledBinding> enabled = enabled_bindings(net, state);
  StepEvent event;
  if (!enabled.empty()) {
    const std::size_t pick =
        enabled.size() == 1
            ? 0
            : static_cast<std::size_t>(stochastic::discrete(
                  state.rng, 0, static_cast<std::int64_t>(enabled.size()) - 1));
    EnabledBinding& chosen = enabled[pick];
    event.kind = StepKind::Fired;
    event.time = state.now;
    event.transition = &net.transitions()[chosen.transition];
    fire(net, state, chosen.transition, chosen.binding);
    event.binding = std::move(chosen.binding);
    return event;
  }
  // Urgency: time only moves when nothing is enabled at the current time.
  if (auto next = next_enabling_time(net, state)) {
    state.now = *next;
    event.kind = StepKind::TimeAdvanced;
  } else {
    event.kind = StepKind::Dead;
  }
  event.time = state.now;
  return event;
}

SimState run(const Net& net, SimState state, const StopPredicate& stop,
             const std::vector<MonitorHook>& hooks, RunOptions options) {
  StepEvent event;
  event.time = state.now;
  if (stop && stop(state, event)) return state;
  std::int64_t taken = 0;
  for (;;) {
    if (options.max_steps > 0 && taken >= options.max_steps) throw RunawayModel(taken);
    event = step(net, state);
    ++taken;
    for (const auto& hook : hooks) hook(state, event);
    if (event.kind == StepKind::Dead) break;
    if (stop && stop(state, event)) break;
  }
  return state;
}

}  // namespace cpnray::cpn
