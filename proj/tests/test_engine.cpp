#include "doctest.h"

#include <random>
#include <sstream>

#include "cpnray/engine.hpp"
#include "test_nets.hpp"

using namespace cpnray;
using namespace cpnray::cpn;
using cpnray::testing::TimedNet;
using cpnray::testing::TokenGameNet;

namespace {

TokenValue I(std::int64_t v) { return TokenValue{v}; }

OutputArc copy_to(std::string place, std::string var, ModelTime delay = 0) {
  return {std::move(place), [var, delay](const FiringContext& ctx) -> std::optional<Emission> {
            return Emission{ctx.binding.at(var), delay};
          }};
}

std::string trace(const Net& net, std::uint64_t seed, const Marking& initial, int steps) {
  SimState s(initial, seed);
  std::ostringstream os;
  for (int i = 0; i < steps; ++i) {
    StepEvent e = step(net, s);
    os << static_cast<int>(e.kind) << "@" << e.time;
    if (e.kind == StepKind::Fired) os << ":" << e.transition->id << e.binding;
    os << "\n";
    if (e.kind == StepKind::Dead) break;
  }
  return os.str();
}

}  // namespace

TEST_CASE("add_tokens builds multisets per place") {
  TokenGameNet g;
  const Multiset& p1 = g.initial.at(g.net, "p1");
  CHECK(p1.count(untimed(I(1))) == 1);
  CHECK(p1.count(untimed(I(2))) == 7);
  CHECK(p1.size() == 8);

  Marking m(g.net);
  add_tokens(g.net, m, "p1", {});
  CHECK(m == Marking(g.net));
  add_tokens(g.net, m, "p1", {{1, untimed(I(4))}});
  add_tokens(g.net, m, "p1", {{1, untimed(I(4))}});
  CHECK(m.at(g.net, "p1").count(untimed(I(4))) == 2);
}

TEST_CASE("add_tokens rejects model-construction bugs") {
  TokenGameNet g;
  Marking m(g.net);
  CHECK_THROWS_AS(add_tokens(g.net, m, "nowhere", {{1, untimed(I(1))}}), ModelError);
  CHECK_THROWS_AS(add_tokens(g.net, m, "p1", {{1, untimed(true)}}), ModelError);
  CHECK_THROWS_AS(add_tokens(g.net, m, "p3", {{1, untimed(I(1))}}), ModelError);
  // Untimed place must not receive a timestamp, timed place must.
  CHECK_THROWS_AS(add_tokens(g.net, m, "p1", {{1, at_time(I(1), 3)}}), ModelError);
  TimedNet tn(false);
  Marking tm(tn.net);
  CHECK_THROWS_AS(add_tokens(tn.net, tm, "tp1", {{1, untimed(I(1))}}), ModelError);
  CHECK(m == Marking(g.net));
}

TEST_CASE("net builder validates structure") {
  SUBCASE("duplicate place") {
    NetBuilder b;
    b.place("p", Colour::Int).place("p", Colour::Int);
    CHECK_THROWS_AS(std::move(b).build(), std::invalid_argument);
  }
  SUBCASE("arc to unknown place") {
    NetBuilder b;
    b.place("p", Colour::Int);
    b.transition({.id = "t", .inputs = {{"q", "x"}}});
    CHECK_THROWS_AS(std::move(b).build(), std::invalid_argument);
  }
  SUBCASE("duplicate transition") {
    NetBuilder b;
    b.place("p", Colour::Int);
    b.transition({.id = "t", .inputs = {{"p", "x"}}});
    b.transition({.id = "t", .inputs = {{"p", "x"}}});
    CHECK_THROWS_AS(std::move(b).build(), std::invalid_argument);
  }
}

TEST_CASE("token game: only x=2, y=1 is enabled") {
  TokenGameNet g;
  SimState s(g.initial, 1);
  auto enabled = enabled_bindings(g.net, s);
  REQUIRE(enabled.size() == 1);
  CHECK(as_int(enabled[0].binding.at("x")) == 2);
  CHECK(as_int(enabled[0].binding.at("y")) == 1);

  CHECK(enabled_bindings(g.net, Marking(g.net), 0).empty());

  Marking single(g.net);
  add_tokens(g.net, single, "p1", {{1, untimed(I(1))}});
  add_tokens(g.net, single, "p2", {{1, untimed(I(1))}});
  CHECK(enabled_bindings(g.net, single, 0).empty());
}

TEST_CASE("token game: firing removes exactly the bound tokens") {
  TokenGameNet g;
  SimState s(g.initial, 1);
  auto enabled = enabled_bindings(g.net, s);
  REQUIRE(enabled.size() == 1);
  fire(g.net, s, "t", enabled[0].binding);
  CHECK(s.marking.at(g.net, "p1") == Multiset{{1, untimed(I(1))}, {6, untimed(I(2))}});
  CHECK(s.marking.at(g.net, "p2") == Multiset{{3, untimed(I(1))}});
  CHECK(s.marking.at(g.net, "p3") == Multiset{{1, untimed(Unit{})}});
  CHECK(s.marking.at(g.net, "p4") == Multiset{{1, untimed(I(3))}});
  CHECK(s.now == 0);
  CHECK(s.steps == 1);
}

TEST_CASE("firing a pair that is not enabled throws and leaves state intact") {
  TokenGameNet g;
  SimState s(g.initial, 1);
  Binding bad;
  bad.bind("x", I(1));
  bad.bind("y", I(1));
  bad.add_source(g.net.place_index("p1"), I(1));
  bad.add_source(g.net.place_index("p2"), I(1));
  CHECK_THROWS_AS(fire(g.net, s, "t", bad), ModelError);  // guard false

  Binding missing;
  missing.bind("x", I(5));
  missing.bind("y", I(1));
  missing.add_source(g.net.place_index("p1"), I(5));
  missing.add_source(g.net.place_index("p2"), I(1));
  CHECK_THROWS_AS(fire(g.net, s, "t", missing), ModelError);  // no such token
  CHECK(s.marking == g.initial);
  CHECK(s.steps == 0);
}

TEST_CASE("timed fragment: output stamped firing time + 10, time advances to 10") {
  TimedNet tn(true);
  SimState s(tn.initial, 1);
  auto enabled = enabled_bindings(tn.net, s);
  REQUIRE(enabled.size() == 1);
  fire(tn.net, s, enabled[0].transition, enabled[0].binding);
  CHECK(s.marking.at(tn.net, "tp2") == Multiset{{1, at_time(I(1), 10)}});
  CHECK(enabled_bindings(tn.net, s).empty());
  CHECK(advance_time(tn.net, s) == std::optional<ModelTime>(10));
  CHECK(s.now == 0);
}

TEST_CASE("advance_time on an empty marking reports a dead marking") {
  TimedNet tn(true);
  SimState s(Marking(tn.net), 1);
  CHECK_FALSE(advance_time(tn.net, s).has_value());
}

TEST_CASE("advance_time refuses to run while something is enabled") {
  TimedNet tn(true);
  SimState s(tn.initial, 1);
  CHECK_THROWS_AS(advance_time(tn.net, s), ModelError);
}

TEST_CASE("advance_time skips timestamps that enable nothing") {
  // a@15 feeds ta (guard x == 1); b@12 feeds tb whose guard never holds.
  NetBuilder b;
  b.place("a", Colour::Int, true).place("b", Colour::Int, true).place("out", Colour::Int);
  b.transition({.id = "ta",
                .inputs = {{"a", "x"}},
                .guard = [](const Binding& bd) { return as_int(bd.at("x")) == 1; },
                .outputs = {copy_to("out", "x")}});
  b.transition({.id = "tb",
                .inputs = {{"b", "y"}},
                .guard = [](const Binding& bd) { return as_int(bd.at("y")) > 5; },
                .outputs = {copy_to("out", "y")}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "a", {{1, at_time(I(1), 15)}});
  add_tokens(net, m, "b", {{1, at_time(I(2), 12)}});

  // Brute-force oracle: scan every integer time and evaluate the two
  // transitions' enabling conditions directly from the token data.
  struct Tok { std::int64_t value; ModelTime ts; };
  const Tok a{1, 15}, bt{2, 12};
  std::optional<ModelTime> expected;
  for (ModelTime t = 1; t <= 100 && !expected; ++t) {
    const bool ta = a.ts <= t && a.value == 1;
    const bool tb = bt.ts <= t && bt.value > 5;
    if (ta || tb) expected = t;
  }
  REQUIRE(expected == std::optional<ModelTime>(15));

  SimState s(m, 1);
  CHECK(advance_time(net, s) == expected);
  StepEvent e = step(net, s);
  CHECK(e.kind == StepKind::TimeAdvanced);
  CHECK(s.now == 15);
}

TEST_CASE("zero-delay output to an untimed place carries no timestamp") {
  NetBuilder b;
  b.place("in", Colour::Int).place("out", Colour::Int);
  b.transition({.id = "t", .inputs = {{"in", "x"}}, .outputs = {copy_to("out", "x")}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "in", {{1, untimed(I(7))}});
  SimState s(m, 3);
  CHECK(step(net, s).kind == StepKind::Fired);
  CHECK(s.marking.at(net, "out") == Multiset{{1, untimed(I(7))}});
  CHECK(enabled_bindings(net, s).empty());
}

TEST_CASE("delayed output to an untimed place is a model error") {
  NetBuilder b;
  b.place("in", Colour::Int).place("out", Colour::Int);
  b.transition({.id = "t", .inputs = {{"in", "x"}}, .outputs = {copy_to("out", "x", 5)}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "in", {{1, untimed(I(7))}});
  SimState s(m, 3);
  CHECK_THROWS_AS(step(net, s), ModelError);
  CHECK(s.marking == m);
}

TEST_CASE("step fires the unique binding of the token game") {
  TokenGameNet g;
  SimState s(g.initial, 42);
  StepEvent e = step(g.net, s);
  REQUIRE(e.kind == StepKind::Fired);
  CHECK(e.transition->id == "t");
  CHECK(as_int(e.binding.at("x")) == 2);
  CHECK(as_int(e.binding.at("y")) == 1);
}

TEST_CASE("binding choice is reproducible for a fixed seed") {
  // Three distinct tokens compete for one transition.
  NetBuilder b;
  b.place("in", Colour::Int).place("out", Colour::Int);
  b.transition({.id = "t", .inputs = {{"in", "x"}}, .outputs = {copy_to("out", "x")}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "in", {{1, untimed(I(1))}, {1, untimed(I(2))}, {1, untimed(I(3))}});
  REQUIRE(enabled_bindings(net, m, 0).size() == 3);

  CHECK(trace(net, 7, m, 10) == trace(net, 7, m, 10));
  // Different seeds eventually pick a different first binding.
  const std::string first = trace(net, 1, m, 1);
  bool differs = false;
  for (std::uint64_t seed = 2; seed < 50 && !differs; ++seed) differs = trace(net, seed, m, 1) != first;
  CHECK(differs);
}

TEST_CASE("enumeration order is by transition id, then bound values") {
  NetBuilder b;
  b.place("in", Colour::Int).place("out", Colour::Int);
  b.transition({.id = "zeta", .inputs = {{"in", "x"}}, .outputs = {copy_to("out", "x")}});
  b.transition({.id = "alpha", .inputs = {{"in", "x"}}, .outputs = {copy_to("out", "x")}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "in", {{1, untimed(I(9))}, {2, untimed(I(3))}});
  auto en = enabled_bindings(net, m, 0);
  REQUIRE(en.size() == 4);
  CHECK(net.transitions()[en[0].transition].id == "alpha");
  CHECK(as_int(en[0].binding.at("x")) == 3);
  CHECK(as_int(en[1].binding.at("x")) == 9);
  CHECK(net.transitions()[en[2].transition].id == "zeta");
  CHECK(as_int(en[3].binding.at("x")) == 9);
}

TEST_CASE("arcs from the same place bind distinct tokens; shared variables must agree") {
  NetBuilder b;
  b.place("in", Colour::Int).place("other", Colour::Int).place("out", Colour::Int);
  b.transition({.id = "pair", .inputs = {{"in", "x"}, {"in", "y"}}, .outputs = {copy_to("out", "x")}});
  b.transition({.id = "same", .inputs = {{"in", "x"}, {"other", "x"}}, .outputs = {copy_to("out", "x")}});
  Net net = std::move(b).build();

  Marking m(net);
  add_tokens(net, m, "in", {{1, untimed(I(4))}});
  add_tokens(net, m, "other", {{1, untimed(I(4))}, {1, untimed(I(5))}});
  auto en = enabled_bindings(net, m, 0);
  // "pair" needs two tokens but only one is present; "same" matches only x = 4.
  REQUIRE(en.size() == 1);
  CHECK(net.transitions()[en[0].transition].id == "same");
  CHECK(as_int(en[0].binding.at("x")) == 4);

  add_tokens(net, m, "in", {{1, untimed(I(4))}});
  en = enabled_bindings(net, m, 0);
  REQUIRE(en.size() == 2);
  CHECK(net.transitions()[en[0].transition].id == "pair");
  SimState s(m, 0);
  fire(net, s, en[0].transition, en[0].binding);
  CHECK(s.marking.at(net, "in").empty());
}

TEST_CASE("take-all arcs bind every ready token and can require an exact count") {
  NetBuilder b;
  b.place("done", Colour::Int, true).place("count", Colour::Int);
  b.transition({.id = "collect",
                .inputs = {InputArc::take_all("done", "all", 3)},
                .outputs = {{"count", [](const FiringContext& ctx) -> std::optional<Emission> {
                               return Emission{static_cast<std::int64_t>(ctx.binding.group("all").size()), 0};
                             }}}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "done", {{2, at_time(I(1), 0)}, {1, at_time(I(2), 5)}});
  CHECK(enabled_bindings(net, m, 0).empty());  // only two ready at 0
  auto en = enabled_bindings(net, m, 5);
  REQUIRE(en.size() == 1);
  CHECK(en[0].binding.group("all").size() == 3);

  SimState s(m, 0);
  CHECK(step(net, s).kind == StepKind::TimeAdvanced);
  CHECK(s.now == 5);
  CHECK(step(net, s).kind == StepKind::Fired);
  CHECK(s.marking.at(net, "done").empty());
  CHECK(s.marking.at(net, "count") == Multiset{{1, untimed(I(3))}});
}

TEST_CASE("earliest-stamped ready instances are consumed first") {
  NetBuilder b;
  b.place("in", Colour::Int, true).place("out", Colour::Int);
  b.transition({.id = "t", .inputs = {{"in", "x"}}, .outputs = {copy_to("out", "x")}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "in", {{1, at_time(I(1), 2)}, {1, at_time(I(1), 0)}, {1, at_time(I(1), 9)}});
  SimState s(m, 0);
  s.now = 4;
  auto en = enabled_bindings(net, s);
  REQUIRE(en.size() == 1);  // one binding per distinct value
  fire(net, s, en[0].transition, en[0].binding);
  CHECK(s.marking.at(net, "in") == Multiset{{1, at_time(I(1), 2)}, {1, at_time(I(1), 9)}});
}

TEST_CASE("run: token game runs until p2 is exhausted") {
  // Hand simulation: each firing consumes one 2 from p1 and one 1 from p2;
  // after four firings p2 is empty and the marking is dead.
  TokenGameNet g;
  int fired = 0;
  StepKind last = StepKind::Initial;
  std::vector<MonitorHook> hooks{[&](const SimState&, const StepEvent& e) {
    if (e.kind == StepKind::Fired) ++fired;
    last = e.kind;
  }};
  auto stop = [](const SimState&, const StepEvent& e) { return e.kind == StepKind::Dead; };
  SimState end = run(g.net, SimState(g.initial, 5), stop, hooks);
  CHECK(fired == 4);
  CHECK(last == StepKind::Dead);
  CHECK(end.marking.at(g.net, "p1") == Multiset{{1, untimed(I(1))}, {3, untimed(I(2))}});
  CHECK(end.marking.at(g.net, "p2").empty());
  CHECK(end.marking.at(g.net, "p4") == Multiset{{4, untimed(I(3))}});
}

TEST_CASE("run: stop that holds immediately takes zero steps") {
  TokenGameNet g;
  int calls = 0;
  std::vector<MonitorHook> hooks{[&](const SimState&, const StepEvent&) { ++calls; }};
  SimState end = run(g.net, SimState(g.initial, 5), [](const SimState&, const StepEvent&) { return true; },
                     hooks);
  CHECK(end.steps == 0);
  CHECK(end.marking == g.initial);
  CHECK(calls == 0);
}

TEST_CASE("run: timed fragment fires tt1 exactly once before going dead") {
  TimedNet tn(false);
  int fired = 0;
  std::vector<MonitorHook> hooks{[&](const SimState&, const StepEvent& e) {
    if (e.kind == StepKind::Fired) ++fired;
  }};
  SimState end = run(tn.net, SimState(tn.initial, 1), nullptr, hooks);
  CHECK(fired == 1);
  CHECK(end.marking.at(tn.net, "tp2") == Multiset{{1, at_time(I(1), 10)}});
}

TEST_CASE("run: step ceiling aborts a runaway model") {
  // A self-loop never dies.
  NetBuilder b;
  b.place("p", Colour::Int);
  b.transition({.id = "loop", .inputs = {{"p", "x"}}, .outputs = {copy_to("p", "x")}});
  Net net = std::move(b).build();
  Marking m(net);
  add_tokens(net, m, "p", {{1, untimed(I(0))}});
  try {
    run(net, SimState(m, 1), nullptr, {}, RunOptions{100});
    FAIL("expected RunawayModel");
  } catch (const RunawayModel& e) {
    CHECK(e.steps() == 100);
  }
}

TEST_CASE("property: firing conserves tokens and time never decreases") {
  // Random small timed nets: two places, transitions shuffling tokens between
  // them with random delays. Checks every fire against the binding's sources.
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    NetBuilder b;
    b.place("a", Colour::Int, true).place("b", Colour::Int, true);
    const ModelTime d1 = static_cast<ModelTime>(gen() % 7);
    const ModelTime d2 = static_cast<ModelTime>(gen() % 7);
    const std::int64_t threshold = static_cast<std::int64_t>(gen() % 5);
    b.transition({.id = "ab",
                  .inputs = {{"a", "x"}},
                  .guard = [threshold](const Binding& bd) { return as_int(bd.at("x")) >= threshold; },
                  .outputs = {copy_to("b", "x", d1)}});
    b.transition({.id = "ba",
                  .inputs = {{"b", "x"}, {"a", "y"}},
                  .outputs = {{"a", [d2](const FiringContext& ctx) -> std::optional<Emission> {
                                 return Emission{(as_int(ctx.binding.at("x")) + as_int(ctx.binding.at("y"))) % 5, d2};
                               }},
                              copy_to("b", "y", d1)}});
    Net net = std::move(b).build();
    Marking m(net);
    const int tokens = 1 + static_cast<int>(gen() % 5);
    for (int i = 0; i < tokens; ++i)
      add_tokens(net, m, "a", {{1, at_time(I(static_cast<std::int64_t>(gen() % 5)), static_cast<ModelTime>(gen() % 4))}});

    SimState s(m, gen());
    for (int k = 0; k < 60; ++k) {
      const Marking before = s.marking;
      const ModelTime t0 = s.now;
      StepEvent e = step(net, s);
      REQUIRE(s.now >= t0);
      if (e.kind == StepKind::Dead) break;
      if (e.kind != StepKind::Fired) {
        CHECK(s.marking == before);
        continue;
      }
      const auto total = [&](const Marking& mk) {
        return mk.at(net, "a").size() + mk.at(net, "b").size();
      };
      // Each transition consumes and produces the same number of tokens here.
      CHECK(total(s.marking) == total(before));
      for (const auto& src : e.binding.sources()) {
        const auto& p = net.places()[src.place].id;
        CHECK(before.at(net, p).count_value(src.value) >= src.count);
      }
    }
  }
}
