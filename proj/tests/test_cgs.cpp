/*
 * Copyright 2026 The onevar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch_amalgamated.hpp>

#include "onevar/cgs.hpp"
#include "onevar/io.hpp"
#include "onevar/parser.hpp"
#include "onevar/random.hpp"
#include "support/oracles.hpp"

using namespace onevar;

namespace {

// Two states, two agents with actions {0,1}; the successor is the XOR of the
// two chosen bits.
ConcurrentGameModel xor_game() {
  ConcurrentGameModel g(AgentSet{2}, 2, {"0", "1"});
  for (State s = 0; s < 2; ++s) {
    for (int a = 1; a <= 2; ++a) g.set_available(a, s, {0, 1});
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) g.set_delta(s, std::vector<int>{x, y}, static_cast<State>(x ^ y));
  }
  g.set_label(1, 1);
  return g;
}

Formula atl(const char* text, int agents = 2) { return parse(text, LogicId::atl, AgentSet{agents}); }

}  // namespace

TEST_CASE("outcomes of C-actions", "[outcomes]") {
  auto g = xor_game();
  CAction full{Coalition::all(AgentSet{2}), {{1, 0}, {2, 1}}};
  CHECK(outcomes(g, 0, full) == StateSet(2, {1}));
  CAction none{Coalition::none(), {}};
  CHECK(outcomes(g, 0, none) == StateSet::all(2));
  CAction one{Coalition::from_bits(1), {{1, 1}}};
  CHECK(outcomes(g, 0, one) == StateSet::all(2));
  g.set_available(2, 1, {0});
  g.set_delta(1, std::vector<int>{0, 0}, 0);
  g.set_delta(1, std::vector<int>{1, 0}, 1);
  CAction unavailable{Coalition::from_bits(2), {{2, 1}}};
  CHECK_THROWS_AS(outcomes(g, 1, unavailable), ModelError);
}

TEST_CASE("pre examples", "[pre]") {
  auto g = xor_game();
  for (std::uint32_t bits = 0; bits < 4; ++bits) {
    Coalition c = Coalition::from_bits(bits);
    CHECK(pre(g, c, StateSet::all(2)).is_full());
    CHECK(pre(g, c, StateSet(2)).empty());
  }
  // Only the grand coalition controls the XOR.
  CHECK(pre(g, Coalition::from_bits(3), StateSet(2, {1})).is_full());
  CHECK(pre(g, Coalition::from_bits(1), StateSet(2, {1})).empty());
}

TEST_CASE("pre agrees with C-action enumeration and is monotone", "[pre][oracle]") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    auto g = random_cgs(rng, AgentSet{2 + i % 2}, 3, 2, 1);
    StateSet x(3), y(3);
    for (State s = 0; s < 3; ++s) {
      bool in_x = rng() % 2;
      x.set(s, in_x);
      y.set(s, in_x || rng() % 2);
    }
    for (std::uint32_t bits = 0; bits < (1u << g.agents().count()); ++bits) {
      Coalition c = Coalition::from_bits(bits);
      auto px = pre(g, c, x);
      CHECK(px == oracle::brute_pre(g, c, x));
      CHECK(px.subset_of(pre(g, c, y)));
      // Larger coalitions control at least as much.
      CHECK(px.subset_of(pre(g, Coalition::all(g.agents()), x)));
      CHECK(pre(g, Coalition::none(), x).subset_of(px));
    }
    // Empty coalition: all one-step successors must be in x.
    auto p0 = pre(g, Coalition::none(), x);
    for (State s = 0; s < 3; ++s) {
      auto succ = g.successors(s);
      bool all = std::all_of(succ.begin(), succ.end(), [&](State t) { return x.contains(t); });
      CHECK(p0.contains(s) == all);
    }
  }
}

TEST_CASE("mc_atl basic examples", "[mc_atl]") {
  auto g = xor_game();
  CHECK(mc_atl(g, atl("<<>> G true")).is_full());
  CHECK(mc_atl(g, atl("<<1,2>> G p1")) == StateSet(2, {1}));
  CHECK(mc_atl(g, atl("<<1>> F p1")) == StateSet(2, {1}));
  CHECK(mc_atl(g, atl("<<*>> F p1")).is_full());
  CHECK_THROWS_AS(mc_atl(g, parse("<<3>> X p1", LogicId::atl, AgentSet{3})), LogicError);
  CHECK_THROWS_AS(mc_atl(g, parse("<<1>> (X p1 & X p1)", LogicId::atlstar, AgentSet{2})), LogicError);
}

TEST_CASE("mc_atl agrees with the strategy oracle", "[mc_atl][oracle]") {
  Rng rng(22);
  int nontrivial = 0;
  for (int i = 0; i < 500; ++i) {
    auto g = random_cgs(rng, AgentSet{2}, 2 + i % 2, 2, 2);
    Formula f = random_formula(rng, LogicId::atl, {2, 4, AgentSet{2}});
    INFO(print(f));
    auto r = mc_atl(g, f);
    CHECK(r == strategy_oracle_states(g, f));
    nontrivial += !r.empty() && !r.is_full() && contains_op(f, Op::coalition);
  }
  CHECK(nontrivial > 50);
}

TEST_CASE("strategy oracle result does not depend on the work split", "[oracle][jobs]") {
  Rng rng(23);
  for (int i = 0; i < 30; ++i) {
    auto g = random_cgs(rng, AgentSet{2}, 3, 2, 2);
    Formula f = random_formula(rng, LogicId::atl, {2, 3, AgentSet{2}});
    CHECK(strategy_oracle_states(g, f, {1u << 20, 1}) == strategy_oracle_states(g, f, {1u << 20, 4}));
  }
}

TEST_CASE("strategy oracle budget and trivial objectives", "[oracle]") {
  auto g = xor_game();
  CHECK(strategy_oracle(g, 0, atl("<<1>> X true")));
  CHECK_THROWS_AS(strategy_oracle(g, 0, atl("<<1,2>> X p1"), {2, 1}), BudgetExceeded);
  // Single agent with a single action: strategies are unique.
  KripkeModel k(2);
  k.add_edge(0, 1);
  k.add_edge(1, 1);
  k.set_label(1, 1);
  auto one = cgs_from_kripke(k);
  CHECK(strategy_oracle(one, 0, atl("<<1>> X p1", 1)) == mc_ctl(k, parse("A X p1", LogicId::ctl)).contains(0));
}

TEST_CASE("always is the greatest fixpoint", "[mc_atl][fixpoint]") {
  Rng rng(24);
  for (int i = 0; i < 100; ++i) {
    auto g = random_cgs(rng, AgentSet{2}, 4, 2, 1);
    for (std::uint32_t bits = 0; bits < 4; ++bits) {
      Coalition c = Coalition::from_bits(bits);
      auto a = g.label(1);
      auto z = mc_atl(g, Formula::coalition(c, Formula::always(var(1))));
      CHECK(z == (a & pre(g, c, z)));
      // Every post-fixpoint is contained in it.
      for (std::uint32_t mask = 0; mask < 16; ++mask) {
        StateSet y(4);
        for (State s = 0; s < 4; ++s) y.set(s, (mask >> s) & 1u);
        if (y.subset_of(a & pre(g, c, y))) CHECK(y.subset_of(z));
      }
    }
  }
}

TEST_CASE("cgs_from_kripke", "[cgs_from_kripke]") {
  KripkeModel k(1);
  k.add_edge(0, 0);
  auto g = cgs_from_kripke(k);
  CHECK(g.agents().count() == 1);
  CHECK(g.available(1, 0).size() == 1);

  KripkeModel fan(4);
  for (State t = 1; t < 4; ++t) {
    fan.add_edge(0, t);
    fan.add_edge(t, t);
  }
  auto h = cgs_from_kripke(fan);
  CHECK(h.available(1, 0).size() == 3);
  CHECK(validate(h).ok());
  CHECK(successor_graph(h) == fan);
}

TEST_CASE("validate reports undefined transitions", "[validate]") {
  ConcurrentGameModel g(AgentSet{1}, 2, {"a", "b"});
  g.set_available(1, 0, {0, 1});
  g.set_delta(0, std::vector<int>{0}, 1);
  CHECK_FALSE(validate(g).ok());
  CHECK_THROWS_AS(g.set_available(1, 0, {}), ModelError);
}

TEST_CASE("game JSON round trip", "[io]") {
  Rng rng(17);
  for (int i = 0; i < 30; ++i) {
    ConcurrentGameModel g = random_cgs(rng, AgentSet{1 + i % 3}, 1 + i % 4, 1 + i % 3, 2);
    Json j = to_json(g);
    ConcurrentGameModel back = cgs_from_json(Json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(validate(back).ok());
  }
}

TEST_CASE("game JSON format errors", "[io]") {
  CHECK_THROWS_AS(cgs_from_json(Json::parse(R"({"states": 1})")), ModelError);
  CHECK_THROWS_AS(cgs_from_json(Json::parse(R"({"agents": 1, "states": 1, "actions": ["a"],
      "delta": {"0|b": 0}})")), ModelError);
  CHECK_THROWS_AS(cgs_from_json(Json::parse(R"({"agents": 1, "states": 1, "actions": ["a"],
      "available": {"2,0": ["a"]}})")), ModelError);
  auto partial = cgs_from_json(Json::parse(R"({"agents": 1, "states": 2, "actions": ["a"],
      "delta": {"0|a": 1}})"));
  CHECK_FALSE(validate(partial).ok());
}

TEST_CASE("game DOT export shows the successor graph", "[io]") {
  std::string dot = to_dot(xor_game(), State{1});
  CHECK(dot.find("0 -> 1 [label=\"(0,1)\\n(1,0)\"]") != std::string::npos);
  CHECK(dot.find("1 -> 0") != std::string::npos);
  CHECK(dot.find("doublecircle") != std::string::npos);
}
