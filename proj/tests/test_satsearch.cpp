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

#include <set>

#include "onevar/embedding.hpp"
#include "onevar/parser.hpp"
#include "onevar/random.hpp"
#include "onevar/satsearch.hpp"

using namespace onevar;

namespace {

// Isomorphism-invariant key: the least (edges, labels) description over all
// state permutations.
std::pair<std::vector<std::pair<State, State>>, std::vector<std::pair<int, State>>> iso_key(const KripkeModel& m) {
  std::vector<State> pi(m.size());
  std::iota(pi.begin(), pi.end(), State{0});
  std::optional<std::pair<std::vector<std::pair<State, State>>, std::vector<std::pair<int, State>>>> best;
  do {
    std::vector<std::pair<State, State>> edges;
    for (const auto& [s, t] : m.edges()) edges.emplace_back(pi[s], pi[t]);
    std::sort(edges.begin(), edges.end());
    std::vector<std::pair<int, State>> labels;
    for (const auto& [v, set] : m.valuation()) set.for_each([&](State s) { labels.emplace_back(v, pi[s]); });
    std::sort(labels.begin(), labels.end());
    auto key = std::make_pair(edges, labels);
    if (!best || key < *best) best = key;
  } while (std::next_permutation(pi.begin(), pi.end()));
  return *best;
}

}  // namespace

TEST_CASE("enumerate_kripke counts", "[enumerate]") {
  CHECK(enumerate_kripke(1, {1}).size() == 2);
  CHECK(enumerate_kripke(2, {}).size() == 9);
  CHECK(enumerate_kripke(3, {}).size() == 343);
  for (const auto& m : enumerate_kripke(2, {1, 2})) CHECK(validate(m).ok());
}

TEST_CASE("isomorphism pruning keeps exactly one model per class", "[enumerate][iso]") {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const std::set<int>& vars : {std::set<int>{}, std::set<int>{1}, std::set<int>{1, 4}}) {
      std::set<decltype(iso_key(KripkeModel{}))> classes;
      for (const auto& m : enumerate_kripke(n, vars)) classes.insert(iso_key(m));
      std::set<decltype(iso_key(KripkeModel{}))> pruned;
      std::size_t count = 0;
      for (const auto& m : enumerate_kripke(n, vars, true)) {
        pruned.insert(iso_key(m));
        ++count;
      }
      INFO("n=" << n << " vars=" << vars.size());
      CHECK(count == classes.size());
      CHECK(pruned == classes);
    }
  }
}

TEST_CASE("bounded_sat examples", "[bounded_sat]") {
  auto p1 = bounded_sat(var(1), LogicId::ctl, 1);
  REQUIRE(p1.sat());
  CHECK(p1.witness->size() == 1);

  auto contradiction = bounded_sat(conj(var(1), neg(var(1))), LogicId::ctl, 3);
  CHECK_FALSE(contradiction.sat());
  CHECK(contradiction.models_examined > 0);

  auto a1 = bounded_sat(gadget_formula(1, GadgetFlavor::branching), LogicId::ctl, 4);
  REQUIRE(a1.sat());
  CHECK(a1.witness->size() == 4);
  CHECK(mc_ctl(*a1.witness, gadget_formula(1, GadgetFlavor::branching)).contains(a1.witness_state));

  auto star = bounded_sat(parse("E (G F p1 & F G !p1)", LogicId::ctlstar), LogicId::ctlstar, 3);
  CHECK_FALSE(star.sat());
  CHECK(bounded_sat(parse("E (G F p1) & E (F G !p1)", LogicId::ctlstar), LogicId::ctlstar, 2).sat());
  CHECK_THROWS_AS(bounded_sat(var(1), LogicId::atl, 2), LogicError);
}

TEST_CASE("bounded_sat is sound, monotone and independent of pruning and jobs", "[bounded_sat][property]") {
  Rng rng(41);
  for (int i = 0; i < 40; ++i) {
    LogicId logic = i % 2 == 0 ? LogicId::ctl : LogicId::ctlstar;
    Formula f = random_formula(rng, logic, {2, 4, AgentSet{1}});
    INFO(print(f));
    SearchOptions plain{false, 1};
    SearchOptions pruned{true, 1};
    SearchOptions parallel{true, 3};
    auto a = bounded_sat(f, logic, 2, plain);
    auto b = bounded_sat(f, logic, 2, pruned);
    auto c = bounded_sat(f, logic, 2, parallel);
    auto d = bounded_sat(f, logic, 3, pruned);
    CHECK(a.sat() == b.sat());
    CHECK(b.sat() == c.sat());
    if (b.sat()) {
      CHECK(*b.witness == *c.witness);
      CHECK(b.witness_state == c.witness_state);
      CHECK(mc_ctlstar(*b.witness, f).contains(b.witness_state));
      CHECK(d.sat());
    }
    CHECK(b.models_examined <= a.models_examined);
  }
}

TEST_CASE("bounded_sat budget", "[bounded_sat][budget]") {
  SearchOptions tiny;
  tiny.max_models = 5;
  CHECK_THROWS_AS(bounded_sat(conj(var(1), neg(var(1))), LogicId::ctl, 3, tiny), BudgetExceeded);
}

TEST_CASE("bounded_sat_cgs examples", "[bounded_sat_cgs]") {
  AgentSet one{1};
  auto trivial = bounded_sat_cgs(parse("<<>> G true", LogicId::atl), one, 1, 1);
  REQUIRE(trivial.sat());
  CHECK(trivial.witness->size() == 1);

  Formula split = parse("<<*>> X p1 & <<*>> X !p1", LogicId::atl, one);
  CHECK_FALSE(bounded_sat_cgs(split, one, 3, 1).sat());
  auto two_actions = bounded_sat_cgs(split, one, 2, 2);
  REQUIRE(two_actions.sat());
  CHECK(mc_atl(*two_actions.witness, split).contains(two_actions.witness_state));

  AgentSet two{2};
  Formula contested = parse("!<<1>> X p1 & !<<2>> X !p1 & <<1,2>> X p1", LogicId::atl, two);
  auto v = bounded_sat_cgs(contested, two, 2, 2);
  REQUIRE(v.sat());
  CHECK(mc_atl(*v.witness, contested).contains(v.witness_state));
}

TEST_CASE("bounded_sat_cgs is independent of jobs", "[bounded_sat_cgs][property]") {
  Rng rng(42);
  AgentSet two{2};
  for (int i = 0; i < 15; ++i) {
    Formula f = random_formula(rng, LogicId::atl, {2, 3, two});
    SearchOptions one_job{true, 1}, three_jobs{true, 3};
    auto a = bounded_sat_cgs(f, two, 2, 2, one_job);
    auto b = bounded_sat_cgs(f, two, 2, 2, three_jobs);
    CHECK(a.sat() == b.sat());
    if (a.sat()) {
      CHECK(successor_graph(*a.witness) == successor_graph(*b.witness));
      CHECK(a.witness_state == b.witness_state);
      CHECK(mc_atl(*a.witness, f).contains(a.witness_state));
    }
  }
}

TEST_CASE("star of a contradiction has no small model", "[bounded_sat][embed]") {
  auto tr = embed(conj(var(1), neg(var(1))), LogicId::ctl);
  SearchOptions opts;
  opts.max_models = 50'000'000;
  auto v = bounded_sat(tr.star, LogicId::ctl, 3, opts);
  CHECK_FALSE(v.sat());
}
