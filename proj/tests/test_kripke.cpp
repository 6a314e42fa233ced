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

#include "onevar/io.hpp"
#include "onevar/kripke.hpp"
#include "onevar/parser.hpp"
#include "onevar/random.hpp"
#include "support/oracles.hpp"

using namespace onevar;

namespace {

KripkeModel loop_with_p1() {
  KripkeModel m(1);
  m.add_edge(0, 0);
  m.set_label(1, 0);
  return m;
}

Formula ctl(const char* text) { return parse(text, LogicId::ctl); }
Formula ctlstar(const char* text) { return parse(text, LogicId::ctlstar); }

}  // namespace

TEST_CASE("validate reports non-serial states", "[validate]") {
  CHECK(validate(loop_with_p1()).ok());
  KripkeModel m(2);
  m.add_edge(0, 1);
  auto r = validate(m);
  CHECK_FALSE(r.ok());
  CHECK(r.non_serial == std::vector<State>{1});
  CHECK_THROWS_AS(mc_ctl(m, ctl("p1")), ModelError);
}

TEST_CASE("mc_ctl basic examples", "[mc_ctl]") {
  auto m = loop_with_p1();
  CHECK(mc_ctl(m, ctl("A G p1")) == StateSet::all(1));

  KripkeModel cycle(2);
  cycle.add_edge(0, 1);
  cycle.add_edge(1, 0);
  cycle.set_label(1, 0);
  CHECK(mc_ctl(cycle, ctl("E F p1")) == StateSet::all(2));
  CHECK(mc_ctl(cycle, ctl("A X p1")) == StateSet(2, {1}));
  CHECK(mc_ctl(cycle, ctl("E G p1")).empty());
  CHECK_THROWS_AS(mc_ctl(cycle, ctlstar("A (X p1 -> p1)")), LogicError);
}

TEST_CASE("mc_ctlstar basic examples", "[mc_ctlstar]") {
  auto m = loop_with_p1();
  CHECK(mc_ctlstar(m, ctlstar("A X p1")) == StateSet::all(1));

  // 0 -> 1 -> 1, 0 -> 2 -> 2, p1 at 1.
  KripkeModel fork(3);
  fork.add_edge(0, 1);
  fork.add_edge(0, 2);
  fork.add_edge(1, 1);
  fork.add_edge(2, 2);
  fork.set_label(1, 1);
  CHECK(mc_ctlstar(fork, ctlstar("E (F G p1)")) == StateSet(3, {0, 1}));
  CHECK(mc_ctlstar(fork, ctlstar("A (F G p1 | G !p1)")) == StateSet::all(3));
  CHECK(mc_ctlstar(fork, ctlstar("A (G F p1)")) == StateSet(3, {1}));
  CHECK_THROWS_AS(mc_ctlstar(fork, parse("<<>> X p1", LogicId::atl)), LogicError);
}

TEST_CASE("exists_path_check basic examples", "[exists_path]") {
  auto m = loop_with_p1();
  CHECK(exists_path_check(m, 0, Formula::always(var(1))));
  KripkeModel two(2);
  two.add_edge(0, 1);
  two.add_edge(1, 1);
  two.set_label(1, 0);
  CHECK_FALSE(exists_path_check(two, 0, Formula::next(var(1))));
  CHECK(exists_path_check(two, 0, Formula::next(neg(var(1)))));
  CHECK_THROWS_AS(exists_path_check(two, 0, Formula::next(ax(var(1)))), LogicError);
}

TEST_CASE("exists_path_check agrees with lasso enumeration", "[exists_path][oracle]") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    auto m = random_kripke(rng, 1 + i % 4, 2);
    Formula path = random_path_formula(rng, LogicId::ctlstar, {2, 4, AgentSet{1}});
    StateSet fast = exists_path_states(m, path);
    auto label = [&](const Formula& g, State x) { return oracle::holds_ctlstar(m, x, g); };
    for (State s = 0; s < m.size(); ++s) {
      bool slow = oracle::exists_lasso(m, s, path, oracle::lasso_bound(m, path, 8), label);
      INFO(print(path) << " at " << s);
      CHECK(fast.contains(s) == slow);
    }
  }
}

TEST_CASE("mc_ctlstar agrees with the lasso oracle on random formulas", "[mc_ctlstar][oracle]") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    auto m = random_kripke(rng, 1 + i % 4, 2);
    Formula f = random_formula(rng, LogicId::ctlstar, {2, 4, AgentSet{1}});
    INFO(print(f));
    CHECK(mc_ctlstar(m, f) == oracle::states_ctlstar(m, f));
  }
}

TEST_CASE("mc_ctl agrees with mc_ctlstar and negation duality holds", "[mc_ctl][duality]") {
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    auto m = random_kripke(rng, 1 + i % 6, 3);
    Formula f = random_formula(rng, LogicId::ctl, {3, 4, AgentSet{1}});
    INFO(print(f));
    auto a = mc_ctl(m, f);
    CHECK(a == mc_ctlstar(m, f));
    CHECK(mc_ctl(m, neg(f)) == a.complement());
    CHECK(mc_ctlstar(m, neg(f)) == a.complement());
  }
}

TEST_CASE("mc_ctl matches path enumeration", "[mc_ctl][oracle]") {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    auto m = random_kripke(rng, 1 + i % 4, 2);
    Formula f = random_formula(rng, LogicId::ctl, {2, 3, AgentSet{1}});
    INFO(print(f));
    CHECK(mc_ctl(m, f) == oracle::states_ctlstar(m, f));
  }
}

TEST_CASE("derived connectives match their defining equivalences on all small models", "[derived][exhaustive]") {
  Formula p = var(1), q = var(2);
  std::vector<std::pair<Formula, Formula>> pairs = {
      {conj(p, q), neg(implies(p, neg(q)))},
      {disj(p, q), implies(neg(p), q)},
      {ex(p), exists(Formula::next(p))},
      {ef(p), exists(eventually(p))},
      {ag(p), Formula::forall(globally(p, LogicId::ctlstar))},
      {eg(p), exists(globally(p, LogicId::ctlstar))},
      {af(p), Formula::forall(eventually(p))},
      {top(), neg(bottom())},
  };
  for (std::size_t n = 1; n <= 3; ++n) {
    oracle::for_each_small_kripke(n, 2, [&](const KripkeModel& m) {
      CtlStarChecker c(m);
      for (const auto& [a, b] : pairs) REQUIRE(c.check(a) == c.check(b));
      // Pointwise semantics of the Boolean abbreviations.
      auto P = m.label(1), Q = m.label(2);
      REQUIRE(c.check(conj(p, q)) == (P & Q));
      REQUIRE(c.check(disj(p, q)) == (P | Q));
      REQUIRE(c.check(iff(p, q)) == ((P & Q) | (P.complement() & Q.complement())));
    });
  }
}

TEST_CASE("restrict_submodel", "[restrict]") {
  KripkeModel m(3);
  m.add_edge(0, 0);
  m.add_edge(0, 1);
  m.add_edge(1, 2);
  m.add_edge(2, 2);
  for (State s = 0; s < 3; ++s) m.set_label(5, s);
  auto all = restrict_submodel(m, 1, 5);
  CHECK(all.model.size() == 2);
  CHECK(all.origin == std::vector<State>{1, 2});

  m.set_label(5, 1, false);
  auto only = restrict_submodel(m, 0, 5);
  CHECK(only.model.size() == 1);
  CHECK(only.model.has_edge(0, 0));

  KripkeModel bad(2);
  bad.add_edge(0, 1);
  bad.add_edge(1, 1);
  bad.set_label(5, 0);
  CHECK_THROWS_AS(restrict_submodel(bad, 0, 5), ModelError);
}

TEST_CASE("restricted submodels of guarded models are serial and guarded", "[restrict][property]") {
  Rng rng(15);
  const int guard = 3;
  Formula theta = conj(var(guard), ag(iff(ex(var(guard)), var(guard))));
  int used = 0;
  for (int i = 0; i < 400; ++i) {
    auto m = random_kripke(rng, 2 + i % 5, 3);
    auto sat = mc_ctl(m, theta);
    for (State s : sat.members()) {
      auto sub = restrict_submodel(m, s, guard);
      CHECK(validate(sub.model).ok());
      CHECK(sub.model.label(guard).is_full());
      ++used;
    }
  }
  CHECK(used > 20);
}

TEST_CASE("Kripke JSON round trip and format", "[io]") {
  Rng rng(23);
  for (int i = 0; i < 30; ++i) {
    KripkeModel m = random_kripke(rng, 1 + i % 5, 3);
    Json j = to_json(m);
    CHECK(kripke_from_json(Json::parse(j.dump())) == m);
  }
  KripkeModel m = kripke_from_json(Json::parse(R"({"states": 2, "edges": [[0,1],[1,1]], "val": {"1": [1]}})"));
  CHECK(m.size() == 2);
  CHECK(m.has_edge(0, 1));
  CHECK(m.holds(1, 1));
  CHECK_FALSE(m.holds(1, 0));
  CHECK(to_json(m).dump() == R"({"states":2,"edges":[[0,1],[1,1]],"val":{"1":[1]}})");
  CHECK_THROWS_AS(kripke_from_json(Json::parse(R"({"states": 2, "edges": [[0,2]]})")), ModelError);
  CHECK_THROWS_AS(kripke_from_json(Json::parse(R"({"states": 1, "val": {"0": [0]}})")), ModelError);
  CHECK_THROWS_AS(kripke_from_json(Json::parse(R"({"edges": []})")), ModelError);
  CHECK_THROWS_AS(kripke_from_json(Json::parse(R"({"states": "x"})")), ModelError);
}

TEST_CASE("Kripke DOT export", "[io]") {
  KripkeModel m(2);
  m.add_edge(0, 1);
  m.add_edge(1, 0);
  m.set_label(2, 1);
  std::string dot = to_dot(m, State{0});
  CHECK(dot.find("0 [label=\"s0\\n{}\", shape=doublecircle]") != std::string::npos);
  CHECK(dot.find("1 [label=\"s1\\n{p2}\"]") != std::string::npos);
  CHECK(dot.find("0 -> 1;") != std::string::npos);
}
