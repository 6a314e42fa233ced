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

#include "onevar/embedding.hpp"
#include "onevar/io.hpp"
#include "onevar/parser.hpp"
#include "onevar/random.hpp"

using namespace onevar;

namespace {

Formula p(int i) { return var(i); }

StateSet check(const KripkeModel& m, const Formula& f, LogicId logic) {
  return logic == LogicId::ctl ? mc_ctl(m, f) : mc_ctlstar(m, f);
}

}  // namespace

TEST_CASE("prime follows the clause tables", "[prime]") {
  auto f = parse("A X p1", LogicId::ctlstar);
  CHECK(prime(f, LogicId::ctlstar, 2) ==
        Formula::forall(implies(globally(p(2), LogicId::ctlstar), Formula::next(p(1)))));
  CHECK(prime(ax(p(1)), LogicId::ctl, 2) == ax(implies(p(2), p(1))));
  CHECK(prime(implies(p(1), p(1)), LogicId::ctl, 2) == implies(p(1), p(1)));
  CHECK(prime(implies(p(1), p(1)), LogicId::atlstar, 2) == implies(p(1), p(1)));
  CHECK(prime(au(p(1), p(2)), LogicId::ctl, 3, GuardPlacement::uniform) == au(p(1), conj(p(3), p(2))));
  CHECK(prime(au(p(1), p(2)), LogicId::ctl, 3) == au(p(1), implies(p(3), p(2))));
  CHECK(prime(eu(p(1), p(2)), LogicId::ctl, 3) == eu(p(1), conj(p(3), p(2))));
  CHECK_THROWS_AS(prime(p(2), LogicId::ctl, 2), LogicError);
  CHECK_THROWS_AS(prime(Formula::forall(Formula::always(p(1))), LogicId::ctl, 2), LogicError);
}

TEST_CASE("prime for alternating-time logics", "[prime]") {
  AgentSet two{2};
  Coalition none = Coalition::none(), one = Coalition::from_bits(1);
  auto nx = [](Coalition c, Formula a) { return Formula::coalition(c, Formula::next(std::move(a))); };
  auto gl = [](Coalition c, Formula a) { return Formula::coalition(c, Formula::always(std::move(a))); };
  auto un = [](Coalition c, Formula a, Formula b) { return Formula::coalition(c, Formula::until(std::move(a), std::move(b))); };
  Formula g = p(2);
  // Uniform: the same guard form for every coalition.
  CHECK(prime(nx(one, p(1)), LogicId::atl, 2, GuardPlacement::uniform) == nx(one, implies(g, p(1))));
  CHECK(prime(gl(none, p(1)), LogicId::atl, 2, GuardPlacement::uniform) == gl(none, implies(g, p(1))));
  CHECK(prime(un(none, p(1), p(1)), LogicId::atl, 2, GuardPlacement::uniform) == un(none, p(1), conj(g, p(1))));
  // Exit aware: implication only for the empty coalition.
  CHECK(prime(nx(one, p(1)), LogicId::atl, 2) == nx(one, conj(g, p(1))));
  CHECK(prime(nx(none, p(1)), LogicId::atl, 2) == nx(none, implies(g, p(1))));
  CHECK(prime(un(none, p(1), p(1)), LogicId::atl, 2) == un(none, p(1), implies(g, p(1))));
  CHECK(prime(un(one, p(1), p(1)), LogicId::atl, 2) == un(one, p(1), conj(g, p(1))));
  auto star = parse("<<1>> (X p1 & F p1)", LogicId::atlstar, two);
  CHECK(prime(star, LogicId::atlstar, 2, GuardPlacement::uniform) ==
        Formula::coalition(one, conj(Formula::always(g), star.lhs())));
}

TEST_CASE("theta", "[theta]") {
  CHECK(theta(LogicId::ctl, 2) == conj(p(2), ag(iff(ex(p(2)), p(2)))));
  AgentSet two{2};
  CHECK(theta(LogicId::atl, 2, two) ==
        conj(p(2), Formula::coalition(Coalition::none(),
                                      Formula::always(iff(Formula::coalition(Coalition::all(two), Formula::next(p(2))), p(2))))));
  CHECK(classify(theta(LogicId::ctlstar, 4)).variables == std::set<int>{4});
  CHECK(classify(theta(LogicId::ctl, 2)).is_ctl);
  CHECK(classify(theta(LogicId::atl, 2, two)).is_atl);
}

TEST_CASE("chi and gadget formulas", "[chi]") {
  CHECK(chi(0, GadgetFlavor::branching) == ag(p(1)));
  CHECK(chi(1, GadgetFlavor::branching) == conj(p(1), ex(conj(neg(p(1)), ex(ag(p(1)))))));
  CHECK(chi(0, GadgetFlavor::alternating) == Formula::coalition(Coalition::none(), Formula::always(p(1))));
  auto d1 = chi(2, GadgetFlavor::branching).size() - chi(1, GadgetFlavor::branching).size();
  auto d2 = chi(5, GadgetFlavor::branching).size() - chi(4, GadgetFlavor::branching).size();
  CHECK(d1 == d2);
  CHECK(gadget_formula(1, GadgetFlavor::branching) == conj(chi(1, GadgetFlavor::branching), ex(ag(neg(p(1))))));
  CHECK(gadget_wrapper(2, GadgetFlavor::branching) == ex(gadget_formula(2, GadgetFlavor::branching)));
  AgentSet two{2};
  CHECK(gadget_wrapper(1, GadgetFlavor::alternating, 1, two) ==
        Formula::coalition(Coalition::all(two), Formula::next(gadget_formula(1, GadgetFlavor::alternating, 1, two))));
  CHECK(classify(gadget_wrapper(3, GadgetFlavor::branching)).is_ctl);
  CHECK(classify(gadget_wrapper(3, GadgetFlavor::alternating, 1, two)).is_atl);
}

TEST_CASE("Kripke gadget shape", "[gadget]") {
  auto m1 = gadget_model_kripke(1);
  CHECK(m1.size() == 4);
  CHECK(m1.edge_count() == 7);
  CHECK(m1.label(1) == StateSet(4, {0, 3}));
  CHECK(m1.name(0) == "r_1");
  CHECK(validate(gadget_model_kripke(3)).ok());
  CHECK(gadget_model_kripke(2, false).edge_count() == gadget_model_kripke(2).edge_count() - 1);
}

TEST_CASE("gadget roots are characterised by their formulas", "[gadget][E3]") {
  for (int k = 1; k <= 5; ++k) {
    for (bool loop : {true, false}) {
      auto model = gadget_model_kripke(k, loop);
      for (int m = 1; m <= 5; ++m) {
        auto sat = mc_ctl(model, gadget_formula(m, GadgetFlavor::branching));
        INFO("k=" << k << " m=" << m << " loop=" << loop);
        CHECK(sat == (k == m ? StateSet(model.size(), {0}) : StateSet(model.size())));
      }
    }
  }
}

TEST_CASE("game gadget roots are characterised by their formulas", "[gadget][E3]") {
  AgentSet two{2};
  for (int k = 1; k <= 4; ++k) {
    auto game = gadget_model_cgs(k, two, {"x", "y"});
    CHECK(validate(game).ok());
    CHECK(game.label(1) == gadget_model_kripke(k).label(1));
    CHECK(mc_atl(game, Formula::coalition(Coalition::none(), Formula::always(neg(p(1))))).contains(1));
    for (int m = 1; m <= 4; ++m) {
      auto sat = mc_atl(game, gadget_formula(m, GadgetFlavor::alternating, 1, two));
      INFO("k=" << k << " m=" << m);
      CHECK(sat == (k == m ? StateSet(game.size(), {0}) : StateSet(game.size())));
    }
  }
  CHECK_THROWS_AS(gadget_model_cgs(1, two, {}), ModelError);
}

TEST_CASE("embed assembles the pipeline", "[embed]") {
  auto tr = embed(p(1), LogicId::ctl);
  CHECK(tr.n == 1);
  CHECK(tr.guard == 2);
  CHECK(tr.hat == conj(theta(LogicId::ctl, 2), p(1)));
  CHECK(tr.sigma.at(1) == gadget_wrapper(1, GadgetFlavor::branching));
  CHECK(tr.sigma.at(2) == gadget_wrapper(2, GadgetFlavor::branching));
  CHECK(classify(tr.star).variables == std::set<int>{1});
  CHECK(tr.star == substitute_all(tr.hat, tr.sigma));

  // Variables are renumbered in first-occurrence order.
  auto tr2 = embed(parse("p7 -> A X p3", LogicId::ctl), LogicId::ctl);
  CHECK(tr2.renaming == std::map<int, int>{{7, 1}, {3, 2}});
  CHECK(tr2.guard == 3);
  CHECK(hat_top_collapse(tr2) == rename_variables(substitute(tr2.hat, 3, top()), {{1, 7}, {2, 3}}));
}

TEST_CASE("top collapse is equivalent to the source", "[hat_top_collapse][E1]") {
  Rng rng(31);
  for (LogicId logic : {LogicId::ctl, LogicId::ctlstar}) {
    for (int i = 0; i < 150; ++i) {
      Formula f = random_formula(rng, logic, {3, 4, AgentSet{1}});
      auto tr = embed(f, logic);
      Formula c = hat_top_collapse(tr);
      CHECK(variables(c).count(tr.guard) <= variables(f).count(tr.guard));
      auto m = random_kripke(rng, 1 + static_cast<std::size_t>(i % 6), 4);
      INFO(print(f));
      CHECK(check(m, f, logic) == check(m, c, logic));
    }
  }
}

TEST_CASE("guard everywhere makes prime transparent", "[prime][E2]") {
  Rng rng(32);
  for (auto placement : {GuardPlacement::exit_aware, GuardPlacement::uniform}) {
    for (LogicId logic : {LogicId::ctl, LogicId::ctlstar}) {
      for (int i = 0; i < 100; ++i) {
        Formula f = random_formula(rng, logic, {3, 4, AgentSet{1}});
        auto m = random_kripke(rng, 1 + static_cast<std::size_t>(i % 5), 3);
        m.set_label(4, StateSet::all(m.size()));
        INFO(print(f));
        CHECK(check(m, f, logic) == check(m, prime(f, logic, 4, placement), logic));
      }
    }
    for (int i = 0; i < 100; ++i) {
      AgentSet two{2};
      Formula f = random_formula(rng, LogicId::atl, {3, 4, two});
      auto g = random_cgs(rng, two, 1 + static_cast<std::size_t>(i % 4), 2, 3);
      for (State s = 0; s < g.size(); ++s) g.set_label(4, s);
      INFO(print(f));
      CHECK(mc_atl(g, f) == mc_atl(g, prime(f, LogicId::atl, 4, placement)));
    }
  }
}

TEST_CASE("substitution lemma", "[sigma][E4]") {
  Rng rng(33);
  auto tr = embed(parse("p1 -> p2", LogicId::ctl), LogicId::ctl);
  int nontrivial = 0;
  for (int i = 0; i < 100; ++i) {
    // Start from a witness so the replacements hold somewhere, then perturb
    // edges and labels at random.
    auto base = random_kripke(rng, 1 + static_cast<std::size_t>(i % 4), 2);
    base.set_label(3, StateSet::all(base.size()));
    auto m = witness_model_forward(base, 0, tr).model;
    std::uniform_int_distribution<State> any(0, static_cast<State>(m.size() - 1));
    for (int e = 0; e < 3; ++e) m.add_edge(any(rng), any(rng));
    for (int e = 0; e < 2; ++e) {
      State x = any(rng);
      m.set_label(1, x, !m.holds(1, x));
    }
    auto psi = random_formula(rng, LogicId::ctl, {3, 4, AgentSet{1}});
    auto pulled = pull_back_valuation(m, tr);
    INFO(print(psi));
    CHECK(mc_ctl(m, substitute_all(psi, tr.sigma)) == mc_ctl(pulled, psi));
    nontrivial += !pulled.label(1).empty() || !pulled.label(2).empty();
  }
  CHECK(nontrivial > 50);

  AgentSet two{2};
  auto tra = embed(parse("<<1>> X p1 -> p2", LogicId::atl, two), LogicId::atl, two);
  for (int i = 0; i < 60; ++i) {
    auto base = random_cgs(rng, two, 1 + static_cast<std::size_t>(i % 3), 2, 2);
    for (State s = 0; s < base.size(); ++s) base.set_label(3, s);
    auto g = witness_model_cgs(base, 0, tra).model;
    auto psi = random_formula(rng, LogicId::atl, {3, 3, two});
    INFO(print(psi));
    CHECK(mc_atl(g, substitute_all(psi, tra.sigma)) == mc_atl(pull_back_valuation(g, tra), psi));
  }
}

TEST_CASE("witness model example", "[witness]") {
  KripkeModel m(1);
  m.add_edge(0, 0);
  m.set_label(1, 0);
  m.set_label(2, 0);
  auto tr = embed(p(1), LogicId::ctl);
  auto w = witness_model_forward(m, 0, tr);
  CHECK(w.model.size() == 1 + 4 + 6);
  CHECK(w.model.successors(0) == std::vector<State>{0, 1, 5});
  CHECK(w.model.name(1) == "r_1");
  CHECK_FALSE(w.model.holds(1, 0));
  CHECK(mc_ctl(w.model, tr.star).contains(w.designated));
  CHECK(mc_ctlstar(w.model, tr.star).contains(w.designated));
  for (int i = 1; i <= 2; ++i) CHECK(mc_ctl(w.model, tr.sigma.at(i)) == StateSet(w.model.size(), {0}));

  KripkeModel unguarded(1);
  unguarded.add_edge(0, 0);
  CHECK_THROWS_AS(witness_model_forward(unguarded, 0, tr), ModelError);
}

TEST_CASE("forward preservation on random satisfied formulas", "[witness][E5]") {
  Rng rng(34);
  int checked = 0;
  for (LogicId logic : {LogicId::ctl, LogicId::ctlstar}) {
    for (int i = 0; i < 120; ++i) {
      Formula f = random_formula(rng, logic, {2, logic == LogicId::ctl ? 4 : 3, AgentSet{1}});
      auto tr = embed(f, logic);
      auto m = augment_with_guard(random_kripke(rng, 1 + static_cast<std::size_t>(i % 4), 2), tr);
      auto hat = check(m, tr.hat, logic);
      for (State s : hat.members()) {
        auto w = witness_model_forward(m, s, tr);
        INFO(print(f) << " at " << s);
        CHECK(check(w.model, tr.star, logic).contains(w.designated));
        // Replacements agree with the original valuation on copied states.
        for (int v = 1; v <= tr.guard; ++v) {
          auto b = mc_ctl(w.model, tr.sigma.at(v));
          for (State x = 0; x < w.origin.size(); ++x) CHECK(b.contains(x) == m.holds(v, w.origin[x]));
        }
        ++checked;
        break;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("game witness", "[witness][cgs]") {
  AgentSet two{2};
  ConcurrentGameModel g(two, 1, {"x"});
  g.set_delta(0, std::vector<int>{0, 0}, 0);
  g.set_label(1, 0);
  auto tr = embed(p(1), LogicId::atl, two);
  auto aug = augment_with_guard(g, tr);
  auto w = witness_model_cgs(aug, 0, tr);
  CHECK(validate(w.model).ok());
  int exit1 = w.model.action_id("exit1");
  CHECK(w.model.delta(0, std::vector<int>{exit1, exit1}) == 1);
  CHECK(w.model.name(1) == "r_1");
  CHECK(w.model.delta(0, std::vector<int>{exit1, 0}) == 0);
  CHECK(mc_atl(w.model, tr.star).contains(w.designated));
}

TEST_CASE("game forward preservation on random satisfied formulas", "[witness][cgs][E5]") {
  Rng rng(35);
  AgentSet two{2};
  int checked = 0;
  for (int i = 0; i < 250; ++i) {
    Formula f = random_formula(rng, LogicId::atl, {2, 3, two});
    auto tr = embed(f, LogicId::atl, two);
    auto g = augment_with_guard(random_cgs(rng, two, 1 + static_cast<std::size_t>(i % 3), 2, 2), tr);
    for (State s : mc_atl(g, tr.hat).members()) {
      auto w = witness_model_cgs(g, s, tr);
      REQUIRE(validate(w.model).ok());
      INFO(print(f) << " at " << s);
      CHECK(mc_atl(w.model, tr.star).contains(w.designated));
      ++checked;
      break;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("single variable output of bounded size", "[embed][E6]") {
  Rng rng(36);
  AgentSet two{2};
  for (LogicId logic : {LogicId::ctl, LogicId::ctlstar, LogicId::atl, LogicId::atlstar}) {
    for (int i = 0; i < 100; ++i) {
      Formula f = random_formula(rng, logic, {4, 6, two});
      auto tr = embed(f, logic, two);
      auto c = classify(tr.star);
      CHECK(c.variables == std::set<int>{1});
      CHECK(in_logic(tr.star, logic));
      CHECK(tr.star.size() <= star_size_constant * f.size() * f.size());
    }
  }
}

// The literal clauses fail forward preservation; these pin the failures.
TEST_CASE("uniform guard placement loses satisfiability on exit paths", "[uniform][counterexample]") {
  // A F p1 from a state without p1 that reaches p1.
  KripkeModel m(2);
  m.add_edge(0, 1);
  m.add_edge(1, 1);
  m.set_label(1, 1);
  Formula f = af(p(1));
  auto exit_aware = embed(f, LogicId::ctl);
  auto uniform = embed(f, LogicId::ctl, AgentSet{1}, GuardPlacement::uniform);
  auto w = witness_model_forward(augment_with_guard(m, exit_aware), 0, exit_aware);
  CHECK(mc_ctl(w.model, exit_aware.star).contains(w.designated));
  CHECK(mc_ctl(augment_with_guard(m, uniform), uniform.hat).contains(0));
  auto wu = witness_model_forward(augment_with_guard(m, uniform), 0, uniform);
  CHECK_FALSE(mc_ctl(wu.model, uniform.star).contains(wu.designated));

  // Same failure for the empty coalition in ATL.
  AgentSet one{1};
  auto g = cgs_from_kripke(m);
  Formula fa = ctl_to_atl(f, one);
  auto atl_exit = embed(fa, LogicId::atl, one);
  auto atl_uniform = embed(fa, LogicId::atl, one, GuardPlacement::uniform);
  auto wa = witness_model_cgs(augment_with_guard(g, atl_exit), 0, atl_exit);
  CHECK(mc_atl(wa.model, atl_exit.star).contains(wa.designated));
  auto wb = witness_model_cgs(augment_with_guard(g, atl_uniform), 0, atl_uniform);
  CHECK_FALSE(mc_atl(wb.model, atl_uniform.star).contains(wb.designated));
}

TEST_CASE("gadget root loops break forward preservation", "[witness][counterexample]") {
  KripkeModel m(1);
  m.add_edge(0, 0);
  m.set_label(1, 0);
  auto tr = embed(ax(p(1)), LogicId::ctl);
  auto aug = augment_with_guard(m, tr);
  CHECK(mc_ctl(aug, tr.hat).contains(0));
  auto plain = witness_model_forward(aug, 0, tr);
  CHECK(mc_ctl(plain.model, tr.star).contains(plain.designated));
  auto looped = witness_model_forward(aug, 0, tr, true);
  CHECK_FALSE(mc_ctl(looped.model, tr.star).contains(looped.designated));
}

TEST_CASE("translation result JSON", "[embed][io]") {
  auto tr = embed(parse("<<1>> G p3", LogicId::atlstar, AgentSet{2}), LogicId::atlstar, AgentSet{2});
  Json j = to_json(tr);
  CHECK(j["logic"] == "atlstar");
  CHECK(j["mapping"]["p3"] == "p1");
  CHECK(j["guard"] == "p2");
  CHECK(j["star_variables"] == Json::array({"p1"}));
  CHECK(j["sigma"].size() == 2);
  CHECK(j["sizes"]["star"].get<std::uint64_t>() == tr.star.size());
  CHECK(j["sizes"]["star"].get<std::uint64_t>() <= j["sizes"]["bound"].get<std::uint64_t>());
  CHECK(parse(j["star"].get<std::string>(), LogicId::atlstar, AgentSet{2}) == tr.star);
  CHECK(parse(j["sigma"]["p1"].get<std::string>(), LogicId::atlstar, AgentSet{2}) == tr.sigma.at(1));
}
