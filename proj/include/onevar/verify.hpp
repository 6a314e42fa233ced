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

#pragma once

#include <array>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "onevar/embedding.hpp"
#include "onevar/io.hpp"
#include "onevar/random.hpp"
#include "onevar/satsearch.hpp"

namespace onevar {

struct VerifyOptions {
  std::uint64_t seed = 42;
  int cases = 100;
  int max_m = 5;
  std::uint64_t budget = 1'000'000;  // models per bounded search
  unsigned jobs = 1;
};

enum class VerifyStatus { pass, fail, budget };

inline std::string_view to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::pass: return "PASS";
    case VerifyStatus::fail: return "FAIL";
    case VerifyStatus::budget: return "BUDGET";
  }
  return "?";
}

struct SuiteReport {
  std::string suite;
  VerifyStatus status = VerifyStatus::pass;
  int checked = 0;
  int skipped = 0;             // cases cut off by the budget
  std::string counterexample;  // formula, model and state in full
};

namespace detail {

inline std::string set_text(const StateSet& s) {
  std::string out = "{";
  for (State x : s.members()) out += (out.size() > 1 ? "," : "") + std::to_string(x);
  return out + "}";
}

class SuiteRun {
 public:
  SuiteRun(std::string name, const VerifyOptions& opts) : opts_(opts), rng_(opts.seed) { report_.suite = std::move(name); }

  Rng& rng() { return rng_; }
  const VerifyOptions& opts() const { return opts_; }
  bool failed() const { return report_.status == VerifyStatus::fail; }
  void ok() { ++report_.checked; }
  void skip() { ++report_.skipped; }

  template <typename Model>
  void fail(const std::string& what, LogicId logic, const Formula& f, const Model& m, std::optional<State> s,
            const std::string& detail = {}) {
    std::ostringstream out;
    out << what << "\n  logic: " << to_string(logic) << "\n  formula: " << print_pretty(f, logic);
    if (s) out << "\n  state: " << *s;
    if (!detail.empty()) out << "\n  " << detail;
    out << "\n  model: " << to_json(m).dump();
    report_.status = VerifyStatus::fail;
    report_.counterexample = out.str();
  }

  SuiteReport finish() {
    if (report_.status != VerifyStatus::fail && report_.skipped > 0) report_.status = VerifyStatus::budget;
    return report_;
  }

 private:
  VerifyOptions opts_;
  Rng rng_;
  SuiteReport report_;
};

inline StateSet check_branching(const KripkeModel& m, const Formula& f, LogicId logic) {
  return logic == LogicId::ctl ? mc_ctl(m, f) : mc_ctlstar(m, f);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline SuiteReport suite_e1(const VerifyOptions& opts) {
  SuiteRun run("E1", opts);
  for (int i = 0; i < opts.cases && !run.failed(); ++i) {
    LogicId logic = i % 2 == 0 ? LogicId::ctl : LogicId::ctlstar;
    Formula f = random_formula(run.rng(), logic, {3, 4, AgentSet{1}});
    KripkeModel m = random_kripke(run.rng(), pick(run.rng(), 1, 6), 3);
    auto tr = embed(f, logic);
    StateSet want = check_branching(m, f, logic);
    StateSet got = check_branching(m, hat_top_collapse(tr), logic);
    if (want != got)
      run.fail("source and top collapse differ", logic, f, m, std::nullopt,
               "source: " + set_text(want) + " collapse: " + set_text(got));
    else
      run.ok();
  }
  return run.finish();
}

inline SuiteReport suite_e2(const VerifyOptions& opts) {
  SuiteRun run("E2", opts);
  AgentSet two{2};
  for (int i = 0; i < opts.cases && !run.failed(); ++i) {
    LogicId logic = std::array{LogicId::ctl, LogicId::ctlstar, LogicId::atl}[static_cast<std::size_t>(i % 3)];
    Formula f = random_formula(run.rng(), logic, {3, 4, two});
    auto tr = embed(f, logic, two);
    if (logic == LogicId::atl) {
      auto g = augment_with_guard(random_cgs(run.rng(), two, pick(run.rng(), 1, 4), 2, 3), tr);
      StateSet want = mc_atl(g, tr.normalized), got = mc_atl(g, tr.primed);
      if (want != got)
        run.fail("prime changes truth with the guard everywhere", logic, tr.normalized, g, std::nullopt,
                 "source: " + set_text(want) + " primed: " + set_text(got));
      else
        run.ok();
    } else {
      auto m = augment_with_guard(random_kripke(run.rng(), pick(run.rng(), 1, 5), 3), tr);
      StateSet want = check_branching(m, tr.normalized, logic), got = check_branching(m, tr.primed, logic);
      if (want != got)
        run.fail("prime changes truth with the guard everywhere", logic, tr.normalized, m, std::nullopt,
                 "source: " + set_text(want) + " primed: " + set_text(got));
      else
        run.ok();
    }
  }
  return run.finish();
}

inline SuiteReport suite_e3(const VerifyOptions& opts) {
  SuiteRun run("E3", opts);
  for (int k = 1; k <= opts.max_m && !run.failed(); ++k) {
    KripkeModel model = gadget_model_kripke(k, false);
    for (int m = 1; m <= opts.max_m && !run.failed(); ++m) {
      Formula a = gadget_formula(m, GadgetFlavor::branching);
      StateSet got = mc_ctl(model, a);
      if (got != (k == m ? StateSet(model.size(), {0}) : StateSet(model.size())))
        run.fail("gadget " + std::to_string(k), LogicId::ctl, a, model, std::nullopt, "holds at " + set_text(got));
      else
        run.ok();
    }
  }
  AgentSet two{2};
  for (int k = 1; k <= opts.max_m && !run.failed(); ++k) {
    ConcurrentGameModel game = gadget_model_cgs(k, two, {"x"});
    for (int m = 1; m <= opts.max_m && !run.failed(); ++m) {
      Formula a = gadget_formula(m, GadgetFlavor::alternating, 1, two);
      StateSet got = mc_atl(game, a);
      if (got != (k == m ? StateSet(game.size(), {0}) : StateSet(game.size())))
        run.fail("game gadget " + std::to_string(k), LogicId::atl, a, game, std::nullopt, "holds at " + set_text(got));
      else
        run.ok();
    }
  }
  return run.finish();
}

// Witness models give the replacements nonempty extensions; random edges and
// label flips then move them around.
inline SuiteReport suite_e4(const VerifyOptions& opts) {
  SuiteRun run("E4", opts);
  AgentSet two{2};
  auto tr = embed(conj(var(1), var(2)), LogicId::ctl);
  auto tra = embed(conj(var(1), var(2)), LogicId::atl, two);
  for (int i = 0; i < opts.cases && !run.failed(); ++i) {
    if (i % 2 == 0) {
      auto base = augment_with_guard(random_kripke(run.rng(), pick(run.rng(), 1, 4), 2), tr);
      KripkeModel m = witness_model_forward(base, 0, tr).model;
      for (int e = 0; e < 3; ++e) m.add_edge(static_cast<State>(pick(run.rng(), 0, m.size() - 1)),
                                             static_cast<State>(pick(run.rng(), 0, m.size() - 1)));
      for (int e = 0; e < 2; ++e) {
        State x = static_cast<State>(pick(run.rng(), 0, m.size() - 1));
        m.set_label(1, x, !m.holds(1, x));
      }
      Formula psi = random_formula(run.rng(), LogicId::ctl, {3, 4, AgentSet{1}});
      StateSet want = mc_ctl(pull_back_valuation(m, tr), psi);
      StateSet got = mc_ctl(m, substitute_all(psi, tr.sigma));
      if (want != got)
        run.fail("substitution lemma", LogicId::ctl, psi, m, std::nullopt,
                 "reinterpreted: " + set_text(want) + " substituted: " + set_text(got));
      else
        run.ok();
    } else {
      auto base = augment_with_guard(random_cgs(run.rng(), two, pick(run.rng(), 1, 3), 2, 2), tra);
      ConcurrentGameModel g = witness_model_cgs(base, 0, tra).model;
      Formula psi = random_formula(run.rng(), LogicId::atl, {3, 3, two});
      StateSet want = mc_atl(pull_back_valuation(g, tra), psi);
      StateSet got = mc_atl(g, substitute_all(psi, tra.sigma));
      if (want != got)
        run.fail("substitution lemma", LogicId::atl, psi, g, std::nullopt,
                 "reinterpreted: " + set_text(want) + " substituted: " + set_text(got));
      else
        run.ok();
    }
  }
  return run.finish();
}

// Models come from bounded search; cases whose search runs out of budget are
// counted as skipped.
inline SuiteReport suite_e5(const VerifyOptions& opts) {
  SuiteRun run("E5", opts);
  AgentSet two{2};
  SearchOptions search;
  search.jobs = opts.jobs;
  search.max_models = opts.budget;
  for (int i = 0; i < opts.cases && !run.failed(); ++i) {
    LogicId logic = std::array{LogicId::ctl, LogicId::ctlstar, LogicId::atl}[static_cast<std::size_t>(i % 3)];
    Formula f = random_formula(run.rng(), logic, {2, 3, two});
    auto tr = embed(f, logic, two);
    try {
      if (logic == LogicId::atl) {
        auto v = bounded_sat_cgs(f, two, 2, 2, search);
        if (!v.sat()) continue;
        auto g = augment_with_guard(*v.witness, tr);
        auto w = witness_model_cgs(g, v.witness_state, tr);
        if (!mc_atl(w.model, tr.star).contains(w.designated))
          run.fail("star fails on the game witness", logic, f, g, v.witness_state);
        else
          run.ok();
      } else {
        auto v = bounded_sat(f, logic, 3, search);
        if (!v.sat()) continue;
        auto m = augment_with_guard(*v.witness, tr);
        auto w = witness_model_forward(m, v.witness_state, tr);
        if (!check_branching(w.model, tr.star, logic).contains(w.designated))
          run.fail("star fails on the witness", logic, f, m, v.witness_state);
        else
          run.ok();
      }
    } catch (const BudgetExceeded&) {
      run.skip();
    }
  }
  return run.finish();
}

inline SuiteReport suite_e6(const VerifyOptions& opts) {
  SuiteRun run("E6", opts);
  AgentSet two{2};
  const std::array logics{LogicId::ctl, LogicId::ctlstar, LogicId::atl, LogicId::atlstar};
  for (int i = 0; i < opts.cases && !run.failed(); ++i) {
    LogicId logic = logics[static_cast<std::size_t>(i % 4)];
    Formula f = random_formula(run.rng(), logic, {4, 6, two});
    auto tr = embed(f, logic, two);
    std::uint64_t bound = star_size_constant * f.size() * f.size();
    if (variables(tr.star) != std::set<int>{1} || !in_logic(tr.star, logic) || tr.star.size() > bound)
      run.fail("star is not a bounded single-variable formula", logic, f, KripkeModel{}, std::nullopt,
               "star size " + std::to_string(tr.star.size()) + ", bound " + std::to_string(bound));
    else
      run.ok();
  }
  return run.finish();
}

}  // namespace detail

inline std::vector<std::string> suite_names() { return {"E1", "E2", "E3", "E4", "E5", "E6"}; }

/// Runs one property suite; throws LogicError for an unknown name.
inline SuiteReport run_suite(const std::string& name, const VerifyOptions& opts = {}) {
  static const std::map<std::string, std::function<SuiteReport(const VerifyOptions&)>> suites{
      {"E1", detail::suite_e1}, {"E2", detail::suite_e2}, {"E3", detail::suite_e3},
      {"E4", detail::suite_e4}, {"E5", detail::suite_e5}, {"E6", detail::suite_e6}};
  auto it = suites.find(name);
  if (it == suites.end()) throw LogicError("unknown suite '" + name + "'");
  return it->second(opts);
}

}  // namespace onevar
