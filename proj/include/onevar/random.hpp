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

#include <random>
#include <string>
#include <vector>

#include "onevar/cgs.hpp"
#include "onevar/formula.hpp"
#include "onevar/kripke.hpp"

namespace onevar {

using Rng = std::mt19937_64;

struct RandomFormulaOptions {
  int variables = 2;
  int height = 4;  // surface nesting depth, leaves count as 1
  AgentSet agents{2};
};

namespace detail {

class FormulaSampler {
 public:
  FormulaSampler(Rng& rng, LogicId logic, RandomFormulaOptions opts, bool modal = true)
      : rng_(rng), logic_(logic), opts_(opts), modal_(modal) {}

  Formula state(int h) {
    if (h <= 1 || pick(5) == 0) return leaf();
    switch (pick(6)) {
      case 0: return neg(state(h - 1));
      case 1: return conj(state(h - 1), state(h - 1));
      case 2: return disj(state(h - 1), state(h - 1));
      case 3: return implies(state(h - 1), state(h - 1));
      default: return modal_ ? modal(h) : leaf();
    }
  }

  Formula path(int h) {
    if (h <= 1 || pick(4) == 0) return state(h);
    switch (pick(7)) {
      case 0: return Formula::next(path(h - 1));
      case 1: return Formula::until(path(h - 1), path(h - 1));
      case 2: return globally(path(h - 1), logic_);
      case 3: return eventually(path(h - 1));
      case 4: return neg(path(h - 1));
      case 5: return conj(path(h - 1), path(h - 1));
      default: return state(h);
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Formula leaf() {
    int r = pick(opts_.variables + 2);
    if (r < opts_.variables) return var(r + 1);
    return r == opts_.variables ? bottom() : top();
  }

  Coalition coalition() {
    Coalition c;
    for (int a = 1; a <= opts_.agents.count(); ++a)
      if (pick(2) == 1) c.insert(a);
    return c;
  }

  Formula modal(int h) {
    switch (logic_) {
      case LogicId::ctl:
        switch (pick(8)) {
          case 0: return ax(state(h - 1));
          case 1: return ex(state(h - 1));
          case 2: return au(state(h - 1), state(h - 1));
          case 3: return eu(state(h - 1), state(h - 1));
          case 4: return af(state(h - 1));
          case 5: return ef(state(h - 1));
          case 6: return ag(state(h - 1));
          default: return eg(state(h - 1));
        }
      case LogicId::ctlstar:
        return pick(2) == 0 ? Formula::forall(path(h - 1)) : exists(path(h - 1));
      case LogicId::atl: {
        Coalition c = coalition();
        switch (pick(4)) {
          case 0: return Formula::coalition(c, Formula::next(state(h - 1)));
          case 1: return Formula::coalition(c, Formula::always(state(h - 1)));
          case 2: return Formula::coalition(c, Formula::until(state(h - 1), state(h - 1)));
          default: return Formula::coalition(c, eventually(state(h - 1)));
        }
      }
      case LogicId::atlstar: {
        Formula p = path(h - 1);
        if (p.is_state()) p = Formula::next(p);
        return Formula::coalition(coalition(), p);
      }
    }
    return bottom();
  }

  Rng& rng_;
  LogicId logic_;
  RandomFormulaOptions opts_;
  bool modal_;
};

}  // namespace detail

/// Random state formula of the logic with surface depth at most opts.height.
inline Formula random_formula(Rng& rng, LogicId logic, RandomFormulaOptions opts = {}) {
  return detail::FormulaSampler(rng, logic, opts).state(opts.height);
}

/// Random path formula whose state subformulas are quantifier-free.
inline Formula random_path_formula(Rng& rng, LogicId logic, RandomFormulaOptions opts = {}) {
  return detail::FormulaSampler(rng, logic, opts, false).path(opts.height);
}

/// Random serial Kripke model; each edge is present with probability density
/// and every state keeps at least one successor.
inline KripkeModel random_kripke(Rng& rng, std::size_t states, int variables, double density = 0.4) {
  KripkeModel m(states);
  std::bernoulli_distribution edge(density), coin(0.5);
  std::uniform_int_distribution<State> any(0, static_cast<State>(states - 1));
  for (State s = 0; s < states; ++s) {
    for (State t = 0; t < states; ++t)
      if (edge(rng)) m.add_edge(s, t);
    if (m.successors(s).empty()) m.add_edge(s, any(rng));
    for (int v = 1; v <= variables; ++v)
      if (coin(rng)) m.set_label(v, s);
  }
  return m;
}

/// Random game model: each agent has a random non-empty subset of the
/// actions at each state and every profile has a uniformly random outcome.
inline ConcurrentGameModel random_cgs(Rng& rng, AgentSet agents, std::size_t states, int actions, int variables) {
  std::vector<std::string> names;
  for (int a = 0; a < actions; ++a) names.push_back("a" + std::to_string(a));
  ConcurrentGameModel g(agents, states, names);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<State> any(0, static_cast<State>(states - 1));
  std::uniform_int_distribution<int> any_action(0, actions - 1);
  for (State s = 0; s < states; ++s) {
    for (int ag = 1; ag <= agents.count(); ++ag) {
      std::vector<int> ids;
      for (int a = 0; a < actions; ++a)
        if (coin(rng)) ids.push_back(a);
      if (ids.empty()) ids.push_back(any_action(rng));
      g.set_available(ag, s, ids);
    }
    for (std::size_t i = 0; i < g.profile_count(s); ++i) g.set_delta_index(s, i, any(rng));
    for (int v = 1; v <= variables; ++v)
      if (coin(rng)) g.set_label(v, s);
  }
  return g;
}

}  // namespace onevar
