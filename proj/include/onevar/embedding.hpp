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

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "onevar/cgs.hpp"
#include "onevar/errors.hpp"
#include "onevar/formula.hpp"
#include "onevar/kripke.hpp"

namespace onevar {

/// Where the guard variable enters the translated temporal clauses.
///
/// exit_aware: universal clauses tolerate leaving the guarded region
/// (p -> phi), existential ones and proper coalitions require staying in it
/// (p & phi). uniform: the clause tables taken literally, with the same guard
/// form for every coalition and p & psi for every until.
enum class GuardPlacement { exit_aware, uniform };

enum class GadgetFlavor { branching, alternating };

inline GadgetFlavor flavor_of(LogicId logic) {
  return is_alternating(logic) ? GadgetFlavor::alternating : GadgetFlavor::branching;
}

namespace detail {

inline Formula guarded(bool exit_aware_universal, const Formula& g, Formula a) {
  return exit_aware_universal ? implies(g, std::move(a)) : conj(g, std::move(a));
}

class Primer {
 public:
  Primer(LogicId logic, int guard, GuardPlacement placement) : logic_(logic), guard_(guard), placement_(placement) {}

  Formula prime(const Formula& f) {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second;
    Formula r = compute(f);
    memo_.emplace(f.id(), r);
    keep_.push_back(f);
    return r;
  }

 private:
  Formula g() const { return var(guard_); }
  bool exit_aware() const { return placement_ == GuardPlacement::exit_aware; }

  Formula compute(const Formula& f) {
    switch (f.op()) {
      case Op::var:
      case Op::falsum: return f;
      case Op::implies: return implies(prime(f.lhs()), prime(f.rhs()));
      case Op::next: return Formula::next(prime(f.lhs()));
      case Op::until: return Formula::until(prime(f.lhs()), prime(f.rhs()));
      case Op::always: return Formula::always(prime(f.lhs()));
      case Op::forall: return logic_ == LogicId::ctl ? ctl_forall(f) : Formula::forall(implies(globally(g(), logic_), prime(f.lhs())));
      case Op::coalition: return logic_ == LogicId::atl ? atl_coalition(f) : atlstar_coalition(f);
    }
    throw LogicError("unexpected operator");
  }

  Formula ctl_forall(const Formula& f) {
    const Formula& p = f.lhs();
    if (p.op() == Op::next) return Formula::forall(Formula::next(implies(g(), prime(p.lhs()))));
    if (p.op() == Op::until)
      return Formula::forall(Formula::until(prime(p.lhs()), guarded(exit_aware(), g(), prime(p.rhs()))));
    // Negated until: the universal dual of an existential until.
    const Formula& u = p.lhs();
    return Formula::forall(neg(Formula::until(prime(u.lhs()), conj(g(), prime(u.rhs())))));
  }

  Formula atl_coalition(const Formula& f) {
    const Formula& p = f.lhs();
    Coalition c = f.agents();
    bool universal = exit_aware() && c.empty();
    switch (p.op()) {
      case Op::next:
        return Formula::coalition(c, Formula::next(guarded(universal || !exit_aware(), g(), prime(p.lhs()))));
      case Op::always:
        return Formula::coalition(c, Formula::always(guarded(universal || !exit_aware(), g(), prime(p.lhs()))));
      case Op::until:
        return Formula::coalition(c, Formula::until(prime(p.lhs()), guarded(universal, g(), prime(p.rhs()))));
      default: throw LogicError("not an ATL formula");
    }
  }

  Formula atlstar_coalition(const Formula& f) {
    Coalition c = f.agents();
    Formula always_guard = Formula::always(g());
    Formula body = prime(f.lhs());
    if (exit_aware() && c.empty()) return Formula::coalition(c, implies(always_guard, body));
    return Formula::coalition(c, conj(always_guard, body));
  }

  LogicId logic_;
  int guard_;
  GuardPlacement placement_;
  std::unordered_map<const void*, Formula> memo_;
  std::vector<Formula> keep_;
};

inline void require_logic(const Formula& f, LogicId logic) {
  if (!f.is_state()) throw SortError("path formula where a state formula is required");
  if (!in_logic(f, logic)) throw LogicError("formula is not part of " + std::string(to_string(logic)));
}

}  // namespace detail

/// Relativises f to the states (paths) where the guard variable holds.
inline Formula prime(const Formula& f, LogicId logic, int guard, GuardPlacement placement = GuardPlacement::exit_aware) {
  detail::require_logic(f, logic);
  if (variables(f).count(guard) != 0) throw LogicError("guard variable p" + std::to_string(guard) + " occurs in the formula");
  return detail::Primer(logic, guard, placement).prime(f);
}

/// Guard condition: the guard holds now and, everywhere reachable, holds
/// exactly where it can be kept for one more step.
inline Formula theta(LogicId logic, int guard, AgentSet agents = AgentSet{1}) {
  Formula p = var(guard);
  if (is_alternating(logic)) {
    Coalition all = Coalition::all(agents);
    return conj(p, Formula::coalition(Coalition::none(),
                                      Formula::always(iff(Formula::coalition(all, Formula::next(p)), p))));
  }
  return conj(p, ag(iff(ex(p), p)));
}

/// Alternating p / not-p chain of length 2k ending in a p-sink.
inline Formula chi(int k, GadgetFlavor flavor, int variable = 1, AgentSet agents = AgentSet{1}) {
  if (k < 0) throw LogicError("chi needs k >= 0");
  Formula p = var(variable);
  if (flavor == GadgetFlavor::branching) {
    Formula c = ag(p);
    for (int i = 0; i < k; ++i) c = conj(p, ex(conj(neg(p), ex(c))));
    return c;
  }
  Coalition all = Coalition::all(agents);
  auto can_next = [&](Formula a) { return Formula::coalition(all, Formula::next(std::move(a))); };
  Formula c = Formula::coalition(Coalition::none(), Formula::always(p));
  for (int i = 0; i < k; ++i) c = conj(p, can_next(conj(neg(p), can_next(c))));
  return c;
}

/// Formula true exactly at the root of the m-th gadget.
inline Formula gadget_formula(int m, GadgetFlavor flavor, int variable = 1, AgentSet agents = AgentSet{1}) {
  if (m < 1) throw LogicError("gadget index must be >= 1");
  Formula p = var(variable);
  if (flavor == GadgetFlavor::branching) return conj(chi(m, flavor, variable), ex(ag(neg(p))));
  Coalition all = Coalition::all(agents);
  return conj(chi(m, flavor, variable, agents),
              Formula::coalition(all, Formula::next(Formula::coalition(Coalition::none(), Formula::always(neg(p))))));
}

/// Formula true exactly at the states with a successor that is the root of
/// the m-th gadget.
inline Formula gadget_wrapper(int m, GadgetFlavor flavor, int variable = 1, AgentSet agents = AgentSet{1}) {
  Formula a = gadget_formula(m, flavor, variable, agents);
  if (flavor == GadgetFlavor::branching) return ex(a);
  return Formula::coalition(Coalition::all(agents), Formula::next(a));
}

namespace detail {

// Appends gadget m; returns the index of its root.
inline State append_kripke_gadget(KripkeModel& k, int m, bool root_loop, int variable) {
  State r = k.add_state("r_" + std::to_string(m));
  State b = k.add_state("b^" + std::to_string(m));
  std::vector<State> a;
  for (int i = 1; i <= 2 * m; ++i) a.push_back(k.add_state("a" + std::to_string(i) + "^" + std::to_string(m)));
  k.add_edge(r, b);
  k.add_edge(r, a.front());
  for (std::size_t i = 0; i + 1 < a.size(); ++i) k.add_edge(a[i], a[i + 1]);
  if (root_loop) k.add_edge(r, r);
  k.add_edge(b, b);
  for (State s : a) k.add_edge(s, s);
  k.set_label(variable, r);
  for (std::size_t i = 1; i < a.size(); i += 2) k.set_label(variable, a[i]);
  return r;
}

inline std::size_t gadget_size(int m) { return static_cast<std::size_t>(2 * m + 2); }

// Fills gadget m into states [offset, offset + gadget_size(m)).
inline void fill_cgs_gadget(ConcurrentGameModel& g, State offset, int m, const std::vector<int>& actions, int d,
                            int variable) {
  State r = offset, b = offset + 1;
  auto a = [&](int i) { return offset + 1 + static_cast<State>(i); };  // a(1) .. a(2m)
  std::vector<int> ids = actions;
  ids.push_back(d);
  g.set_name(r, "r_" + std::to_string(m));
  g.set_name(b, "b^" + std::to_string(m));
  for (int i = 1; i <= 2 * m; ++i) g.set_name(a(i), "a" + std::to_string(i) + "^" + std::to_string(m));
  for (State s = offset; s < offset + gadget_size(m); ++s) {
    for (int ag = 1; ag <= g.agents().count(); ++ag) g.set_available(ag, s, ids);
    for (std::size_t i = 0; i < g.profile_count(s); ++i) {
      State target;
      if (s == r) {
        target = g.profile_at(s, i)[0] == d ? b : a(1);
      } else if (s == b) {
        target = b;
      } else {
        int idx = static_cast<int>(s - offset - 1);
        target = idx < 2 * m ? a(idx + 1) : s;
      }
      g.set_delta_index(s, i, target);
    }
  }
  g.set_label(variable, r);
  for (int i = 2; i <= 2 * m; i += 2) g.set_label(variable, a(i));
}

inline std::string fresh_action(const std::vector<std::string>& taken, std::string name) {
  while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "'";
  return name;
}

}  // namespace detail

/// Kripke gadget for index m: root, a p-free sink, and a 2m-step chain that
/// alternates the variable. With root_loop every state has a self-loop.
inline KripkeModel gadget_model_kripke(int m, bool root_loop = true, int variable = 1) {
  if (m < 1) throw LogicError("gadget index must be >= 1");
  KripkeModel k;
  detail::append_kripke_gadget(k, m, root_loop, variable);
  return k;
}

/// Game gadget for index m; every agent may play any pool action or "d".
/// Agent 1 playing "d" at the root leads to the sink, anything else to the
/// chain.
inline ConcurrentGameModel gadget_model_cgs(int m, AgentSet agents, const std::vector<std::string>& pool,
                                            int variable = 1) {
  if (m < 1) throw LogicError("gadget index must be >= 1");
  if (pool.empty()) throw ModelError("empty action pool");
  std::vector<std::string> names = pool;
  std::string d = detail::fresh_action(names, "d");
  names.push_back(d);
  ConcurrentGameModel g(agents, detail::gadget_size(m), names);
  std::vector<int> ids;
  for (std::size_t i = 0; i < pool.size(); ++i) ids.push_back(static_cast<int>(i));
  detail::fill_cgs_gadget(g, 0, m, ids, static_cast<int>(pool.size()), variable);
  return g;
}

/// size(star) <= star_size_constant * size(source)^2 for every source formula.
/// Per source node prime adds at most 9 nodes and one guard occurrence, theta
/// has 37 nodes plus 5 guard occurrences, and each replacement has at most
/// 26 * (n + 1) + 47 nodes with n <= size(source). Summing gives
/// 26 s^2 + 213 s + 407 <= 646 s^2.
inline constexpr std::uint64_t star_size_constant = 650;

/// Everything produced by the single-variable embedding of one formula.
struct TranslationResult {
  Formula source;
  LogicId logic = LogicId::ctl;
  AgentSet agents{1};
  GuardPlacement placement = GuardPlacement::exit_aware;
  std::map<int, int> renaming;  // source variable -> canonical index
  Formula normalized;           // source over p1..pn
  int n = 0;
  int guard = 1;
  Formula primed, theta, hat;
  std::map<int, Formula> sigma;
  Formula star;
  int out_var = 1;
};

inline TranslationResult embed(const Formula& f, LogicId logic, AgentSet agents = AgentSet{1},
                               GuardPlacement placement = GuardPlacement::exit_aware) {
  detail::require_logic(f, logic);
  TranslationResult tr;
  tr.source = f;
  tr.logic = logic;
  tr.agents = agents;
  tr.placement = placement;
  int next = 1;
  for (int v : variables_in_order(f)) tr.renaming[v] = next++;
  tr.normalized = rename_variables(f, tr.renaming);
  tr.n = static_cast<int>(tr.renaming.size());
  tr.guard = tr.n + 1;
  tr.primed = prime(tr.normalized, logic, tr.guard, placement);
  tr.theta = theta(logic, tr.guard, agents);
  tr.hat = conj(tr.theta, tr.primed);
  for (int i = 1; i <= tr.guard; ++i) tr.sigma.emplace(i, gadget_wrapper(i, flavor_of(logic), tr.out_var, agents));
  tr.star = substitute_all(tr.hat, tr.sigma);
  return tr;
}

/// The hat formula with the guard replaced by true, over the source's
/// original variable names.
inline Formula hat_top_collapse(const TranslationResult& tr) {
  Formula collapsed = substitute(tr.hat, tr.guard, top());
  std::map<int, int> back;
  for (const auto& [orig, canon] : tr.renaming) back[canon] = orig;
  return rename_variables(collapsed, back);
}

/// Copy of m over canonical variable numbering with the guard true everywhere.
/// Variables that do not occur in the source are dropped.
inline KripkeModel augment_with_guard(const KripkeModel& m, const TranslationResult& tr) {
  KripkeModel out(m.size());
  for (const auto& [s, t] : m.edges()) out.add_edge(s, t);
  for (const auto& [orig, canon] : tr.renaming) out.set_label(canon, m.label(orig));
  out.set_label(tr.guard, StateSet::all(m.size()));
  if (m.has_names())
    for (State s = 0; s < m.size(); ++s) out.set_name(s, m.name(s));
  return out;
}

inline ConcurrentGameModel augment_with_guard(const ConcurrentGameModel& m, const TranslationResult& tr) {
  ConcurrentGameModel out = m;
  for (const auto& [v, set] : m.valuation()) set.for_each([&](State s) { out.set_label(v, s, false); });
  for (const auto& [orig, canon] : tr.renaming) m.label(orig).for_each([&](State s) { out.set_label(canon, s); });
  for (State s = 0; s < m.size(); ++s) out.set_label(tr.guard, s);
  return out;
}

template <typename Model>
struct Witness {
  Model model;
  State designated = 0;
  std::vector<State> origin;  // original index of each copied state
};

/// Disjoint union of the part of m reachable from s with the gadgets
/// 1..n+1; each state x gets an edge to the root of gadget i exactly when
/// x satisfies p_i. Gadget roots carry no self-loop unless root_loops is set;
/// with the loop, the root of the guard gadget itself satisfies the guard's
/// replacement and universal clauses see paths that stay there.
inline Witness<KripkeModel> witness_model_forward(const KripkeModel& m, State s, const TranslationResult& tr,
                                                  bool root_loops = false) {
  if (is_alternating(tr.logic)) throw LogicError("Kripke witness for an alternating-time translation");
  Submodel sub = reachable_submodel(m, s);
  if (!sub.model.label(tr.guard).is_full())
    throw ModelError("guard p" + std::to_string(tr.guard) + " is not true at every reachable state");
  Witness<KripkeModel> w;
  w.origin = sub.origin;
  w.model = KripkeModel(sub.model.size());
  for (const auto& [x, y] : sub.model.edges()) w.model.add_edge(x, y);
  for (State x = 0; x < sub.model.size(); ++x) w.model.set_name(x, m.name(sub.origin[x]));
  for (int i = 1; i <= tr.guard; ++i) {
    State root = detail::append_kripke_gadget(w.model, i, root_loops, tr.out_var);
    sub.model.label(i).for_each([&](State x) { w.model.add_edge(x, root); });
  }
  w.designated = static_cast<State>(std::find(sub.origin.begin(), sub.origin.end(), s) - sub.origin.begin());
  return w;
}

/// Part of the game reachable from s, with the same action alphabet.
inline Witness<ConcurrentGameModel> reachable_subgame(const ConcurrentGameModel& g, State s) {
  KripkeModel graph = successor_graph(g);
  Submodel sub = reachable_submodel(graph, s);
  std::vector<std::int64_t> index(g.size(), -1);
  for (std::size_t i = 0; i < sub.origin.size(); ++i) index[sub.origin[i]] = static_cast<std::int64_t>(i);
  Witness<ConcurrentGameModel> w{ConcurrentGameModel(g.agents(), sub.origin.size(), g.actions()), 0, sub.origin};
  for (std::size_t i = 0; i < sub.origin.size(); ++i) {
    State x = sub.origin[i];
    for (int a = 1; a <= g.agents().count(); ++a) w.model.set_available(a, static_cast<State>(i), g.available(a, x));
    for (std::size_t p = 0; p < g.profile_count(x); ++p)
      w.model.set_delta_index(static_cast<State>(i), p, static_cast<State>(index[g.delta_index(x, p)]));
    for (const auto& [v, set] : g.valuation())
      if (set.contains(x)) w.model.set_label(v, static_cast<State>(i));
    w.model.set_name(static_cast<State>(i), g.name(x));
  }
  w.designated = static_cast<State>(index[s]);
  return w;
}

/// Game analogue of witness_model_forward. At a state satisfying p_i every
/// agent may also play the exit action for gadget i; the profile where all
/// agents play it leads to that gadget's root. Any other profile with exit
/// actions behaves as if each exit action were the agent's first original one.
inline Witness<ConcurrentGameModel> witness_model_cgs(const ConcurrentGameModel& m, State s,
                                                      const TranslationResult& tr) {
  if (!is_alternating(tr.logic)) throw LogicError("game witness for a branching-time translation");
  if (m.agents().count() != tr.agents.count()) throw ModelError("agent count differs from the translation");
  Witness<ConcurrentGameModel> sub = reachable_subgame(m, s);
  const ConcurrentGameModel& g = sub.model;
  if (!g.label(tr.guard).is_full())
    throw ModelError("guard p" + std::to_string(tr.guard) + " is not true at every reachable state");

  std::vector<std::string> names = g.actions();
  const int original_actions = static_cast<int>(names.size());
  std::vector<int> pool(static_cast<std::size_t>(original_actions));
  for (int i = 0; i < original_actions; ++i) pool[static_cast<std::size_t>(i)] = i;
  const int d = static_cast<int>(names.size());
  names.push_back(detail::fresh_action(names, "d"));
  std::vector<int> exit_id(static_cast<std::size_t>(tr.guard + 1), -1);
  for (int i = 1; i <= tr.guard; ++i) {
    exit_id[static_cast<std::size_t>(i)] = static_cast<int>(names.size());
    names.push_back(detail::fresh_action(names, "exit" + std::to_string(i)));
  }

  std::size_t total = g.size();
  std::vector<State> root(static_cast<std::size_t>(tr.guard + 1));
  for (int i = 1; i <= tr.guard; ++i) {
    root[static_cast<std::size_t>(i)] = static_cast<State>(total);
    total += detail::gadget_size(i);
  }
  Witness<ConcurrentGameModel> w{ConcurrentGameModel(g.agents(), total, names), sub.designated, sub.origin};
  const int k = g.agents().count();
  for (State x = 0; x < g.size(); ++x) {
    std::vector<int> exits;
    for (int i = 1; i <= tr.guard; ++i)
      if (g.holds(i, x)) exits.push_back(exit_id[static_cast<std::size_t>(i)]);
    for (int a = 1; a <= k; ++a) {
      std::vector<int> av = g.available(a, x);
      av.insert(av.end(), exits.begin(), exits.end());
      w.model.set_available(a, x, av);
    }
    for (std::size_t p = 0; p < w.model.profile_count(x); ++p) {
      Profile prof = w.model.profile_at(x, p);
      bool all_same_exit = prof[0] >= original_actions + 1 &&
                           std::all_of(prof.begin(), prof.end(), [&](int act) { return act == prof[0]; });
      if (all_same_exit) {
        int i = static_cast<int>(std::find(exit_id.begin(), exit_id.end(), prof[0]) - exit_id.begin());
        w.model.set_delta_index(x, p, root[static_cast<std::size_t>(i)]);
        continue;
      }
      for (int a = 0; a < k; ++a)
        if (prof[static_cast<std::size_t>(a)] >= original_actions) prof[static_cast<std::size_t>(a)] = g.available(a + 1, x).front();
      w.model.set_delta_index(x, p, g.delta(x, prof));
    }
    w.model.set_name(x, g.name(x));
  }
  for (int i = 1; i <= tr.guard; ++i) detail::fill_cgs_gadget(w.model, root[static_cast<std::size_t>(i)], i, pool, d, tr.out_var);
  return w;
}

/// Valuation pulled back through the substitution: p_i holds where the
/// replacement of p_i holds in m. Other variables are dropped.
inline KripkeModel pull_back_valuation(const KripkeModel& m, const TranslationResult& tr) {
  KripkeModel out(m.size());
  for (const auto& [x, y] : m.edges()) out.add_edge(x, y);
  CtlChecker checker(m);
  for (const auto& [i, b] : tr.sigma) out.set_label(i, checker.check(b));
  return out;
}

inline ConcurrentGameModel pull_back_valuation(const ConcurrentGameModel& m, const TranslationResult& tr) {
  ConcurrentGameModel out = m;
  for (const auto& [v, set] : m.valuation()) set.for_each([&](State s) { out.set_label(v, s, false); });
  AtlChecker checker(m);
  for (const auto& [i, b] : tr.sigma) checker.check(b).for_each([&](State s) { out.set_label(i, s); });
  return out;
}

}  // namespace onevar
