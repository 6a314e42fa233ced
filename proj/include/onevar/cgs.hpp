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

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "onevar/errors.hpp"
#include "onevar/formula.hpp"
#include "onevar/kripke.hpp"
#include "onevar/state_set.hpp"

namespace onevar {

/// Action profile: one action id per agent, agent 1 first.
using Profile = std::vector<int>;

/// Concurrent game model with a dense transition table. Actions are ids into
/// a shared alphabet; each (agent, state) has a sorted list of available ids.
class ConcurrentGameModel {
 public:
  static constexpr State undefined = UINT32_MAX;

  ConcurrentGameModel() : agents_(1) {}
  ConcurrentGameModel(AgentSet agents, std::size_t states, std::vector<std::string> actions)
      : agents_(agents), actions_(std::move(actions)), rows_(states) {
    if (actions_.empty()) throw ModelError("empty action alphabet");
    for (auto& row : rows_) {
      row.available.assign(static_cast<std::size_t>(agents_.count()), std::vector<int>{0});
      row.delta.assign(1, undefined);
    }
  }

  AgentSet agents() const noexcept { return agents_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<std::string>& actions() const noexcept { return actions_; }

  int action_id(const std::string& name) const {
    auto it = std::find(actions_.begin(), actions_.end(), name);
    if (it == actions_.end()) throw ModelError("unknown action '" + name + "'");
    return static_cast<int>(it - actions_.begin());
  }

  /// Replaces the available actions; clears the transitions of that state.
  void set_available(int agent, State s, std::vector<int> ids) {
    check_agent(agent);
    check_state(s);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) throw ModelError("agent " + std::to_string(agent) + " has no action at state " + std::to_string(s));
    for (int a : ids)
      if (a < 0 || static_cast<std::size_t>(a) >= actions_.size()) throw ModelError("action id out of range");
    Row& row = rows_[s];
    row.available[static_cast<std::size_t>(agent - 1)] = std::move(ids);
    std::size_t count = 1;
    for (const auto& av : row.available) count *= av.size();
    row.delta.assign(count, undefined);
  }

  const std::vector<int>& available(int agent, State s) const {
    check_agent(agent);
    return rows_.at(s).available[static_cast<std::size_t>(agent - 1)];
  }

  bool is_available(int agent, State s, int action) const {
    const auto& av = available(agent, s);
    return std::binary_search(av.begin(), av.end(), action);
  }

  std::size_t profile_count(State s) const { return rows_.at(s).delta.size(); }

  /// Mixed-radix index of a profile at s; agent 1 is the most significant digit.
  std::size_t profile_index(State s, std::span<const int> profile) const {
    const Row& row = rows_.at(s);
    if (profile.size() != row.available.size()) throw ModelError("profile has the wrong number of agents");
    std::size_t index = 0;
    for (std::size_t a = 0; a < profile.size(); ++a) {
      const auto& av = row.available[a];
      auto it = std::lower_bound(av.begin(), av.end(), profile[a]);
      if (it == av.end() || *it != profile[a])
        throw ModelError("action '" + action_name(profile[a]) + "' is not available to agent " +
                         std::to_string(a + 1) + " at state " + std::to_string(s));
      index = index * av.size() + static_cast<std::size_t>(it - av.begin());
    }
    return index;
  }

  Profile profile_at(State s, std::size_t index) const {
    const Row& row = rows_.at(s);
    Profile p(row.available.size());
    for (std::size_t a = row.available.size(); a-- > 0;) {
      const auto& av = row.available[a];
      p[a] = av[index % av.size()];
      index /= av.size();
    }
    return p;
  }

  void set_delta(State s, std::span<const int> profile, State target) {
    check_state(target);
    rows_.at(s).delta[profile_index(s, profile)] = target;
  }
  void set_delta_index(State s, std::size_t index, State target) {
    check_state(target);
    rows_.at(s).delta.at(index) = target;
  }

  State delta(State s, std::span<const int> profile) const { return rows_.at(s).delta[profile_index(s, profile)]; }
  State delta_index(State s, std::size_t index) const { return rows_[s].delta[index]; }

  /// Calls f(profile, target) for every available profile at s.
  template <typename F>
  void for_each_profile(State s, F&& f) const {
    for (std::size_t i = 0; i < profile_count(s); ++i) f(profile_at(s, i), rows_[s].delta[i]);
  }

  std::vector<State> successors(State s) const {
    std::vector<State> out(rows_.at(s).delta.begin(), rows_.at(s).delta.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), undefined), out.end());
    return out;
  }

  void set_label(int variable, State s, bool value = true) {
    check_state(s);
    if (variable < 1) throw ModelError("variable index must be >= 1");
    auto it = val_.find(variable);
    if (it == val_.end()) it = val_.emplace(variable, StateSet(size())).first;
    it->second.set(s, value);
    if (it->second.empty()) val_.erase(it);
  }
  StateSet label(int variable) const {
    auto it = val_.find(variable);
    return it == val_.end() ? StateSet(size()) : it->second;
  }
  bool holds(int variable, State s) const {
    auto it = val_.find(variable);
    return it != val_.end() && it->second.contains(s);
  }
  const std::map<int, StateSet>& valuation() const noexcept { return val_; }

  void set_name(State s, std::string name) {
    check_state(s);
    names_.resize(size());
    names_[s] = std::move(name);
  }
  std::string name(State s) const {
    if (s < names_.size() && !names_[s].empty()) return names_[s];
    return "s" + std::to_string(s);
  }
  bool has_names() const noexcept { return !names_.empty(); }

  std::string action_name(int id) const {
    return id >= 0 && static_cast<std::size_t>(id) < actions_.size() ? actions_[static_cast<std::size_t>(id)]
                                                                     : "#" + std::to_string(id);
  }

 private:
  struct Row {
    std::vector<std::vector<int>> available;
    std::vector<State> delta;
  };

  void check_agent(int agent) const {
    if (!agents_.contains(agent)) throw ModelError("agent " + std::to_string(agent) + " out of range");
  }
  void check_state(State s) const {
    if (s >= size()) throw ModelError("state " + std::to_string(s) + " out of range");
  }

  AgentSet agents_;
  std::vector<std::string> actions_;
  std::vector<Row> rows_;
  std::map<int, StateSet> val_;
  std::vector<std::string> names_;
};

inline ValidationReport validate(const ConcurrentGameModel& m) {
  ValidationReport r;
  if (m.size() == 0) r.problems.push_back("model has no states");
  for (State s = 0; s < m.size(); ++s) {
    for (std::size_t i = 0; i < m.profile_count(s); ++i) {
      if (m.delta_index(s, i) == ConcurrentGameModel::undefined) {
        r.non_serial.push_back(s);
        r.problems.push_back("transition undefined at state " + m.name(s));
        break;
      }
    }
  }
  return r;
}

/// Choice of one action for each member of a coalition.
struct CAction {
  Coalition coalition;
  std::map<int, int> choice;
};

/// States reachable in one step when the coalition plays ca at s.
inline StateSet outcomes(const ConcurrentGameModel& m, State s, const CAction& ca) {
  for (int a : ca.coalition.members()) {
    auto it = ca.choice.find(a);
    if (it == ca.choice.end()) throw ModelError("C-action lacks a choice for agent " + std::to_string(a));
    if (!m.is_available(a, s, it->second))
      throw ModelError("action '" + m.action_name(it->second) + "' is not available to agent " + std::to_string(a));
  }
  StateSet out(m.size());
  m.for_each_profile(s, [&](const Profile& p, State t) {
    for (const auto& [a, act] : ca.choice)
      if (ca.coalition.contains(a) && p[static_cast<std::size_t>(a - 1)] != act) return;
    out.insert(t);
  });
  return out;
}

namespace detail {

inline void require_total(const ConcurrentGameModel& m) {
  auto report = validate(m);
  if (!report.ok()) throw ModelError("invalid game model: " + report.message());
}

}  // namespace detail

/// Controllable predecessor: states where the coalition has a C-action all of
/// whose outcomes lie in x.
inline StateSet pre(const ConcurrentGameModel& m, Coalition c, const StateSet& x) {
  StateSet out(m.size());
  const int k = m.agents().count();
  for (State s = 0; s < m.size(); ++s) {
    // Key of a profile: mixed radix over the coalition's digits.
    std::vector<std::size_t> radix(static_cast<std::size_t>(k));
    for (int a = 1; a <= k; ++a) radix[static_cast<std::size_t>(a - 1)] = m.available(a, s).size();
    std::size_t keys = 1;
    for (int a : c.members()) keys *= radix[static_cast<std::size_t>(a - 1)];
    std::vector<char> bad(keys);
    std::vector<std::size_t> digit(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < m.profile_count(s); ++i) {
      std::size_t rest = i;
      for (std::size_t a = static_cast<std::size_t>(k); a-- > 0;) {
        digit[a] = rest % radix[a];
        rest /= radix[a];
      }
      std::size_t key = 0;
      for (int a : c.members()) key = key * radix[static_cast<std::size_t>(a - 1)] + digit[static_cast<std::size_t>(a - 1)];
      if (!x.contains(m.delta_index(s, i))) bad[key] = 1;
    }
    out.set(s, std::find(bad.begin(), bad.end(), 0) != bad.end());
  }
  return out;
}

/// Global ATL checker for one model; memoised per formula node.
class AtlChecker {
 public:
  explicit AtlChecker(const ConcurrentGameModel& m) : m_(m) { detail::require_total(m); }

  StateSet check(const Formula& f) {
    if (!in_logic(f, LogicId::atl)) throw LogicError("not an ATL formula");
    for_each_subformula(f, [&](const Formula& g) {
      if (g.op() == Op::coalition && !g.agents().within(m_.agents()))
        throw LogicError("coalition mentions an agent the model does not have");
    });
    return eval(f);
  }

 private:
  StateSet eval(const Formula& f) {
    auto it = memo_.find(f.id());
    if (it != memo_.end()) return it->second;
    StateSet r = compute(f);
    memo_.emplace(f.id(), r);
    keep_.push_back(f);
    return r;
  }

  StateSet compute(const Formula& f) {
    switch (f.op()) {
      case Op::var: return m_.label(f.var());
      case Op::falsum: return StateSet(m_.size());
      case Op::implies: return eval(f.lhs()).complement() | eval(f.rhs());
      case Op::coalition: {
        const Formula& p = f.lhs();
        Coalition c = f.agents();
        if (p.op() == Op::next) return pre(m_, c, eval(p.lhs()));
        if (p.op() == Op::always) {
          StateSet a = eval(p.lhs());
          StateSet z = a;
          while (true) {
            StateSet next = a & pre(m_, c, z);
            if (next == z) return z;
            z = std::move(next);
          }
        }
        if (p.op() == Op::until) {
          StateSet a = eval(p.lhs()), b = eval(p.rhs());
          StateSet z = b;
          while (true) {
            StateSet next = b | (a & pre(m_, c, z));
            if (next == z) return z;
            z = std::move(next);
          }
        }
        break;
      }
      default: break;
    }
    throw LogicError("not an ATL formula");
  }

  const ConcurrentGameModel& m_;
  std::unordered_map<const void*, StateSet> memo_;
  std::vector<Formula> keep_;
};

inline StateSet mc_atl(const ConcurrentGameModel& m, const Formula& f) { return AtlChecker(m).check(f); }

struct OracleOptions {
  std::uint64_t budget = 1u << 20;  // memoryless strategies per modality
  unsigned jobs = 1;
};

namespace detail {

// Winning states of one memoryless strategy for a coalition objective.
// choice[s][a] is the position of agent a's action, or -1 outside the coalition.
inline StateSet winning_under(const ConcurrentGameModel& m, const std::vector<std::vector<int>>& choice, Op objective,
                              const StateSet& a, const StateSet& b) {
  const std::size_t n = m.size();
  std::vector<std::vector<State>> succ(n);
  for (State s = 0; s < n; ++s) {
    m.for_each_profile(s, [&](const Profile& p, State t) {
      for (std::size_t ag = 0; ag < p.size(); ++ag) {
        int pos = choice[s][ag];
        if (pos >= 0 && m.available(static_cast<int>(ag + 1), s)[static_cast<std::size_t>(pos)] != p[ag]) return;
      }
      succ[s].push_back(t);
    });
  }
  StateSet win(n);
  switch (objective) {
    case Op::next:
      for (State s = 0; s < n; ++s)
        win.set(s, std::all_of(succ[s].begin(), succ[s].end(), [&](State t) { return a.contains(t); }));
      break;
    case Op::always: {
      // Lose exactly when some reachable state violates a.
      StateSet lose = a.complement();
      bool changed = true;
      while (changed) {
        changed = false;
        for (State s = 0; s < n; ++s)
          if (!lose.contains(s) && std::any_of(succ[s].begin(), succ[s].end(), [&](State t) { return lose.contains(t); })) {
            lose.insert(s);
            changed = true;
          }
      }
      win = lose.complement();
      break;
    }
    case Op::until: {
      // Win exactly when every path through a-and-not-b states reaches b:
      // least fixpoint over the pruned graph.
      win = b;
      bool changed = true;
      while (changed) {
        changed = false;
        for (State s = 0; s < n; ++s)
          if (!win.contains(s) && a.contains(s) &&
              std::all_of(succ[s].begin(), succ[s].end(), [&](State t) { return win.contains(t); })) {
            win.insert(s);
            changed = true;
          }
      }
      break;
    }
    default: throw LogicError("unsupported objective");
  }
  return win;
}

class StrategyOracle {
 public:
  StrategyOracle(const ConcurrentGameModel& m, OracleOptions opts) : m_(m), opts_(opts) {}

  StateSet eval(const Formula& f) {
    switch (f.op()) {
      case Op::var: return m_.label(f.var());
      case Op::falsum: return StateSet(m_.size());
      case Op::implies: return eval(f.lhs()).complement() | eval(f.rhs());
      case Op::coalition: {
        const Formula& p = f.lhs();
        StateSet a = eval(p.lhs());
        StateSet b = p.op() == Op::until ? eval(p.rhs()) : StateSet(m_.size());
        return modality(f.agents(), p.op(), a, b);
      }
      default: throw LogicError("not an ATL formula");
    }
  }

 private:
  StateSet modality(Coalition c, Op objective, const StateSet& a, const StateSet& b) {
    const std::size_t n = m_.size();
    const int k = m_.agents().count();
    // Digits of the strategy index: one per (coalition agent, state).
    std::vector<std::pair<State, int>> slots;
    std::vector<std::size_t> radix;
    std::uint64_t total = 1;
    for (State s = 0; s < n; ++s)
      for (int ag : c.members()) {
        slots.emplace_back(s, ag);
        radix.push_back(m_.available(ag, s).size());
        total *= radix.back();
        if (total > opts_.budget) throw BudgetExceeded("strategy enumeration budget exceeded");
      }

    auto run = [&](std::uint64_t begin, std::uint64_t end, StateSet& acc) {
      std::vector<std::vector<int>> choice(n, std::vector<int>(static_cast<std::size_t>(k), -1));
      for (std::uint64_t idx = begin; idx < end; ++idx) {
        std::uint64_t rest = idx;
        for (std::size_t i = slots.size(); i-- > 0;) {
          choice[slots[i].first][static_cast<std::size_t>(slots[i].second - 1)] = static_cast<int>(rest % radix[i]);
          rest /= radix[i];
        }
        acc |= winning_under(m_, choice, objective, a, b);
        if (acc.is_full()) return;
      }
    };

    unsigned jobs = std::max(1u, std::min<unsigned>(opts_.jobs, static_cast<unsigned>(std::min<std::uint64_t>(total, 64))));
    std::vector<StateSet> parts(jobs, StateSet(n));
    if (jobs == 1) {
      run(0, total, parts[0]);
    } else {
      std::vector<std::thread> workers;
      for (unsigned j = 0; j < jobs; ++j)
        workers.emplace_back(run, total * j / jobs, total * (j + 1) / jobs, std::ref(parts[j]));
      for (auto& w : workers) w.join();
    }
    StateSet out(n);
    for (const auto& p : parts) out |= p;
    return out;
  }

  const ConcurrentGameModel& m_;
  OracleOptions opts_;
};

}  // namespace detail

/// Decides an ATL formula by enumerating memoryless strategies for every
/// coalition modality. Throws BudgetExceeded when the enumeration is too large.
inline StateSet strategy_oracle_states(const ConcurrentGameModel& m, const Formula& f, OracleOptions opts = {}) {
  detail::require_total(m);
  if (!in_logic(f, LogicId::atl)) throw LogicError("not an ATL formula");
  return detail::StrategyOracle(m, opts).eval(f);
}

inline bool strategy_oracle(const ConcurrentGameModel& m, State s, const Formula& f, OracleOptions opts = {}) {
  if (s >= m.size()) throw ModelError("state out of range");
  return strategy_oracle_states(m, f, opts).contains(s);
}

/// One-agent game whose actions at s are the successors of s.
inline ConcurrentGameModel cgs_from_kripke(const KripkeModel& m) {
  detail::require_serial(m);
  std::vector<std::string> actions;
  for (State t = 0; t < m.size(); ++t) actions.push_back("to_" + std::to_string(t));
  ConcurrentGameModel g(AgentSet{1}, m.size(), actions);
  for (State s = 0; s < m.size(); ++s) {
    std::vector<int> ids(m.successors(s).begin(), m.successors(s).end());
    g.set_available(1, s, ids);
    for (State t : m.successors(s)) g.set_delta(s, std::vector<int>{static_cast<int>(t)}, t);
    if (m.has_names()) g.set_name(s, m.name(s));
  }
  for (const auto& [v, set] : m.valuation()) set.for_each([&](State s) { g.set_label(v, s); });
  return g;
}

/// The Kripke model of one-step outcomes, with the same valuation.
inline KripkeModel successor_graph(const ConcurrentGameModel& g) {
  KripkeModel m(g.size());
  for (State s = 0; s < g.size(); ++s) {
    for (State t : g.successors(s)) m.add_edge(s, t);
    if (g.has_names()) m.set_name(s, g.name(s));
  }
  for (const auto& [v, set] : g.valuation()) m.set_label(v, set);
  return m;
}

}  // namespace onevar
