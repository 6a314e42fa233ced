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
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "onevar/cgs.hpp"
#include "onevar/errors.hpp"
#include "onevar/formula.hpp"
#include "onevar/kripke.hpp"

namespace onevar {

struct SearchStats {
  std::uint64_t models_examined = 0;
  double elapsed_seconds = 0;
};

struct SearchOptions {
  bool prune_isomorphic = true;
  unsigned jobs = 1;
  std::uint64_t max_models = UINT64_MAX;  // BudgetExceeded beyond this
  std::function<void(const SearchStats&)> progress;  // called once per size bound
};

enum class SatStatus { sat, unknown };

/// Outcome of a bounded search. UNKNOWN never means unsatisfiable.
template <typename Model>
struct SatVerdict {
  SatStatus status = SatStatus::unknown;
  std::optional<Model> witness;
  State witness_state = 0;
  std::uint64_t models_examined = 0;
  std::size_t max_states = 0;
  int max_actions = 0;

  bool sat() const noexcept { return status == SatStatus::sat; }
};

namespace detail {

// Encoding of a Kripke candidate: one non-empty successor mask per state
// (state 0 most significant) and a valuation word, bit v*n + s for the v-th
// variable at state s.
struct KripkeCode {
  std::vector<std::uint32_t> rows;
  std::uint64_t labels = 0;
};

inline KripkeModel decode(const KripkeCode& code, const std::vector<int>& vars) {
  const std::size_t n = code.rows.size();
  KripkeModel m(n);
  for (State s = 0; s < n; ++s)
    for (State t = 0; t < n; ++t)
      if ((code.rows[s] >> t) & 1u) m.add_edge(s, t);
  for (std::size_t v = 0; v < vars.size(); ++v)
    for (State s = 0; s < n; ++s)
      if ((code.labels >> (v * n + s)) & 1u) m.set_label(vars[v], s);
  return m;
}

// True if no state permutation yields a lexicographically smaller code.
inline bool is_canonical(const KripkeCode& code, std::size_t vars, const std::vector<std::vector<State>>& perms) {
  const std::size_t n = code.rows.size();
  std::vector<std::uint32_t> rows(n);
  for (const auto& pi : perms) {
    // pi maps old state -> new state.
    for (State s = 0; s < n; ++s) {
      std::uint32_t r = 0;
      for (State t = 0; t < n; ++t)
        if ((code.rows[s] >> t) & 1u) r |= 1u << pi[t];
      rows[pi[s]] = r;
    }
    std::uint64_t labels = 0;
    for (std::size_t v = 0; v < vars; ++v)
      for (State s = 0; s < n; ++s)
        if ((code.labels >> (v * n + s)) & 1u) labels |= std::uint64_t{1} << (v * n + pi[s]);
    // Enumeration order: rows first (ascending mask - 1), labels innermost.
    if (rows < code.rows || (rows == code.rows && labels < code.labels)) return false;
  }
  return true;
}

inline std::vector<std::vector<State>> permutations(std::size_t n) {
  std::vector<State> pi(n);
  std::iota(pi.begin(), pi.end(), State{0});
  std::vector<std::vector<State>> out;
  do out.push_back(pi);
  while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

}  // namespace detail

/// Calls f for every serial model on exactly n states over the variables,
/// in lexicographic order of adjacency rows with valuations innermost, until
/// f returns false. With prune_isomorphic only the first model of each
/// isomorphism class is emitted. Returns the number of models emitted.
inline std::uint64_t for_each_kripke(std::size_t n, const std::set<int>& variables,
                                     const std::function<bool(const KripkeModel&)>& f, bool prune_isomorphic = false,
                                     std::uint64_t shape_begin = 0, std::uint64_t shape_end = UINT64_MAX) {
  if (n == 0 || n > 6) throw LogicError("state count must be in 1..6");
  std::vector<int> vars(variables.begin(), variables.end());
  if (n * vars.size() > 40) throw BudgetExceeded("too many valuations");
  const std::uint32_t masks = (1u << n) - 1;
  std::uint64_t shapes = 1;
  for (std::size_t i = 0; i < n; ++i) shapes *= masks;
  shape_end = std::min(shape_end, shapes);
  const std::uint64_t labels = std::uint64_t{1} << (n * vars.size());
  auto perms = prune_isomorphic ? detail::permutations(n) : std::vector<std::vector<State>>{};
  detail::KripkeCode code;
  code.rows.resize(n);
  std::uint64_t emitted = 0;
  for (std::uint64_t shape = shape_begin; shape < shape_end; ++shape) {
    std::uint64_t rest = shape;
    for (std::size_t s = n; s-- > 0;) {
      code.rows[s] = static_cast<std::uint32_t>(rest % masks) + 1;
      rest /= masks;
    }
    for (code.labels = 0; code.labels < labels; ++code.labels) {
      if (prune_isomorphic && !detail::is_canonical(code, vars.size(), perms)) continue;
      ++emitted;
      if (!f(detail::decode(code, vars))) return emitted;
    }
  }
  return emitted;
}

inline std::vector<KripkeModel> enumerate_kripke(std::size_t n, const std::set<int>& variables,
                                                 bool prune_isomorphic = false) {
  std::vector<KripkeModel> out;
  for_each_kripke(n, variables, [&](const KripkeModel& m) {
    out.push_back(m);
    return true;
  }, prune_isomorphic);
  return out;
}

namespace detail {

// Runs search(begin, end, stop) over [0, total) split into jobs contiguous
// chunks; search returns the index of its first hit or nullopt. The hit with
// the lowest index wins, so the result does not depend on the split.
inline std::optional<std::uint64_t> parallel_first(
    std::uint64_t total, unsigned jobs,
    const std::function<std::optional<std::uint64_t>(std::uint64_t, std::uint64_t, const std::atomic<std::uint64_t>&)>&
        search) {
  std::atomic<std::uint64_t> best{UINT64_MAX};
  jobs = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(jobs, total)));
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    try {
      if (auto hit = search(begin, end, best)) {
        std::uint64_t cur = best.load();
        while (*hit < cur && !best.compare_exchange_weak(cur, *hit)) {
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(work, total * j / jobs, total * (j + 1) / jobs);
    for (auto& t : threads) t.join();
  }
  if (best.load() != UINT64_MAX) return best.load();
  if (error) std::rethrow_exception(error);
  return std::nullopt;
}

}  // namespace detail

/// Searches serial Kripke models with up to max_states states for one that
/// satisfies f at some state.
inline SatVerdict<KripkeModel> bounded_sat(const Formula& f, LogicId logic, std::size_t max_states,
                                           const SearchOptions& opts = {}) {
  if (is_alternating(logic)) throw LogicError("bounded_sat handles CTL and CTL*; use bounded_sat_cgs");
  if (!f.is_state() || !in_logic(f, logic)) throw LogicError("formula is not part of " + std::string(to_string(logic)));
  const std::set<int> vars = variables(f);
  const auto start = std::chrono::steady_clock::now();
  SatVerdict<KripkeModel> verdict;
  verdict.max_states = max_states;
  std::atomic<std::uint64_t> examined{0};
  for (std::size_t n = 1; n <= max_states; ++n) {
    const std::uint64_t masks = (1u << n) - 1;
    std::uint64_t shapes = 1;
    for (std::size_t i = 0; i < n; ++i) shapes *= masks;
    std::mutex hit_mutex;
    std::map<std::uint64_t, std::pair<KripkeModel, State>> hits;
    auto search = [&](std::uint64_t begin, std::uint64_t end,
                      const std::atomic<std::uint64_t>& best) -> std::optional<std::uint64_t> {
      std::optional<std::uint64_t> hit;
      for (std::uint64_t shape = begin; shape < end && !hit; ++shape) {
        if (best.load() < shape) break;
        for_each_kripke(n, vars, [&](const KripkeModel& m) {
          if (examined.fetch_add(1) >= opts.max_models) throw BudgetExceeded("model budget exhausted");
          StateSet sat = logic == LogicId::ctl ? CtlChecker(m).check(f) : CtlStarChecker(m).check(f);
          if (sat.empty()) return true;
          std::lock_guard<std::mutex> lock(hit_mutex);
          hits.emplace(shape, std::make_pair(m, sat.members().front()));
          hit = shape;
          return false;
        }, opts.prune_isomorphic, shape, shape + 1);
      }
      return hit;
    };
    auto first = detail::parallel_first(shapes, opts.jobs, search);
    if (opts.progress) {
      SearchStats stats{examined.load(), std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
      opts.progress(stats);
    }
    if (first) {
      verdict.status = SatStatus::sat;
      verdict.witness = hits.at(*first).first;
      verdict.witness_state = hits.at(*first).second;
      break;
    }
  }
  verdict.models_examined = std::min(examined.load(), opts.max_models);
  return verdict;
}

namespace detail {

// Transition rows for one state of a game where each of k agents has
// actions 0..c-1: a target for each of c^k profiles. Only rows that are
// minimal under renaming each agent's actions are kept.
inline std::vector<std::vector<State>> canonical_rows(std::size_t n, int agents, int c) {
  std::size_t profiles = 1;
  for (int a = 0; a < agents; ++a) profiles *= static_cast<std::size_t>(c);
  std::uint64_t rows = 1;
  for (std::size_t i = 0; i < profiles; ++i) {
    rows *= n;
    if (rows > 5'000'000) throw BudgetExceeded("too many transition rows per state");
  }
  // All combinations of per-agent action permutations.
  std::vector<std::vector<int>> single;
  std::vector<int> base(static_cast<std::size_t>(c));
  std::iota(base.begin(), base.end(), 0);
  do single.push_back(base);
  while (std::next_permutation(base.begin(), base.end()));
  std::vector<std::vector<std::vector<int>>> combos{{}};
  for (int a = 0; a < agents; ++a) {
    std::vector<std::vector<std::vector<int>>> next;
    for (const auto& partial : combos)
      for (const auto& p : single) {
        auto extended = partial;
        extended.push_back(p);
        next.push_back(std::move(extended));
      }
    combos = std::move(next);
  }
  std::vector<std::size_t> digits(static_cast<std::size_t>(agents));
  auto mapped_index = [&](std::size_t index, const std::vector<std::vector<int>>& perm) {
    for (int a = agents; a-- > 0;) {
      digits[static_cast<std::size_t>(a)] = index % static_cast<std::size_t>(c);
      index /= static_cast<std::size_t>(c);
    }
    std::size_t out = 0;
    for (int a = 0; a < agents; ++a)
      out = out * static_cast<std::size_t>(c) + static_cast<std::size_t>(perm[static_cast<std::size_t>(a)][digits[static_cast<std::size_t>(a)]]);
    return out;
  };
  std::vector<std::vector<State>> out;
  std::vector<State> row(profiles), renamed(profiles);
  for (std::uint64_t code = 0; code < rows; ++code) {
    std::uint64_t rest = code;
    for (std::size_t i = profiles; i-- > 0;) {
      row[i] = static_cast<State>(rest % n);
      rest /= n;
    }
    bool minimal = true;
    for (const auto& perm : combos) {
      for (std::size_t i = 0; i < profiles; ++i) renamed[mapped_index(i, perm)] = row[i];
      if (renamed < row) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(row);
  }
  return out;
}

}  // namespace detail

/// Searches game models with up to max_states states in which every agent
/// has the same c <= max_actions actions at every state. Renaming actions
/// and duplicating actions preserve ATL truth, so this covers every game
/// with at most max_actions actions per agent and state.
inline SatVerdict<ConcurrentGameModel> bounded_sat_cgs(const Formula& f, AgentSet agents, std::size_t max_states,
                                                       int max_actions, const SearchOptions& opts = {}) {
  if (!f.is_state() || !in_logic(f, LogicId::atl)) throw LogicError("formula is not part of ATL");
  for_each_subformula(f, [&](const Formula& g) {
    if (g.op() == Op::coalition && !g.agents().within(agents)) throw LogicError("coalition outside the agent set");
  });
  const std::set<int> varset = variables(f);
  const std::vector<int> vars(varset.begin(), varset.end());
  SatVerdict<ConcurrentGameModel> verdict;
  verdict.max_states = max_states;
  verdict.max_actions = max_actions;
  const auto start = std::chrono::steady_clock::now();
  std::atomic<std::uint64_t> examined{0};
  const int k = agents.count();
  for (std::size_t n = 1; n <= max_states; ++n) {
    for (int c = 1; c <= max_actions; ++c) {
      auto rows = detail::canonical_rows(n, k, c);
      std::uint64_t shapes = 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (shapes > UINT64_MAX / rows.size()) throw BudgetExceeded("search space too large");
        shapes *= rows.size();
      }
      if (n * vars.size() > 40) throw BudgetExceeded("too many valuations");
      const std::uint64_t labels = std::uint64_t{1} << (n * vars.size());
      std::vector<std::string> names;
      for (int a = 0; a < c; ++a) names.push_back("a" + std::to_string(a));
      std::vector<int> all(static_cast<std::size_t>(c));
      std::iota(all.begin(), all.end(), 0);

      std::mutex hit_mutex;
      std::map<std::uint64_t, std::pair<ConcurrentGameModel, State>> hits;
      auto search = [&](std::uint64_t begin, std::uint64_t end,
                        const std::atomic<std::uint64_t>& best) -> std::optional<std::uint64_t> {
        ConcurrentGameModel g(agents, n, names);
        for (State s = 0; s < n; ++s)
          for (int a = 1; a <= k; ++a) g.set_available(a, s, all);
        for (std::uint64_t shape = begin; shape < end; ++shape) {
          if (best.load() < shape * labels) return std::nullopt;
          std::uint64_t rest = shape;
          for (std::size_t s = n; s-- > 0;) {
            const auto& row = rows[rest % rows.size()];
            rest /= rows.size();
            for (std::size_t i = 0; i < row.size(); ++i) g.set_delta_index(static_cast<State>(s), i, row[i]);
          }
          for (std::uint64_t lab = 0; lab < labels; ++lab) {
            if (examined.fetch_add(1) >= opts.max_models) throw BudgetExceeded("model budget exhausted");
            for (std::size_t v = 0; v < vars.size(); ++v)
              for (State s = 0; s < n; ++s) g.set_label(vars[v], s, (lab >> (v * n + s)) & 1u);
            StateSet sat = AtlChecker(g).check(f);
            if (!sat.empty()) {
              std::lock_guard<std::mutex> lock(hit_mutex);
              hits.emplace(shape * labels + lab, std::make_pair(g, sat.members().front()));
              return shape * labels + lab;
            }
          }
        }
        return std::nullopt;
      };
      auto first = detail::parallel_first(shapes, opts.jobs, search);
      if (opts.progress) {
        SearchStats stats{examined.load(), std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
        opts.progress(stats);
      }
      if (first) {
        verdict.status = SatStatus::sat;
        verdict.witness = hits.at(*first).first;
        verdict.witness_state = hits.at(*first).second;
        verdict.models_examined = std::min(examined.load(), opts.max_models);
        return verdict;
      }
    }
  }
  verdict.models_examined = std::min(examined.load(), opts.max_models);
  return verdict;
}

}  // namespace onevar
