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
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "onevar/errors.hpp"
#include "onevar/formula.hpp"
#include "onevar/state_set.hpp"

namespace onevar {

/// Finite Kripke model: states 0..n-1, a transition relation and a valuation
/// of indexed variables.
class KripkeModel {
 public:
  KripkeModel() = default;
  explicit KripkeModel(std::size_t states) : succ_(states), pred_(states) {}

  std::size_t size() const noexcept { return succ_.size(); }

  State add_state(std::string name = {}) {
    succ_.emplace_back();
    pred_.emplace_back();
    for (auto& [v, set] : val_) set = resized(set, size());
    if (!name.empty() || !names_.empty()) {
      names_.resize(size() - 1);
      names_.push_back(std::move(name));
    }
    return static_cast<State>(size() - 1);
  }

  void add_edge(State from, State to) {
    check_state(from);
    check_state(to);
    insert_sorted(succ_[from], to);
    insert_sorted(pred_[to], from);
  }

  bool has_edge(State from, State to) const {
    const auto& row = succ_.at(from);
    return std::binary_search(row.begin(), row.end(), to);
  }

  const std::vector<State>& successors(State s) const { return succ_.at(s); }
  const std::vector<State>& predecessors(State s) const { return pred_.at(s); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& row : succ_) n += row.size();
    return n;
  }

  std::vector<std::pair<State, State>> edges() const {
    std::vector<std::pair<State, State>> out;
    for (State s = 0; s < size(); ++s)
      for (State t : succ_[s]) out.emplace_back(s, t);
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

  void set_label(int variable, const StateSet& states) {
    if (states.universe() != size()) throw ModelError("state set over a different universe");
    if (states.empty())
      val_.erase(variable);
    else
      val_[variable] = states;
  }

  StateSet label(int variable) const {
    auto it = val_.find(variable);
    return it == val_.end() ? StateSet(size()) : it->second;
  }

  bool holds(int variable, State s) const {
    auto it = val_.find(variable);
    return it != val_.end() && it->second.contains(s);
  }

  /// Variables with a non-empty extension.
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

  friend bool operator==(const KripkeModel& a, const KripkeModel& b) {
    return a.succ_ == b.succ_ && a.val_ == b.val_;
  }

 private:
  static void insert_sorted(std::vector<State>& row, State t) {
    auto it = std::lower_bound(row.begin(), row.end(), t);
    if (it == row.end() || *it != t) row.insert(it, t);
  }
  static StateSet resized(const StateSet& set, std::size_t universe) {
    StateSet out(universe);
    set.for_each([&](State s) { out.insert(s); });
    return out;
  }
  void check_state(State s) const {
    if (s >= size()) throw ModelError("state " + std::to_string(s) + " out of range");
  }

  std::vector<std::vector<State>> succ_, pred_;
  std::map<int, StateSet> val_;
  std::vector<std::string> names_;
};

struct ValidationReport {
  std::vector<State> non_serial;
  std::vector<std::string> problems;

  bool ok() const noexcept { return problems.empty(); }
  std::string message() const {
    std::string out;
    for (const auto& p : problems) out += (out.empty() ? "" : "; ") + p;
    return out.empty() ? "ok" : out;
  }
};

inline ValidationReport validate(const KripkeModel& m) {
  ValidationReport r;
  if (m.size() == 0) r.problems.push_back("model has no states");
  for (State s = 0; s < m.size(); ++s) {
    if (m.successors(s).empty()) {
      r.non_serial.push_back(s);
      r.problems.push_back("state " + m.name(s) + " has no successor");
    }
  }
  return r;
}

/// A submodel together with the original index of each of its states.
struct Submodel {
  KripkeModel model;
  std::vector<State> origin;
};

/// Smallest submodel containing s0 and closed under the successors admitted
/// by keep. Transitions to dropped states are removed.
inline Submodel closed_submodel(const KripkeModel& m, State s0, const std::function<bool(State)>& keep) {
  if (s0 >= m.size()) throw ModelError("state out of range");
  std::vector<std::int64_t> index(m.size(), -1);
  Submodel out;
  std::vector<State> stack{s0};
  index[s0] = 0;
  out.origin.push_back(s0);
  while (!stack.empty()) {
    State x = stack.back();
    stack.pop_back();
    for (State y : m.successors(x)) {
      if (index[y] >= 0 || !keep(y)) continue;
      index[y] = static_cast<std::int64_t>(out.origin.size());
      out.origin.push_back(y);
      stack.push_back(y);
    }
  }
  // Keep original relative order for stable numbering.
  std::sort(out.origin.begin(), out.origin.end());
  for (std::size_t i = 0; i < out.origin.size(); ++i) index[out.origin[i]] = static_cast<std::int64_t>(i);
  out.model = KripkeModel(out.origin.size());
  for (std::size_t i = 0; i < out.origin.size(); ++i) {
    State x = out.origin[i];
    for (State y : m.successors(x))
      if (index[y] >= 0 && keep(y)) out.model.add_edge(static_cast<State>(i), static_cast<State>(index[y]));
    for (const auto& [v, set] : m.valuation())
      if (set.contains(x)) out.model.set_label(v, static_cast<State>(i));
    if (m.has_names()) out.model.set_name(static_cast<State>(i), m.name(x));
  }
  return out;
}

inline Submodel reachable_submodel(const KripkeModel& m, State s0) {
  return closed_submodel(m, s0, [](State) { return true; });
}

/// Closure of s0 under successors where the guard variable holds. Throws
/// ModelError when the result is not serial.
inline Submodel restrict_submodel(const KripkeModel& m, State s0, int guard) {
  Submodel sub = closed_submodel(m, s0, [&](State y) { return m.holds(guard, y); });
  auto report = validate(sub.model);
  if (!report.ok()) throw ModelError("restricted submodel is not serial: " + report.message());
  return sub;
}

namespace detail {

inline void require_serial(const KripkeModel& m) {
  auto report = validate(m);
  if (!report.ok()) throw ModelError("model is not serial: " + report.message());
}

// Universal predecessor: states all of whose successors lie in x.
inline StateSet pre_forall(const KripkeModel& m, const StateSet& x) {
  StateSet out(m.size());
  for (State s = 0; s < m.size(); ++s) {
    bool all = true;
    for (State t : m.successors(s)) all = all && x.contains(t);
    out.set(s, all);
  }
  return out;
}

inline StateSet exists_until(const KripkeModel& m, const StateSet& a, const StateSet& b) {
  StateSet z = b;
  std::vector<State> work = b.members();
  while (!work.empty()) {
    State t = work.back();
    work.pop_back();
    for (State s : m.predecessors(t)) {
      if (z.contains(s) || !a.contains(s)) continue;
      z.insert(s);
      work.push_back(s);
    }
  }
  return z;
}

inline StateSet forall_until(const KripkeModel& m, const StateSet& a, const StateSet& b) {
  StateSet z = b;
  while (true) {
    StateSet next = b | (a & pre_forall(m, z));
    if (next == z) return z;
    z = std::move(next);
  }
}

}  // namespace detail

/// Global CTL checker for one model. Results are memoised per formula node,
/// so one checker can be reused across many formulas over the same model.
class CtlChecker {
 public:
  explicit CtlChecker(const KripkeModel& m) : m_(m) { detail::require_serial(m); }

  StateSet check(const Formula& f) {
    if (!shape_ok(f)) throw LogicError("not a CTL formula");
    return eval(f);
  }

 private:
  // CTL shape test that skips nodes already evaluated or checked.
  bool shape_ok(const Formula& f) {
    if (memo_.count(f.id()) || checked_.count(f.id())) return true;
    bool ok = false;
    switch (f.op()) {
      case Op::var:
      case Op::falsum: ok = true; break;
      case Op::implies:
        if (const Formula* u = match_exists_until(f))
          ok = shape_ok(u->lhs()) && shape_ok(u->rhs());
        else
          ok = shape_ok(f.lhs()) && shape_ok(f.rhs());
        break;
      case Op::forall: {
        const Formula& p = f.lhs();
        if (p.op() == Op::next) ok = shape_ok(p.lhs());
        if (p.op() == Op::until) ok = shape_ok(p.lhs()) && shape_ok(p.rhs());
        break;
      }
      default: break;
    }
    if (ok) {
      checked_.insert(f.id());
      keep_.push_back(f);
    }
    return ok;
  }

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
      case Op::forall: {
        const Formula& p = f.lhs();
        if (p.op() == Op::next) return detail::pre_forall(m_, eval(p.lhs()));
        if (p.op() == Op::until) return detail::forall_until(m_, eval(p.lhs()), eval(p.rhs()));
        if (is_negation(p) && p.lhs().op() == Op::until) {
          const Formula& u = p.lhs();
          return detail::exists_until(m_, eval(u.lhs()), eval(u.rhs())).complement();
        }
        break;
      }
      default: break;
    }
    throw LogicError("not a CTL formula");
  }

  const KripkeModel& m_;
  std::unordered_map<const void*, StateSet> memo_;
  std::unordered_set<const void*> checked_;
  std::vector<Formula> keep_;
};

namespace detail {

// Path formula over atoms, flattened for the tableau product.
struct PathNode {
  enum Kind { atom, implies, next, until, always } kind;
  int a = -1, b = -1;
  int bit = -1;  // elementary bit for temporal nodes
};

struct PathGraph {
  std::vector<PathNode> nodes;  // children precede parents
  std::vector<StateSet> atoms;
  int root = -1;
  int bits = 0;
};

// Builds the path graph; every maximal state subformula becomes an atom
// labelled by label(subformula). The formula must outlive the builder.
template <typename Label>
class PathGraphBuilder {
 public:
  PathGraphBuilder(PathGraph& g, Label label) : g_(g), label_(std::move(label)) {}

  int build(const Formula& f) {
    for (const auto& [id, node] : index_)
      if (id == f.id()) return node;
    PathNode n{};
    if (f.is_state()) {
      n.kind = PathNode::atom;
      n.a = static_cast<int>(g_.atoms.size());
      g_.atoms.push_back(label_(f));
    } else {
      switch (f.op()) {
        case Op::implies:
          n.kind = PathNode::implies;
          n.a = build(f.lhs());
          n.b = build(f.rhs());
          break;
        case Op::next:
          n.kind = PathNode::next;
          n.a = build(f.lhs());
          n.bit = g_.bits++;
          break;
        case Op::until:
          n.kind = PathNode::until;
          n.a = build(f.lhs());
          n.b = build(f.rhs());
          n.bit = g_.bits++;
          break;
        case Op::always:
          n.kind = PathNode::always;
          n.a = build(f.lhs());
          n.bit = g_.bits++;
          break;
        default: throw LogicError("unexpected operator inside a path formula");
      }
    }
    int id = static_cast<int>(g_.nodes.size());
    g_.nodes.push_back(n);
    index_.emplace_back(f.id(), id);
    return id;
  }

  int negate(int node) {
    PathNode falsum{PathNode::atom, static_cast<int>(g_.atoms.size())};
    g_.atoms.emplace_back(g_.atoms.empty() ? 0 : g_.atoms.front().universe());
    g_.nodes.push_back(falsum);
    int f = static_cast<int>(g_.nodes.size()) - 1;
    g_.nodes.push_back(PathNode{PathNode::implies, node, f});
    return static_cast<int>(g_.nodes.size()) - 1;
  }

 private:
  PathGraph& g_;
  Label label_;
  std::vector<std::pair<const void*, int>> index_;
};

inline constexpr int max_tableau_bits = 20;

// Buffers reused across product constructions by one checker.
struct TableauScratch {
  struct Frame {
    std::size_t id;
    std::size_t edge;
    std::uint32_t b, b_end;
  };
  std::vector<std::uint32_t> signature, fair, bucket_start, bucket, fill, order, low, comp, stack;
  std::vector<char> root_value, value, good_comp, on_stack;
  std::vector<int> fairness_nodes;
  std::vector<Frame> frames;
};

// States from which some path satisfies the root of g. Product of the model
// with the tableau over elementary bits, with generalised Buchi fairness for
// Until (eventuality fulfilled) and Always (refutation witnessed).
inline StateSet exists_path_states(const KripkeModel& m, const PathGraph& g, TableauScratch& w) {
  if (g.bits > max_tableau_bits) throw BudgetExceeded("path formula has too many temporal operators");
  const std::size_t n = m.size();
  const std::uint32_t masks = 1u << g.bits;
  const std::size_t total = n * masks;
  const std::size_t k = g.nodes.size();

  // Node values, successor signature and fairness bits of each product state.
  auto& signature = w.signature;
  auto& fair = w.fair;
  auto& root_value = w.root_value;
  auto& fairness_nodes = w.fairness_nodes;
  signature.assign(total, 0);
  fair.assign(total, 0);
  root_value.assign(total, 0);
  fairness_nodes.clear();
  for (std::size_t i = 0; i < k; ++i)
    if (g.nodes[i].kind == PathNode::until || g.nodes[i].kind == PathNode::always)
      fairness_nodes.push_back(static_cast<int>(i));
  const std::uint32_t all_fair = fairness_nodes.empty() ? 0u : (1u << fairness_nodes.size()) - 1u;

  auto& value = w.value;
  value.assign(k, 0);
  for (State s = 0; s < n; ++s) {
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      for (std::size_t i = 0; i < k; ++i) {
        const PathNode& nd = g.nodes[i];
        bool bit = nd.bit >= 0 && ((mask >> nd.bit) & 1u);
        switch (nd.kind) {
          case PathNode::atom: value[i] = g.atoms[static_cast<std::size_t>(nd.a)].contains(s); break;
          case PathNode::implies: value[i] = !value[static_cast<std::size_t>(nd.a)] || value[static_cast<std::size_t>(nd.b)]; break;
          case PathNode::next: value[i] = bit; break;
          case PathNode::until: value[i] = value[static_cast<std::size_t>(nd.b)] || (value[static_cast<std::size_t>(nd.a)] && bit); break;
          case PathNode::always: value[i] = value[static_cast<std::size_t>(nd.a)] && bit; break;
        }
      }
      std::size_t id = s * masks + mask;
      std::uint32_t sig = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const PathNode& nd = g.nodes[i];
        if (nd.bit < 0) continue;
        bool v = nd.kind == PathNode::next ? value[static_cast<std::size_t>(nd.a)] : value[i];
        if (v) sig |= 1u << nd.bit;
      }
      signature[id] = sig;
      root_value[id] = value[static_cast<std::size_t>(g.root)];
      std::uint32_t fm = 0;
      for (std::size_t c = 0; c < fairness_nodes.size(); ++c) {
        const PathNode& nd = g.nodes[static_cast<std::size_t>(fairness_nodes[c])];
        bool v = value[static_cast<std::size_t>(fairness_nodes[c])];
        bool ok = nd.kind == PathNode::until ? (!v || value[static_cast<std::size_t>(nd.b)])
                                             : (v || !value[static_cast<std::size_t>(nd.a)]);
        if (ok) fm |= 1u << c;
      }
      fair[id] = fm;
    }
  }

  // Successors of (s, mask): (t, mask') with s -> t and signature(t, mask') == mask.
  // bucket_start/bucket hold, per (t, signature), the masks with that signature.
  auto& bucket_start = w.bucket_start;
  auto& bucket = w.bucket;
  bucket_start.assign(total + 1, 0);
  bucket.assign(total, 0);
  for (std::size_t id = 0; id < total; ++id) ++bucket_start[(id / masks) * masks + signature[id] + 1];
  for (std::size_t i = 0; i < total; ++i) bucket_start[i + 1] += bucket_start[i];
  {
    auto& fill = w.fill;
    fill.assign(bucket_start.begin(), bucket_start.end() - 1);
    for (std::size_t id = 0; id < total; ++id)
      bucket[fill[(id / masks) * masks + signature[id]]++] = static_cast<std::uint32_t>(id % masks);
  }
  auto for_each_successor = [&](std::size_t id, auto&& f) {
    State s = static_cast<State>(id / masks);
    std::uint32_t mask = static_cast<std::uint32_t>(id % masks);
    for (State t : m.successors(s)) {
      std::size_t key = t * masks + mask;
      for (std::uint32_t b = bucket_start[key]; b < bucket_start[key + 1]; ++b) f(t * masks + bucket[b]);
    }
  };

  // Iterative Tarjan; SCCs come out successors-first. A frame walks the
  // successor list lazily: edge index into successors(s), then bucket index.
  constexpr std::uint32_t unvisited = UINT32_MAX;
  using Frame = TableauScratch::Frame;
  auto& order = w.order;
  auto& low = w.low;
  auto& comp = w.comp;
  auto& good_comp = w.good_comp;
  auto& stack = w.stack;
  auto& on_stack = w.on_stack;
  auto& frames = w.frames;
  order.assign(total, unvisited);
  low.assign(total, 0);
  comp.assign(total, unvisited);
  on_stack.assign(total, 0);
  good_comp.clear();
  stack.clear();
  frames.clear();
  std::uint32_t counter = 0, comps = 0;

  auto first_bucket = [&](Frame& fr) {
    const auto& succ = m.successors(static_cast<State>(fr.id / masks));
    std::uint32_t mask = static_cast<std::uint32_t>(fr.id % masks);
    while (fr.edge < succ.size()) {
      std::size_t key = succ[fr.edge] * masks + mask;
      fr.b = bucket_start[key];
      fr.b_end = bucket_start[key + 1];
      if (fr.b < fr.b_end) return;
      ++fr.edge;
    }
  };
  auto push = [&](std::size_t id) {
    order[id] = low[id] = counter++;
    stack.push_back(static_cast<std::uint32_t>(id));
    on_stack[id] = 1;
    Frame fr{id, 0, 0, 0};
    first_bucket(fr);
    frames.push_back(fr);
  };

  for (std::size_t start = 0; start < total; ++start) {
    if (order[start] != unvisited) continue;
    push(start);
    while (!frames.empty()) {
      Frame& fr = frames.back();
      const auto& succ = m.successors(static_cast<State>(fr.id / masks));
      if (fr.edge < succ.size()) {
        std::size_t t = succ[fr.edge] * masks + bucket[fr.b];
        if (++fr.b == fr.b_end) {
          ++fr.edge;
          first_bucket(fr);
        }
        if (order[t] == unvisited) {
          push(t);
        } else if (on_stack[t]) {
          Frame& top = frames.back();
          low[top.id] = std::min(low[top.id], order[t]);
        }
        continue;
      }
      std::size_t v = fr.id;
      if (low[v] == order[v]) {
        // Good: nontrivial and fair, or can reach a good component.
        std::size_t first = stack.size();
        do --first;
        while (stack[first] != v);
        for (std::size_t i = first; i < stack.size(); ++i) {
          on_stack[stack[i]] = 0;
          comp[stack[i]] = comps;
        }
        bool nontrivial = stack.size() - first > 1;
        bool reaches_good = false;
        std::uint32_t seen = 0;
        for (std::size_t i = first; i < stack.size(); ++i) {
          std::uint32_t x = stack[i];
          for_each_successor(x, [&](std::size_t t) {
            if (comp[t] == comps) {
              nontrivial = true;
            } else if (good_comp[comp[t]]) {
              reaches_good = true;
            }
          });
          seen |= fair[x];
        }
        stack.resize(first);
        good_comp.push_back((nontrivial && seen == all_fair) || reaches_good);
        ++comps;
      }
      frames.pop_back();
      if (!frames.empty()) {
        Frame& parent = frames.back();
        low[parent.id] = std::min(low[parent.id], low[v]);
      }
    }
  }

  StateSet out(n);
  for (State s = 0; s < n; ++s)
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      std::size_t id = s * masks + mask;
      if (root_value[id] && good_comp[comp[id]]) {
        out.insert(s);
        break;
      }
    }
  return out;
}

inline StateSet exists_path_states(const KripkeModel& m, const PathGraph& g) {
  TableauScratch w;
  return exists_path_states(m, g, w);
}

}  // namespace detail

/// Global CTL* checker for one model; memoised per formula node.
class CtlStarChecker {
 public:
  explicit CtlStarChecker(const KripkeModel& m) : m_(m) { detail::require_serial(m); }

  StateSet check(const Formula& f) {
    if (!f.is_state()) throw SortError("path formula where a state formula is required");
    if (f.mentions(Op::coalition)) throw LogicError("coalition operator in a CTL* formula");
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
      case Op::forall: {
        detail::PathGraph g;
        auto label = [this](const Formula& s) { return eval(s); };
        detail::PathGraphBuilder<decltype(label)> builder(g, label);
        g.root = builder.negate(builder.build(f.lhs()));
        return detail::exists_path_states(m_, g, scratch_).complement();
      }
      default: throw LogicError("unexpected operator in a CTL* state formula");
    }
  }

  const KripkeModel& m_;
  std::unordered_map<const void*, StateSet> memo_;
  std::vector<Formula> keep_;
  detail::TableauScratch scratch_;
};

inline StateSet mc_ctl(const KripkeModel& m, const Formula& f) { return CtlChecker(m).check(f); }

inline StateSet mc_ctlstar(const KripkeModel& m, const Formula& f) { return CtlStarChecker(m).check(f); }

/// States with some path satisfying the path formula. Its maximal state
/// subformulas must be quantifier-free, i.e. evaluable from the labels alone.
inline StateSet exists_path_states(const KripkeModel& m, const Formula& path) {
  detail::require_serial(m);
  detail::PathGraph g;
  std::function<StateSet(const Formula&)> label = [&](const Formula& s) -> StateSet {
    switch (s.op()) {
      case Op::var: return m.label(s.var());
      case Op::falsum: return StateSet(m.size());
      case Op::implies: return label(s.lhs()).complement() | label(s.rhs());
      default: throw LogicError("state subformula is not labelled");
    }
  };
  detail::PathGraphBuilder builder(g, label);
  g.root = builder.build(path);
  return detail::exists_path_states(m, g);
}

inline bool exists_path_check(const KripkeModel& m, State s, const Formula& path) {
  if (s >= m.size()) throw ModelError("state out of range");
  return exists_path_states(m, path).contains(s);
}

}  // namespace onevar
