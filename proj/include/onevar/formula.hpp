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
#include <bit>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "onevar/errors.hpp"

namespace onevar {

enum class LogicId { ctl, ctlstar, atl, atlstar };

inline std::string_view to_string(LogicId logic) {
  switch (logic) {
    case LogicId::ctl: return "ctl";
    case LogicId::ctlstar: return "ctlstar";
    case LogicId::atl: return "atl";
    case LogicId::atlstar: return "atlstar";
  }
  return "?";
}

inline LogicId logic_from_string(std::string_view name) {
  if (name == "ctl") return LogicId::ctl;
  if (name == "ctlstar" || name == "ctl*") return LogicId::ctlstar;
  if (name == "atl") return LogicId::atl;
  if (name == "atlstar" || name == "atl*") return LogicId::atlstar;
  throw LogicError("unknown logic '" + std::string(name) + "'");
}

inline bool is_alternating(LogicId logic) { return logic == LogicId::atl || logic == LogicId::atlstar; }
inline bool is_paired_fragment(LogicId logic) { return logic == LogicId::ctl || logic == LogicId::atl; }

/// The fixed set of agents 1..k.
class AgentSet {
 public:
  static constexpr int max_agents = 32;

  explicit AgentSet(int count = 1) : count_(count) {
    if (count < 1 || count > max_agents)
      throw LogicError("agent count must be in 1.." + std::to_string(max_agents));
  }
  int count() const noexcept { return count_; }
  bool contains(int agent) const noexcept { return agent >= 1 && agent <= count_; }
  friend bool operator==(AgentSet, AgentSet) = default;

 private:
  int count_;
};

/// A set of agents, stored as a bitmask (bit a-1 for agent a).
class Coalition {
 public:
  constexpr Coalition() = default;
  Coalition(std::initializer_list<int> agents) {
    for (int a : agents) insert(a);
  }
  static Coalition none() { return {}; }
  static Coalition all(AgentSet agents) {
    Coalition c;
    c.bits_ = agents.count() == 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << agents.count()) - 1;
    return c;
  }
  static Coalition from_bits(std::uint32_t bits) {
    Coalition c;
    c.bits_ = bits;
    return c;
  }

  void insert(int agent) {
    if (agent < 1 || agent > AgentSet::max_agents)
      throw LogicError("agent index " + std::to_string(agent) + " out of range");
    bits_ |= std::uint32_t{1} << (agent - 1);
  }
  bool contains(int agent) const noexcept {
    return agent >= 1 && agent <= AgentSet::max_agents && ((bits_ >> (agent - 1)) & 1u) != 0;
  }
  bool empty() const noexcept { return bits_ == 0; }
  int size() const noexcept { return std::popcount(bits_); }
  int max_agent() const noexcept { return 32 - std::countl_zero(bits_); }
  std::uint32_t bits() const noexcept { return bits_; }
  bool subset_of(Coalition other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  bool within(AgentSet agents) const noexcept { return max_agent() <= agents.count(); }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int a = 1; a <= AgentSet::max_agents; ++a)
      if (contains(a)) out.push_back(a);
    return out;
  }

  friend bool operator==(Coalition, Coalition) = default;

 private:
  std::uint32_t bits_ = 0;
};

enum class Op : std::uint8_t { var, falsum, implies, forall, coalition, next, until, always };
enum class Sort : std::uint8_t { state, path };

namespace detail {
struct Node;
}

/// Immutable formula over the eight core constructors. Subtrees are shared.
class Formula {
 public:
  Formula() = default;

  static Formula variable(int index);
  static Formula falsum();
  static Formula implies(Formula lhs, Formula rhs);
  static Formula forall(Formula path);
  static Formula coalition(Coalition agents, Formula path);
  static Formula next(Formula operand);
  static Formula until(Formula lhs, Formula rhs);
  static Formula always(Formula operand);

  bool valid() const noexcept { return node_ != nullptr; }
  Op op() const;
  Sort sort() const;
  bool is_state() const { return sort() == Sort::state; }
  int var() const;
  Coalition agents() const;
  /// First operand; the only operand of a unary constructor.
  const Formula& lhs() const;
  const Formula& rhs() const;

  std::uint64_t size() const;
  int height() const;
  int max_var() const;
  std::size_t hash() const;
  bool mentions(Op op) const;
  std::uint32_t op_mask() const;
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);

  explicit Formula(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {

struct Node {
  Op op;
  Sort sort;
  int var = 0;
  Coalition agents;
  Formula lhs;
  Formula rhs;
  std::uint64_t size = 1;
  int height = 1;
  int max_var = 0;
  std::size_t hash = 0;
  std::uint32_t ops = 0;  // bit per operator occurring in the subtree
};

inline constexpr std::uint32_t op_bit(Op op) { return 1u << static_cast<unsigned>(op); }

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

}  // namespace detail

inline Op Formula::op() const { return node_->op; }
inline Sort Formula::sort() const { return node_->sort; }
inline int Formula::var() const { return node_->var; }
inline Coalition Formula::agents() const { return node_->agents; }
inline const Formula& Formula::lhs() const { return node_->lhs; }
inline const Formula& Formula::rhs() const { return node_->rhs; }
inline std::uint64_t Formula::size() const { return node_->size; }
inline int Formula::height() const { return node_->height; }
inline int Formula::max_var() const { return node_->max_var; }
inline std::size_t Formula::hash() const { return node_->hash; }
inline bool Formula::mentions(Op op) const { return (node_->ops & detail::op_bit(op)) != 0; }
inline std::uint32_t Formula::op_mask() const { return node_->ops; }

inline Formula Formula::variable(int index) {
  if (index < 1) throw SortError("variable index must be >= 1");
  auto n = std::make_shared<detail::Node>();
  n->op = Op::var;
  n->sort = Sort::state;
  n->var = index;
  n->max_var = index;
  n->hash = std::hash<int>{}(index) * 31 + 7;
  n->ops = detail::op_bit(Op::var);
  return Formula(std::move(n));
}

inline Formula Formula::falsum() {
  static const Formula bottom = [] {
    auto n = std::make_shared<detail::Node>();
    n->op = Op::falsum;
    n->sort = Sort::state;
    n->hash = 0x9e3779b97f4a7c15ull;
    n->ops = detail::op_bit(Op::falsum);
    return Formula(std::move(n));
  }();
  return bottom;
}

namespace detail {

inline Formula make_node(Op op, Sort sort, Coalition agents, Formula a, Formula b);

}  // namespace detail

inline Formula Formula::implies(Formula lhs, Formula rhs) {
  Sort s = lhs.is_state() && rhs.is_state() ? Sort::state : Sort::path;
  return detail::make_node(Op::implies, s, {}, std::move(lhs), std::move(rhs));
}
inline Formula Formula::forall(Formula path) {
  return detail::make_node(Op::forall, Sort::state, {}, std::move(path), {});
}
inline Formula Formula::coalition(Coalition agents, Formula path) {
  return detail::make_node(Op::coalition, Sort::state, agents, std::move(path), {});
}
inline Formula Formula::next(Formula operand) {
  return detail::make_node(Op::next, Sort::path, {}, std::move(operand), {});
}
inline Formula Formula::until(Formula lhs, Formula rhs) {
  return detail::make_node(Op::until, Sort::path, {}, std::move(lhs), std::move(rhs));
}
inline Formula Formula::always(Formula operand) {
  return detail::make_node(Op::always, Sort::path, {}, std::move(operand), {});
}

namespace detail {

inline Formula make_node(Op op, Sort sort, Coalition agents, Formula a, Formula b) {
  if (!a.valid() || ((op == Op::implies || op == Op::until) && !b.valid()))
    throw SortError("missing operand");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->sort = sort;
  n->agents = agents;
  n->size = 1 + a.size();
  n->height = 1 + a.height();
  n->max_var = a.max_var();
  n->ops = op_bit(op) | a.op_mask();
  std::size_t h = static_cast<std::size_t>(op) * 0x100000001b3ull + agents.bits();
  h = h * 1099511628211ull ^ a.hash();
  if (b.valid()) {
    n->size = saturating_add(n->size, b.size());
    n->height = std::max(n->height, 1 + b.height());
    n->max_var = std::max(n->max_var, b.max_var());
    n->ops |= b.op_mask();
    h = (h << 7 | h >> 57) * 1099511628211ull ^ b.hash();
  }
  n->hash = h;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return Formula(std::move(n));
}

}  // namespace detail

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.hash() != b.hash() || a.op() != b.op() || a.size() != b.size()) return false;
  switch (a.op()) {
    case Op::var: return a.var() == b.var();
    case Op::falsum: return true;
    case Op::coalition:
      if (a.agents() != b.agents()) return false;
      return a.lhs() == b.lhs();
    case Op::implies:
    case Op::until: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    default: return a.lhs() == b.lhs();
  }
}

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Derived connectives. Each expands into the core constructors.

inline Formula var(int index) { return Formula::variable(index); }
inline Formula bottom() { return Formula::falsum(); }
inline Formula top() { return Formula::implies(bottom(), bottom()); }
inline Formula neg(Formula a) { return Formula::implies(std::move(a), bottom()); }
inline Formula implies(Formula a, Formula b) { return Formula::implies(std::move(a), std::move(b)); }
inline Formula conj(Formula a, Formula b) { return neg(Formula::implies(std::move(a), neg(std::move(b)))); }
inline Formula disj(Formula a, Formula b) { return Formula::implies(neg(std::move(a)), std::move(b)); }
inline Formula iff(const Formula& a, const Formula& b) {
  return conj(Formula::implies(a, b), Formula::implies(b, a));
}

/// F a := true U a.
inline Formula eventually(Formula a) { return Formula::until(top(), std::move(a)); }

/// G a: a primitive in the alternating-time logics, not F not a otherwise.
inline Formula globally(Formula a, LogicId logic) {
  if (is_alternating(logic)) return Formula::always(std::move(a));
  return neg(eventually(neg(std::move(a))));
}

/// E a := not A not a.
inline Formula exists(Formula path) { return neg(Formula::forall(neg(std::move(path)))); }

// CTL pairs.
inline Formula ax(Formula a) { return Formula::forall(Formula::next(std::move(a))); }
inline Formula ex(Formula a) { return neg(ax(neg(std::move(a)))); }
inline Formula au(Formula a, Formula b) { return Formula::forall(Formula::until(std::move(a), std::move(b))); }
inline Formula eu(Formula a, Formula b) { return exists(Formula::until(std::move(a), std::move(b))); }
inline Formula af(Formula a) { return au(top(), std::move(a)); }
inline Formula ef(Formula a) { return eu(top(), std::move(a)); }
inline Formula ag(Formula a) { return neg(ef(neg(std::move(a)))); }
inline Formula eg(Formula a) { return neg(af(neg(std::move(a)))); }

/// Expands a derived connective by name (not, and, or, iff, true, F, G, E,
/// AX, EX, AF, EF, AG, EG, AU, EU).
inline Formula expand_derived(std::string_view name, std::span<const Formula> args,
                              LogicId logic = LogicId::ctlstar) {
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw LogicError("derived connective '" + std::string(name) + "' takes " + std::to_string(n) +
                       " argument(s), got " + std::to_string(args.size()));
  };
  if (name == "not") return need(1), neg(args[0]);
  if (name == "and") return need(2), conj(args[0], args[1]);
  if (name == "or") return need(2), disj(args[0], args[1]);
  if (name == "iff") return need(2), iff(args[0], args[1]);
  if (name == "true" || name == "top") return need(0), top();
  if (name == "F") return need(1), eventually(args[0]);
  if (name == "G") return need(1), globally(args[0], logic);
  if (name == "E") return need(1), exists(args[0]);
  if (name == "AX") return need(1), ax(args[0]);
  if (name == "EX") return need(1), ex(args[0]);
  if (name == "AF") return need(1), af(args[0]);
  if (name == "EF") return need(1), ef(args[0]);
  if (name == "AG") return need(1), ag(args[0]);
  if (name == "EG") return need(1), eg(args[0]);
  if (name == "AU") return need(2), au(args[0], args[1]);
  if (name == "EU") return need(2), eu(args[0], args[1]);
  throw LogicError("unknown derived connective '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Shape recognition.

inline bool is_negation(const Formula& f) {
  return f.op() == Op::implies && f.rhs().op() == Op::falsum;
}

/// Matches the core form of E(a U b), i.e. not A not (a U b).
inline const Formula* match_exists_until(const Formula& f) {
  if (!is_negation(f)) return nullptr;
  const Formula& q = f.lhs();
  if (q.op() != Op::forall || !is_negation(q.lhs())) return nullptr;
  const Formula& u = q.lhs().lhs();
  return u.op() == Op::until ? &u : nullptr;
}

namespace detail {

inline bool ctl_shape(const Formula& f) {
  switch (f.op()) {
    case Op::var:
    case Op::falsum: return true;
    case Op::implies:
      if (const Formula* u = match_exists_until(f)) return ctl_shape(u->lhs()) && ctl_shape(u->rhs());
      return ctl_shape(f.lhs()) && ctl_shape(f.rhs());
    case Op::forall: {
      const Formula& p = f.lhs();
      if (p.op() == Op::next) return ctl_shape(p.lhs());
      if (p.op() == Op::until) return ctl_shape(p.lhs()) && ctl_shape(p.rhs());
      return false;
    }
    default: return false;
  }
}

inline bool atl_shape(const Formula& f) {
  switch (f.op()) {
    case Op::var:
    case Op::falsum: return true;
    case Op::implies: return atl_shape(f.lhs()) && atl_shape(f.rhs());
    case Op::coalition: {
      const Formula& p = f.lhs();
      if (p.op() == Op::next || p.op() == Op::always) return atl_shape(p.lhs());
      if (p.op() == Op::until) return atl_shape(p.lhs()) && atl_shape(p.rhs());
      return false;
    }
    default: return false;
  }
}

template <typename Visit>
void visit_unique(const Formula& f, std::unordered_map<const void*, bool>& seen, Visit& visit) {
  if (!seen.emplace(f.id(), true).second) return;
  visit(f);
  if (f.op() == Op::var || f.op() == Op::falsum) return;
  visit_unique(f.lhs(), seen, visit);
  if (f.rhs().valid()) visit_unique(f.rhs(), seen, visit);
}

}  // namespace detail

/// Calls visit once per distinct subformula node (pre-order).
template <typename Visit>
void for_each_subformula(const Formula& f, Visit&& visit) {
  std::unordered_map<const void*, bool> seen;
  detail::visit_unique(f, seen, visit);
}

inline std::set<int> variables(const Formula& f) {
  std::set<int> out;
  for_each_subformula(f, [&](const Formula& g) {
    if (g.op() == Op::var) out.insert(g.var());
  });
  return out;
}

inline bool contains_op(const Formula& f, Op op) { return f.mentions(op); }

struct Classification {
  std::set<int> variables;
  bool is_ctl = false;
  bool is_atl = false;
  bool is_ctlstar = false;
  bool is_atlstar = false;
  bool is_variable_free = false;
  std::uint64_t size = 0;
  int height = 0;
};

inline Classification classify(const Formula& f) {
  Classification c;
  c.variables = variables(f);
  c.is_variable_free = c.variables.empty();
  c.size = f.size();
  c.height = f.height();
  bool has_forall = contains_op(f, Op::forall);
  bool has_coalition = contains_op(f, Op::coalition);
  c.is_ctlstar = f.is_state() && !has_coalition;
  c.is_atlstar = f.is_state() && !has_forall;
  c.is_ctl = detail::ctl_shape(f);
  c.is_atl = detail::atl_shape(f);
  return c;
}

inline bool in_logic(const Formula& f, LogicId logic) {
  switch (logic) {
    case LogicId::ctl: return detail::ctl_shape(f);
    case LogicId::atl: return detail::atl_shape(f);
    case LogicId::ctlstar: return f.is_state() && !contains_op(f, Op::coalition);
    case LogicId::atlstar: return f.is_state() && !contains_op(f, Op::forall);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Rewriting.

namespace detail {

template <typename Leaf>
Formula rebuild(const Formula& f, Leaf& leaf, std::unordered_map<const void*, Formula>& memo) {
  if (auto it = memo.find(f.id()); it != memo.end()) return it->second;
  Formula out;
  switch (f.op()) {
    case Op::var: out = leaf(f); break;
    case Op::falsum: out = f; break;
    case Op::implies: {
      Formula a = rebuild(f.lhs(), leaf, memo);
      Formula b = rebuild(f.rhs(), leaf, memo);
      out = a.id() == f.lhs().id() && b.id() == f.rhs().id() ? f : Formula::implies(a, b);
      break;
    }
    case Op::until: {
      Formula a = rebuild(f.lhs(), leaf, memo);
      Formula b = rebuild(f.rhs(), leaf, memo);
      out = a.id() == f.lhs().id() && b.id() == f.rhs().id() ? f : Formula::until(a, b);
      break;
    }
    default: {
      Formula a = rebuild(f.lhs(), leaf, memo);
      if (a.id() == f.lhs().id()) {
        out = f;
      } else if (f.op() == Op::forall) {
        out = Formula::forall(a);
      } else if (f.op() == Op::coalition) {
        out = Formula::coalition(f.agents(), a);
      } else if (f.op() == Op::next) {
        out = Formula::next(a);
      } else {
        out = Formula::always(a);
      }
    }
  }
  memo.emplace(f.id(), out);
  return out;
}

}  // namespace detail

/// Simultaneous uniform substitution of state formulas for variables.
inline Formula substitute_all(const Formula& f, const std::map<int, Formula>& sigma) {
  for (const auto& [index, replacement] : sigma)
    if (!replacement.is_state())
      throw SortError("substituted formula for p" + std::to_string(index) + " is not a state formula");
  auto leaf = [&](const Formula& v) {
    auto it = sigma.find(v.var());
    return it == sigma.end() ? v : it->second;
  };
  std::unordered_map<const void*, Formula> memo;
  return detail::rebuild(f, leaf, memo);
}

inline Formula substitute(const Formula& f, int index, const Formula& replacement) {
  return substitute_all(f, {{index, replacement}});
}

inline Formula rename_variables(const Formula& f, const std::map<int, int>& renaming) {
  std::map<int, Formula> sigma;
  for (auto [from, to] : renaming) sigma.emplace(from, var(to));
  return substitute_all(f, sigma);
}

/// Variables in first-occurrence order (left to right, outermost first).
inline std::vector<int> variables_in_order(const Formula& f) {
  std::vector<int> order;
  std::set<int> seen;
  std::vector<const Formula*> stack{&f};
  while (!stack.empty()) {
    const Formula* g = stack.back();
    stack.pop_back();
    if (g->op() == Op::var) {
      if (seen.insert(g->var()).second) order.push_back(g->var());
      continue;
    }
    if (g->op() == Op::falsum) continue;
    if (g->rhs().valid()) stack.push_back(&g->rhs());
    stack.push_back(&g->lhs());
  }
  return order;
}

// ---------------------------------------------------------------------------
// Variable-free folding.

namespace detail {

inline bool fold(const Formula& f, std::unordered_map<const void*, bool>& memo) {
  if (auto it = memo.find(f.id()); it != memo.end()) return it->second;
  bool v = false;
  switch (f.op()) {
    case Op::var: throw LogicError("fold_variable_free: formula contains p" + std::to_string(f.var()));
    case Op::falsum: v = false; break;
    case Op::implies: v = !fold(f.lhs(), memo) || fold(f.rhs(), memo); break;
    // Over serial models every path is infinite and every strategy has at
    // least one outcome path, so constant operands pass through unchanged.
    case Op::forall:
    case Op::coalition:
    case Op::next:
    case Op::always: v = fold(f.lhs(), memo); break;
    case Op::until: v = fold(f.rhs(), memo); break;
  }
  memo.emplace(f.id(), v);
  return v;
}

}  // namespace detail

/// Truth value of a variable-free formula (true for top, false for bottom).
inline bool fold_variable_free(const Formula& f) {
  std::unordered_map<const void*, bool> memo;
  return detail::fold(f, memo);
}

// ---------------------------------------------------------------------------
// CTL into ATL: A becomes <<>>, E becomes <<all agents>>.

inline Formula ctl_to_atl(const Formula& f, AgentSet agents) {
  switch (f.op()) {
    case Op::var:
    case Op::falsum: return f;
    case Op::implies:
      if (const Formula* u = match_exists_until(f))
        return Formula::coalition(Coalition::all(agents), Formula::until(ctl_to_atl(u->lhs(), agents),
                                                                         ctl_to_atl(u->rhs(), agents)));
      return Formula::implies(ctl_to_atl(f.lhs(), agents), ctl_to_atl(f.rhs(), agents));
    case Op::forall: {
      const Formula& p = f.lhs();
      if (p.op() == Op::next)
        return Formula::coalition(Coalition::none(), Formula::next(ctl_to_atl(p.lhs(), agents)));
      if (p.op() == Op::until)
        return Formula::coalition(Coalition::none(), Formula::until(ctl_to_atl(p.lhs(), agents),
                                                                    ctl_to_atl(p.rhs(), agents)));
      break;
    }
    default: break;
  }
  throw LogicError("ctl_to_atl: input is not a CTL formula");
}

}  // namespace onevar
