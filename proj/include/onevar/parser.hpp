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

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "onevar/errors.hpp"
#include "onevar/formula.hpp"

namespace onevar {

namespace detail {

enum class Tok {
  var, kw_true, kw_false, bang, amp, bar, arrow, dbl_arrow, lparen, rparen,
  quant_a, quant_e, next, until, globally, finally, coal_open, coal_close, comma, star, number, end
};

struct Token {
  Tok kind;
  std::size_t pos;
  int value = 0;
  std::string text;
};

inline std::string describe(const Token& t) {
  return t.kind == Tok::end ? std::string("end of input") : "'" + t.text + "'";
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view s) { return text.substr(i, s.size()) == s; };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t pos = i;
    if (starts("<->")) { out.push_back({Tok::dbl_arrow, pos, 0, "<->"}); i += 3; continue; }
    if (starts("<<")) { out.push_back({Tok::coal_open, pos, 0, "<<"}); i += 2; continue; }
    if (starts(">>")) { out.push_back({Tok::coal_close, pos, 0, ">>"}); i += 2; continue; }
    if (starts("->")) { out.push_back({Tok::arrow, pos, 0, "->"}); i += 2; continue; }
    switch (c) {
      case '!': out.push_back({Tok::bang, pos, 0, "!"}); ++i; continue;
      case '&': out.push_back({Tok::amp, pos, 0, "&"}); ++i; continue;
      case '|': out.push_back({Tok::bar, pos, 0, "|"}); ++i; continue;
      case '(': out.push_back({Tok::lparen, pos, 0, "("}); ++i; continue;
      case ')': out.push_back({Tok::rparen, pos, 0, ")"}); ++i; continue;
      case ',': out.push_back({Tok::comma, pos, 0, ","}); ++i; continue;
      case '*': out.push_back({Tok::star, pos, 0, "*"}); ++i; continue;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      std::string digits(text.substr(i, j - i));
      out.push_back({Tok::number, pos, std::stoi(digits), digits});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string word(text.substr(i, j - i));
      i = j;
      auto digits_after = [&](char prefix) {
        return word.size() > 1 && word[0] == prefix &&
               word.find_first_not_of("0123456789", 1) == std::string::npos;
      };
      if (digits_after('p')) {
        out.push_back({Tok::var, pos, std::stoi(word.substr(1)), word});
      } else if (digits_after('a')) {
        out.push_back({Tok::number, pos, std::stoi(word.substr(1)), word});
      } else if (word == "true") {
        out.push_back({Tok::kw_true, pos, 0, word});
      } else if (word == "false") {
        out.push_back({Tok::kw_false, pos, 0, word});
      } else if (word.size() <= 2 && word.find_first_not_of("AEXUGF") == std::string::npos &&
                 (word.size() == 1 || ((word[0] == 'A' || word[0] == 'E') &&
                                       (word[1] == 'X' || word[1] == 'G' || word[1] == 'F')))) {
        for (std::size_t k = 0; k < word.size(); ++k) {
          Tok kind = Tok::end;
          switch (word[k]) {
            case 'A': kind = Tok::quant_a; break;
            case 'E': kind = Tok::quant_e; break;
            case 'X': kind = Tok::next; break;
            case 'U': kind = Tok::until; break;
            case 'G': kind = Tok::globally; break;
            case 'F': kind = Tok::finally; break;
          }
          out.push_back({kind, pos + k, 0, std::string(1, word[k])});
        }
      } else {
        throw ParseError(pos, {"variable", "operator"}, "'" + word + "'");
      }
      continue;
    }
    throw ParseError(pos, {"variable", "operator"}, "'" + std::string(1, c) + "'");
  }
  out.push_back({Tok::end, text.size(), 0, ""});
  return out;
}

// Surface syntax tree; derived connectives are still present here and are
// lowered per logic.
struct Surface {
  enum Kind { var, bottom, top, not_, and_, or_, implies, iff, quant_a, quant_e, coalition, next, until, globally, finally };
  Kind kind;
  std::size_t pos;
  int var_index = 0;
  Coalition agents;
  std::unique_ptr<Surface> a, b;
};

using SurfacePtr = std::unique_ptr<Surface>;

inline SurfacePtr make_surface(Surface::Kind k, std::size_t pos, SurfacePtr a = nullptr, SurfacePtr b = nullptr) {
  auto s = std::make_unique<Surface>();
  s->kind = k;
  s->pos = pos;
  s->a = std::move(a);
  s->b = std::move(b);
  return s;
}

class SurfaceParser {
 public:
  SurfaceParser(std::vector<Token> tokens, AgentSet agents) : toks_(std::move(tokens)), agents_(agents) {}

  SurfacePtr parse_all() {
    auto f = parse_iff();
    if (peek().kind != Tok::end) fail({"operator", "end of input"});
    return f;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++i_;
    return true;
  }
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(peek().pos, std::move(expected), describe(peek()));
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail({what});
  }

  SurfacePtr parse_iff() {
    auto l = parse_implies();
    while (peek().kind == Tok::dbl_arrow) {
      std::size_t pos = take().pos;
      l = make_surface(Surface::iff, pos, std::move(l), parse_implies());
    }
    return l;
  }
  SurfacePtr parse_implies() {
    auto l = parse_or();
    if (peek().kind == Tok::arrow) {
      std::size_t pos = take().pos;
      return make_surface(Surface::implies, pos, std::move(l), parse_implies());
    }
    return l;
  }
  SurfacePtr parse_or() {
    auto l = parse_and();
    while (peek().kind == Tok::bar) {
      std::size_t pos = take().pos;
      l = make_surface(Surface::or_, pos, std::move(l), parse_and());
    }
    return l;
  }
  SurfacePtr parse_and() {
    auto l = parse_until();
    while (peek().kind == Tok::amp) {
      std::size_t pos = take().pos;
      l = make_surface(Surface::and_, pos, std::move(l), parse_until());
    }
    return l;
  }
  SurfacePtr parse_until() {
    auto l = parse_unary();
    if (peek().kind == Tok::until) {
      std::size_t pos = take().pos;
      return make_surface(Surface::until, pos, std::move(l), parse_until());
    }
    return l;
  }
  SurfacePtr parse_unary() {
    const Token& t = peek();
    std::size_t pos = t.pos;
    switch (t.kind) {
      case Tok::bang: ++i_; return make_surface(Surface::not_, pos, parse_unary());
      case Tok::next: ++i_; return make_surface(Surface::next, pos, parse_unary());
      case Tok::globally: ++i_; return make_surface(Surface::globally, pos, parse_unary());
      case Tok::finally: ++i_; return make_surface(Surface::finally, pos, parse_unary());
      case Tok::quant_a: ++i_; return make_surface(Surface::quant_a, pos, parse_unary());
      case Tok::quant_e: ++i_; return make_surface(Surface::quant_e, pos, parse_unary());
      case Tok::coal_open: {
        ++i_;
        Coalition c = parse_agents();
        auto s = make_surface(Surface::coalition, pos, parse_unary());
        s->agents = c;
        return s;
      }
      default: return parse_primary();
    }
  }
  Coalition parse_agents() {
    Coalition c;
    if (accept(Tok::coal_close)) return c;
    if (accept(Tok::star)) {
      expect(Tok::coal_close, "'>>'");
      return Coalition::all(agents_);
    }
    while (true) {
      if (peek().kind != Tok::number) fail({"agent index", "'*'", "'>>'"});
      const Token& n = take();
      if (!agents_.contains(n.value))
        throw ParseError(n.pos, {"agent index in 1.." + std::to_string(agents_.count())}, describe(n));
      c.insert(n.value);
      if (accept(Tok::coal_close)) return c;
      expect(Tok::comma, "',' or '>>'");
    }
  }
  SurfacePtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::var: {
        ++i_;
        if (t.value < 1) throw ParseError(t.pos, {"variable index >= 1"}, describe(t));
        auto s = make_surface(Surface::var, t.pos);
        s->var_index = t.value;
        return s;
      }
      case Tok::kw_true: ++i_; return make_surface(Surface::top, t.pos);
      case Tok::kw_false: ++i_; return make_surface(Surface::bottom, t.pos);
      case Tok::lparen: {
        ++i_;
        auto f = parse_iff();
        expect(Tok::rparen, "')'");
        return f;
      }
      default: fail({"variable", "'true'", "'false'", "'('", "unary operator"});
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  AgentSet agents_;
};

inline Formula lower(const Surface& s, LogicId logic) {
  auto sub = [&](const SurfacePtr& p) { return lower(*p, logic); };
  switch (s.kind) {
    case Surface::var: return var(s.var_index);
    case Surface::bottom: return bottom();
    case Surface::top: return top();
    case Surface::not_: return neg(sub(s.a));
    case Surface::and_: return conj(sub(s.a), sub(s.b));
    case Surface::or_: return disj(sub(s.a), sub(s.b));
    case Surface::implies: return implies(sub(s.a), sub(s.b));
    case Surface::iff: return iff(sub(s.a), sub(s.b));
    case Surface::next: return Formula::next(sub(s.a));
    case Surface::until: return Formula::until(sub(s.a), sub(s.b));
    case Surface::finally: return eventually(sub(s.a));
    case Surface::globally: return globally(sub(s.a), logic);
    case Surface::quant_a:
    case Surface::quant_e: {
      if (is_alternating(logic))
        throw SortError("path quantifier at position " + std::to_string(s.pos) + " is not part of " +
                        std::string(to_string(logic)) + "; use <<>> or <<*>>");
      bool universal = s.kind == Surface::quant_a;
      if (logic == LogicId::ctl) {
        const Surface& t = *s.a;
        switch (t.kind) {
          case Surface::next: return universal ? ax(sub(t.a)) : ex(sub(t.a));
          case Surface::finally: return universal ? af(sub(t.a)) : ef(sub(t.a));
          case Surface::globally: return universal ? neg(ef(neg(sub(t.a)))) : neg(af(neg(sub(t.a))));
          case Surface::until: return universal ? au(sub(t.a), sub(t.b)) : eu(sub(t.a), sub(t.b));
          default: break;
        }
      }
      return universal ? Formula::forall(sub(s.a)) : exists(sub(s.a));
    }
    case Surface::coalition:
      if (!is_alternating(logic))
        throw SortError("coalition quantifier at position " + std::to_string(s.pos) + " is not part of " +
                        std::string(to_string(logic)));
      return Formula::coalition(s.agents, sub(s.a));
  }
  throw SortError("unexpected syntax node");
}

}  // namespace detail

/// Parses formula text in the concrete syntax of the given logic. Derived
/// connectives are expanded into the core constructors.
inline Formula parse(std::string_view text, LogicId logic, AgentSet agents = AgentSet{1}) {
  detail::SurfaceParser parser(detail::tokenize(text), agents);
  auto surface = parser.parse_all();
  Formula f = detail::lower(*surface, logic);
  if (!f.is_state()) throw SortError("path formula where a state formula is required");
  if (!in_logic(f, logic)) {
    if (logic == LogicId::ctl)
      throw SortError("not a CTL formula: every path quantifier must be paired with X, F, G or U");
    if (logic == LogicId::atl)
      throw SortError("not an ATL formula: every coalition must be paired with X, F, G or U");
    throw SortError("formula is not part of " + std::string(to_string(logic)));
  }
  for_each_subformula(f, [&](const Formula& g) {
    if (g.op() == Op::coalition && !g.agents().within(agents))
      throw SortError("coalition mentions an agent outside 1.." + std::to_string(agents.count()));
  });
  return f;
}

// ---------------------------------------------------------------------------
// Printing.

namespace detail {

inline std::string coalition_text(Coalition c) {
  std::string out = "<<";
  bool first = true;
  for (int a : c.members()) {
    if (!first) out += ",";
    out += std::to_string(a);
    first = false;
  }
  return out + ">>";
}

// Binding strength of the printed top symbol.
enum Level { lv_implies = 1, lv_or = 2, lv_and = 3, lv_until = 4, lv_unary = 5, lv_atom = 6 };

struct Printed {
  std::string text;
  int level;
};

inline std::string at_least(const Printed& p, int level) {
  return p.level >= level ? p.text : "(" + p.text + ")";
}

inline Printed print_core(const Formula& f) {
  switch (f.op()) {
    case Op::var: return {"p" + std::to_string(f.var()), lv_atom};
    case Op::falsum: return {"false", lv_atom};
    case Op::implies:
      return {at_least(print_core(f.lhs()), lv_or) + " -> " + at_least(print_core(f.rhs()), lv_implies), lv_implies};
    case Op::until:
      return {at_least(print_core(f.lhs()), lv_unary) + " U " + at_least(print_core(f.rhs()), lv_unary), lv_until};
    case Op::forall: return {"A " + at_least(print_core(f.lhs()), lv_unary), lv_unary};
    case Op::coalition: return {coalition_text(f.agents()) + " " + at_least(print_core(f.lhs()), lv_unary), lv_unary};
    case Op::next: return {"X " + at_least(print_core(f.lhs()), lv_unary), lv_unary};
    case Op::always: return {"G " + at_least(print_core(f.lhs()), lv_unary), lv_unary};
  }
  return {"?", lv_atom};
}

inline bool is_top(const Formula& f) {
  return f.op() == Op::implies && f.lhs().op() == Op::falsum && f.rhs().op() == Op::falsum;
}

class PrettyPrinter {
 public:
  explicit PrettyPrinter(LogicId logic) : logic_(logic) {}

  Printed print(const Formula& f) const {
    auto unary = [&](std::string prefix, const Formula& g) {
      return Printed{std::move(prefix) + at_least(print(g), lv_unary), lv_unary};
    };
    switch (f.op()) {
      case Op::var: return {"p" + std::to_string(f.var()), lv_atom};
      case Op::falsum: return {"false", lv_atom};
      case Op::implies: {
        if (is_top(f)) return {"true", lv_atom};
        if (is_negation(f)) {
          const Formula& g = f.lhs();
          if (logic_ == LogicId::ctl) {
            if (auto p = ctl_negated_pair(g)) return *p;
          } else if (g.op() == Op::forall && is_negation(g.lhs())) {
            return unary("E ", g.lhs().lhs());
          }
          if (logic_ == LogicId::ctlstar && g.op() == Op::until && is_top(g.lhs()) && is_negation(g.rhs()))
            return unary("G ", g.rhs().lhs());
          if (g.op() == Op::implies && is_negation(g.rhs()))
            return {at_least(print(g.lhs()), lv_and) + " & " + at_least(print(g.rhs().lhs()), lv_until), lv_and};
          return unary("!", g);
        }
        if (is_negation(f.lhs()))
          return {at_least(print(f.lhs().lhs()), lv_or) + " | " + at_least(print(f.rhs()), lv_and), lv_or};
        return {at_least(print(f.lhs()), lv_or) + " -> " + at_least(print(f.rhs()), lv_implies), lv_implies};
      }
      case Op::until:
        if (is_top(f.lhs())) return unary("F ", f.rhs());
        return {at_least(print(f.lhs()), lv_unary) + " U " + at_least(print(f.rhs()), lv_unary), lv_until};
      case Op::forall: {
        const Formula& p = f.lhs();
        if (logic_ == LogicId::ctl && p.op() == Op::until && !is_top(p.lhs()))
          return {"A (" + print(p).text + ")", lv_unary};
        return unary("A ", p);
      }
      case Op::coalition: {
        const Formula& p = f.lhs();
        if (p.op() == Op::until && !is_top(p.lhs()))
          return {coalition_text(f.agents()) + " (" + print(p).text + ")", lv_unary};
        return unary(coalition_text(f.agents()) + " ", p);
      }
      case Op::next: return unary("X ", f.lhs());
      case Op::always: return unary("G ", f.lhs());
    }
    return {"?", lv_atom};
  }

 private:
  // g is the operand of an outer negation.
  std::optional<Printed> ctl_negated_pair(const Formula& g) const {
    auto unary = [&](std::string prefix, const Formula& h) {
      return Printed{std::move(prefix) + at_least(print(h), lv_unary), lv_unary};
    };
    if (g.op() == Op::forall) {
      const Formula& p = g.lhs();
      // not AX not a  ->  EX a
      if (p.op() == Op::next && is_negation(p.lhs())) return unary("E X ", p.lhs().lhs());
      // not AF not a  ->  EG a
      if (p.op() == Op::until && is_top(p.lhs()) && is_negation(p.rhs())) return unary("E G ", p.rhs().lhs());
      // not A not (a U b)  ->  E (a U b)
      if (is_negation(p) && p.lhs().op() == Op::until) {
        const Formula& u = p.lhs();
        if (is_top(u.lhs())) return unary("E F ", u.rhs());
        return Printed{"E (" + print(u).text + ")", lv_unary};
      }
    }
    // not EF not a  ->  AG a
    if (const Formula* u = match_exists_until(g); u && is_top(u->lhs()) && is_negation(u->rhs()))
      return unary("A G ", u->rhs().lhs());
    return std::nullopt;
  }

  LogicId logic_;
};

}  // namespace detail

/// Core-constructor text; parses back to the same formula.
inline std::string print(const Formula& f) { return detail::print_core(f).text; }

/// Text using the derived connectives of the given logic where the parser
/// for that logic maps them back to the same core formula.
inline std::string print_pretty(const Formula& f, LogicId logic) {
  return detail::PrettyPrinter(logic).print(f).text;
}

}  // namespace onevar
