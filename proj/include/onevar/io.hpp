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

#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "onevar/cgs.hpp"
#include "onevar/embedding.hpp"
#include "onevar/kripke.hpp"
#include "onevar/parser.hpp"

namespace onevar {

using Json = nlohmann::ordered_json;

namespace detail {

template <typename Model>
Json valuation_json(const Model& m) {
  Json val = Json::object();
  for (const auto& [v, set] : m.valuation()) {
    Json states = Json::array();
    set.for_each([&](State s) { states.push_back(s); });
    val[std::to_string(v)] = states;
  }
  return val;
}

template <typename Model>
Json names_json(const Model& m) {
  Json names = Json::array();
  for (State s = 0; s < m.size(); ++s) names.push_back(m.name(s));
  return names;
}

inline State state_index(const Json& j, std::size_t n, std::string_view what) {
  if (!j.is_number_unsigned() || j.get<std::uint64_t>() >= n)
    throw ModelError(std::string(what) + ": state " + j.dump() + " out of range");
  return j.get<State>();
}

inline int variable_index(const std::string& key) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || v < 1) throw ModelError("val: bad variable index '" + key + "'");
  return v;
}

template <typename Model>
void read_common(Model& m, const Json& j) {
  std::size_t n = m.size();
  if (j.contains("val")) {
    for (const auto& [key, states] : j.at("val").items()) {
      int v = variable_index(key);
      for (const auto& s : states) m.set_label(v, state_index(s, n, "val"), true);
    }
  }
  if (j.contains("names")) {
    const Json& names = j.at("names");
    if (!names.is_array() || names.size() != n) throw ModelError("names: expected one name per state");
    for (State s = 0; s < n; ++s) m.set_name(s, names[s].get<std::string>());
  }
}

template <typename F>
auto guarded_parse(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

template <typename Model>
std::string dot_node_label(const Model& m, State s) {
  std::string label = dot_escape(m.name(s));
  std::string vars;
  for (const auto& [v, set] : m.valuation())
    if (set.contains(s)) vars += (vars.empty() ? "" : ",") + ("p" + std::to_string(v));
  return label + "\\n{" + vars + "}";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kripke models.

/// {"states": N, "edges": [[i,j],...], "val": {"1": [i,...]}, "names": [...]}
inline Json to_json(const KripkeModel& m) {
  Json j;
  j["states"] = m.size();
  Json edges = Json::array();
  for (const auto& [s, t] : m.edges()) edges.push_back({s, t});
  j["edges"] = edges;
  j["val"] = detail::valuation_json(m);
  if (m.has_names()) j["names"] = detail::names_json(m);
  return j;
}

inline KripkeModel kripke_from_json(const Json& j) {
  return detail::guarded_parse([&] {
    if (!j.is_object() || !j.contains("states")) throw ModelError("Kripke model: missing \"states\"");
    if (j.contains("agents")) throw ModelError("expected a Kripke model, found a game model");
    std::size_t n = j.at("states").get<std::size_t>();
    KripkeModel m(n);
    const Json edges = j.value("edges", Json::array());
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2) throw ModelError("edges: expected [from, to] pairs");
      m.add_edge(detail::state_index(e[0], n, "edges"), detail::state_index(e[1], n, "edges"));
    }
    detail::read_common(m, j);
    return m;
  });
}

/// Designated state, when given, is drawn as a double circle.
inline std::string to_dot(const KripkeModel& m, std::optional<State> designated = std::nullopt) {
  std::ostringstream out;
  out << "digraph kripke {\n  node [shape=circle];\n";
  for (State s = 0; s < m.size(); ++s) {
    out << "  " << s << " [label=\"" << detail::dot_node_label(m, s) << "\"";
    if (designated && *designated == s) out << ", shape=doublecircle";
    out << "];\n";
  }
  for (const auto& [s, t] : m.edges()) out << "  " << s << " -> " << t << ";\n";
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Concurrent game models.

/// {"agents": k, "states": N, "actions": [...], "available": {"agent,state":
/// [names]}, "delta": {"state|act1,act2": target}, "val": {...}}
inline Json to_json(const ConcurrentGameModel& m) {
  Json j;
  const int k = m.agents().count();
  j["agents"] = k;
  j["states"] = m.size();
  j["actions"] = m.actions();
  Json available = Json::object();
  Json delta = Json::object();
  for (State s = 0; s < m.size(); ++s) {
    for (int a = 1; a <= k; ++a) {
      Json ids = Json::array();
      for (int id : m.available(a, s)) ids.push_back(m.action_name(id));
      available[std::to_string(a) + "," + std::to_string(s)] = ids;
    }
    m.for_each_profile(s, [&](const Profile& p, State t) {
      std::string key = std::to_string(s) + "|";
      for (std::size_t i = 0; i < p.size(); ++i) key += (i ? "," : "") + m.action_name(p[i]);
      delta[key] = t;
    });
  }
  j["available"] = available;
  j["delta"] = delta;
  j["val"] = detail::valuation_json(m);
  if (m.has_names()) j["names"] = detail::names_json(m);
  return j;
}

namespace detail {

inline std::pair<int, State> split_agent_state(const std::string& key, std::size_t n, int k) {
  auto comma = key.find(',');
  if (comma == std::string::npos) throw ModelError("available: key '" + key + "' is not \"agent,state\"");
  int agent = std::stoi(key.substr(0, comma));
  unsigned long s = std::stoul(key.substr(comma + 1));
  if (agent < 1 || agent > k || s >= n) throw ModelError("available: key '" + key + "' out of range");
  return {agent, static_cast<State>(s)};
}

inline int action_ref(const ConcurrentGameModel& m, const Json& a) {
  if (a.is_string()) return m.action_id(a.get<std::string>());
  if (a.is_number_unsigned() && a.get<std::size_t>() < m.actions().size()) return a.get<int>();
  throw ModelError("unknown action " + a.dump());
}

}  // namespace detail

inline ConcurrentGameModel cgs_from_json(const Json& j) {
  return detail::guarded_parse([&] {
    if (!j.is_object() || !j.contains("agents")) throw ModelError("game model: missing \"agents\"");
    int k = j.at("agents").get<int>();
    if (k < 1) throw ModelError("game model: agents must be >= 1");
    std::size_t n = j.at("states").get<std::size_t>();
    ConcurrentGameModel m(AgentSet{k}, n, j.at("actions").get<std::vector<std::string>>());
    const Json available = j.value("available", Json::object());
    for (const auto& [key, ids] : available.items()) {
      auto [agent, s] = detail::split_agent_state(key, n, k);
      std::vector<int> av;
      for (const auto& a : ids) av.push_back(detail::action_ref(m, a));
      m.set_available(agent, s, av);
    }
    const Json delta = j.value("delta", Json::object());
    for (const auto& [key, target] : delta.items()) {
      auto bar = key.find('|');
      if (bar == std::string::npos) throw ModelError("delta: key '" + key + "' is not \"state|profile\"");
      unsigned long s = std::stoul(key.substr(0, bar));
      if (s >= n) throw ModelError("delta: state in '" + key + "' out of range");
      Profile p;
      std::stringstream rest(key.substr(bar + 1));
      for (std::string a; std::getline(rest, a, ',');) p.push_back(m.action_id(a));
      m.set_delta(static_cast<State>(s), p, detail::state_index(target, n, "delta"));
    }
    detail::read_common(m, j);
    return m;
  });
}

/// Successor graph of the game; each edge lists the profiles that take it.
inline std::string to_dot(const ConcurrentGameModel& m, std::optional<State> designated = std::nullopt) {
  std::ostringstream out;
  out << "digraph cgs {\n  node [shape=circle];\n";
  for (State s = 0; s < m.size(); ++s) {
    out << "  " << s << " [label=\"" << detail::dot_node_label(m, s) << "\"";
    if (designated && *designated == s) out << ", shape=doublecircle";
    out << "];\n";
  }
  for (State s = 0; s < m.size(); ++s) {
    std::map<State, std::string> labels;
    m.for_each_profile(s, [&](const Profile& p, State t) {
      if (t == ConcurrentGameModel::undefined) return;
      std::string& l = labels[t];
      if (!l.empty()) l += "\\n";
      l += "(";
      for (std::size_t i = 0; i < p.size(); ++i) l += (i ? "," : "") + detail::dot_escape(m.action_name(p[i]));
      l += ")";
    });
    for (const auto& [t, l] : labels)
      out << "  " << s << " -> " << t << " [label=\"" << l << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Translation results.

inline Json to_json(const TranslationResult& tr) {
  Json j;
  j["logic"] = std::string(to_string(tr.logic));
  j["agents"] = tr.agents.count();
  j["placement"] = tr.placement == GuardPlacement::exit_aware ? "exit_aware" : "uniform";
  j["source"] = print_pretty(tr.source, tr.logic);
  Json mapping = Json::object();
  for (const auto& [orig, canon] : tr.renaming) mapping["p" + std::to_string(orig)] = "p" + std::to_string(canon);
  j["mapping"] = mapping;
  j["n"] = tr.n;
  j["guard"] = "p" + std::to_string(tr.guard);
  j["primed"] = print_pretty(tr.primed, tr.logic);
  j["theta"] = print_pretty(tr.theta, tr.logic);
  j["hat"] = print_pretty(tr.hat, tr.logic);
  Json sigma = Json::object();
  for (const auto& [i, b] : tr.sigma) sigma["p" + std::to_string(i)] = print_pretty(b, tr.logic);
  j["sigma"] = sigma;
  j["star"] = print_pretty(tr.star, tr.logic);
  Json vars = Json::array();
  for (int v : variables(tr.star)) vars.push_back("p" + std::to_string(v));
  j["star_variables"] = vars;
  std::uint64_t s = tr.source.size();
  j["sizes"] = {{"source", s},
                {"primed", tr.primed.size()},
                {"theta", tr.theta.size()},
                {"hat", tr.hat.size()},
                {"star", tr.star.size()},
                {"bound", star_size_constant * s * s}};
  return j;
}

}  // namespace onevar
