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

// onevar: translate, model check, search and verify temporal formulas.
//
//   onevar translate --logic ctl "A G p1"
//   onevar modelcheck model.json "E F p1" --state 0
//   onevar sat --logic ctlstar --max-states 3 "E (G F p1)"
//   onevar gadget 2 --dot
//   onevar verify all --seed 7
//
// Exit codes: 0 success / holds / SAT / pass, 1 fails / UNKNOWN /
// counterexample, 2 usage, parse, sort or model error, 3 budget exhausted.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "onevar/onevar.hpp"

namespace {

using namespace onevar;

constexpr int exit_ok = 0;
constexpr int exit_no = 1;
constexpr int exit_error = 2;
constexpr int exit_budget = 3;
constexpr std::uint64_t default_seed = 42;

struct Common {
  std::string logic = "ctl";
  int agents = 1;
  bool json = false;
  bool dot = false;
  std::string file;
  std::string formula;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string formula_text(const Common& c) {
  if (!c.file.empty() && !c.formula.empty()) throw LogicError("give the formula either inline or with --file");
  if (!c.file.empty()) return read_file(c.file);
  if (c.formula.empty()) throw LogicError("no formula given");
  return c.formula;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ONEVAR_TL_SEED")) {
    try {
      std::size_t used = 0;
      std::uint64_t v = std::stoull(env, &used);
      if (used == std::string_view(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw LogicError(std::string("ONEVAR_TL_SEED is not a number: '") + env + "'");
  }
  return default_seed;
}

void add_common(CLI::App* cmd, Common& c, bool formula) {
  cmd->add_option("--logic", c.logic, "ctl, ctlstar, atl or atlstar")
      ->check(CLI::IsMember({"ctl", "ctlstar", "atl", "atlstar"}));
  cmd->add_option("--agents", c.agents, "number of agents")->check(CLI::Range(1, 16));
  cmd->add_flag("--json", c.json, "JSON output");
  if (formula) {
    cmd->add_option("formula", c.formula, "formula text");
    cmd->add_option("--file", c.file, "read the formula from a file");
  }
}

void print_states(const StateSet& set, const std::function<std::string(State)>& name, bool json) {
  if (json) {
    Json out = Json::array();
    for (State s : set.members()) out.push_back(name(s));
    std::cout << out.dump() << "\n";
    return;
  }
  for (State s : set.members()) std::cout << name(s) << "\n";
}

int cmd_translate(const Common& c, bool uniform) {
  LogicId logic = logic_from_string(c.logic);
  AgentSet agents{c.agents};
  Formula f = parse(formula_text(c), logic, agents);
  auto tr = embed(f, logic, agents, uniform ? GuardPlacement::uniform : GuardPlacement::exit_aware);
  Json j = to_json(tr);
  if (c.json) {
    std::cout << j.dump(2) << "\n";
    return exit_ok;
  }
  std::cout << "source: " << j["source"].get<std::string>() << "\n";
  for (const auto& [from, to] : j["mapping"].items()) std::cout << "rename: " << from << " -> " << to.get<std::string>() << "\n";
  std::cout << "guard: " << j["guard"].get<std::string>() << "\n";
  std::cout << "primed: " << j["primed"].get<std::string>() << "\n";
  std::cout << "theta: " << j["theta"].get<std::string>() << "\n";
  std::cout << "hat: " << j["hat"].get<std::string>() << "\n";
  for (const auto& [v, b] : j["sigma"].items()) std::cout << "sigma " << v << ": " << b.get<std::string>() << "\n";
  std::cout << "star: " << j["star"].get<std::string>() << "\n";
  const Json& sizes = j["sizes"];
  std::cout << "sizes: source=" << sizes["source"] << " star=" << sizes["star"] << " bound=" << sizes["bound"]
            << "\n";
  return exit_ok;
}

std::optional<State> find_state(const std::string& text, std::size_t n, const std::function<std::string(State)>& name) {
  if (text.empty()) return std::nullopt;
  for (State s = 0; s < n; ++s)
    if (name(s) == text) return s;
  try {
    std::size_t used = 0;
    unsigned long v = std::stoul(text, &used);
    if (used == text.size() && v < n) return static_cast<State>(v);
  } catch (const std::exception&) {
  }
  throw ModelError("no state '" + text + "'");
}

int report_holds(const StateSet& set, std::optional<State> designated, const std::function<std::string(State)>& name,
                 bool json) {
  print_states(set, name, json);
  if (!designated) return exit_ok;
  return set.contains(*designated) ? exit_ok : exit_no;
}

int cmd_modelcheck(Common& c, const std::string& model_path, const std::string& state, bool logic_given) {
  Json j;
  try {
    j = Json::parse(read_file(model_path));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model file: ") + e.what());
  }
  if (j.contains("agents")) {
    if (!logic_given) c.logic = "atl";
    LogicId logic = logic_from_string(c.logic);
    if (logic != LogicId::atl) throw LogicError("game models are checked against ATL formulas only");
    ConcurrentGameModel g = cgs_from_json(j);
    if (auto report = validate(g); !report.ok()) throw ModelError(report.message());
    Formula f = parse(formula_text(c), logic, g.agents());
    auto name = [&](State s) { return g.name(s); };
    return report_holds(mc_atl(g, f), find_state(state, g.size(), name), name, c.json);
  }
  if (!logic_given) c.logic = "ctlstar";
  LogicId logic = logic_from_string(c.logic);
  if (is_alternating(logic)) throw LogicError("Kripke models are checked against CTL or CTL* formulas only");
  KripkeModel m = kripke_from_json(j);
  if (auto report = validate(m); !report.ok()) throw ModelError(report.message());
  Formula f = parse(formula_text(c), logic);
  auto name = [&](State s) { return m.name(s); };
  StateSet set = logic == LogicId::ctl ? mc_ctl(m, f) : mc_ctlstar(m, f);
  return report_holds(set, find_state(state, m.size(), name), name, c.json);
}

template <typename Model>
int report_verdict(const SatVerdict<Model>& v, bool json) {
  if (json) {
    Json out;
    out["status"] = v.sat() ? "SAT" : "UNKNOWN";
    out["models_examined"] = v.models_examined;
    if (v.sat()) {
      out["state"] = v.witness_state;
      out["witness"] = to_json(*v.witness);
    }
    std::cout << out.dump(2) << "\n";
  } else if (v.sat()) {
    std::cout << "SAT at state " << v.witness_state << " after " << v.models_examined << " models\n"
              << to_json(*v.witness).dump() << "\n";
  } else {
    std::cout << "UNKNOWN after " << v.models_examined << " models\n";
  }
  return v.sat() ? exit_ok : exit_no;
}

int cmd_sat(const Common& c, std::size_t max_states, int max_actions, unsigned jobs, std::uint64_t budget) {
  LogicId logic = logic_from_string(c.logic);
  AgentSet agents{c.agents};
  Formula f = parse(formula_text(c), logic, agents);
  SearchOptions opts;
  opts.jobs = jobs;
  if (budget > 0) opts.max_models = budget;
  if (logic == LogicId::atlstar) throw LogicError("bounded search covers CTL, CTL* and ATL");
  if (logic == LogicId::atl) return report_verdict(bounded_sat_cgs(f, agents, max_states, max_actions, opts), c.json);
  return report_verdict(bounded_sat(f, logic, max_states, opts), c.json);
}

int cmd_gadget(const Common& c, int m, bool alternating, bool formula) {
  if (m < 1) throw LogicError("gadget index must be >= 1");
  bool game = alternating || is_alternating(logic_from_string(c.logic));
  if (formula) {
    AgentSet agents{c.agents};
    Formula a = gadget_formula(m, game ? GadgetFlavor::alternating : GadgetFlavor::branching, 1, agents);
    std::cout << print_pretty(a, game ? LogicId::atl : LogicId::ctl) << "\n";
    return exit_ok;
  }
  if (game) {
    ConcurrentGameModel g = gadget_model_cgs(m, AgentSet{c.agents}, {"x"});
    std::cout << (c.dot ? to_dot(g, State{0}) : to_json(g).dump(2) + "\n");
  } else {
    KripkeModel k = gadget_model_kripke(m, false);
    std::cout << (c.dot ? to_dot(k, State{0}) : to_json(k).dump(2) + "\n");
  }
  return exit_ok;
}

int cmd_verify(const std::string& suite, const VerifyOptions& opts) {
  std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
  bool failed = false, budget = false;
  for (const auto& name : names) {
    SuiteReport r = run_suite(name, opts);
    std::cout << r.suite << ": " << to_string(r.status) << " (" << r.checked << " checked";
    if (r.skipped > 0) std::cout << ", " << r.skipped << " over budget";
    std::cout << ")\n";
    if (r.status == VerifyStatus::fail) std::cout << "counterexample: " << r.counterexample << "\n";
    failed = failed || r.status == VerifyStatus::fail;
    budget = budget || r.status == VerifyStatus::budget;
  }
  std::cout << "seed: " << opts.seed << "\n";
  return failed ? exit_no : budget ? exit_budget : exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-variable embeddings of CTL, CTL*, ATL and ATL*"};
  app.require_subcommand(1, 1);

  Common common;
  bool uniform = false;
  auto* translate = app.add_subcommand("translate", "print the single-variable translation");
  add_common(translate, common, true);
  translate->add_flag("--uniform", uniform, "put the guard in the same place for every quantifier");

  std::string model_path, state;
  auto* modelcheck = app.add_subcommand("modelcheck", "list the states satisfying a formula");
  modelcheck->add_option("model", model_path, "model JSON file")->required();
  add_common(modelcheck, common, true);
  modelcheck->add_option("--state", state, "designated state (name or index)");

  std::size_t max_states = 3;
  int max_actions = 2;
  unsigned jobs = 1;
  std::uint64_t budget = 0;
  auto* sat = app.add_subcommand("sat", "bounded satisfiability search");
  add_common(sat, common, true);
  sat->add_option("--max-states", max_states, "largest model size")->check(CLI::Range(1, 6));
  sat->add_option("--max-actions", max_actions, "largest action count (ATL)")->check(CLI::Range(1, 4));
  sat->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 64));
  sat->add_option("--budget", budget, "stop after this many models (0 = unlimited)");

  int gadget_m = 1;
  bool alternating = false;
  auto* gadget = app.add_subcommand("gadget", "emit the gadget model for index m");
  gadget->add_option("m", gadget_m, "gadget index")->required();
  add_common(gadget, common, false);
  gadget->add_flag("--dot", common.dot, "Graphviz output");
  gadget->add_flag("--alternating", alternating, "game gadget");
  bool gadget_formula_only = false;
  gadget->add_flag("--formula", gadget_formula_only, "print the formula that holds exactly at the root");

  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  VerifyOptions vopts;
  auto* verify = app.add_subcommand("verify", "run property suites E1..E6");
  verify->add_option("suite", suite, "E1..E6 or all")
      ->check(CLI::IsMember({"E1", "E2", "E3", "E4", "E5", "E6", "all"}));
  verify->add_option("--seed", seed, "random seed (default: ONEVAR_TL_SEED, then 42)");
  verify->add_option("--cases", vopts.cases, "random cases per suite")->check(CLI::Range(1, 1'000'000));
  verify->add_option("--max-m", vopts.max_m, "largest gadget index")->check(CLI::Range(1, 12));
  verify->add_option("--budget", vopts.budget, "models per bounded search");
  verify->add_option("--jobs", vopts.jobs, "worker threads")->check(CLI::Range(1, 64));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_error;
  }

  try {
    if (*translate) return cmd_translate(common, uniform);
    if (*modelcheck) return cmd_modelcheck(common, model_path, state, modelcheck->count("--logic") > 0);
    if (*sat) return cmd_sat(common, max_states, max_actions, jobs, budget);
    if (*gadget) return cmd_gadget(common, gadget_m, alternating, gadget_formula_only);
    vopts.seed = resolve_seed(seed);
    return cmd_verify(suite, vopts);
  } catch (const BudgetExceeded& e) {
    std::cerr << "onevar: budget exhausted: " << e.what() << "\n";
    return exit_budget;
  } catch (const onevar::Error& e) {
    std::cerr << "onevar: " << e.what() << "\n";
    return exit_error;
  }
}
