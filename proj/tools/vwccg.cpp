// Command-line front end: grammar parsing/checking, the SAT and ATM
// reductions, and the ATM simulator, wired together for batch use.
//
// Exit codes: 0 accepted/SAT/machine-accepts, 1 rejected/UNSAT,
// 2 usage or input error, 3 resource budget exhausted or rejection
// that an arity cap makes ambiguous.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vwccg/atm.hpp"
#include "vwccg/atm_reduction.hpp"
#include "vwccg/derivation.hpp"
#include "vwccg/grammar.hpp"
#include "vwccg/parser.hpp"
#include "vwccg/sat_reduction.hpp"

namespace {

constexpr int kAccept = 0;
constexpr int kReject = 1;
constexpr int kError = 2;
constexpr int kBudget = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vwccg::validation_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Atomic write: temp file in the target directory, then rename.
void write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw vwccg::validation_error("cannot write file: " + path);
    out << content;
    if (!out) throw vwccg::validation_error("cannot write file: " + path);
  }
  fs::rename(tmp, target);
}

struct OutputOptions {
  std::string format = "text";
};

void emit(const OutputOptions& opts, const std::string& command, bool accepted,
          int exit_code, const nlohmann::json& stats,
          const std::string& text_line) {
  if (opts.format == "json") {
    nlohmann::json j;
    j["command"] = command;
    j["accepted"] = accepted;
    j["exit"] = exit_code;
    j["stats"] = stats;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text_line << "\n";
  }
}

std::string render_assignment(const vwccg::Assignment& a) {
  std::string s;
  for (std::size_t j = 1; j <= a.values.size(); ++j) {
    if (j > 1) s += " ";
    s += "v" + std::to_string(j) + "=" + (a.value(j) ? "1" : "0");
  }
  return s;
}

void render_computation_text(const vwccg::ComputationTree& t,
                             std::size_t indent, std::string& out) {
  out.append(indent * 2, ' ');
  out += vwccg::render_config(t.config);
  out += "\n";
  for (const auto& c : t.children)
    render_computation_text(*c, indent + 1, out);
}

// --- subcommands ---------------------------------------------------------

int cmd_parse(const std::string& grammar_path,
              const std::vector<std::string>& tokens, bool empty,
              std::optional<std::size_t> arity_cap,
              std::optional<std::size_t> max_items,
              const std::string& derivation_path, const OutputOptions& opts) {
  vwccg::Grammar g = vwccg::parse_grammar(read_file(grammar_path));
  if (empty && !tokens.empty())
    throw vwccg::validation_error("--empty conflicts with input tokens");
  vwccg::ParseConfig cfg{arity_cap, max_items};
  vwccg::ParseResult res = vwccg::parse(g, tokens, cfg);

  int code = res.accepted ? kAccept : kReject;
  // A rejection obtained while the cap suppressed combinations of an
  // epsilon-grammar is not a certified rejection.
  if (!res.accepted && res.cap_hit && !vwccg::is_epsilon_free(g))
    code = kBudget;
  if (res.accepted && !derivation_path.empty())
    write_file(derivation_path, vwccg::serialize(*res.derivation) + "\n");

  nlohmann::json stats;
  stats["items"] = res.items_created;
  stats["cap_hit"] = res.cap_hit;
  emit(opts, "parse", res.accepted, code, stats,
       res.accepted ? "ACCEPT" : (code == kBudget ? "REJECT (cap hit)"
                                                  : "REJECT"));
  return code;
}

int cmd_check(const std::string& grammar_path,
              const std::string& derivation_path, const OutputOptions& opts) {
  vwccg::Grammar g = vwccg::parse_grammar(read_file(grammar_path));
  vwccg::TreePtr t = vwccg::deserialize(read_file(derivation_path));
  vwccg::CheckResult res = vwccg::check_derivation(g, *t);
  nlohmann::json stats;
  stats["node_path"] = res.node_path;
  stats["message"] = res.message;
  emit(opts, "check", res.ok, res.ok ? kAccept : kReject, stats,
       res.ok ? "OK" : "VIOLATION at node [" + res.node_path + "]: " +
                           res.message);
  return res.ok ? kAccept : kReject;
}

int cmd_reduce_sat(const std::string& cnf_path,
                   const std::string& out_grammar,
                   const std::string& out_input, bool report,
                   const OutputOptions& opts) {
  vwccg::CnfFormula phi = vwccg::parse_dimacs(read_file(cnf_path));
  vwccg::SatInstance inst = vwccg::build_sat_instance(phi);
  std::string gtext = vwccg::render_grammar(inst.grammar);
  if (!out_grammar.empty()) write_file(out_grammar, gtext);
  if (!out_input.empty()) {
    std::string itext;
    for (std::size_t i = 0; i < inst.input.size(); ++i) {
      if (i) itext += " ";
      itext += inst.input[i];
    }
    write_file(out_input, itext + "\n");
  }
  std::size_t part2 = 0;
  for (const auto& c : phi.clauses) {
    std::set<vwccg::Literal> s(c.begin(), c.end());
    part2 += s.size();
  }
  nlohmann::json stats;
  stats["n"] = inst.n;
  stats["m"] = inst.m;
  stats["phi_size"] = vwccg::formula_size(phi);
  stats["rules"] = inst.grammar.rules.size();
  stats["part2_rules"] = part2;
  stats["serialized_size"] = gtext.size();
  stats["arity_bound"] = inst.arity_bound;
  std::string line = "reduced: n=" + std::to_string(inst.n) +
                     " m=" + std::to_string(inst.m) +
                     " |phi|=" + std::to_string(vwccg::formula_size(phi)) +
                     " rules=" + std::to_string(inst.grammar.rules.size()) +
                     " size=" + std::to_string(gtext.size()) +
                     " arity_bound=" + std::to_string(inst.arity_bound);
  if (report || opts.format == "json")
    emit(opts, "reduce-sat", true, kAccept, stats, line);
  return kAccept;
}

int cmd_solve_sat(const std::string& cnf_path, bool oracle,
                  const OutputOptions& opts) {
  vwccg::CnfFormula phi = vwccg::parse_dimacs(read_file(cnf_path));
  std::optional<vwccg::Assignment> got = vwccg::solve_via_ccg(phi);
  if (oracle) {
    std::optional<vwccg::Assignment> want = vwccg::brute_force_sat(phi);
    if (want.has_value() != got.has_value()) {
      std::cerr << "oracle disagreement on satisfiability\n";
      return kError;
    }
    if (got && !vwccg::satisfies(phi, *got)) {
      std::cerr << "decoded assignment does not satisfy the formula\n";
      return kError;
    }
  }
  nlohmann::json stats;
  stats["satisfiable"] = got.has_value();
  if (got) stats["assignment"] = render_assignment(*got);
  emit(opts, "solve-sat", got.has_value(), got ? kAccept : kReject, stats,
       got ? "SAT " + render_assignment(*got) : "UNSAT");
  return got ? kAccept : kReject;
}

int cmd_run_atm(const std::string& machine_path,
                const std::vector<std::string>& input,
                const std::string& tree_path, const OutputOptions& opts) {
  vwccg::Machine m =
      vwccg::pad_universal(vwccg::parse_machine(read_file(machine_path)));
  vwccg::MachineValidation v = vwccg::validate_machine(m);
  if (!v.ok()) throw vwccg::validation_error(v.errors.front());
  for (const std::string& w : v.warnings) std::cerr << "warning: " << w << "\n";
  bool acc = vwccg::accepts(m, input);
  if (acc && !tree_path.empty()) {
    auto tree = vwccg::accepting_computation(m, input);
    std::string text;
    render_computation_text(**tree, 0, text);
    write_file(tree_path, text);
  }
  nlohmann::json stats;
  stats["tape_cells"] = vwccg::tape_cells(m, input);
  emit(opts, "run-atm", acc, acc ? kAccept : kReject, stats,
       acc ? "ACCEPT" : "REJECT");
  return acc ? kAccept : kReject;
}

int cmd_reduce_atm(const std::string& machine_path,
                   const std::vector<std::string>& input,
                   const std::string& out_path, const OutputOptions& opts) {
  vwccg::Machine m = vwccg::parse_machine(read_file(machine_path));
  vwccg::AtmInstance inst = vwccg::build_atm_instance(m, input);
  std::string gtext = vwccg::render_grammar(inst.grammar);
  write_file(out_path, gtext);
  nlohmann::json meta;
  meta["m"] = inst.m;
  meta["arity_bound"] = inst.arity_bound;
  nlohmann::json reg;
  for (const auto& [k, v2] : inst.registry.state_atom) reg["states"][k] = v2;
  for (const auto& [k, v2] : inst.registry.symbol_atom) reg["symbols"][k] = v2;
  meta["registry"] = reg;
  meta["input"] = input;
  write_file(out_path + ".meta.json", meta.dump(2) + "\n");
  nlohmann::json stats;
  stats["m"] = inst.m;
  stats["arity_bound"] = inst.arity_bound;
  stats["rules"] = inst.grammar.rules.size();
  stats["lexicon"] = inst.grammar.lexicon.size();
  stats["serialized_size"] = gtext.size();
  emit(opts, "reduce-atm", true, kAccept, stats,
       "reduced: m=" + std::to_string(inst.m) +
           " rules=" + std::to_string(inst.grammar.rules.size()) +
           " size=" + std::to_string(gtext.size()));
  return kAccept;
}

int cmd_solve_atm(const std::string& machine_path,
                  const std::vector<std::string>& input, bool oracle,
                  const std::string& tree_path, const OutputOptions& opts) {
  vwccg::Machine m = vwccg::parse_machine(read_file(machine_path));
  vwccg::AtmInstance inst = vwccg::build_atm_instance(m, input);
  vwccg::ParseResult res = vwccg::recognize_empty_result(inst);
  bool acc = res.accepted;
  if (oracle && vwccg::accepts(inst.machine, input) != acc) {
    std::cerr << "oracle disagreement with the machine simulator\n";
    return kError;
  }
  if (acc && !tree_path.empty()) {
    vwccg::CompPtr tree = vwccg::decode_computation(inst, *res.derivation);
    std::string text;
    render_computation_text(*tree, 0, text);
    write_file(tree_path, text);
  }
  nlohmann::json stats;
  stats["items"] = res.items_created;
  stats["cap_hit"] = res.cap_hit;
  stats["arity_bound"] = inst.arity_bound;
  emit(opts, "solve-atm", acc, acc ? kAccept : kReject, stats,
       acc ? "ACCEPT" : "REJECT");
  return acc ? kAccept : kReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toolkit for categorial grammars with rule restrictions"};
  app.require_subcommand(1);
  OutputOptions opts;

  // parse
  auto* parse = app.add_subcommand("parse", "Parse tokens with a grammar");
  std::string parse_grammar_path, parse_derivation;
  std::vector<std::string> parse_tokens;
  bool parse_empty = false;
  std::optional<std::size_t> arity_cap, max_items;
  parse->add_option("grammar", parse_grammar_path)->required();
  parse->add_option("tokens", parse_tokens);
  parse->add_flag("--empty", parse_empty, "Parse the empty string");
  parse->add_option("--arity-cap", arity_cap);
  parse->add_option("--max-items", max_items);
  parse->add_option("--derivation", parse_derivation,
                    "Write the derivation document here on acceptance");
  parse->add_option("--format", opts.format)
      ->check(CLI::IsMember({"text", "json"}));

  // check
  auto* check = app.add_subcommand("check", "Check a derivation document");
  std::string check_grammar_path, check_derivation_path;
  check->add_option("grammar", check_grammar_path)->required();
  check->add_option("derivation", check_derivation_path)->required();
  check->add_option("--format", opts.format)
      ->check(CLI::IsMember({"text", "json"}));

  // reduce-sat
  auto* rsat = app.add_subcommand("reduce-sat",
                                  "Compile a DIMACS formula to grammar+input");
  std::string rsat_cnf, rsat_grammar, rsat_input;
  bool rsat_report = false;
  rsat->add_option("cnf", rsat_cnf)->required();
  rsat->add_option("--out-grammar", rsat_grammar);
  rsat->add_option("--out-input", rsat_input);
  rsat->add_flag("--report", rsat_report);
  rsat->add_option("--format", opts.format)
      ->check(CLI::IsMember({"text", "json"}));

  // solve-sat
  auto* ssat = app.add_subcommand("solve-sat",
                                  "Solve a DIMACS formula via the reduction");
  std::string ssat_cnf;
  bool ssat_oracle = false;
  ssat->add_option("cnf", ssat_cnf)->required();
  ssat->add_flag("--oracle", ssat_oracle,
                 "Cross-check against the brute-force solver");
  ssat->add_option("--format", opts.format)
      ->check(CLI::IsMember({"text", "json"}));

  // run-atm
  auto* ratm = app.add_subcommand("run-atm", "Simulate a machine on an input");
  std::string ratm_machine, ratm_tree;
  std::vector<std::string> ratm_input;
  ratm->add_option("machine", ratm_machine)->required();
  ratm->add_option("input", ratm_input);
  ratm->add_option("--tree", ratm_tree,
                   "Write the accepting computation here on acceptance");
  ratm->add_option("--format", opts.format)
      ->check(CLI::IsMember({"text", "json"}));

  // reduce-atm
  auto* xatm = app.add_subcommand(
      "reduce-atm", "Compile a machine+input to an emptiness grammar");
  std::string xatm_machine, xatm_out;
  std::vector<std::string> xatm_input;
  xatm->add_option("machine", xatm_machine)->required();
  xatm->add_option("input", xatm_input);
  xatm->add_option("--out", xatm_out)->required();
  xatm->add_option("--format", opts.format)
      ->check(CLI::IsMember({"text", "json"}));

  // solve-atm
  auto* satm = app.add_subcommand(
      "solve-atm", "Decide acceptance via the grammar reduction");
  std::string satm_machine, satm_tree;
  std::vector<std::string> satm_input;
  bool satm_oracle = false;
  satm->add_option("machine", satm_machine)->required();
  satm->add_option("input", satm_input);
  satm->add_flag("--oracle", satm_oracle,
                 "Cross-check against the machine simulator");
  satm->add_option("--tree", satm_tree,
                   "Write the decoded computation here on acceptance");
  satm->add_option("--format", opts.format)
      ->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse)
      return cmd_parse(parse_grammar_path, parse_tokens, parse_empty,
                       arity_cap, max_items, parse_derivation, opts);
    if (*check) return cmd_check(check_grammar_path, check_derivation_path, opts);
    if (*rsat)
      return cmd_reduce_sat(rsat_cnf, rsat_grammar, rsat_input, rsat_report,
                            opts);
    if (*ssat) return cmd_solve_sat(ssat_cnf, ssat_oracle, opts);
    if (*ratm) return cmd_run_atm(ratm_machine, ratm_input, ratm_tree, opts);
    if (*xatm) return cmd_reduce_atm(xatm_machine, xatm_input, xatm_out, opts);
    if (*satm)
      return cmd_solve_atm(satm_machine, satm_input, satm_oracle, satm_tree,
                           opts);
  } catch (const vwccg::budget_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
