#pragma once

// CNF satisfiability compiled to grammar membership: a formula phi
// becomes a grammar G and an input string w with phi satisfiable iff
// w is in L(G); satisfying assignments are read back off derivations.
// Includes DIMACS ingestion and a brute-force oracle.

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vwccg/derivation.hpp"
#include "vwccg/grammar.hpp"
#include "vwccg/parser.hpp"

namespace vwccg {

struct Literal {
  std::size_t var = 0;  // 1-based
  bool negated = false;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.var == b.var && a.negated == b.negated;
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    return a.var != b.var ? a.var < b.var : a.negated < b.negated;
  }
};

struct CnfFormula {
  std::size_t num_vars = 0;
  std::vector<std::vector<Literal>> clauses;
};

// Total size |phi| = total number of literal occurrences.
inline std::size_t formula_size(const CnfFormula& phi) {
  std::size_t s = 0;
  for (const auto& c : phi.clauses) s += c.size();
  return s;
}

// Total truth assignment, indexed by variable 1..n.
struct Assignment {
  std::vector<bool> values;  // values[j-1] is the value of variable j

  bool value(std::size_t var) const { return values.at(var - 1); }
};

inline bool satisfies(const CnfFormula& phi, const Assignment& a) {
  for (const auto& clause : phi.clauses) {
    bool sat = false;
    for (const Literal& l : clause)
      if (a.value(l.var) != l.negated) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

struct SatInstance {
  Grammar grammar;
  std::vector<std::string> input;
  std::size_t arity_bound = 0;  // n + 2
  std::size_t n = 0;
  std::size_t m = 0;
};

// --- DIMACS ingestion ----------------------------------------------------

inline CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula phi;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  std::vector<Literal> current;

  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      long long n = -1, m = -1;
      if (!(ls >> p >> fmt >> n >> m) || fmt != "cnf" || n < 0 || m < 0)
        throw validation_error("malformed DIMACS header: " + line);
      if (have_header)
        throw validation_error("duplicate DIMACS header");
      have_header = true;
      phi.num_vars = static_cast<std::size_t>(n);
      declared_clauses = static_cast<std::size_t>(m);
      continue;
    }
    if (!have_header)
      throw validation_error("DIMACS clause before 'p cnf' header");
    long long lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (current.empty())
          throw validation_error("DIMACS zero-length clause");
        phi.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      std::size_t var = static_cast<std::size_t>(lit < 0 ? -lit : lit);
      if (var > phi.num_vars)
        throw validation_error("DIMACS variable " + std::to_string(var) +
                               " out of declared range");
      current.push_back(Literal{var, lit < 0});
    }
    if (!ls.eof())
      throw validation_error("malformed DIMACS clause line: " + line);
  }
  if (!current.empty())
    throw validation_error("DIMACS clause not terminated by 0");
  if (!have_header) throw validation_error("missing DIMACS header");
  if (phi.clauses.size() != declared_clauses)
    throw validation_error("DIMACS header declares " +
                           std::to_string(declared_clauses) + " clauses, found " +
                           std::to_string(phi.clauses.size()));
  return phi;
}

// --- the reduction -------------------------------------------------------

namespace detail {

inline std::string sat_var_atom(std::size_t j, bool value) {
  return "v" + std::to_string(j) + (value ? "T" : "F");
}

inline std::string sat_clause_atom(std::size_t i) {
  return "c" + std::to_string(i);
}

}  // namespace detail

// Builds the grammar/input pair whose membership problem solves phi.
// The input is c_m ... c_1 c_0 v_1 ... v_n v_{n+1} d_n ... d_1; the
// grammar guesses a truth value per variable while scanning the v-block
// and verifies one true literal per clause while consuming the c-block.
inline SatInstance build_sat_instance(const CnfFormula& phi) {
  const std::size_t n = phi.num_vars;
  const std::size_t m = phi.clauses.size();
  for (const auto& c : phi.clauses)
    if (c.empty())
      throw validation_error("empty clause: formula is trivially unsatisfiable");

  auto cat = [](const std::string& s) { return parse_category(s); };
  Grammar g;
  g.start = cat(detail::sat_clause_atom(m));

  // Lexicon: the guess block, the counter block, and the cleanup block.
  g.lexicon.push_back({std::string("c0"), cat("c0/cent")});
  for (std::size_t j = 1; j <= n; ++j) {
    std::string w = "v" + std::to_string(j);
    g.lexicon.push_back(
        {w, cat("cent/" + detail::sat_var_atom(j, true) + "/cent")});
    g.lexicon.push_back(
        {w, cat("cent/" + detail::sat_var_atom(j, false) + "/cent")});
  }
  g.lexicon.push_back({"v" + std::to_string(n + 1), cat("cent")});
  for (std::size_t i = 1; i <= m; ++i)
    g.lexicon.push_back({detail::sat_clause_atom(i),
                         cat(detail::sat_clause_atom(i) + "/" +
                             detail::sat_clause_atom(i - 1))});
  for (std::size_t j = 1; j <= n; ++j) {
    std::string w = "d" + std::to_string(j);
    g.lexicon.push_back({w, cat(detail::sat_var_atom(j, true))});
    g.lexicon.push_back({w, cat(detail::sat_var_atom(j, false))});
  }

  // Part 1: stack one truth-value argument per variable onto the cent
  // spine (degree 2, one rule per variable and value), then close the
  // spine by plain application on cent.
  for (std::size_t j = 1; j <= n; ++j) {
    for (bool value : {true, false}) {
      Rule r;
      r.schema = Slash::Forward;
      r.degree = 2;
      r.arg_slashes = {Slash::Forward, Slash::Forward};
      r.y_constraint = {{cat("cent")}};
      r.z_constraints = {std::vector<Cat>{cat(detail::sat_var_atom(j, value))},
                         std::vector<Cat>{cat("cent")}};
      g.rules.push_back(std::move(r));
    }
  }
  {
    Rule r;
    r.schema = Slash::Forward;
    r.degree = 0;
    r.y_constraint = {{cat("cent")}};
    g.rules.push_back(std::move(r));
  }

  // Part 2: one degree-n rule per distinct (clause, literal) pair. The
  // rule lets c_i consume c_{i-1} while pinning the guessed value at
  // the literal's position; the other n-1 value arguments pass through
  // unconstrained.
  for (std::size_t i = 1; i <= m; ++i) {
    std::set<Literal> seen;
    for (const Literal& l : phi.clauses[i - 1]) {
      if (!seen.insert(l).second) continue;  // duplicate literal in clause
      Rule r;
      r.schema = Slash::Forward;
      r.degree = static_cast<std::uint32_t>(n);
      r.arg_slashes.assign(n, Slash::Forward);
      r.y_constraint = {{cat(detail::sat_clause_atom(i - 1))}};
      r.z_constraints.assign(n, std::nullopt);
      r.z_constraints[l.var - 1] =
          std::vector<Cat>{cat(detail::sat_var_atom(l.var, !l.negated))};
      g.rules.push_back(std::move(r));
    }
  }

  // Part 3: discharge the remaining truth-value arguments against the
  // d-block (plain application per variable and value).
  for (std::size_t j = 1; j <= n; ++j) {
    for (bool value : {true, false}) {
      Rule r;
      r.schema = Slash::Forward;
      r.degree = 0;
      r.y_constraint = {{cat(detail::sat_var_atom(j, value))}};
      g.rules.push_back(std::move(r));
    }
  }

  // Atoms and vocabulary.
  std::set<Atom> atoms;
  for (const LexEntry& e : g.lexicon) detail::collect_atoms(e.category, atoms);
  atoms.insert(g.start.target());
  g.atoms.assign(atoms.begin(), atoms.end());
  std::set<std::string> vocab;
  for (const LexEntry& e : g.lexicon) vocab.insert(*e.word);
  g.vocabulary.assign(vocab.begin(), vocab.end());

  SatInstance inst;
  inst.n = n;
  inst.m = m;
  inst.arity_bound = n + 2;
  for (std::size_t i = m; i + 1 > 0; --i)
    inst.input.push_back(detail::sat_clause_atom(i));
  for (std::size_t j = 1; j <= n + 1; ++j)
    inst.input.push_back("v" + std::to_string(j));
  for (std::size_t j = n; j >= 1; --j)
    inst.input.push_back("d" + std::to_string(j));
  inst.grammar = std::move(g);
  return inst;
}

// Reads the guessed assignment off the v_j leaves of a derivation.
inline Assignment decode_assignment(const SatInstance& inst,
                                    const DerivationTree& t) {
  if (yield_of(t) != inst.input)
    throw validation_error("derivation yield differs from the instance input");
  std::map<std::size_t, bool> found;
  auto scan = [&](auto&& self, const DerivationTree& node) -> void {
    if (!node.is_leaf()) {
      self(self, *node.left());
      self(self, *node.right());
      return;
    }
    const LexEntry& e = node.entry();
    if (!e.word || e.word->empty() || (*e.word)[0] != 'v') return;
    std::size_t j = 0;
    try {
      j = std::stoul(e.word->substr(1));
    } catch (...) {
      return;
    }
    if (j < 1 || j > inst.n) return;
    for (bool value : {true, false}) {
      Cat want = parse_category("cent/" + detail::sat_var_atom(j, value) +
                                "/cent");
      if (e.category == want) {
        found[j] = value;
        return;
      }
    }
    throw validation_error("unexpected category on leaf " + *e.word);
  };
  scan(scan, t);
  Assignment a;
  a.values.resize(inst.n);
  for (std::size_t j = 1; j <= inst.n; ++j) {
    auto it = found.find(j);
    if (it == found.end())
      throw validation_error("derivation has no guess leaf for variable v" +
                             std::to_string(j));
    a.values[j - 1] = it->second;
  }
  return a;
}

// Exhaustive oracle. Returns the first satisfying assignment in
// lexicographic order with false < true and v1 the most significant
// position, or nothing.
inline std::optional<Assignment> brute_force_sat(const CnfFormula& phi) {
  if (phi.num_vars > 20)
    throw validation_error("brute_force_sat supports at most 20 variables");
  std::size_t n = phi.num_vars;
  for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
    Assignment a;
    a.values.resize(n);
    for (std::size_t j = 1; j <= n; ++j)
      a.values[j - 1] = (bits >> (n - j)) & 1;
    if (satisfies(phi, a)) return a;
  }
  return std::nullopt;
}

// End-to-end pipeline: reduction, parse at the construction's arity
// bound, decode on acceptance.
inline std::optional<Assignment> solve_via_ccg(const CnfFormula& phi) {
  for (const auto& c : phi.clauses)
    if (c.empty()) return std::nullopt;
  SatInstance inst = build_sat_instance(phi);
  ParseConfig cfg;
  cfg.arity_cap = inst.arity_bound;
  ParseResult res = parse(inst.grammar, inst.input, cfg);
  if (!res.accepted) return std::nullopt;
  return decode_assignment(inst, *res.derivation);
}

}  // namespace vwccg
