#pragma once

// Alternating Turing machines over a circular tape of fixed polynomial
// length, with right-moving head only. Provides parsing/validation,
// least-fixpoint acceptance over the finite configuration graph, and
// extraction/validation of accepting computation trees.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vwccg/category.hpp"  // for the exception types

namespace vwccg {

enum class StateType : std::uint8_t { Existential, Universal, Accepting, Rejecting };

inline char state_type_char(StateType t) {
  switch (t) {
    case StateType::Existential: return 'E';
    case StateType::Universal: return 'U';
    case StateType::Accepting: return 'A';
    default: return 'R';
  }
}

// The blank tape symbol. Written `_` in machine files.
inline const std::string kBlank = "_";

struct Transition {
  std::string from_state;
  std::string read;
  std::string to_state;
  std::string write;

  friend bool operator==(const Transition& a, const Transition& b) {
    return a.from_state == b.from_state && a.read == b.read &&
           a.to_state == b.to_state && a.write == b.write;
  }
};

struct Machine {
  std::vector<std::string> states;  // file order
  std::map<std::string, StateType> type;
  std::vector<std::string> alphabet;  // file order, blank included last
  std::vector<Transition> transitions;  // file order
  std::string start;
  std::vector<std::uint64_t> poly;  // p(n) = sum poly[i] * n^i, low order first

  StateType state_type(const std::string& q) const { return type.at(q); }
  bool has_state(const std::string& q) const { return type.count(q) != 0; }
  bool has_symbol(const std::string& a) const {
    return std::find(alphabet.begin(), alphabet.end(), a) != alphabet.end();
  }
};

struct Config {
  std::string state;
  std::vector<std::string> tape;  // head reads tape[0]

  friend bool operator==(const Config& a, const Config& b) {
    return a.state == b.state && a.tape == b.tape;
  }
  friend bool operator<(const Config& a, const Config& b) {
    return a.state != b.state ? a.state < b.state : a.tape < b.tape;
  }
};

inline std::string render_config(const Config& c) {
  std::string s = "(" + c.state + ",";
  for (const std::string& a : c.tape) s += a;
  return s + ")";
}

struct ComputationTree;
using CompPtr = std::shared_ptr<const ComputationTree>;

// Node of an accepting computation: 0 children at accepting leaves, 1
// below existential nodes, 2 below universal nodes.
struct ComputationTree {
  Config config;
  std::vector<CompPtr> children;
};

inline std::size_t computation_size(const ComputationTree& t) {
  std::size_t n = 1;
  for (const CompPtr& c : t.children) n += computation_size(*c);
  return n;
}

// --- machine file ingestion ------------------------------------------------
// Line oriented, `#` starts a comment:
//   states q0:E q1:A q2:U ...
//   alphabet a b            (blank implicit, written `_` in transitions)
//   start q0
//   poly p0 p1 ...          (low-order-first coefficients)
//   trans q a -> q' a'

struct MachineValidation {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

inline Machine parse_machine(std::string_view text) {
  Machine m;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw validation_error("line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "states") {
      std::string tok;
      while (ls >> tok) {
        std::size_t colon = tok.find(':');
        if (colon == std::string::npos || colon + 2 != tok.size())
          fail("state must be written <name>:<E|U|A|R>, got '" + tok + "'");
        std::string name = tok.substr(0, colon);
        char t = tok[colon + 1];
        StateType st;
        if (t == 'E') st = StateType::Existential;
        else if (t == 'U') st = StateType::Universal;
        else if (t == 'A') st = StateType::Accepting;
        else if (t == 'R') st = StateType::Rejecting;
        else { fail("unknown state type '" + std::string(1, t) + "'"); return m; }
        if (m.type.count(name)) fail("duplicate state '" + name + "'");
        m.states.push_back(name);
        m.type[name] = st;
      }
    } else if (kw == "alphabet") {
      std::string tok;
      while (ls >> tok) {
        if (tok == kBlank) fail("the blank symbol is implicit");
        if (m.has_symbol(tok)) fail("duplicate alphabet symbol '" + tok + "'");
        m.alphabet.push_back(tok);
      }
    } else if (kw == "start") {
      if (!(ls >> m.start)) fail("start needs a state name");
    } else if (kw == "poly") {
      std::int64_t c;
      m.poly.clear();
      while (ls >> c) {
        if (c < 0) fail("poly coefficients must be non-negative");
        m.poly.push_back(static_cast<std::uint64_t>(c));
      }
      if (m.poly.empty()) fail("poly needs at least one coefficient");
    } else if (kw == "trans") {
      Transition t;
      std::string arrow;
      if (!(ls >> t.from_state >> t.read >> arrow >> t.to_state >> t.write) ||
          arrow != "->")
        fail("transition must be 'trans q a -> q2 a2'");
      m.transitions.push_back(std::move(t));
    } else {
      fail("unknown directive '" + kw + "'");
    }
  }
  if (!m.has_symbol(kBlank)) m.alphabet.push_back(kBlank);
  return m;
}

inline MachineValidation validate_machine(const Machine& m) {
  MachineValidation v;
  if (m.states.empty()) v.errors.push_back("machine has no states");
  if (!m.has_state(m.start))
    v.errors.push_back("start state '" + m.start + "' is not declared");
  if (m.poly.empty()) v.errors.push_back("machine has no poly line");
  std::map<std::pair<std::string, std::string>, std::size_t> fan;
  for (const Transition& t : m.transitions) {
    if (!m.has_state(t.from_state) || !m.has_state(t.to_state)) {
      v.errors.push_back("transition uses undeclared state: " + t.from_state +
                         " -> " + t.to_state);
      continue;
    }
    if (!m.has_symbol(t.read) || !m.has_symbol(t.write))
      v.errors.push_back("transition uses undeclared symbol: " + t.read +
                         " -> " + t.write);
    StateType st = m.state_type(t.from_state);
    if (st == StateType::Accepting || st == StateType::Rejecting)
      v.errors.push_back("transition out of accepting/rejecting state '" +
                         t.from_state + "'");
    ++fan[{t.from_state, t.read}];
  }
  for (const std::string& q : m.states) {
    if (m.state_type(q) != StateType::Universal) continue;
    for (const std::string& a : m.alphabet) {
      auto it = fan.find({q, a});
      std::size_t k = it == fan.end() ? 0 : it->second;
      if (k == 0)
        v.warnings.push_back("universal (" + q + "," + a +
                             ") has no transitions; such configurations reject");
      else if (k != 2)
        v.errors.push_back("universal (" + q + "," + a + ") has " +
                           std::to_string(k) + " transitions, expected 2");
    }
  }
  return v;
}

// Restores the exactly-two-transitions discipline for universal (q, a)
// pairs that have exactly one transition, by duplicating it. Zero
// transitions are left alone (the configuration simply rejects); more
// than two is an error.
inline Machine pad_universal(const Machine& m) {
  Machine out = m;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> fan;
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const Transition& t = m.transitions[i];
    if (m.has_state(t.from_state) &&
        m.state_type(t.from_state) == StateType::Universal)
      fan[{t.from_state, t.read}].push_back(i);
  }
  std::vector<Transition> extra;
  for (const auto& [key, idxs] : fan) {
    if (idxs.size() > 2)
      throw validation_error("universal (" + key.first + "," + key.second +
                             ") has more than two transitions");
    if (idxs.size() == 1) extra.push_back(m.transitions[idxs[0]]);
  }
  out.transitions.insert(out.transitions.end(), extra.begin(), extra.end());
  return out;
}

inline std::uint64_t eval_poly(const std::vector<std::uint64_t>& poly,
                               std::uint64_t n) {
  std::uint64_t acc = 0, pw = 1;
  for (std::uint64_t c : poly) {
    acc += c * pw;
    pw *= n;
  }
  return acc;
}

// Tape length m = p(|w|); the tape must hold the whole input and be
// non-empty.
inline std::size_t tape_cells(const Machine& m,
                              const std::vector<std::string>& w) {
  std::uint64_t cells = eval_poly(m.poly, w.size());
  if (cells < std::max<std::uint64_t>(w.size(), 1))
    throw validation_error("tape of " + std::to_string(cells) +
                           " cells cannot hold an input of length " +
                           std::to_string(w.size()));
  return static_cast<std::size_t>(cells);
}

inline Config initial_config(const Machine& m,
                             const std::vector<std::string>& w) {
  std::size_t cells = tape_cells(m, w);
  for (const std::string& a : w)
    if (!m.has_symbol(a))
      throw validation_error("input symbol '" + a +
                             "' is not in the machine alphabet");
  Config c;
  c.state = m.start;
  c.tape = w;
  c.tape.resize(cells, kBlank);
  return c;
}

// Transitions applicable to c, in machine file order.
inline std::vector<std::size_t> applicable(const Machine& m, const Config& c) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.transitions.size(); ++i)
    if (m.transitions[i].from_state == c.state &&
        m.transitions[i].read == c.tape.front())
      out.push_back(i);
  return out;
}

// One step: overwrite the read cell and rotate the circular tape left.
inline Config successor(const Config& c, const Transition& t) {
  if (t.from_state != c.state || c.tape.empty() || t.read != c.tape.front())
    throw validation_error("transition not applicable to configuration " +
                           render_config(c));
  Config out;
  out.state = t.to_state;
  out.tape.assign(c.tape.begin() + 1, c.tape.end());
  out.tape.push_back(t.write);
  return out;
}

// --- acceptance --------------------------------------------------------

// Least fixpoint over reachable configurations. depth[c] is the
// iteration at which c was first proved accepting; used by
// accepting_computation to cut trees off finitely.
struct AcceptanceMap {
  std::map<Config, std::size_t> depth;
  bool contains(const Config& c) const { return depth.count(c) != 0; }
};

namespace detail {

inline void reachable_configs(const Machine& m, const Config& root,
                              std::size_t budget,
                              std::vector<Config>& out) {
  std::map<Config, bool> seen;
  std::vector<Config> stack{root};
  seen[root] = true;
  while (!stack.empty()) {
    Config c = stack.back();
    stack.pop_back();
    out.push_back(c);
    if (out.size() > budget)
      throw budget_error("configuration space exceeds budget of " +
                         std::to_string(budget));
    for (std::size_t ti : applicable(m, c)) {
      Config s = successor(c, m.transitions[ti]);
      if (!seen[s]) {
        seen[s] = true;
        stack.push_back(s);
      }
    }
  }
  std::sort(out.begin(), out.end());
}

}  // namespace detail

inline AcceptanceMap acceptance_fixpoint(const Machine& m, const Config& root,
                                         std::size_t budget = 200000) {
  std::vector<Config> configs;
  detail::reachable_configs(m, root, budget, configs);
  AcceptanceMap acc;
  bool changed = true;
  std::size_t round = 0;
  while (changed) {
    changed = false;
    ++round;
    // Evaluate the whole round against the previous round's set, so a
    // config's depth strictly exceeds the depth of the successors that
    // prove it. Computation extraction relies on that strict descent.
    std::vector<Config> newly;
    for (const Config& c : configs) {
      if (acc.contains(c)) continue;
      StateType st = m.state_type(c.state);
      bool accepting = false;
      if (st == StateType::Accepting) {
        accepting = true;
      } else if (st == StateType::Existential) {
        for (std::size_t ti : applicable(m, c))
          if (acc.contains(successor(c, m.transitions[ti]))) {
            accepting = true;
            break;
          }
      } else if (st == StateType::Universal) {
        std::vector<std::size_t> ts = applicable(m, c);
        if (ts.size() == 2) {
          accepting = acc.contains(successor(c, m.transitions[ts[0]])) &&
                      acc.contains(successor(c, m.transitions[ts[1]]));
        }
      }
      if (accepting) {
        newly.push_back(c);
        changed = true;
      }
    }
    for (const Config& c : newly) acc.depth[c] = round;
  }
  return acc;
}

inline bool accepts(const Machine& m, const std::vector<std::string>& w,
                    std::size_t budget = 200000) {
  Config root = initial_config(m, w);
  return acceptance_fixpoint(m, root, budget).contains(root);
}

namespace detail {

inline CompPtr build_computation(const Machine& m, const AcceptanceMap& acc,
                                 const Config& c) {
  auto node = std::make_shared<ComputationTree>();
  node->config = c;
  StateType st = m.state_type(c.state);
  if (st == StateType::Accepting) return node;
  if (st == StateType::Existential) {
    // Lowest proved depth wins; ties broken by transition file order.
    std::optional<std::size_t> best;
    std::size_t best_depth = 0;
    for (std::size_t ti : applicable(m, c)) {
      Config s = successor(c, m.transitions[ti]);
      auto it = acc.depth.find(s);
      if (it == acc.depth.end()) continue;
      if (!best || it->second < best_depth) {
        best = ti;
        best_depth = it->second;
      }
    }
    node->children.push_back(
        build_computation(m, acc, successor(c, m.transitions[*best])));
    return node;
  }
  // Universal: both successors.
  for (std::size_t ti : applicable(m, c))
    node->children.push_back(
        build_computation(m, acc, successor(c, m.transitions[ti])));
  return node;
}

}  // namespace detail

inline std::optional<CompPtr> accepting_computation(
    const Machine& m, const std::vector<std::string>& w,
    std::size_t budget = 200000) {
  Config root = initial_config(m, w);
  AcceptanceMap acc = acceptance_fixpoint(m, root, budget);
  if (!acc.contains(root)) return std::nullopt;
  return detail::build_computation(m, acc, root);
}

// --- validation of computation trees ------------------------------------

struct ComputationCheck {
  bool ok = true;
  std::string message;
};

namespace detail {

inline bool check_computation(const Machine& m, const ComputationTree& t,
                              ComputationCheck& out) {
  StateType st = m.state_type(t.config.state);
  switch (st) {
    case StateType::Rejecting:
      out = {false, "rejecting state " + t.config.state + " in computation"};
      return false;
    case StateType::Accepting:
      if (!t.children.empty()) {
        out = {false, "accepting node " + render_config(t.config) +
                          " must be a leaf"};
        return false;
      }
      return true;
    case StateType::Existential: {
      if (t.children.size() != 1) {
        out = {false, "existential node " + render_config(t.config) +
                          " must have one child"};
        return false;
      }
      bool legal = false;
      for (std::size_t ti : applicable(m, t.config))
        if (successor(t.config, m.transitions[ti]) ==
            t.children[0]->config)
          legal = true;
      if (!legal) {
        out = {false, "illegal step out of " + render_config(t.config)};
        return false;
      }
      return check_computation(m, *t.children[0], out);
    }
    case StateType::Universal: {
      if (t.children.size() != 2) {
        out = {false, "universal node " + render_config(t.config) +
                          " must have two children"};
        return false;
      }
      std::vector<std::size_t> ts = applicable(m, t.config);
      if (ts.size() != 2) {
        out = {false, "universal configuration " + render_config(t.config) +
                          " lacks exactly two transitions"};
        return false;
      }
      Config s0 = successor(t.config, m.transitions[ts[0]]);
      Config s1 = successor(t.config, m.transitions[ts[1]]);
      const Config& c0 = t.children[0]->config;
      const Config& c1 = t.children[1]->config;
      // The two children must be the two successors, as a multiset.
      bool match = (c0 == s0 && c1 == s1) || (c0 == s1 && c1 == s0);
      if (!match) {
        out = {false, "universal children of " + render_config(t.config) +
                          " are not the two successors"};
        return false;
      }
      return check_computation(m, *t.children[0], out) &&
             check_computation(m, *t.children[1], out);
    }
  }
  return true;
}

}  // namespace detail

inline ComputationCheck validate_computation(const Machine& m,
                                             const std::vector<std::string>& w,
                                             const ComputationTree& t) {
  ComputationCheck out;
  Config root = initial_config(m, w);
  if (!(t.config == root)) {
    out = {false, "root configuration is not the initial configuration"};
    return out;
  }
  detail::check_computation(m, t, out);
  return out;
}

}  // namespace vwccg
