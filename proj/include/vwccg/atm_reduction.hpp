#pragma once

// Compiles an alternating Turing machine plus input into a grammar
// whose language is {empty string} exactly when the machine accepts.
// Every lexicon entry is an empty-string entry; a derivation of the
// start atom embeds the accepting computation, one fragment per
// computation node, which decode_computation recovers.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vwccg/atm.hpp"
#include "vwccg/derivation.hpp"
#include "vwccg/grammar.hpp"
#include "vwccg/parser.hpp"

namespace vwccg {

// Bidirectional mapping between machine objects and the grammar's
// reserved atoms; decode_computation needs it to read configurations
// back off categories.
struct AtmRegistry {
  std::map<std::string, std::string> state_atom;   // state -> atom name
  std::map<std::string, std::string> symbol_atom;  // symbol -> atom name
  std::map<std::string, std::string> atom_state;   // atom name -> state
  std::map<std::string, std::string> atom_symbol;  // atom name -> symbol
};

// A universal branching point: the two transitions on one (q, a).
struct UniversalPair {
  std::string state;
  std::string read;
  std::size_t t1 = 0;  // transition indices, t1 first in file order
  std::size_t t2 = 0;
};

struct AtmInstance {
  Grammar grammar;
  std::size_t arity_bound = 0;  // 2m + 2
  std::size_t m = 0;            // tape cells
  AtmRegistry registry;
  Machine machine;  // after universal padding
  std::vector<std::string> input;
  std::vector<UniversalPair> pairs;
};

namespace detail {

inline std::string trans_atom(std::size_t k) {
  return "t_" + std::to_string(k);
}

inline std::string pair_atom(std::size_t k, const std::string& suffix) {
  return "pi" + std::to_string(k) + suffix;
}

}  // namespace detail

inline AtmInstance build_atm_instance(const Machine& machine,
                                      const std::vector<std::string>& w) {
  AtmInstance inst;
  inst.machine = pad_universal(machine);
  const Machine& M = inst.machine;
  MachineValidation v = validate_machine(M);
  if (!v.ok()) throw validation_error("invalid machine: " + v.errors.front());

  Config start = initial_config(M, w);
  const std::size_t m = start.tape.size();
  inst.m = m;
  inst.arity_bound = 2 * m + 2;
  inst.input = w;

  // Atom registry.
  for (const std::string& q : M.states) {
    std::string atom = "q_" + q;
    inst.registry.state_atom[q] = atom;
    inst.registry.atom_state[atom] = q;
  }
  for (const std::string& a : M.alphabet) {
    std::string atom = "s_" + a;
    inst.registry.symbol_atom[a] = atom;
    inst.registry.atom_symbol[atom] = a;
  }
  auto qa = [&](const std::string& q) { return inst.registry.state_atom.at(q); };
  auto sa = [&](const std::string& a) {
    return inst.registry.symbol_atom.at(a);
  };

  // Universal branching points, in state-then-alphabet order. Every
  // universal (q, a) must carry exactly two transitions.
  for (const std::string& q : M.states) {
    if (M.state_type(q) != StateType::Universal) continue;
    for (const std::string& a : M.alphabet) {
      std::vector<std::size_t> ts;
      for (std::size_t k = 0; k < M.transitions.size(); ++k)
        if (M.transitions[k].from_state == q && M.transitions[k].read == a)
          ts.push_back(k);
      if (ts.size() != 2)
        throw validation_error(
            "reduction requires exactly two transitions on universal (" + q +
            "," + a + "), found " + std::to_string(ts.size()));
      inst.pairs.push_back(UniversalPair{q, a, ts[0], ts[1]});
    }
  }

  std::vector<std::string> accepting;
  for (const std::string& q : M.states)
    if (M.state_type(q) == StateType::Accepting) accepting.push_back(q);

  auto cat = [](const std::string& s) { return parse_category(s); };
  Grammar g;
  g.start = cat("init");

  // In a derivation of init, every composition rule's Z positions carry
  // tape cells, so they are restricted to the symbol categories. Without
  // that restriction, a degree-m rule could compose directly with an
  // arity-2 lexicon entry and plant a control atom inside a tape stack,
  // producing derivations that embed no computation. The few rules whose
  // top positions carry something else overwrite the default below.
  std::vector<Cat> symbol_cats;
  for (const std::string& a : M.alphabet) symbol_cats.push_back(cat(sa(a)));

  // --- lexicon (all empty-string entries) -------------------------------
  auto lex = [&](const std::string& text) {
    g.lexicon.push_back({std::nullopt, cat(text)});
  };
  lex("init/" + qa(M.start));
  for (const std::string& a : M.alphabet) lex(sa(a));
  for (const std::string& q : accepting) lex(qa(q) + "/accept");
  if (!accepting.empty()) {
    lex("accept/cent");
    for (const std::string& a : M.alphabet) lex("cent/" + sa(a) + "/cent");
    lex("cent");
  }
  for (std::size_t k = 0; k < M.transitions.size(); ++k) {
    const Transition& t = M.transitions[k];
    if (M.state_type(t.from_state) == StateType::Existential)
      lex(qa(t.from_state) + "/" + detail::trans_atom(k));
    lex(detail::trans_atom(k) + "/" + sa(t.read) + "/" + qa(t.to_state));
  }
  for (std::size_t p = 0; p < inst.pairs.size(); ++p) {
    const UniversalPair& pr = inst.pairs[p];
    lex(qa(pr.state) + "/" + detail::pair_atom(p, "m"));
    lex(detail::pair_atom(p, "m") + "/" + detail::pair_atom(p, "eq1"));
    for (std::size_t i = 1; i < m; ++i)
      lex(detail::pair_atom(p, "eq" + std::to_string(i)) + "/" +
          detail::pair_atom(p, "eq" + std::to_string(i + 1)));
    lex(detail::pair_atom(p, "eq" + std::to_string(m)) + "/" +
        detail::pair_atom(p, "p"));
    lex(detail::pair_atom(p, "p") + "/" + detail::trans_atom(pr.t1));
    for (const std::string& b : M.alphabet)
      lex(sa(b) + "/" + sa(b) + "/" + detail::trans_atom(pr.t2));
  }

  // --- rules -------------------------------------------------------------
  auto fwd = [&](std::uint32_t degree, const std::string& target,
                 const std::string& y) {
    Rule r;
    r.schema = Slash::Forward;
    r.degree = degree;
    r.arg_slashes.assign(degree, Slash::Forward);
    r.target_constraint = {{Atom(target)}};
    r.y_constraint = {{cat(y)}};
    r.z_constraints.assign(degree, symbol_cats);
    g.rules.push_back(std::move(r));
    return &g.rules.back();
  };
  auto dm = static_cast<std::uint32_t>(m);

  // Initialization: push arbitrary symbols under init, then check the
  // pushed stack against the actual initial tape.
  for (const std::string& a : M.alphabet) fwd(0, "init", sa(a));
  {
    Rule* r = fwd(dm, "init", qa(M.start));
    for (std::size_t i = 0; i < m; ++i)
      r->z_constraints[i] = std::vector<Cat>{cat(sa(start.tape[i]))};
  }
  // Acceptance: drop into accept and empty the tape stack.
  if (!accepting.empty()) {
    for (const std::string& q : accepting) fwd(dm, qa(q), "accept");
    fwd(0, "accept", "cent");
    for (const std::string& a : M.alphabet) {
      Rule* r = fwd(2, "accept", "cent");
      r->z_constraints[0] = std::vector<Cat>{cat(sa(a))};
      r->z_constraints[1] = std::vector<Cat>{cat("cent")};
    }
  }
  // Transition steps: existential choice, then the shared step body
  // that consumes the read symbol and rotates in the written one.
  for (std::size_t k = 0; k < M.transitions.size(); ++k) {
    const Transition& t = M.transitions[k];
    if (M.state_type(t.from_state) == StateType::Existential)
      fwd(dm, qa(t.from_state), detail::trans_atom(k));
  }
  for (std::size_t k = 0; k < M.transitions.size(); ++k)
    fwd(0, detail::trans_atom(k), sa(M.transitions[k].write));
  for (std::size_t k = 0; k < M.transitions.size(); ++k)
    fwd(dm, detail::trans_atom(k), qa(M.transitions[k].to_state));
  // Universal branching: extend the tape stack with a guessed copy,
  // verify equality position by position, then split into the two
  // successor branches.
  for (std::size_t p = 0; p < inst.pairs.size(); ++p) {
    const UniversalPair& pr = inst.pairs[p];
    fwd(dm, qa(pr.state), detail::pair_atom(p, "m"));
    for (const std::string& b : M.alphabet)
      fwd(0, detail::pair_atom(p, "m"), sa(b));
    fwd(2 * dm, detail::pair_atom(p, "m"), detail::pair_atom(p, "eq1"));
    for (std::size_t i = 1; i < m; ++i) {
      for (const std::string& b : M.alphabet) {
        Rule* r = fwd(2 * dm, detail::pair_atom(p, "eq" + std::to_string(i)),
                      detail::pair_atom(p, "eq" + std::to_string(i + 1)));
        r->z_constraints[i - 1] = std::vector<Cat>{cat(sa(b))};
        r->z_constraints[m + i - 1] = std::vector<Cat>{cat(sa(b))};
      }
    }
    for (const std::string& b : M.alphabet) {
      Rule* r = fwd(2 * dm, detail::pair_atom(p, "eq" + std::to_string(m)),
                    detail::pair_atom(p, "p"));
      r->z_constraints[m - 1] = std::vector<Cat>{cat(sa(b))};
      r->z_constraints[2 * m - 1] = std::vector<Cat>{cat(sa(b))};
    }
    fwd(dm, detail::pair_atom(p, "p"), detail::trans_atom(pr.t2));
    for (const std::string& b : M.alphabet) {
      Rule* r = fwd(2, detail::pair_atom(p, "p"), sa(b));
      r->z_constraints[0] = std::vector<Cat>{cat(sa(b))};
      r->z_constraints[1] = std::vector<Cat>{cat(detail::trans_atom(pr.t2))};
    }
    fwd(dm, detail::pair_atom(p, "p"), detail::trans_atom(pr.t1));
  }

  // Atoms and vocabulary (no words: only empty-string entries).
  std::set<Atom> atoms;
  atoms.insert(g.start.target());
  for (const LexEntry& e : g.lexicon) detail::collect_atoms(e.category, atoms);
  g.atoms.assign(atoms.begin(), atoms.end());

  inst.grammar = std::move(g);
  return inst;
}

inline ParseResult recognize_empty_result(const AtmInstance& inst,
                                          std::optional<std::size_t> max_items =
                                              std::nullopt) {
  ParseConfig cfg;
  cfg.arity_cap = inst.arity_bound;
  cfg.max_items = max_items;
  return parse(inst.grammar, {}, cfg);
}

inline bool recognize_empty(const AtmInstance& inst) {
  return recognize_empty_result(inst).accepted;
}

// --- computation decoding ------------------------------------------------

namespace detail {

// A category of shape [q]/[a1].../[am]: a state target with exactly m
// forward-slashed atomic tape-symbol arguments. These are exactly the
// fragment-head categories; one per computation node.
inline std::optional<Config> config_of_category(const AtmInstance& inst,
                                                Cat c) {
  auto st = inst.registry.atom_state.find(c.target().name());
  if (st == inst.registry.atom_state.end()) return std::nullopt;
  if (c.arity() != inst.m) return std::nullopt;
  Config out;
  out.state = st->second;
  for (std::size_t i = 0; i < inst.m; ++i) {
    const Arg& a = c.args()[i];
    if (a.slash != Slash::Forward) return std::nullopt;
    Cat sub = Cat::from_id(a.cat_id);
    if (!sub.atomic()) return std::nullopt;
    auto sym = inst.registry.atom_symbol.find(sub.target().name());
    if (sym == inst.registry.atom_symbol.end()) return std::nullopt;
    out.tape.push_back(sym->second);
  }
  return out;
}

inline void collect_fragments(const AtmInstance& inst,
                              const DerivationTree& t,
                              std::vector<CompPtr>& out);

inline CompPtr fragment_node(const AtmInstance& inst, const DerivationTree& t,
                             const Config& c) {
  auto node = std::make_shared<ComputationTree>();
  node->config = c;
  if (!t.is_leaf()) {
    collect_fragments(inst, *t.left(), node->children);
    collect_fragments(inst, *t.right(), node->children);
  }
  return node;
}

// Collects the maximal (nearest-to-root) fragment-head nodes in the
// subtree; nested heads become their children, giving the fragment
// nesting relation directly.
inline void collect_fragments(const AtmInstance& inst,
                              const DerivationTree& t,
                              std::vector<CompPtr>& out) {
  std::optional<Config> c = config_of_category(inst, t.category());
  if (c) {
    out.push_back(fragment_node(inst, t, *c));
    return;
  }
  if (t.is_leaf()) return;
  collect_fragments(inst, *t.left(), out);
  collect_fragments(inst, *t.right(), out);
}

}  // namespace detail

inline CompPtr decode_computation(const AtmInstance& inst,
                                  const DerivationTree& t) {
  CheckResult chk = check_derivation(inst.grammar, t);
  if (!chk.ok)
    throw validation_error("derivation fails the certificate check: " +
                           chk.message);
  if (t.category() != inst.grammar.start)
    throw validation_error("derivation top is not the start atom");
  if (!yield_of(t).empty())
    throw validation_error("derivation yield is not the empty string");
  std::vector<CompPtr> roots;
  detail::collect_fragments(inst, t, roots);
  if (roots.size() != 1)
    throw validation_error("expected exactly one root fragment, found " +
                           std::to_string(roots.size()));
  ComputationCheck cc = validate_computation(inst.machine, inst.input, *roots[0]);
  if (!cc.ok)
    throw validation_error("decoded computation is invalid: " + cc.message);
  return roots[0];
}

// End-to-end: reduction, empty-string membership, optional decoding.
inline bool solve_atm_via_ccg(const Machine& machine,
                              const std::vector<std::string>& w,
                              CompPtr* tree_out = nullptr) {
  AtmInstance inst = build_atm_instance(machine, w);
  ParseResult res = recognize_empty_result(inst);
  if (!res.accepted) return false;
  if (tree_out) *tree_out = decode_computation(inst, *res.derivation);
  return true;
}

}  // namespace vwccg
