#pragma once

// VW-CCG grammars: lexicon with optional empty-string entries,
// restricted combinatory rules, ground-instance matching, and grammar
// statistics. A grammar is immutable after parsing/validation.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "vwccg/category.hpp"

namespace vwccg {

// A lexicon assignment. An absent word denotes the empty string.
struct LexEntry {
  std::optional<std::string> word;
  Cat category;

  friend bool operator==(const LexEntry& a, const LexEntry& b) {
    return a.word == b.word && a.category == b.category;
  }
};

// A restricted instance of the forward/backward combinatory schema.
// Constraint sets, when present, must be non-empty; a set of size k is
// shorthand for k single-restriction rules.
struct Rule {
  Slash schema;  // Forward: X/Y Y/Z... => X/Z...; Backward: Y/Z... X\Y => ...
  std::uint32_t degree = 0;
  std::vector<Slash> arg_slashes;  // length == degree, bottom-to-top
  std::optional<std::vector<Atom>> target_constraint;
  std::optional<std::vector<Cat>> y_constraint;
  std::vector<std::optional<std::vector<Cat>>> z_constraints;  // size degree

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.schema == b.schema && a.degree == b.degree &&
           a.arg_slashes == b.arg_slashes &&
           a.target_constraint == b.target_constraint &&
           a.y_constraint == b.y_constraint &&
           a.z_constraints == b.z_constraints;
  }
};

struct Grammar {
  std::vector<std::string> vocabulary;  // sorted, unique
  std::vector<Atom> atoms;              // sorted by id, unique
  std::vector<LexEntry> lexicon;
  std::vector<Rule> rules;  // rule id == position
  Cat start;                // always atomic

  bool in_vocabulary(std::string_view word) const {
    return std::binary_search(vocabulary.begin(), vocabulary.end(),
                              std::string(word));
  }
};

// The four size maxima used by the derivation-size bounds: lambda is
// the largest lexicon category size, gamma the largest lexicon
// category arity, alpha the largest size of an argument occurring in a
// lexicon category, dmax the largest rule degree.
struct GrammarStats {
  std::size_t lambda = 0;
  std::size_t gamma = 0;
  std::size_t alpha = 0;
  std::size_t dmax = 0;
};

inline bool is_epsilon_free(const Grammar& g) {
  for (const LexEntry& e : g.lexicon)
    if (!e.word) return false;
  return true;
}

namespace detail {

inline void collect_arg_sizes(Cat c, std::size_t& alpha) {
  for (std::size_t i = 0; i < c.arity(); ++i) {
    Cat a = c.arg_cat(i);
    alpha = std::max(alpha, category_size(a));
    collect_arg_sizes(a, alpha);
  }
}

}  // namespace detail

inline GrammarStats grammar_stats(const Grammar& g) {
  if (g.lexicon.empty())
    throw validation_error("grammar_stats requires a non-empty lexicon");
  GrammarStats s;
  for (const LexEntry& e : g.lexicon) {
    s.lambda = std::max(s.lambda, category_size(e.category));
    s.gamma = std::max(s.gamma, e.category.arity());
    detail::collect_arg_sizes(e.category, s.alpha);
  }
  for (const Rule& r : g.rules)
    s.dmax = std::max<std::size_t>(s.dmax, r.degree);
  return s;
}

// Attempts to apply rule r to a primary/secondary input pair. Returns
// the output category of the ground instance, or nothing when the rule
// is not applicable.
inline std::optional<Cat> match_rule(const Rule& r, Cat primary,
                                     Cat secondary) {
  if (primary.arity() == 0) return std::nullopt;
  const Arg& top = primary.args().back();
  Slash wanted = r.schema == Slash::Forward ? Slash::Forward : Slash::Backward;
  if (top.slash != wanted) return std::nullopt;
  Cat y = Cat::from_id(top.cat_id);

  auto split = split_top(secondary, r.degree);
  if (!split) return std::nullopt;
  const auto& [y_sec, zs] = *split;
  if (y_sec != y) return std::nullopt;
  for (std::uint32_t i = 0; i < r.degree; ++i)
    if (zs[i].slash != r.arg_slashes[i]) return std::nullopt;

  if (r.target_constraint) {
    const auto& ts = *r.target_constraint;
    if (std::find(ts.begin(), ts.end(), primary.target()) == ts.end())
      return std::nullopt;
  }
  if (r.y_constraint) {
    const auto& ys = *r.y_constraint;
    if (std::find(ys.begin(), ys.end(), y) == ys.end()) return std::nullopt;
  }
  for (std::uint32_t i = 0; i < r.degree && i < r.z_constraints.size(); ++i) {
    if (!r.z_constraints[i]) continue;
    const auto& cs = *r.z_constraints[i];
    if (std::find(cs.begin(), cs.end(), Cat::from_id(zs[i].cat_id)) ==
        cs.end())
      return std::nullopt;
  }

  std::vector<Arg> args(primary.args().begin(), primary.args().end() - 1);
  args.insert(args.end(), zs.begin(), zs.end());
  return Cat(primary.target(), std::move(args));
}

inline bool ground_instances_check(const Rule& r, Cat primary, Cat secondary,
                                   Cat output) {
  auto got = match_rule(r, primary, secondary);
  return got && *got == output;
}

// All rule applications to an adjacent (left, right) pair, in rule id
// order. Forward rules take the left input as primary, backward rules
// the right one.
inline std::vector<std::pair<std::size_t, Cat>> applicable_combinations(
    const Grammar& g, Cat left, Cat right) {
  std::vector<std::pair<std::size_t, Cat>> out;
  for (std::size_t id = 0; id < g.rules.size(); ++id) {
    const Rule& r = g.rules[id];
    std::optional<Cat> res = r.schema == Slash::Forward
                                 ? match_rule(r, left, right)
                                 : match_rule(r, right, left);
    if (res) out.emplace_back(id, *res);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grammar file format (line oriented, '#' starts a comment):
//   start <atom>
//   atoms <atom> <atom> ...          (optional; authoritative when present)
//   lex <word> := <category>         (word EPS denotes the empty string)
//   rule <fwd|bwd> deg=<d> [slashes=<d slash chars>] [target={a,...}]
//        [Y={cat,...}] [Z<i>={cat,...}]
// ---------------------------------------------------------------------------

namespace detail {

class grammar_line_error : public validation_error {
 public:
  using validation_error::validation_error;
};

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

inline std::vector<std::string> split_braced_list(const std::string& value) {
  if (value.size() < 2 || value.front() != '{' || value.back() != '}')
    throw grammar_line_error("constraint value must be of the form {...}: " +
                             value);
  std::vector<std::string> items;
  std::string body = value.substr(1, value.size() - 2);
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::string item = body.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (items.size() == 1 && items[0].empty())
    throw grammar_line_error("constraint set must be non-empty: " + value);
  for (const std::string& s : items)
    if (s.empty())
      throw grammar_line_error("empty element in constraint set: " + value);
  return items;
}

inline Rule parse_rule_line(const std::vector<std::string>& toks) {
  if (toks.size() < 3)
    throw grammar_line_error("rule line needs a direction and a degree");
  Rule r;
  if (toks[1] == "fwd")
    r.schema = Slash::Forward;
  else if (toks[1] == "bwd")
    r.schema = Slash::Backward;
  else
    throw grammar_line_error("rule direction must be fwd or bwd, got '" +
                             toks[1] + "'");
  bool have_degree = false;
  bool have_slashes = false;
  std::vector<std::pair<std::size_t, std::vector<Cat>>> z_sets;
  for (std::size_t i = 2; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw grammar_line_error("malformed rule option '" + t + "'");
    std::string key = t.substr(0, eq);
    std::string value = t.substr(eq + 1);
    if (key == "deg") {
      r.degree = static_cast<std::uint32_t>(std::stoul(value));
      have_degree = true;
    } else if (key == "slashes") {
      for (char c : value) {
        if (c == '/')
          r.arg_slashes.push_back(Slash::Forward);
        else if (c == '\\')
          r.arg_slashes.push_back(Slash::Backward);
        else
          throw grammar_line_error("slashes option may contain only / and \\");
      }
      have_slashes = true;
    } else if (key == "target") {
      std::vector<Atom> atoms;
      for (const std::string& s : split_braced_list(value))
        atoms.emplace_back(s);
      r.target_constraint = std::move(atoms);
    } else if (key == "Y") {
      std::vector<Cat> cats;
      for (const std::string& s : split_braced_list(value))
        cats.push_back(parse_category(s));
      r.y_constraint = std::move(cats);
    } else if (key.size() > 1 && key[0] == 'Z') {
      std::size_t zi = std::stoul(key.substr(1));
      if (zi == 0) throw grammar_line_error("Z indices start at 1");
      std::vector<Cat> cats;
      for (const std::string& s : split_braced_list(value))
        cats.push_back(parse_category(s));
      z_sets.emplace_back(zi - 1, std::move(cats));
    } else {
      throw grammar_line_error("unknown rule option '" + key + "'");
    }
  }
  if (!have_degree) throw grammar_line_error("rule line is missing deg=");
  if (r.degree >= 1 && !have_slashes)
    throw grammar_line_error("slashes= is mandatory when deg >= 1");
  if (r.arg_slashes.size() != r.degree)
    throw grammar_line_error("slash count does not match rule degree");
  r.z_constraints.assign(r.degree, std::nullopt);
  for (auto& [zi, cats] : z_sets) {
    if (zi >= r.degree)
      throw grammar_line_error("Z index exceeds rule degree");
    r.z_constraints[zi] = std::move(cats);
  }
  return r;
}

inline void collect_atoms(Cat c, std::set<Atom>& atoms) {
  atoms.insert(c.target());
  for (std::size_t i = 0; i < c.arity(); ++i)
    collect_atoms(c.arg_cat(i), atoms);
}

}  // namespace detail

inline Grammar parse_grammar(std::string_view text) {
  std::optional<Cat> start;
  std::optional<std::set<Atom>> declared_atoms;
  std::vector<LexEntry> lexicon;
  std::vector<Rule> rules;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string_view line = raw.substr(0, std::min(raw.find('#'), raw.size()));
    std::vector<std::string> toks = detail::split_ws(line);
    if (toks.empty()) continue;
    try {
      if (toks[0] == "start") {
        if (toks.size() != 2)
          throw detail::grammar_line_error("start takes exactly one atom");
        start = Cat(Atom(toks[1]));
      } else if (toks[0] == "atoms") {
        if (!declared_atoms) declared_atoms.emplace();
        for (std::size_t i = 1; i < toks.size(); ++i)
          declared_atoms->insert(Atom(toks[i]));
      } else if (toks[0] == "lex") {
        if (toks.size() < 4 || toks[2] != ":=")
          throw detail::grammar_line_error(
              "lex line must be 'lex <word> := <category>'");
        std::string cat_text;
        for (std::size_t i = 3; i < toks.size(); ++i) cat_text += toks[i];
        LexEntry e{std::nullopt, parse_category(cat_text)};
        if (toks[1] != "EPS") e.word = toks[1];
        lexicon.push_back(std::move(e));
      } else if (toks[0] == "rule") {
        rules.push_back(detail::parse_rule_line(toks));
      } else {
        throw detail::grammar_line_error("unknown directive '" + toks[0] +
                                         "'");
      }
    } catch (const syntax_error& e) {
      throw validation_error("line " + std::to_string(line_no) + ": " +
                             e.what());
    } catch (const detail::grammar_line_error& e) {
      throw validation_error("line " + std::to_string(line_no) + ": " +
                             e.what());
    }
  }

  if (!start) throw validation_error("grammar is missing a start directive");

  // Atoms: inferred from use unless declared; when declared, every used
  // atom (including start) must be covered.
  std::set<Atom> used;
  used.insert(start->target());
  for (const LexEntry& e : lexicon) detail::collect_atoms(e.category, used);
  for (const Rule& r : rules) {
    if (r.target_constraint)
      used.insert(r.target_constraint->begin(), r.target_constraint->end());
    if (r.y_constraint)
      for (Cat c : *r.y_constraint) detail::collect_atoms(c, used);
    for (const auto& zc : r.z_constraints)
      if (zc)
        for (Cat c : *zc) detail::collect_atoms(c, used);
  }
  std::set<Atom> atom_set = declared_atoms ? *declared_atoms : used;
  if (declared_atoms) {
    for (Atom a : used)
      if (!atom_set.count(a))
        throw validation_error("atom '" + a.name() +
                               "' used but not declared (start atom or "
                               "category atom missing from atoms line)");
  }

  Grammar g{.vocabulary = {},
            .atoms = std::vector<Atom>(atom_set.begin(), atom_set.end()),
            .lexicon = std::move(lexicon),
            .rules = std::move(rules),
            .start = *start};
  std::set<std::string> vocab;
  for (const LexEntry& e : g.lexicon)
    if (e.word) vocab.insert(*e.word);
  g.vocabulary.assign(vocab.begin(), vocab.end());
  return g;
}

inline std::string render_rule(const Rule& r) {
  std::string out = "rule ";
  out += r.schema == Slash::Forward ? "fwd" : "bwd";
  out += " deg=" + std::to_string(r.degree);
  if (r.degree >= 1) {
    out += " slashes=";
    for (Slash s : r.arg_slashes) out += slash_char(s);
  }
  auto join_cats = [](const std::vector<Cat>& cats) {
    std::string s;
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (i) s += ',';
      s += render_category(cats[i]);
    }
    return s;
  };
  if (r.target_constraint) {
    out += " target={";
    for (std::size_t i = 0; i < r.target_constraint->size(); ++i) {
      if (i) out += ',';
      out += (*r.target_constraint)[i].name();
    }
    out += '}';
  }
  if (r.y_constraint) out += " Y={" + join_cats(*r.y_constraint) + "}";
  for (std::size_t i = 0; i < r.z_constraints.size(); ++i)
    if (r.z_constraints[i])
      out += " Z" + std::to_string(i + 1) + "={" +
             join_cats(*r.z_constraints[i]) + "}";
  return out;
}

inline std::string render_grammar(const Grammar& g) {
  std::string out = "start " + g.start.target().name() + "\n";
  for (const LexEntry& e : g.lexicon)
    out += "lex " + (e.word ? *e.word : std::string("EPS")) +
           " := " + render_category(e.category) + "\n";
  for (const Rule& r : g.rules) out += render_rule(r) + "\n";
  return out;
}

}  // namespace vwccg
