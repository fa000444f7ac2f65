#pragma once

// Derivation trees, their yield/top semantics, the certificate checker,
// and a brute-force derivation enumerator used as a test oracle.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vwccg/grammar.hpp"

namespace vwccg {

class DerivationTree;
using TreePtr = std::shared_ptr<const DerivationTree>;

// Binary tree of rule applications over lexicon leaves. Immutable.
class DerivationTree {
 public:
  static TreePtr make_leaf(LexEntry entry) {
    auto t = std::make_shared<DerivationTree>();
    t->entry_ = std::move(entry);
    return t;
  }

  static TreePtr make_node(Cat category, std::size_t rule, TreePtr left,
                           TreePtr right) {
    auto t = std::make_shared<DerivationTree>();
    t->category_ = category;
    t->rule_ = rule;
    t->left_ = std::move(left);
    t->right_ = std::move(right);
    return t;
  }

  bool is_leaf() const { return entry_.has_value(); }
  const LexEntry& entry() const { return *entry_; }
  Cat category() const {
    return is_leaf() ? entry_->category : *category_;
  }
  std::size_t rule() const { return rule_; }
  const TreePtr& left() const { return left_; }
  const TreePtr& right() const { return right_; }

 private:
  std::optional<LexEntry> entry_;
  std::optional<Cat> category_;
  std::size_t rule_ = 0;
  TreePtr left_, right_;
};

inline Cat top(const DerivationTree& t) { return t.category(); }

inline void yield_into(const DerivationTree& t,
                       std::vector<std::string>& out) {
  if (t.is_leaf()) {
    if (t.entry().word) out.push_back(*t.entry().word);
    return;
  }
  yield_into(*t.left(), out);
  yield_into(*t.right(), out);
}

inline std::vector<std::string> yield_of(const DerivationTree& t) {
  std::vector<std::string> out;
  yield_into(t, out);
  return out;
}

inline std::size_t node_count(const DerivationTree& t) {
  if (t.is_leaf()) return 1;
  return 1 + node_count(*t.left()) + node_count(*t.right());
}

inline std::size_t leaf_count(const DerivationTree& t) {
  if (t.is_leaf()) return 1;
  return leaf_count(*t.left()) + leaf_count(*t.right());
}

inline bool trees_equal(const DerivationTree& a, const DerivationTree& b) {
  if (a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return a.entry() == b.entry();
  return a.category() == b.category() && a.rule() == b.rule() &&
         trees_equal(*a.left(), *b.left()) &&
         trees_equal(*a.right(), *b.right());
}

// Result of the certificate check. On failure, node_path identifies the
// first offending node as a string of L/R moves from the root.
struct CheckResult {
  bool ok = true;
  std::string node_path;
  std::string message;
};

namespace detail {

inline bool check_rec(const Grammar& g, const DerivationTree& t,
                      const std::string& path, CheckResult& res) {
  if (t.is_leaf()) {
    for (const LexEntry& e : g.lexicon)
      if (e == t.entry()) return true;
    res = {false, path,
           "leaf entry not in lexicon: " +
               (t.entry().word ? *t.entry().word : std::string("EPS")) +
               " := " + render_category(t.entry().category)};
    return false;
  }
  if (!check_rec(g, *t.left(), path + "L", res)) return false;
  if (!check_rec(g, *t.right(), path + "R", res)) return false;
  if (t.rule() >= g.rules.size()) {
    res = {false, path, "unknown rule id " + std::to_string(t.rule())};
    return false;
  }
  const Rule& r = g.rules[t.rule()];
  Cat lcat = t.left()->category();
  Cat rcat = t.right()->category();
  std::optional<Cat> out = r.schema == Slash::Forward
                               ? match_rule(r, lcat, rcat)
                               : match_rule(r, rcat, lcat);
  if (!out || *out != t.category()) {
    res = {false, path,
           "rule " + std::to_string(t.rule()) + " does not derive " +
               render_category(t.category()) + " from " +
               render_category(lcat) + " and " + render_category(rcat)};
    return false;
  }
  return true;
}

}  // namespace detail

inline CheckResult check_derivation(const Grammar& g,
                                    const DerivationTree& t) {
  CheckResult res;
  detail::check_rec(g, t, "", res);
  return res;
}

// --- serialization -----------------------------------------------------
// Leaf: {"word": string|null, "cat": category-text}
// Node: {"cat": category-text, "rule": integer, "children": [left, right]}

namespace detail {

inline nlohmann::json tree_to_json(const DerivationTree& t) {
  nlohmann::json j;
  j["cat"] = render_category(t.category());
  if (t.is_leaf()) {
    if (t.entry().word)
      j["word"] = *t.entry().word;
    else
      j["word"] = nullptr;
  } else {
    j["rule"] = t.rule();
    j["children"] = nlohmann::json::array(
        {tree_to_json(*t.left()), tree_to_json(*t.right())});
  }
  return j;
}

inline TreePtr tree_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("cat"))
    throw validation_error("malformed derivation document");
  Cat cat = parse_category(j.at("cat").get<std::string>());
  if (j.contains("children")) {
    const auto& kids = j.at("children");
    if (!kids.is_array() || kids.size() != 2)
      throw validation_error("derivation node must have two children");
    return DerivationTree::make_node(cat, j.at("rule").get<std::size_t>(),
                                     tree_from_json(kids[0]),
                                     tree_from_json(kids[1]));
  }
  if (!j.contains("word"))
    throw validation_error("derivation leaf is missing its word field");
  LexEntry e{std::nullopt, cat};
  if (!j.at("word").is_null()) e.word = j.at("word").get<std::string>();
  return DerivationTree::make_leaf(std::move(e));
}

}  // namespace detail

inline std::string serialize(const DerivationTree& t) {
  return detail::tree_to_json(t).dump(2);
}

inline TreePtr deserialize(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed derivation document: ") +
                           e.what());
  }
  try {
    return detail::tree_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed derivation document: ") +
                           e.what());
  }
}

// --- brute-force enumeration oracle ------------------------------------

namespace detail {

// All derivation trees with yield w[i..j) and at most `cap` nodes.
// Exponential; intended for tiny test instances only. The node cap also
// bounds empty-span recursion, which keeps the enumeration total for
// grammars with empty-string entries.
inline std::vector<TreePtr> enumerate_span(const Grammar& g,
                                           const std::vector<std::string>& w,
                                           std::size_t i, std::size_t j,
                                           std::size_t cap) {
  std::vector<TreePtr> out;
  if (cap == 0) return out;
  if (j == i + 1) {
    for (const LexEntry& e : g.lexicon)
      if (e.word && *e.word == w[i]) out.push_back(DerivationTree::make_leaf(e));
  } else if (j == i) {
    for (const LexEntry& e : g.lexicon)
      if (!e.word) out.push_back(DerivationTree::make_leaf(e));
  }
  if (cap < 3) return out;
  for (std::size_t k = i; k <= j; ++k) {
    for (const TreePtr& l : enumerate_span(g, w, i, k, cap - 2)) {
      std::size_t ln = node_count(*l);
      for (const TreePtr& r : enumerate_span(g, w, k, j, cap - 1 - ln)) {
        for (const auto& [rule, cat] :
             applicable_combinations(g, l->category(), r->category()))
          out.push_back(DerivationTree::make_node(cat, rule, l, r));
      }
    }
  }
  return out;
}

}  // namespace detail

// All derivation trees t with yield(t) = w, top(t) = start, and node
// count <= node_cap. For epsilon-free grammars and node_cap >= 2|w|-1
// this is the complete set of derivations of w.
inline std::vector<TreePtr> enumerate_derivations(
    const Grammar& g, const std::vector<std::string>& w,
    std::size_t node_cap) {
  if (node_cap < 1)
    throw validation_error("enumerate_derivations requires node_cap >= 1");
  std::vector<TreePtr> out;
  for (const TreePtr& t :
       detail::enumerate_span(g, w, 0, w.size(), node_cap))
    if (t->category() == g.start) out.push_back(t);
  return out;
}

}  // namespace vwccg
