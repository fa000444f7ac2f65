#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "vwccg/derivation.hpp"

using namespace vwccg;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TreePtr leaf(const char* word, const char* cat) {
  return DerivationTree::make_leaf(
      LexEntry{word ? std::optional<std::string>(word) : std::nullopt,
               parse_category(cat)});
}

// The sample sentence's derivation: (We (prove (two theorems))).
TreePtr fig1_tree() {
  TreePtr np = DerivationTree::make_node(parse_category("NP"), 0,
                                         leaf("two", "NP/N"),
                                         leaf("theorems", "N"));
  TreePtr vp = DerivationTree::make_node(parse_category("S\\NP"), 0,
                                         leaf("prove", "S\\NP/NP"), np);
  return DerivationTree::make_node(parse_category("S"), 1, leaf("We", "NP"),
                                   vp);
}

}  // namespace

TEST_CASE("top, yield, and node counts") {
  TreePtr t = fig1_tree();
  CHECK(top(*t) == parse_category("S"));
  CHECK(yield_of(*t) ==
        std::vector<std::string>{"We", "prove", "two", "theorems"});
  CHECK(leaf_count(*t) == 4);
  CHECK(node_count(*t) == 7);  // 2 * leaves - 1 for a binary tree
}

TEST_CASE("epsilon leaves vanish from the yield") {
  TreePtr t = DerivationTree::make_node(parse_category("S"), 0,
                                        leaf(nullptr, "S/A"), leaf("a", "A"));
  CHECK(yield_of(*t) == std::vector<std::string>{"a"});
}

TEST_CASE("check_derivation accepts the sample tree") {
  Grammar g = parse_grammar(fixture("fig1.ccg"));
  CHECK(check_derivation(g, *fig1_tree()).ok);
}

TEST_CASE("check_derivation pinpoints violations") {
  Grammar g = parse_grammar(fixture("fig1.ccg"));

  // leaf not in the lexicon
  TreePtr bad_leaf = DerivationTree::make_node(
      parse_category("NP"), 0, leaf("three", "NP/N"), leaf("theorems", "N"));
  CheckResult r1 = check_derivation(g, *bad_leaf);
  CHECK(!r1.ok);
  CHECK(r1.node_path == "L");

  // rule output mismatch at the root
  TreePtr wrong_out = DerivationTree::make_node(
      parse_category("NP"), 0, leaf("two", "NP/N"), leaf("We", "NP"));
  CheckResult r2 = check_derivation(g, *wrong_out);
  CHECK(!r2.ok);
  CHECK(r2.node_path == "");

  // unknown rule id
  TreePtr bad_rule = DerivationTree::make_node(
      parse_category("NP"), 7, leaf("two", "NP/N"), leaf("theorems", "N"));
  CHECK(!check_derivation(g, *bad_rule).ok);

  // wrong category label on an internal node
  TreePtr wrong_cat = DerivationTree::make_node(
      parse_category("N"), 0, leaf("two", "NP/N"), leaf("theorems", "N"));
  CHECK(!check_derivation(g, *wrong_cat).ok);
}

TEST_CASE("forward rules take the left child as primary, backward the right") {
  Grammar g = parse_grammar(fixture("fig1.ccg"));
  // Backward application written with the children swapped must fail.
  TreePtr swapped = DerivationTree::make_node(
      parse_category("S"), 1,
      DerivationTree::make_node(parse_category("S\\NP"), 0,
                                leaf("prove", "S\\NP/NP"),
                                DerivationTree::make_node(
                                    parse_category("NP"), 0,
                                    leaf("two", "NP/N"), leaf("theorems", "N"))),
      leaf("We", "NP"));
  CHECK(!check_derivation(g, *swapped).ok);
}

TEST_CASE("JSON serialization round-trips, including epsilon leaves") {
  TreePtr t = fig1_tree();
  TreePtr back = deserialize(serialize(*t));
  CHECK(trees_equal(*t, *back));

  TreePtr eps = DerivationTree::make_node(parse_category("S"), 0,
                                          leaf(nullptr, "S/A"), leaf("a", "A"));
  TreePtr eps_back = deserialize(serialize(*eps));
  CHECK(trees_equal(*eps, *eps_back));
  CHECK(!eps_back->left()->entry().word.has_value());
}

TEST_CASE("deserialize rejects malformed documents") {
  CHECK_THROWS_AS(deserialize("not json"), validation_error);
  CHECK_THROWS_AS(deserialize("{}"), validation_error);
  CHECK_THROWS_AS(deserialize(R"({"cat":"S"})"), validation_error);
  CHECK_THROWS_AS(deserialize(R"({"cat":"S","rule":0,"children":[]})"),
                  validation_error);
  CHECK_THROWS_AS(
      deserialize(R"({"cat":"S","rule":0,"children":[{"cat":"S","word":null}]})"),
      validation_error);
  CHECK_THROWS_AS(deserialize(R"({"cat":"S)NP","word":null})"),
                  syntax_error);
}

namespace {

TreePtr random_tree(std::mt19937& rng, int depth) {
  static const char* cats[] = {"S", "NP", "S/NP", "S\\NP/NP", "N/N"};
  static const char* words[] = {"w1", "w2", "w3"};
  std::uniform_int_distribution<int> cat(0, 4);
  std::uniform_int_distribution<int> word(0, 3);  // 3 = epsilon
  std::uniform_int_distribution<int> rule(0, 9);
  std::uniform_int_distribution<int> go(0, 1);
  if (depth == 0 || go(rng) == 0) {
    int w = word(rng);
    return DerivationTree::make_leaf(
        LexEntry{w == 3 ? std::nullopt : std::optional<std::string>(words[w]),
                 parse_category(cats[cat(rng)])});
  }
  return DerivationTree::make_node(parse_category(cats[cat(rng)]),
                                   static_cast<std::size_t>(rule(rng)),
                                   random_tree(rng, depth - 1),
                                   random_tree(rng, depth - 1));
}

}  // namespace

TEST_CASE("1000 random trees survive the serialization round trip") {
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    TreePtr t = random_tree(rng, 4);
    CHECK(trees_equal(*t, *deserialize(serialize(*t))));
    CHECK(node_count(*t) == 2 * leaf_count(*t) - 1);
  }
}

TEST_CASE("enumerate_derivations agrees with hand counts") {
  Grammar g = parse_grammar(fixture("fig1.ccg"));
  auto all = enumerate_derivations(g, {"We", "prove", "two", "theorems"}, 7);
  REQUIRE(all.size() == 1);
  CHECK(trees_equal(*all[0], *fig1_tree()));
  CHECK(enumerate_derivations(g, {"prove", "We"}, 9).empty());
  CHECK(enumerate_derivations(g, {}, 9).empty());
  // cap below the only derivation's size finds nothing
  CHECK(enumerate_derivations(g, {"We", "prove", "two", "theorems"}, 6)
            .empty());
  CHECK_THROWS_AS(enumerate_derivations(g, {}, 0), validation_error);
}

TEST_CASE("enumerate_derivations handles epsilon entries under the cap") {
  Grammar g = parse_grammar(fixture("ex33.ccg"));
  // the empty string has exactly one derivation with a single node:
  // the start-category epsilon entry
  auto all = enumerate_derivations(g, {}, 1);
  REQUIRE(all.size() == 1);
  CHECK(all[0]->is_leaf());
  CHECK(!all[0]->entry().word.has_value());
  // "a b" is derivable within a generous cap
  CHECK(!enumerate_derivations(g, {"a", "b"}, 11).empty());
  // every enumerated tree passes the certificate check
  for (const TreePtr& t : enumerate_derivations(g, {"a", "b"}, 11)) {
    CHECK(check_derivation(g, *t).ok);
    CHECK(yield_of(*t) == std::vector<std::string>{"a", "b"});
    CHECK(top(*t) == g.start);
  }
}
