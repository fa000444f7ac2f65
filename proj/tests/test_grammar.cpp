#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "vwccg/grammar.hpp"

using namespace vwccg;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Rule fwd_app() {
  Rule r;
  r.schema = Slash::Forward;
  r.degree = 0;
  return r;
}

Rule bwd_xcomp() {
  Rule r;
  r.schema = Slash::Backward;
  r.degree = 1;
  r.arg_slashes = {Slash::Forward};
  return r;
}

}  // namespace

TEST_CASE("forward application matches the textbook instances") {
  // X/Y + Y => X
  CHECK(match_rule(fwd_app(), parse_category("NP/N"), parse_category("N")) ==
        parse_category("NP"));
  CHECK(match_rule(fwd_app(), parse_category("S\\NP/NP"),
                   parse_category("NP")) == parse_category("S\\NP"));
  // wrong secondary
  CHECK(!match_rule(fwd_app(), parse_category("NP/N"), parse_category("NP")));
  // atomic primary
  CHECK(!match_rule(fwd_app(), parse_category("N"), parse_category("N")));
  // backward top slash does not match the forward schema
  CHECK(!match_rule(fwd_app(), parse_category("S\\NP"), parse_category("NP")));
}

TEST_CASE("backward crossed composition reproduces the ground instances") {
  // primary X\Y, secondary Y/Z; the two instances behind heavy NP shift
  Rule r = bwd_xcomp();
  CHECK(match_rule(r, parse_category("(S\\NP)\\(S\\NP)"),
                   parse_category("S\\NP/NP")) ==
        parse_category("S\\NP/NP"));
  CHECK(match_rule(r, parse_category("N\\N"), parse_category("N/N")) ==
        parse_category("N/N"));
}

TEST_CASE("restrictions prune matches") {
  Rule r = bwd_xcomp();
  r.target_constraint = {{Atom("S")}};
  r.y_constraint = {{parse_category("S\\NP")}};
  // allowed: primary target S, Y = S\NP
  CHECK(match_rule(r, parse_category("(S\\NP)\\(S\\NP)"),
                   parse_category("S\\NP/NP")));
  // blocked by target: N\N has target N
  CHECK(!match_rule(r, parse_category("N\\N"), parse_category("N/N")));

  Rule z = fwd_app();
  z.degree = 2;
  z.arg_slashes = {Slash::Forward, Slash::Forward};
  z.z_constraints = {std::vector<Cat>{parse_category("A")}, std::nullopt};
  CHECK(match_rule(z, parse_category("X/Y"), parse_category("Y/A/B")) ==
        parse_category("X/A/B"));
  CHECK(!match_rule(z, parse_category("X/Y"), parse_category("Y/B/B")));
}

TEST_CASE("degree and slash pattern must agree with the secondary") {
  Rule r = fwd_app();
  r.degree = 1;
  r.arg_slashes = {Slash::Backward};
  CHECK(match_rule(r, parse_category("X/Y"), parse_category("Y\\Z")) ==
        parse_category("X\\Z"));
  CHECK(!match_rule(r, parse_category("X/Y"), parse_category("Y/Z")));
  CHECK(!match_rule(r, parse_category("X/Y"), parse_category("Y")));
}

TEST_CASE("match output laws") {
  // The output keeps the primary's lower stack and gains the
  // secondary's top d arguments.
  Rule r = fwd_app();
  r.degree = 2;
  r.arg_slashes = {Slash::Forward, Slash::Backward};
  Cat primary = parse_category("S\\W/Y");
  Cat secondary = parse_category("Y/Z1\\Z2");
  auto out = match_rule(r, primary, secondary);
  REQUIRE(out);
  CHECK(*out == parse_category("S\\W/Z1\\Z2"));
  CHECK(out->arity() == primary.arity() - 1 + r.degree);
  CHECK(out->target() == primary.target());
  CHECK(ground_instances_check(r, primary, secondary, *out));
}

TEST_CASE("grammar files parse and render deterministically") {
  Grammar g = parse_grammar(fixture("fig1.ccg"));
  CHECK(g.start == parse_category("S"));
  CHECK(g.vocabulary ==
        std::vector<std::string>{"We", "prove", "theorems", "two"});
  CHECK(g.lexicon.size() == 4);
  CHECK(g.rules.size() == 2);
  CHECK(is_epsilon_free(g));
  // atoms inferred from use
  CHECK(g.atoms.size() == 3);  // S, NP, N
  // render/parse round trip is stable
  std::string r1 = render_grammar(g);
  CHECK(render_grammar(parse_grammar(r1)) == r1);
}

TEST_CASE("epsilon entries and declared atoms") {
  Grammar g = parse_grammar(fixture("ex33.ccg"));
  CHECK(!is_epsilon_free(g));
  std::size_t eps = 0;
  for (const auto& e : g.lexicon)
    if (!e.word) ++eps;
  CHECK(eps == 4);
  CHECK(g.vocabulary == std::vector<std::string>{"a", "b"});

  Grammar d = parse_grammar("start S\natoms S NP\nlex w := S/NP\n");
  CHECK(d.atoms.size() == 2);
  CHECK_THROWS_AS(parse_grammar("start S\natoms S\nlex w := S/NP\n"),
                  validation_error);
}

TEST_CASE("grammar file errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_grammar("lex w := S\n"),
                       "grammar is missing a start directive",
                       validation_error);
  CHECK_THROWS_AS(parse_grammar("start S\nlex w = S\n"), validation_error);
  CHECK_THROWS_AS(parse_grammar("start S\nrule fwd\n"), validation_error);
  CHECK_THROWS_AS(parse_grammar("start S\nrule fwd deg=1\n"),
                  validation_error);
  CHECK_THROWS_AS(parse_grammar("start S\nrule fwd deg=1 slashes=//\n"),
                  validation_error);
  CHECK_THROWS_AS(parse_grammar("start S\nrule fwd deg=0 Y={}\n"),
                  validation_error);
  CHECK_THROWS_AS(parse_grammar("start S\nrule fwd deg=1 slashes=/ Z2={A}\n"),
                  validation_error);
  CHECK_THROWS_AS(parse_grammar("start S\nbogus x\n"), validation_error);
  try {
    parse_grammar("start S\nlex w = S\n");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("grammar_stats computes the four maxima") {
  Grammar g = parse_grammar(fixture("fig1.ccg"));
  GrammarStats s = grammar_stats(g);
  CHECK(s.lambda == 3);  // S\NP/NP: three atom occurrences
  CHECK(s.gamma == 2);
  CHECK(s.alpha == 1);   // all arguments atomic
  CHECK(s.dmax == 0);

  Grammar e = parse_grammar(fixture("ex33.ccg"));
  GrammarStats t = grammar_stats(e);
  CHECK(t.lambda == 4);  // S\A/Shat/B: four atom occurrences
  CHECK(t.gamma == 3);
  CHECK(t.alpha == 1);
  CHECK(t.dmax == 3);

  Grammar k = parse_grammar(fixture("kahn_unrestricted.ccg"));
  GrammarStats u = grammar_stats(k);
  CHECK(u.alpha == 2);  // argument S\NP of "skillfully"
  CHECK(u.dmax == 1);

  Grammar empty;
  empty.start = parse_category("S");
  CHECK_THROWS_AS(grammar_stats(empty), validation_error);
}

TEST_CASE("applicable_combinations reports rule-id order") {
  Grammar g = parse_grammar(fixture("kahn_unrestricted.ccg"));
  // N/N + N\N: only backward crossed composition (rule id 2) applies.
  auto res =
      applicable_combinations(g, parse_category("N/N"), parse_category("N\\N"));
  REQUIRE(res.size() == 1);
  CHECK(res[0].first == 2);
  CHECK(res[0].second == parse_category("N/N"));
  // NP + S\NP: backward application only.
  auto res2 =
      applicable_combinations(g, parse_category("NP"), parse_category("S\\NP"));
  REQUIRE(res2.size() == 1);
  CHECK(res2[0].first == 1);
  CHECK(res2[0].second == parse_category("S"));
  // nothing applies
  CHECK(applicable_combinations(g, parse_category("N"), parse_category("N"))
            .empty());
}
