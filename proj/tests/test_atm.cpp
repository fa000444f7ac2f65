#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "vwccg/atm.hpp"

using namespace vwccg;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Machine load(const std::string& name) { return parse_machine(fixture(name)); }

std::vector<std::string> syms(std::initializer_list<const char*> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST_CASE("parse_machine and validation") {
  Machine m = load("atm_exist.m");
  CHECK(m.states == std::vector<std::string>{"q0", "q1"});
  CHECK(m.state_type("q0") == StateType::Existential);
  CHECK(m.state_type("q1") == StateType::Accepting);
  CHECK(m.alphabet == std::vector<std::string>{"a", "_"});  // blank implicit
  CHECK(m.start == "q0");
  CHECK(m.poly == std::vector<std::uint64_t>{0, 1});
  REQUIRE(m.transitions.size() == 1);
  CHECK(validate_machine(m).ok());

  // accept-everything machine with no transitions is valid
  CHECK(validate_machine(load("atm_accept.m")).ok());

  // transition out of an accepting state is an error
  Machine bad = parse_machine(
      "states q0:A q1:A\nalphabet a\nstart q0\npoly 0 1\n"
      "trans q0 a -> q1 a\n");
  CHECK(!validate_machine(bad).ok());

  // undeclared state/symbol
  CHECK(!validate_machine(parse_machine(
                              "states q0:E\nalphabet a\nstart qX\npoly 1\n"))
             .ok());
  CHECK(!validate_machine(parse_machine(
                              "states q0:E q1:A\nalphabet a\nstart q0\npoly 1\n"
                              "trans q0 b -> q1 a\n"))
             .ok());
}

TEST_CASE("pad_universal") {
  Machine one = parse_machine(
      "states q0:U q1:A\nalphabet a\nstart q0\npoly 0 1\n"
      "trans q0 a -> q1 a\n");
  // one transition on a universal pair: invalid until padded
  CHECK(!validate_machine(one).ok());
  Machine padded = pad_universal(one);
  // the duplicate restores the exactly-two discipline on (q0, a);
  // (q0, _) has no transitions, which is a warning, not an error
  MachineValidation v = validate_machine(padded);
  CHECK(v.ok());
  CHECK(!v.warnings.empty());
  CHECK(padded.transitions.size() == 2);
  CHECK(padded.transitions[0] == padded.transitions[1]);

  // two transitions stay unchanged
  Machine two = load("atm_univ.m");
  CHECK(pad_universal(two).transitions.size() == two.transitions.size());

  // three transitions on one universal pair is an error
  Machine three = parse_machine(
      "states q0:U q1:A\nalphabet a\nstart q0\npoly 0 1\n"
      "trans q0 a -> q1 a\ntrans q0 a -> q1 _\ntrans q0 a -> q0 a\n");
  CHECK_THROWS_AS(pad_universal(three), validation_error);
}

TEST_CASE("tape_cells evaluates the polynomial") {
  Machine m = load("atm_exist.m");
  CHECK(tape_cells(m, syms({"a", "a", "a"})) == 3);
  Machine m2 = parse_machine("states q0:A\nalphabet a\nstart q0\npoly 2 1\n");
  CHECK(tape_cells(m2, syms({"a", "a", "a"})) == 5);
  // p(0) = 0 violates the one-cell minimum
  CHECK_THROWS_AS(tape_cells(m, {}), validation_error);
  // tape shorter than the input
  Machine m3 = parse_machine("states q0:A\nalphabet a\nstart q0\npoly 1\n");
  CHECK_THROWS_AS(tape_cells(m3, syms({"a", "a"})), validation_error);
}

TEST_CASE("initial_config pads with blanks") {
  Machine m = parse_machine("states q0:A\nalphabet a b\nstart q0\npoly 2 1\n");
  Config c = initial_config(m, syms({"a", "b"}));
  CHECK(c.state == "q0");
  CHECK(c.tape == syms({"a", "b", "_", "_"}));
  Config e = initial_config(m, {});
  CHECK(e.tape == syms({"_", "_"}));
  Machine id = load("atm_exist.m");
  CHECK(initial_config(id, syms({"a", "a", "a"})).tape ==
        syms({"a", "a", "a"}));
  CHECK_THROWS_AS(initial_config(id, syms({"x"})), validation_error);
}

TEST_CASE("successor rotates the circular tape") {
  Transition t{"q", "a", "q2", "x"};
  Config c{"q", syms({"a", "b"})};
  Config s = successor(c, t);
  CHECK(s.state == "q2");
  CHECK(s.tape == syms({"b", "x"}));

  // length-1 tape wraps onto itself
  Transition t1{"q", "a", "q2", "c"};
  Config one{"q", syms({"a"})};
  CHECK(successor(one, t1).tape == syms({"c"}));

  // inapplicable transitions are errors
  Config mismatch{"q", syms({"b", "a"})};
  CHECK_THROWS_AS(successor(mismatch, t), validation_error);
  Config wrong_state{"p", syms({"a"})};
  CHECK_THROWS_AS(successor(wrong_state, t), validation_error);
}

TEST_CASE("accepts on the tiny machines") {
  CHECK(accepts(load("atm_accept.m"), syms({"a"})));
  CHECK(accepts(load("atm_accept.m"), syms({"a", "a"})));
  CHECK(!accepts(load("atm_reject.m"), syms({"a"})));
  // one-step existential machine: accepts iff the head reads `a`
  Machine e = load("atm_exist.m");
  CHECK(accepts(e, syms({"a"})));
  CHECK(accepts(e, syms({"a", "a"})));
  CHECK(!accepts(e, syms({"_"})));
  // universal machine branching into two accepting states
  CHECK(accepts(load("atm_univ.m"), syms({"a"})));
}

TEST_CASE("a universal pair missing one accepting branch rejects") {
  Machine m = parse_machine(
      "states q0:U q1:A q2:R\nalphabet a\nstart q0\npoly 0 1\n"
      "trans q0 a -> q1 a\ntrans q0 a -> q2 a\n");
  CHECK(validate_machine(m).ok());
  CHECK(!accepts(m, syms({"a"})));
}

TEST_CASE("machines with no universal states reduce to reachability") {
  // two-step existential loop: rewrite a->b, then b->a, then accept
  Machine m = parse_machine(
      "states q0:E q1:E q2:A\nalphabet a b\nstart q0\npoly 0 1\n"
      "trans q0 a -> q1 b\ntrans q1 b -> q0 a\ntrans q1 b -> q2 b\n");
  CHECK(accepts(m, syms({"a"})));
  CHECK(!accepts(m, syms({"b"})));
}

TEST_CASE("accepting_computation matches the recursion") {
  // single-node tree for the accept-everything machine
  auto t0 = accepting_computation(load("atm_accept.m"), syms({"a"}));
  REQUIRE(t0);
  CHECK(computation_size(**t0) == 1);
  CHECK((*t0)->children.empty());

  // two-node chain for the one-step existential machine
  auto t1 = accepting_computation(load("atm_exist.m"), syms({"a"}));
  REQUIRE(t1);
  CHECK(computation_size(**t1) == 2);
  REQUIRE((*t1)->children.size() == 1);
  CHECK((*t1)->children[0]->config.state == "q1");

  // three-node tree for the universal machine
  auto t2 = accepting_computation(load("atm_univ.m"), syms({"a"}));
  REQUIRE(t2);
  CHECK(computation_size(**t2) == 3);
  CHECK((*t2)->children.size() == 2);

  // absent on rejection
  CHECK(!accepting_computation(load("atm_reject.m"), syms({"a"})));
}

TEST_CASE("validate_computation") {
  Machine u = load("atm_univ.m");
  auto t = accepting_computation(u, syms({"a"}));
  REQUIRE(t);
  CHECK(validate_computation(u, syms({"a"}), **t).ok);

  // wrong root
  ComputationTree wrong;
  wrong.config = Config{"q1", syms({"a"})};
  CHECK(!validate_computation(u, syms({"a"}), wrong).ok);

  // universal node with one child
  ComputationTree half;
  half.config = initial_config(u, syms({"a"}));
  half.children.push_back((*t)->children[0]);
  CHECK(!validate_computation(u, syms({"a"}), half).ok);

  // accepting leaf with a child
  Machine e = load("atm_exist.m");
  auto te = accepting_computation(e, syms({"a"}));
  auto fat = std::make_shared<ComputationTree>(**te);
  auto extra = std::make_shared<ComputationTree>();
  extra->config = (*te)->children[0]->config;
  auto fat_leaf = std::make_shared<ComputationTree>(*(*te)->children[0]);
  fat_leaf->children.push_back(extra);
  fat->children = {fat_leaf};
  CHECK(!validate_computation(e, syms({"a"}), *fat).ok);
}

TEST_CASE("computation extraction terminates on cyclic config graphs") {
  // (q0,b) -> (q2,_) -> (q0,b) is a cycle of mutually-proving
  // existential configs; extraction must still descend to (q1,b)
  Machine m = parse_machine(
      "states q0:E q1:A q2:E\nalphabet a b\nstart q0\npoly 0 1\n"
      "trans q0 a -> q1 b\ntrans q0 b -> q2 _\ntrans q0 b -> q0 a\n"
      "trans q2 b -> q1 _\ntrans q2 _ -> q2 a\ntrans q2 _ -> q0 b\n");
  REQUIRE(accepts(m, syms({"b"})));
  auto t = accepting_computation(m, syms({"b"}));
  REQUIRE(t);
  CHECK(validate_computation(m, syms({"b"}), **t).ok);
  // strict depth descent: the chain must resolve via (q0,a) -> (q1,b)
  CHECK(computation_size(**t) == 3);
}

TEST_CASE("budget errors on configuration explosions") {
  Machine m = parse_machine(
      "states q0:E q1:A\nalphabet a b\nstart q0\npoly 0 1\n"
      "trans q0 a -> q0 b\ntrans q0 b -> q0 a\n");
  CHECK_THROWS_AS(accepts(m, syms({"a", "a", "a"}), 2), budget_error);
}
