#include <doctest.h>

#include <horn/parser.hpp>
#include <horn/solver.hpp>

#include "test_support.hpp"

#include <algorithm>
#include <string>

using namespace horn;
using horn::test::load_fixture;
using horn::test::read_fixture;

namespace {

bool has_reason(const VerifyResult& r, const std::string& needle) {
  return std::any_of(r.reasons.begin(), r.reasons.end(),
                     [&](const std::string& s) {
                       return s.find(needle) != std::string::npos;
                     });
}

Solution published_solution() {
  return parse_solution(read_fixture("fig1.json"));
}

}  // namespace

TEST_CASE("the published explanation verifies at cost 188") {
  AbductionInstance instance = load_fixture("example1.kb");
  Solution sol = published_solution();
  VerifyResult r = verify(instance, sol, Objective::WeightedAbduction);
  CHECK(r.valid);
  CHECK(r.cost == 188);
  CHECK(r.reasons.empty());
}

TEST_CASE("a missing inference body atom is rejected") {
  AbductionInstance instance = load_fixture("example1.kb");
  Solution sol = published_solution();
  // inst(f,person) feeds the lost(m,f) inference; drop it entirely.
  Atom gone = parse_atom("inst(f,person)");
  sol.true_atoms.erase(gone);
  sol.inferred.erase(gone);
  VerifyResult r = verify(instance, sol, Objective::WeightedAbduction);
  CHECK(!r.valid);
  CHECK(has_reason(r, "inference body not true"));
}

TEST_CASE("a cyclic proof structure is rejected") {
  AbductionInstance instance = parse_instance(
      "axiom a1: p(X) <- q(X).\n"
      "axiom a2: q(X) <- p(X).\n"
      "goal: p(a), q(b).\n");
  // p(a) <- q(a); q(a) factors onto q(b); q(b) <- p(b); p(b) factors onto
  // p(a): every local check passes but the step relation loops.
  Solution sol;
  sol.true_atoms = {parse_atom("p(a)"), parse_atom("q(a)"), parse_atom("q(b)"),
                    parse_atom("p(b)")};
  sol.inferred.emplace(parse_atom("p(a)"), InferenceChoice{"a1", {}});
  sol.inferred.emplace(parse_atom("q(b)"), InferenceChoice{"a2", {}});
  sol.factored.emplace(parse_atom("q(a)"), parse_atom("q(b)"));
  sol.factored.emplace(parse_atom("p(b)"), parse_atom("p(a)"));
  sol.eq.relate(Term::make_const("a"), Term::make_const("b"));
  VerifyResult r = verify(instance, sol, Objective::Card);
  CHECK(!r.valid);
  CHECK(has_reason(r, "cycle"));
}

TEST_CASE("a non-transitive equivalence is rejected") {
  AbductionInstance instance = parse_instance("goal: p(a), p(b), p(c).\n");
  Solution sol;
  for (const char* t : {"p(a)", "p(b)", "p(c)"}) {
    sol.true_atoms.insert(parse_atom(t));
    sol.abduced.insert(parse_atom(t));
  }
  sol.eq.relate(Term::make_const("a"), Term::make_const("b"));
  sol.eq.relate(Term::make_const("b"), Term::make_const("c"));
  sol.objective_value = 3;
  VerifyResult r = verify(instance, sol, Objective::Card);
  CHECK(!r.valid);
  CHECK(has_reason(r, "eq not transitive"));
}

TEST_CASE("merging a sort name into a class is rejected") {
  AbductionInstance instance = load_fixture("example1.kb");
  Solution sol = published_solution();
  sol.eq.relate(Term::make_const("male"), Term::make_const("female"));
  VerifyResult r = verify(instance, sol, Objective::WeightedAbduction);
  CHECK(!r.valid);
  CHECK(has_reason(r, "sort name merged"));
}

TEST_CASE("an assumption nogood violation is rejected") {
  AbductionInstance instance = load_fixture("goer.kb");
  // The flat all-abduced reading shares g1 between an abduced go_step and an
  // abduced goer, exactly the forbidden pattern.
  Solution sol;
  for (const Atom& g : instance.goal) {
    sol.true_atoms.insert(g);
    sol.abduced.insert(g);
  }
  sol.objective_value = 3;
  VerifyResult r = verify(instance, sol, Objective::Card);
  CHECK(!r.valid);
  CHECK(has_reason(r, "nogood violated"));
}

TEST_CASE("a unique-slot violation is rejected") {
  AbductionInstance instance = load_fixture("goer.kb");
  // Relating the two events forces their goers together; leaving the goers
  // apart breaks the one-goer-per-event slot.
  Solution sol;
  for (const Atom& g : instance.goal) {
    sol.true_atoms.insert(g);
    sol.abduced.insert(g);
  }
  sol.eq.relate(Term::make_const("g1"), Term::make_const("g2"));
  sol.objective_value = 3;
  VerifyResult r = verify(instance, sol, Objective::Card);
  CHECK(!r.valid);
  CHECK(has_reason(r, "unique slot violated"));
}

TEST_CASE("a wrong objective value is rejected") {
  AbductionInstance instance = load_fixture("example1.kb");
  Solution sol = published_solution();
  sol.objective_value = 187;
  VerifyResult r = verify(instance, sol, Objective::WeightedAbduction);
  CHECK(!r.valid);
  CHECK(has_reason(r, "objective value mismatch"));
}

TEST_CASE("untrue goals and bad factoring targets are rejected") {
  AbductionInstance instance = parse_instance("goal: p(a), p(b), p(c).\n");

  SUBCASE("goal not true") {
    Solution sol;
    sol.true_atoms = {parse_atom("p(a)"), parse_atom("p(b)")};
    sol.abduced = sol.true_atoms;
    sol.objective_value = 2;
    VerifyResult r = verify(instance, sol, Objective::Card);
    CHECK(!r.valid);
    CHECK(has_reason(r, "goal not true"));
  }

  SUBCASE("factored atom must unify with its target") {
    Solution sol;
    sol.true_atoms = {parse_atom("p(a)"), parse_atom("p(b)"), parse_atom("p(c)")};
    sol.abduced = {parse_atom("p(a)"), parse_atom("p(c)")};
    sol.factored.emplace(parse_atom("p(b)"), parse_atom("p(a)"));
    sol.objective_value = 2;  // a and b were never related
    VerifyResult r = verify(instance, sol, Objective::Card);
    CHECK(!r.valid);
    CHECK(has_reason(r, "not unifiable"));
  }

  SUBCASE("chained factoring is rejected") {
    Solution sol;
    sol.true_atoms = {parse_atom("p(a)"), parse_atom("p(b)"), parse_atom("p(c)")};
    sol.abduced = {parse_atom("p(a)")};
    sol.factored.emplace(parse_atom("p(b)"), parse_atom("p(a)"));
    sol.factored.emplace(parse_atom("p(c)"), parse_atom("p(b)"));
    sol.eq.relate(Term::make_const("a"), Term::make_const("b"));
    sol.eq.relate(Term::make_const("b"), Term::make_const("c"));
    sol.eq.relate(Term::make_const("a"), Term::make_const("c"));
    sol.objective_value = 1;
    VerifyResult r = verify(instance, sol, Objective::Card);
    CHECK(!r.valid);
    CHECK(has_reason(r, "target is itself factored"));
  }
}
