#include <doctest.h>

#include <horn/objectives.hpp>
#include <horn/parser.hpp>
#include <horn/term.hpp>

#include "test_support.hpp"

#include <map>
#include <set>
#include <string>

using namespace horn;
using horn::test::load_fixture;
using horn::test::read_fixture;

namespace {

Term c(const std::string& name) { return Term::make_const(name); }

Solution published_solution() {
  return parse_solution(read_fixture("fig1.json"));
}

// The complete propagated cost table of the published weighted-abduction
// answer set: five goal seeds, ten inference contributions (including the
// two second-wave fatherof values 48 and 72), four factoring copies.
CostSet published_costs() {
  CostSet expect;
  auto add = [&](const std::string& atom, std::set<long long> values) {
    expect[parse_atom(atom)] = std::move(values);
  };
  add("name(m,mary)", {100, 120});
  add("lost(m,f)", {100});
  add("fatherof(f,m)", {100, 48, 57, 72});
  add("inst(s,female)", {100});
  add("is(s,depressed)", {100});
  add("name(s,mary)", {120});
  add("inst(f,person)", {40});
  add("importantfor(f,m)", {40, 60});
  add("is(f,dead)", {40, 60});
  add("inst(f,male)", {48});
  add("fatherof(f,s(r4,\"Y\",f))", {57});
  add("is(s(r9,\"Y\",s),dead)", {60});
  add("importantfor(s(r9,\"Y\",s),s)", {60});
  return expect;
}

}  // namespace

TEST_CASE("cardinality counts the abduced atoms") {
  Solution sol = published_solution();
  CHECK(eval_card(sol) == 3);
  AbductionInstance instance = load_fixture("example1.kb");
  CHECK(eval_objective(instance, sol, Objective::Card) == 3);
}

TEST_CASE("published solution propagates the exact cost table") {
  AbductionInstance instance = load_fixture("example1.kb");
  Solution sol = published_solution();
  CostSet costs = propagate_pcost(instance, sol);

  CostSet expect = published_costs();
  CHECK(costs == expect);

  // Thirteen atoms carry nineteen propagated values in total.
  std::size_t facts = 0;
  for (const auto& [atom, values] : costs) facts += values.size();
  CHECK(costs.size() == 13);
  CHECK(facts == 19);

  CHECK(eval_wa(instance, sol) == 188);  // 100 + 48 + 40
  CHECK(eval_objective(instance, sol, Objective::WeightedAbduction) == 188);
}

TEST_CASE("propagation applies the one-unit floor") {
  AbductionInstance instance = parse_instance(
      "axiom a: p(X) <- q(X).\n"
      "goal: p(a).\n"
      "cost: p(a) = 1.\n");
  Solution sol;
  sol.true_atoms = {parse_atom("p(a)"), parse_atom("q(a)")};
  sol.inferred.emplace(parse_atom("p(a)"), InferenceChoice{"a", {}});
  sol.abduced = {parse_atom("q(a)")};
  CostSet costs = propagate_pcost(instance, sol);
  // trunc(1 * 6/5) = 1, and the floor keeps every contribution >= 1.
  CHECK(costs[parse_atom("q(a)")] == std::set<long long>{1});
  CHECK(eval_wa(instance, sol) == 1);
}

TEST_CASE("explicit weights drive the propagation") {
  AbductionInstance instance = parse_instance(
      "axiom a @w=1/4,2/1: p(X) <- q(X), t(X).\n"
      "goal: p(a).\n");
  Solution sol;
  sol.true_atoms = {parse_atom("p(a)"), parse_atom("q(a)"), parse_atom("t(a)")};
  sol.inferred.emplace(parse_atom("p(a)"), InferenceChoice{"a", {}});
  sol.abduced = {parse_atom("q(a)"), parse_atom("t(a)")};
  CostSet costs = propagate_pcost(instance, sol);
  CHECK(costs[parse_atom("q(a)")] == std::set<long long>{25});
  CHECK(costs[parse_atom("t(a)")] == std::set<long long>{200});
  CHECK(eval_wa(instance, sol) == 225);
}

TEST_CASE("a propagation cycle is a detected defect") {
  AbductionInstance instance = parse_instance(
      "axiom a1: p(X) <- q(X).\n"
      "axiom a2: q(X) <- p(X).\n"
      "goal: p(a).\n");
  Solution sol;
  sol.true_atoms = {parse_atom("p(a)"), parse_atom("q(a)")};
  sol.inferred.emplace(parse_atom("p(a)"), InferenceChoice{"a1", {}});
  sol.inferred.emplace(parse_atom("q(a)"), InferenceChoice{"a2", {}});
  try {
    propagate_pcost(instance, sol);
    FAIL("expected cycle detection");
  } catch (const HornError& e) {
    CHECK(e.code() == ErrorCode::CycleDetected);
  }
}

TEST_CASE("reachability walks used inference and factoring steps") {
  AbductionInstance instance = load_fixture("example1.kb");
  Solution sol = published_solution();
  auto reach = reachable_from_goals(instance, sol);

  // fatherof(f,m) is reached from its own goal, from lost(m,f) through the
  // r10/r6 bodies, and from is(s,depressed) through the factored
  // importantfor chain -- but not from the two name-side goals.
  Atom shared = parse_atom("fatherof(f,m)");
  REQUIRE(reach.count(shared));
  const std::set<Atom>& sources = reach[shared];
  CHECK(sources.count(parse_atom("lost(m,f)")));
  CHECK(sources.count(parse_atom("fatherof(f,m)")));
  CHECK(sources.count(parse_atom("is(s,depressed)")));
  CHECK(!sources.count(parse_atom("name(m,mary)")));
  CHECK(!sources.count(parse_atom("inst(s,female)")));

  for (const Atom& g : instance.goal) {
    REQUIRE(reach.count(g));
    CHECK(reach[g].count(g));
  }
}

TEST_CASE("coherence counts unconnected goal pairs") {
  AbductionInstance instance = load_fixture("example1.kb");
  Solution sol = published_solution();
  // Connected pairs: name/inst(s,female) meet at the factored name(m,mary);
  // lost, fatherof, and is(s,depressed) pairwise meet at fatherof(f,m).
  // The remaining six of the ten goal pairs stay unconnected.
  long long coherence = eval_coherence(instance, sol);
  CHECK(coherence == eval_objective(instance, sol, Objective::Coherence));
  CHECK(coherence == 6);

  // A fully abduced flat solution connects nothing: all C(5,2) pairs open.
  Solution flat;
  for (const Atom& g : instance.goal) {
    flat.true_atoms.insert(g);
    flat.abduced.insert(g);
  }
  CHECK(eval_coherence(instance, flat) == 10);
}
