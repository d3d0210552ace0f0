#include <doctest.h>

#include <horn/term.hpp>

#include <algorithm>
#include <random>
#include <vector>

using namespace horn;

namespace {

Term c(const std::string& name) { return Term::make_const(name); }

std::vector<Term> sample_terms() {
  Term a = c("a"), b = c("b"), mary = c("mary");
  Term s1 = Term::make_skolem("r4", "Y", {a});
  Term s2 = Term::make_skolem("r4", "Y", {b});
  Term s3 = Term::make_skolem("r9", "Y", {a});
  Term s4 = Term::make_skolem("r4", "Z", {a});
  Term nested = Term::make_skolem("r4", "Y", {s1, mary});
  Term deep = Term::make_skolem("r2", "Q", {nested});
  Term f1 = Term::make_flat(1), f2 = Term::make_flat(2);
  return {a, b, mary, s1, s2, s3, s4, nested, deep, f1, f2};
}

}  // namespace

TEST_CASE("term order is a strict total order on a mixed sample") {
  std::vector<Term> ts = sample_terms();
  for (const Term& x : ts) {
    CHECK_FALSE(x < x);
    CHECK(x == x);
  }
  for (const Term& x : ts) {
    for (const Term& y : ts) {
      int cmp = compare(x, y);
      CHECK(cmp == -compare(y, x));
      CHECK((x == y) == (cmp == 0));
      CHECK((x < y) == (cmp < 0));
      for (const Term& z : ts) {
        if (x < y && y < z) CHECK(x < z);
      }
    }
  }
}

TEST_CASE("term order groups the three shapes") {
  CHECK(c("z") < Term::make_flat(1));
  CHECK(Term::make_flat(9) < Term::make_skolem("r1", "Y", {}));
  CHECK(c("a") < c("b"));
  CHECK(Term::make_flat(1) < Term::make_flat(2));
}

TEST_CASE("atom order is total and consistent with equality") {
  std::vector<Atom> atoms = {
      {"p", {c("a")}},          {"p", {c("a"), c("b")}},
      {"p", {c("b")}},          {"q", {c("a")}},
      {"name", {c("m"), c("mary")}},
      {"is", {Term::make_skolem("r9", "Y", {c("s")}), c("dead")}},
  };
  for (const Atom& x : atoms) {
    for (const Atom& y : atoms) {
      int cmp = compare(x, y);
      CHECK(cmp == -compare(y, x));
      CHECK((x == y) == (cmp == 0));
    }
  }
  std::vector<Atom> sorted = atoms;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
}

TEST_CASE("rendering is canonical for each term shape") {
  CHECK(render(c("mary")) == "mary");
  CHECK(render(Term::make_flat(3)) == "p3");
  Term s = Term::make_skolem("r4", "Y", {c("f")});
  CHECK(render(s) == "s(r4,\"Y\",f)");
  Term nested = Term::make_skolem("r9", "Y", {s, c("m")});
  CHECK(render(nested) == "s(r9,\"Y\",s(r4,\"Y\",f),m)");
  CHECK(render(Atom{"is", {s, c("dead")}}) == "is(s(r4,\"Y\",f),dead)");
  CHECK(render(Atom{"halt", {}}) == "halt");
}

TEST_CASE("term depth counts invented nesting only") {
  CHECK(term_depth(c("a")) == 0);
  CHECK(term_depth(Term::make_flat(7)) == 0);
  Term s1 = Term::make_skolem("r4", "Y", {c("a")});
  CHECK(term_depth(s1) == 1);
  CHECK(term_depth(Term::make_skolem("r9", "Y", {s1, c("b")})) == 2);
}

TEST_CASE("same-origin nesting counts one origin along paths") {
  Term s1 = Term::make_skolem("r1", "C", {c("a")});
  Term s2 = Term::make_skolem("r1", "C", {s1});
  Term other = Term::make_skolem("r2", "D", {s2});
  CHECK(same_origin_nesting(c("a"), "r1", "C") == 0);
  CHECK(same_origin_nesting(s1, "r1", "C") == 1);
  CHECK(same_origin_nesting(s2, "r1", "C") == 2);
  CHECK(same_origin_nesting(other, "r1", "C") == 2);
  CHECK(same_origin_nesting(s2, "r1", "D") == 0);
  CHECK(same_origin_nesting(s2, "r2", "C") == 0);
}

TEST_CASE("eq relation stores normalized symmetric pairs") {
  EqRelation eq;
  CHECK(eq.empty());
  eq.relate(c("b"), c("a"));
  CHECK(eq.related(c("a"), c("b")));
  CHECK(eq.related(c("b"), c("a")));
  CHECK_FALSE(eq.related(c("a"), c("c")));
  CHECK(eq.pair_count() == 1);
  eq.relate(c("a"), c("b"));
  CHECK(eq.pair_count() == 1);
  CHECK(eq.pairs().begin()->first < eq.pairs().begin()->second);
}

TEST_CASE("transitive closure and transitivity detection") {
  EqRelation eq;
  eq.relate(c("a"), c("b"));
  eq.relate(c("b"), c("d"));
  CHECK_FALSE(eq.is_transitive());
  EqRelation closed = eq.transitive_closure();
  CHECK(closed.is_transitive());
  CHECK(closed.related(c("a"), c("d")));
  CHECK(closed.pair_count() == 3);

  auto classes = closed.classes();
  REQUIRE(classes.size() == 1);
  CHECK(classes[0] == std::vector<Term>{c("a"), c("b"), c("d")});
}

TEST_CASE("closure of random relations is idempotent and minimal") {
  std::mt19937_64 rng(7);
  std::vector<Term> pool;
  for (char ch = 'a'; ch <= 'f'; ++ch) pool.push_back(c(std::string(1, ch)));
  for (int round = 0; round < 50; ++round) {
    EqRelation eq;
    int pairs = std::uniform_int_distribution<int>(0, 8)(rng);
    for (int i = 0; i < pairs; ++i) {
      int x = std::uniform_int_distribution<int>(0, 5)(rng);
      int y = std::uniform_int_distribution<int>(0, 5)(rng);
      if (x != y) eq.relate(pool[x], pool[y]);
    }
    EqRelation closed = eq.transitive_closure();
    CHECK(closed.is_transitive());
    CHECK(closed.transitive_closure().pairs() == closed.pairs());
    for (const auto& [a, b] : eq.pairs()) CHECK(closed.related(a, b));
    // Minimality: every closure pair is connected in the original relation.
    for (const auto& [a, b] : closed.pairs()) {
      std::set<Term> reached = {a};
      bool grew = true;
      while (grew) {
        grew = false;
        for (const auto& [x, y] : eq.pairs()) {
          if (reached.count(x) && reached.insert(y).second) grew = true;
          if (reached.count(y) && reached.insert(x).second) grew = true;
        }
      }
      CHECK(reached.count(b));
    }
  }
}

TEST_CASE("unifiability under eq needs matching shape and related slots") {
  EqRelation eq;
  eq.relate(c("m"), c("s"));
  Atom a{"name", {c("m"), c("mary")}};
  Atom b{"name", {c("s"), c("mary")}};
  Atom d{"name", {c("f"), c("mary")}};
  Atom other{"inst", {c("m"), c("mary")}};
  CHECK(unifiable_under_eq(a, b, eq));
  CHECK(unifiable_under_eq(a, a, eq));
  CHECK_FALSE(unifiable_under_eq(a, d, eq));
  CHECK_FALSE(unifiable_under_eq(a, other, eq));
  CHECK_FALSE(unifiable_under_eq(a, Atom{"name", {c("m")}}, eq));
}
