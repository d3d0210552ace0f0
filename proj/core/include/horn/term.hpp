#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace horn {

// A ground term. Three shapes exist:
//   Const      - a plain constant symbol, e.g. `mary`
//   Skolem     - a structured invented term s(axiom,"Var",args...), recording
//                which axiom/variable invented it and the head binding it saw
//   FlatSkolem - an opaque invented constant p<k> that stands bijectively for
//                one structured invented term
struct Term {
  enum class Kind : std::uint8_t { Const = 0, FlatSkolem = 1, Skolem = 2 };

  Kind kind = Kind::Const;
  std::string name;        // Const: the symbol; Skolem: the variable name
  std::string axiom_id;    // Skolem only
  int flat_index = 0;      // FlatSkolem only
  std::vector<Term> args;  // Skolem only

  static Term make_const(std::string name);
  static Term make_flat(int index);
  static Term make_skolem(std::string axiom_id, std::string var_name,
                          std::vector<Term> args);
};

// Total structural order: Const < FlatSkolem < Skolem; constants by name,
// flat terms by index, structured terms by (axiom, variable, args).
int compare(const Term& a, const Term& b);
bool operator==(const Term& a, const Term& b);
bool operator!=(const Term& a, const Term& b);
bool operator<(const Term& a, const Term& b);

struct Atom {
  std::string predicate;
  std::vector<Term> args;
};

// Total order on ground atoms: predicate name lexicographically, then
// arguments pairwise (shorter argument lists first on a tie).
int compare(const Atom& a, const Atom& b);
bool operator==(const Atom& a, const Atom& b);
bool operator!=(const Atom& a, const Atom& b);
bool operator<(const Atom& a, const Atom& b);

// Canonical renderings: `pred(t1,...,tn)`, skolems as `s(r4,"Y",f)`,
// flat skolems as `p3`. Arity-0 atoms render as the bare predicate.
std::string render(const Term& t);
std::string render(const Atom& a);

// Nesting depth of invented structure: constants and flat terms are 0,
// a structured term is 1 + the maximum depth of its arguments.
int term_depth(const Term& t);

// Maximum number of invented terms with the given (axiom, variable) origin
// on any root-to-leaf path inside t.
int same_origin_nesting(const Term& t, const std::string& axiom_id,
                        const std::string& var_name);

// A symmetric reflexive relation on terms, stored as unordered pairs.
// It is not forced to be transitive so that candidate relations (and broken
// ones) can be represented, checked, and closed explicitly.
class EqRelation {
 public:
  void relate(const Term& a, const Term& b);
  bool related(const Term& a, const Term& b) const;
  bool empty() const { return pairs_.empty(); }
  std::size_t pair_count() const { return pairs_.size(); }

  // Normalized pairs: first < second.
  const std::set<std::pair<Term, Term>>& pairs() const { return pairs_; }

  bool is_transitive() const;
  EqRelation transitive_closure() const;

  // Equivalence classes of size >= 2 induced by the stored pairs, each class
  // sorted, classes ordered by their smallest member. (Meaningful for
  // transitive relations; otherwise returns the connected components.)
  std::vector<std::vector<Term>> classes() const;

  // Every term mentioned in some pair.
  std::set<Term> mentioned() const;

 private:
  std::set<std::pair<Term, Term>> pairs_;
};

// True when both atoms share predicate and arity and every argument pair is
// equal or related under eq.
bool unifiable_under_eq(const Atom& a, const Atom& b, const EqRelation& eq);

}  // namespace horn
