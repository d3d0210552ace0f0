#include <horn/instance.hpp>

#include <algorithm>
#include <numeric>

namespace horn {

Rational::Rational(long long n, long long d) {
  if (d == 0) throw HornError(ErrorCode::InvalidArgument, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g == 0) g = 1;
  num = n / g;
  den = d / g;
}

long long scale_trunc(long long value, const Rational& w) {
  return value * w.num / w.den;
}

void AxiomSchema::finalize() {
  if (body.empty())
    throw HornError(ErrorCode::SemanticError,
                    "axiom " + id + " needs at least one body atom");
  head_vars.clear();
  existential_vars.clear();
  std::set<std::string> seen;
  for (const PatTerm& t : head.args) {
    if (t.is_var && seen.insert(t.name).second) head_vars.push_back(t.name);
  }
  std::set<std::string> body_vars;
  for (const AtomPattern& b : body) {
    for (const PatTerm& t : b.args) {
      if (!t.is_var) continue;
      if (body_vars.insert(t.name).second && !seen.count(t.name))
        existential_vars.push_back(t.name);
    }
  }
  for (const std::string& v : head_vars) {
    if (!body_vars.count(v))
      throw HornError(ErrorCode::SemanticError,
                      "axiom " + id + ": head variable " + v +
                          " does not occur in the body");
  }
  if (weights.empty()) {
    // Default: a total multiplier of 6/5 split evenly over the body atoms.
    weights.assign(body.size(),
                   Rational(6, 5 * static_cast<long long>(body.size())));
  }
  if (weights.size() != body.size())
    throw HornError(ErrorCode::SemanticError,
                    "axiom " + id + ": weight count does not match body size");
}

long long AbductionInstance::initial_cost(const Atom& a) const {
  auto it = initial_costs.find(a);
  return it == initial_costs.end() ? kDefaultInitialCost : it->second;
}

int AbductionInstance::max_arity() const {
  std::size_t m = 0;
  for (const Atom& g : goal) m = std::max(m, g.args.size());
  for (const AxiomSchema& ax : axioms) {
    m = std::max(m, ax.head.args.size());
    for (const AtomPattern& b : ax.body) m = std::max(m, b.args.size());
  }
  for (const NogoodPattern& n : nogoods)
    for (const AtomPattern& a : n.atoms) m = std::max(m, a.args.size());
  for (const UniqueSlot& u : unique_slots)
    m = std::max(m, static_cast<std::size_t>(u.arity()));
  return static_cast<int>(m);
}

bool partition_ok(const Solution& sol) {
  std::size_t total =
      sol.inferred.size() + sol.factored.size() + sol.abduced.size();
  if (total != sol.true_atoms.size()) return false;
  for (const auto& [atom, choice] : sol.inferred) {
    if (!sol.true_atoms.count(atom)) return false;
    if (sol.factored.count(atom) || sol.abduced.count(atom)) return false;
  }
  for (const auto& [atom, target] : sol.factored) {
    if (!sol.true_atoms.count(atom)) return false;
    if (sol.abduced.count(atom)) return false;
  }
  for (const Atom& atom : sol.abduced) {
    if (!sol.true_atoms.count(atom)) return false;
  }
  return true;
}

std::optional<std::map<std::string, Term>> match_head(const AtomPattern& pat,
                                                      const Atom& atom) {
  if (pat.predicate != atom.predicate || pat.args.size() != atom.args.size())
    return std::nullopt;
  std::map<std::string, Term> binding;
  for (std::size_t i = 0; i < pat.args.size(); ++i) {
    const PatTerm& p = pat.args[i];
    const Term& t = atom.args[i];
    if (!p.is_var) {
      if (t.kind != Term::Kind::Const || t.name != p.name) return std::nullopt;
      continue;
    }
    auto [it, inserted] = binding.emplace(p.name, t);
    if (!inserted && it->second != t) return std::nullopt;
  }
  return binding;
}

Atom substitute(const AtomPattern& pat,
                const std::map<std::string, Term>& binding) {
  Atom out;
  out.predicate = pat.predicate;
  out.args.reserve(pat.args.size());
  for (const PatTerm& p : pat.args) {
    if (!p.is_var) {
      out.args.push_back(Term::make_const(p.name));
      continue;
    }
    auto it = binding.find(p.name);
    if (it == binding.end())
      throw HornError(ErrorCode::InvalidArgument,
                      "unbound variable " + p.name + " in substitution");
    out.args.push_back(it->second);
  }
  return out;
}

const AxiomSchema* find_axiom(const AbductionInstance& instance,
                              const std::string& id) {
  for (const AxiomSchema& ax : instance.axioms)
    if (ax.id == id) return &ax;
  return nullptr;
}

std::vector<Atom> inference_bodies(const AbductionInstance& instance,
                                   const Atom& head,
                                   const InferenceChoice& choice) {
  const AxiomSchema* ax = find_axiom(instance, choice.axiom_id);
  if (!ax)
    throw HornError(ErrorCode::SemanticError,
                    "unknown axiom " + choice.axiom_id);
  auto binding = match_head(ax->head, head);
  if (!binding)
    throw HornError(ErrorCode::SemanticError,
                    "atom " + render(head) + " does not match the head of " +
                        choice.axiom_id);
  if (choice.skolem_args.size() != ax->existential_vars.size())
    throw HornError(ErrorCode::SemanticError,
                    "witness count mismatch for axiom " + choice.axiom_id);
  for (std::size_t i = 0; i < ax->existential_vars.size(); ++i)
    (*binding)[ax->existential_vars[i]] = choice.skolem_args[i];
  std::vector<Atom> bodies;
  bodies.reserve(ax->body.size());
  for (const AtomPattern& b : ax->body) bodies.push_back(substitute(b, *binding));
  return bodies;
}

}  // namespace horn
