#include "candidate_eval.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace horn::internal {

namespace {

bool atoms_pairable(const Atom& a, const Atom& b, const RelatedFn& related) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i] == b.args[i]) continue;
    if (!related(a.args[i], b.args[i])) return false;
  }
  return true;
}

}  // namespace

FactorOutcome cluster_factoring(const std::set<Atom>& fa,
                                const RelatedFn& related) {
  std::vector<Atom> atoms(fa.begin(), fa.end());
  // cluster_pairs[i] lists the j < i whose atom pairs up with atom i.
  std::vector<std::vector<std::size_t>> mates(atoms.size());
  std::vector<bool> has_smaller_mate(atoms.size(), false);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (atoms_pairable(atoms[i], atoms[j], related)) {
        mates[i].push_back(j);
        has_smaller_mate[i] = true;
      }
    }
  }
  FactorOutcome out;
  std::set<Atom> factored;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j : mates[i]) {
      if (!has_smaller_mate[j]) {
        out.factor_via.emplace_back(atoms[i], atoms[j]);
        factored.insert(atoms[i]);
      }
    }
  }
  for (const Atom& a : atoms) {
    if (!factored.count(a)) out.abduced.insert(a);
  }
  return out;
}

namespace {

long long coherence_value(const StructureInfo& s, const FactorOutcome& f) {
  // Forward edges: inferred head to its bodies, factored atom to its target.
  std::map<Atom, std::vector<Atom>> next;
  for (const auto& [head, body] : s.bodies) {
    for (const Atom& b : body) next[head].push_back(b);
  }
  for (const auto& [from, to] : f.factor_via) next[from].push_back(to);

  std::vector<Atom> goals;
  for (const Atom& g : s.instance->goal) {
    if (s.true_atoms.count(g)) goals.push_back(g);
  }
  std::sort(goals.begin(), goals.end());
  goals.erase(std::unique(goals.begin(), goals.end()), goals.end());

  std::map<Atom, std::set<std::size_t>> reached_by;
  for (std::size_t gi = 0; gi < goals.size(); ++gi) {
    std::deque<Atom> queue{goals[gi]};
    std::set<Atom> seen{goals[gi]};
    while (!queue.empty()) {
      Atom cur = queue.front();
      queue.pop_front();
      reached_by[cur].insert(gi);
      auto it = next.find(cur);
      if (it == next.end()) continue;
      for (const Atom& n : it->second) {
        if (seen.insert(n).second) queue.push_back(n);
      }
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> connected;
  for (const auto& [atom, set] : reached_by) {
    (void)atom;
    for (std::size_t a : set) {
      for (std::size_t b : set) {
        if (a < b) connected.insert({a, b});
      }
    }
  }
  long long total = static_cast<long long>(goals.size() * (goals.size() - 1) / 2);
  return total - static_cast<long long>(connected.size());
}

std::optional<long long> weighted_value(const StructureInfo& s,
                                        const FactorOutcome& f) {
  struct CostEdge {
    Atom to;
    bool scaled;
    Rational weight;
  };
  std::map<Atom, std::vector<CostEdge>> out_edges;
  std::map<Atom, std::size_t> in_degree;
  for (const Atom& a : s.true_atoms) in_degree[a] = 0;
  for (const auto& [head, body] : s.bodies) {
    const AxiomSchema* ax = s.axiom_of.at(head);
    for (std::size_t i = 0; i < body.size(); ++i) {
      out_edges[head].push_back({body[i], true, ax->weights[i]});
      ++in_degree[body[i]];
    }
  }
  for (const auto& [from, to] : f.factor_via) {
    out_edges[from].push_back({to, false, Rational()});
    ++in_degree[to];
  }

  std::map<Atom, std::set<long long>> costs;
  std::set<Atom> ready;
  for (const auto& [atom, deg] : in_degree) {
    if (deg == 0) ready.insert(atom);
  }
  std::map<Atom, std::size_t> remaining = in_degree;
  for (const Atom& g : s.instance->goal) {
    if (s.true_atoms.count(g)) costs[g].insert(s.instance->initial_cost(g));
  }
  std::size_t processed = 0;
  while (!ready.empty()) {
    Atom cur = *ready.begin();
    ready.erase(ready.begin());
    ++processed;
    auto eit = out_edges.find(cur);
    if (eit != out_edges.end()) {
      for (const CostEdge& e : eit->second) {
        for (long long c : costs[cur]) {
          long long v = e.scaled ? std::max(1LL, scale_trunc(c, e.weight)) : c;
          costs[e.to].insert(v);
        }
        if (--remaining[e.to] == 0) ready.insert(e.to);
      }
    }
  }
  if (processed != in_degree.size()) return std::nullopt;

  long long total = 0;
  for (const Atom& a : f.abduced) {
    const std::set<long long>& set = costs[a];
    total += set.empty() ? s.instance->initial_cost(a) : *set.begin();
  }
  return total;
}

}  // namespace

std::optional<long long> evaluate_candidate(const StructureInfo& s,
                                            const FactorOutcome& f,
                                            Objective objective) {
  switch (objective) {
    case Objective::Card:
      return static_cast<long long>(f.abduced.size());
    case Objective::Coherence:
      return coherence_value(s, f);
    case Objective::WeightedAbduction:
      return weighted_value(s, f);
  }
  return std::nullopt;
}

namespace {

// One nogood pattern, matched against abduced atoms with every occurrence of
// a shared variable joined through the relation view.
bool nogood_matches(const AbductionInstance& instance,
                    const std::set<Atom>& abduced, const RelatedFn& related,
                    const NogoodPattern& pattern, std::string* description) {
  std::vector<Atom> abduced_vec(abduced.begin(), abduced.end());
  std::vector<const Atom*> chosen(pattern.atoms.size(), nullptr);
  std::map<std::string, std::vector<Term>> var_terms;

  std::function<bool(std::size_t)> fill = [&](std::size_t idx) -> bool {
    if (idx == pattern.atoms.size()) return true;
    const AtomPattern& pat = pattern.atoms[idx];
    for (const Atom& cand : abduced_vec) {
      if (cand.predicate != pat.predicate ||
          cand.args.size() != pat.args.size())
        continue;
      bool const_ok = true;
      for (std::size_t i = 0; i < pat.args.size(); ++i) {
        if (!pat.args[i].is_var &&
            cand.args[i] != Term::make_const(pat.args[i].name)) {
          const_ok = false;
          break;
        }
      }
      if (!const_ok) continue;
      std::vector<std::pair<std::string, Term>> added;
      bool join_ok = true;
      for (std::size_t i = 0; i < pat.args.size() && join_ok; ++i) {
        if (!pat.args[i].is_var) continue;
        const std::string& var = pat.args[i].name;
        for (const Term& prev : var_terms[var]) {
          if (prev != cand.args[i] && !related(prev, cand.args[i])) {
            join_ok = false;
            break;
          }
        }
        if (join_ok) {
          var_terms[var].push_back(cand.args[i]);
          added.emplace_back(var, cand.args[i]);
        }
      }
      if (join_ok) {
        chosen[idx] = &cand;
        if (fill(idx + 1)) return true;
        chosen[idx] = nullptr;
      }
      for (auto it = added.rbegin(); it != added.rend(); ++it) {
        var_terms[it->first].pop_back();
      }
    }
    return false;
  };

  (void)instance;
  if (!fill(0)) return false;
  if (description) {
    std::ostringstream os;
    os << "nogood violated:";
    for (const Atom* a : chosen) os << " " << render(*a);
    *description = os.str();
  }
  return true;
}

}  // namespace

std::vector<Violation> check_constraints_pieces(
    const AbductionInstance& instance, const std::set<Atom>& true_atoms,
    const std::set<Atom>& abduced, const RelatedFn& related) {
  std::vector<Violation> out;
  for (const NogoodPattern& ng : instance.nogoods) {
    std::string description;
    if (nogood_matches(instance, abduced, related, ng, &description)) {
      out.push_back({description});
    }
  }
  for (const UniqueSlot& slot : instance.unique_slots) {
    std::vector<Atom> candidates;
    for (const Atom& a : true_atoms) {
      if (a.predicate == slot.predicate && a.args.size() == static_cast<std::size_t>(slot.arity()))
        candidates.push_back(a);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      for (std::size_t j = i + 1; j < candidates.size(); ++j) {
        const Atom& a = candidates[i];
        const Atom& b = candidates[j];
        bool keys_eq = true;
        for (std::size_t k : slot.key_positions) {
          if (a.args[k] != b.args[k] && !related(a.args[k], b.args[k])) {
            keys_eq = false;
            break;
          }
        }
        if (!keys_eq) continue;
        for (std::size_t v : slot.value_positions) {
          if (a.args[v] != b.args[v] && !related(a.args[v], b.args[v])) {
            std::ostringstream os;
            os << "unique slot violated: " << render(a) << " and " << render(b)
               << " agree on keys but differ at position " << v;
            out.push_back({os.str()});
            break;
          }
        }
      }
    }
  }
  return out;
}

namespace {

bool is_sort_const(const AbductionInstance& instance, const Term& t) {
  return t.kind == Term::Kind::Const && instance.sort_names.count(t.name) > 0;
}

void add_pair(std::set<std::pair<Term, Term>>& scope,
              const AbductionInstance& instance, const Term& a,
              const Term& b) {
  if (a == b) return;
  if (is_sort_const(instance, a) || is_sort_const(instance, b)) return;
  if (a < b)
    scope.insert({a, b});
  else
    scope.insert({b, a});
}

}  // namespace

std::set<std::pair<Term, Term>> eq_decision_scope(
    const AbductionInstance& instance, const std::set<Atom>& pot) {
  std::set<std::pair<Term, Term>> scope;
  std::vector<Atom> atoms(pot.begin(), pot.end());

  // Argument pairs of atom pairs that could unify: same predicate and arity,
  // and no position pits a sort name against a different term.
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const Atom& a = atoms[i];
      const Atom& b = atoms[j];
      if (a.predicate != b.predicate || a.args.size() != b.args.size())
        continue;
      bool compatible = true;
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        if (a.args[k] == b.args[k]) continue;
        if (is_sort_const(instance, a.args[k]) ||
            is_sort_const(instance, b.args[k])) {
          compatible = false;
          break;
        }
      }
      if (!compatible) continue;
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        add_pair(scope, instance, a.args[k], b.args[k]);
      }
    }
  }

  // Pairs joinable through a shared nogood variable: every pair of slots the
  // variable occupies links the terms found at those slots.
  for (const NogoodPattern& ng : instance.nogoods) {
    std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>>
        slots;
    for (std::size_t ai = 0; ai < ng.atoms.size(); ++ai) {
      for (std::size_t pi = 0; pi < ng.atoms[ai].args.size(); ++pi) {
        if (ng.atoms[ai].args[pi].is_var)
          slots[ng.atoms[ai].args[pi].name].emplace_back(ai, pi);
      }
    }
    auto slot_terms = [&](std::pair<std::size_t, std::size_t> slot) {
      std::vector<Term> terms;
      const AtomPattern& pat = ng.atoms[slot.first];
      for (const Atom& a : atoms) {
        if (a.predicate == pat.predicate && a.args.size() == pat.args.size())
          terms.push_back(a.args[slot.second]);
      }
      return terms;
    };
    for (const auto& [var, positions] : slots) {
      (void)var;
      if (positions.size() < 2) continue;
      for (std::size_t x = 0; x < positions.size(); ++x) {
        for (std::size_t y = x + 1; y < positions.size(); ++y) {
          for (const Term& u : slot_terms(positions[x])) {
            for (const Term& v : slot_terms(positions[y])) {
              add_pair(scope, instance, u, v);
            }
          }
        }
      }
    }
  }

  // Key and value position pairs of unique slots.
  for (const UniqueSlot& slot : instance.unique_slots) {
    std::vector<const Atom*> candidates;
    for (const Atom& a : atoms) {
      if (a.predicate == slot.predicate && a.args.size() == static_cast<std::size_t>(slot.arity()))
        candidates.push_back(&a);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      for (std::size_t j = i + 1; j < candidates.size(); ++j) {
        for (std::size_t k : slot.key_positions) {
          add_pair(scope, instance, candidates[i]->args[k],
                   candidates[j]->args[k]);
        }
        for (std::size_t v : slot.value_positions) {
          add_pair(scope, instance, candidates[i]->args[v],
                   candidates[j]->args[v]);
        }
      }
    }
  }
  return scope;
}

bool inference_edges_acyclic(const StructureInfo& s) {
  std::map<Atom, std::vector<Atom>> up;  // body -> heads it supports
  for (const auto& [head, body] : s.bodies) {
    for (const Atom& b : body) up[b].push_back(head);
  }
  std::map<Atom, int> state;  // 0 fresh, 1 active, 2 done
  std::function<bool(const Atom&)> dfs = [&](const Atom& a) -> bool {
    int& st = state[a];
    if (st == 1) return false;
    if (st == 2) return true;
    st = 1;
    auto it = up.find(a);
    if (it != up.end()) {
      for (const Atom& h : it->second) {
        if (!dfs(h)) return false;
      }
    }
    st = 2;
    return true;
  };
  for (const auto& [head, body] : s.bodies) {
    (void)body;
    if (!dfs(head)) return false;
  }
  return true;
}

}  // namespace horn::internal
