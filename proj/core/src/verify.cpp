#include <horn/objectives.hpp>
#include <horn/solver.hpp>

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace horn {

namespace {

bool is_sort_const(const AbductionInstance& instance, const Term& t) {
  return t.kind == Term::Kind::Const && instance.sort_names.count(t.name) > 0;
}

}  // namespace

VerifyResult verify(const AbductionInstance& instance, const Solution& sol,
                    Objective objective) {
  VerifyResult result;
  std::vector<std::string>& reasons = result.reasons;

  if (!partition_ok(sol)) {
    reasons.push_back(
        "inferred, factored, and abduced parts do not partition the true "
        "atoms");
  }

  for (const Atom& g : instance.goal) {
    if (!sol.true_atoms.count(g)) {
      reasons.push_back("goal not true: " + render(g));
    }
  }

  if (!sol.eq.is_transitive()) {
    reasons.push_back("eq not transitive");
  }
  for (const auto& [a, b] : sol.eq.pairs()) {
    if (is_sort_const(instance, a) || is_sort_const(instance, b)) {
      reasons.push_back("sort name merged with another term: " + render(a) +
                        " ~ " + render(b));
    }
  }

  // Inference steps must fit their axiom schema with true bodies.
  std::map<Atom, std::vector<Atom>> bodies_of;
  for (const auto& [head, choice] : sol.inferred) {
    try {
      std::vector<Atom> bodies = inference_bodies(instance, head, choice);
      for (const Atom& b : bodies) {
        if (!sol.true_atoms.count(b)) {
          reasons.push_back("inference body not true: " + render(b) +
                            " needed by " + render(head));
        }
      }
      bodies_of.emplace(head, std::move(bodies));
    } catch (const HornError& e) {
      reasons.push_back("inference does not fit axiom " + choice.axiom_id +
                        ": " + render(head) + " (" + e.what() + ")");
    }
  }

  // Factoring steps: true target, not itself factored, unifiable under eq.
  for (const auto& [from, to] : sol.factored) {
    if (!sol.true_atoms.count(to)) {
      reasons.push_back("factoring target not true: " + render(to));
    }
    if (from == to) {
      reasons.push_back("atom factored onto itself: " + render(from));
    } else if (sol.factored.count(to)) {
      reasons.push_back("factoring target is itself factored: " + render(to));
    }
    if (!unifiable_under_eq(from, to, sol.eq)) {
      reasons.push_back("factored atom not unifiable with its target: " +
                        render(from) + " -> " + render(to));
    }
  }

  // The induced dependency relation (head to each body per inference,
  // factored atom to target per factoring) must be acyclic; it is the same
  // relation the cost propagation orders itself by.
  {
    std::map<Atom, std::vector<Atom>> next;
    for (const auto& [head, bodies] : bodies_of) {
      for (const Atom& b : bodies) next[head].push_back(b);
    }
    for (const auto& [from, to] : sol.factored) next[from].push_back(to);
    std::map<Atom, int> state;
    bool cyclic = false;
    std::function<void(const Atom&)> dfs = [&](const Atom& a) {
      int& st = state[a];
      if (st != 0 || cyclic) {
        if (st == 1) cyclic = true;
        return;
      }
      st = 1;
      auto it = next.find(a);
      if (it != next.end()) {
        for (const Atom& n : it->second) {
          int ns = state.count(n) ? state[n] : 0;
          if (ns == 1) {
            cyclic = true;
            return;
          }
          if (ns == 0) dfs(n);
          if (cyclic) return;
        }
      }
      st = 2;
    };
    for (const auto& [node, targets] : next) {
      (void)targets;
      if ((!state.count(node) || state[node] == 0) && !cyclic) dfs(node);
    }
    if (cyclic) reasons.push_back("proof edges form a cycle");
  }

  for (const Violation& v : check_global_constraints(sol, sol.eq, instance)) {
    reasons.push_back(v.description);
  }

  try {
    long long cost = eval_objective(instance, sol, objective);
    if (cost != sol.objective_value) {
      std::ostringstream os;
      os << "objective value mismatch: recomputed " << cost << ", recorded "
         << sol.objective_value;
      reasons.push_back(os.str());
    } else {
      result.cost = cost;
    }
  } catch (const HornError& e) {
    reasons.push_back(std::string("objective recomputation failed: ") +
                      e.what());
  }

  result.valid = reasons.empty();
  return result;
}

}  // namespace horn
