#include <horn/objectives.hpp>

#include <algorithm>
#include <deque>

namespace horn {

long long eval_card(const Solution& sol) {
  return static_cast<long long>(sol.abduced.size());
}

namespace {

// Downward step edges of a solution: inferred head -> each used body atom,
// factored atom -> factoring target.
std::map<Atom, std::vector<Atom>> step_edges(const AbductionInstance& instance,
                                             const Solution& sol) {
  std::map<Atom, std::vector<Atom>> edges;
  for (const auto& [head, choice] : sol.inferred) {
    std::vector<Atom> bodies = inference_bodies(instance, head, choice);
    auto& out = edges[head];
    out.insert(out.end(), bodies.begin(), bodies.end());
  }
  for (const auto& [from, to] : sol.factored) edges[from].push_back(to);
  return edges;
}

}  // namespace

std::map<Atom, std::set<Atom>> reachable_from_goals(
    const AbductionInstance& instance, const Solution& sol) {
  auto edges = step_edges(instance, sol);
  std::map<Atom, std::set<Atom>> reached_by;
  for (const Atom& g : instance.goal) {
    std::deque<Atom> queue{g};
    std::set<Atom> seen{g};
    while (!queue.empty()) {
      Atom cur = queue.front();
      queue.pop_front();
      reached_by[cur].insert(g);
      auto it = edges.find(cur);
      if (it == edges.end()) continue;
      for (const Atom& next : it->second)
        if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return reached_by;
}

long long eval_coherence(const AbductionInstance& instance,
                         const Solution& sol) {
  auto reached_by = reachable_from_goals(instance, sol);
  std::vector<Atom> goals(instance.goal.begin(), instance.goal.end());
  std::sort(goals.begin(), goals.end());
  long long disconnected = 0;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    for (std::size_t k = i + 1; k < goals.size(); ++k) {
      bool connected = false;
      for (const auto& [atom, goals_here] : reached_by) {
        if (goals_here.count(goals[i]) && goals_here.count(goals[k])) {
          connected = true;
          break;
        }
      }
      if (!connected) ++disconnected;
    }
  }
  return disconnected;
}

CostSet propagate_pcost(const AbductionInstance& instance, const Solution& sol) {
  // Cost flows along: inferred head -> body (scaled per body weight) and
  // factored atom -> target (copied). Kahn order over those edges; a cycle
  // means the recursion is not well founded.
  struct CostEdge {
    Atom to;
    bool scaled;     // true: inference step with weight w; false: copy
    Rational weight;
  };
  std::map<Atom, std::vector<CostEdge>> out_edges;
  std::map<Atom, int> in_degree;
  for (const Atom& atom : sol.true_atoms) in_degree[atom] = 0;

  for (const auto& [head, choice] : sol.inferred) {
    const AxiomSchema* ax = find_axiom(instance, choice.axiom_id);
    std::vector<Atom> bodies = inference_bodies(instance, head, choice);
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      out_edges[head].push_back({bodies[i], true, ax->weights[i]});
      ++in_degree[bodies[i]];
    }
  }
  for (const auto& [from, to] : sol.factored) {
    out_edges[from].push_back({to, false, Rational()});
    ++in_degree[to];
  }

  std::set<Atom> goal_atoms(instance.goal.begin(), instance.goal.end());
  CostSet costs;
  for (const Atom& atom : sol.true_atoms) {
    if (goal_atoms.count(atom)) costs[atom].insert(instance.initial_cost(atom));
  }

  std::set<Atom> ready;
  for (const auto& [atom, deg] : in_degree)
    if (deg == 0) ready.insert(atom);

  std::size_t processed = 0;
  while (!ready.empty()) {
    Atom atom = *ready.begin();
    ready.erase(ready.begin());
    ++processed;
    auto it = out_edges.find(atom);
    if (it != out_edges.end()) {
      for (const CostEdge& edge : it->second) {
        for (long long c : costs[atom]) {
          long long v = edge.scaled ? std::max(1LL, scale_trunc(c, edge.weight))
                                    : c;
          costs[edge.to].insert(v);
        }
        if (--in_degree[edge.to] == 0) ready.insert(edge.to);
      }
    }
  }
  if (processed != in_degree.size())
    throw HornError(ErrorCode::CycleDetected,
                    "cost propagation steps form a cycle");
  return costs;
}

long long eval_wa(const AbductionInstance& instance, const Solution& sol) {
  CostSet costs = propagate_pcost(instance, sol);
  long long total = 0;
  for (const Atom& atom : sol.abduced) {
    auto it = costs.find(atom);
    if (it == costs.end() || it->second.empty()) {
      // An assumed atom no step reaches keeps its intrinsic cost.
      total += instance.initial_cost(atom);
    } else {
      total += *it->second.begin();
    }
  }
  return total;
}

long long eval_objective(const AbductionInstance& instance, const Solution& sol,
                         Objective objective) {
  switch (objective) {
    case Objective::Card:
      return eval_card(sol);
    case Objective::Coherence:
      return eval_coherence(instance, sol);
    case Objective::WeightedAbduction:
      return eval_wa(instance, sol);
  }
  return 0;
}

}  // namespace horn
