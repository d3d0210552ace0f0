#include <horn/parser.hpp>
#include <horn/solver.hpp>

#include "candidate_eval.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace horn {

namespace {

using internal::FactorOutcome;
using internal::StructureInfo;

std::string objective_label(Objective obj) {
  switch (obj) {
    case Objective::Card:
      return "card";
    case Objective::Coherence:
      return "coh";
    case Objective::WeightedAbduction:
      return "wa";
  }
  return "";
}

// Cost flow must be well founded: inferences push cost from head to body,
// factoring pushes it from the factored atom to its target.
bool cost_flow_acyclic(const StructureInfo& s, const FactorOutcome& f) {
  std::map<Atom, std::vector<Atom>> next;
  for (const auto& [head, bodies] : s.bodies) {
    for (const Atom& b : bodies) next[head].push_back(b);
  }
  for (const auto& [from, to] : f.factor_via) next[from].push_back(to);
  std::map<Atom, int> state;
  std::function<bool(const Atom&)> dfs = [&](const Atom& a) -> bool {
    int& st = state[a];
    if (st == 1) return false;
    if (st == 2) return true;
    st = 1;
    auto it = next.find(a);
    if (it != next.end()) {
      for (const Atom& n : it->second) {
        if (!dfs(n)) return false;
      }
    }
    st = 2;
    return true;
  };
  for (const Atom& a : s.true_atoms) {
    if (!dfs(a)) return false;
  }
  return true;
}

class Enumerator {
 public:
  Enumerator(const AbductionInstance& instance, const PotentialGraph& graph,
             Objective objective, FactoringMode mode, const OracleLimits& limits)
      : inst_(instance), obj_(objective), mode_(mode), limits_(limits) {
    if (static_cast<int>(graph.pot.size()) > limits.max_pot) {
      throw HornError(ErrorCode::LimitExceeded,
                      "potential graph too large for exhaustive search (" +
                          std::to_string(graph.pot.size()) + " atoms, limit " +
                          std::to_string(limits.max_pot) + ")");
    }
    for (const MayInferEntry& entry : graph.may_infer) {
      InferOption opt;
      opt.entry = &entry;
      opt.axiom = find_axiom(instance, entry.axiom_id);
      opt.bodies = inference_bodies(
          instance, entry.head,
          InferenceChoice{entry.axiom_id, entry.existential_binding});
      options_by_head_[entry.head].push_back(std::move(opt));
    }
  }

  OracleResult run() {
    for (const Atom& g : inst_.goal) {
      if (true_.insert(g).second) open_.insert(g);
    }
    structures();
    OracleResult result;
    result.feasible = !optima_.empty();
    result.optimal_cost = result.feasible ? best_cost_ : 0;
    for (auto& [key, sol] : optima_) {
      (void)key;
      result.optima.push_back(std::move(sol));
    }
    return result;
  }

 private:
  struct InferOption {
    const MayInferEntry* entry = nullptr;
    const AxiomSchema* axiom = nullptr;
    std::vector<Atom> bodies;
  };

  void structures() {
    if (open_.empty()) {
      complete_structure();
      return;
    }
    Atom pick = *open_.begin();
    open_.erase(open_.begin());
    auto oit = options_by_head_.find(pick);
    if (oit != options_by_head_.end()) {
      for (const InferOption& opt : oit->second) {
        inferred_[pick] = &opt;
        std::vector<Atom> added;
        for (const Atom& b : opt.bodies) {
          if (true_.insert(b).second) {
            added.push_back(b);
            open_.insert(b);
          }
        }
        structures();
        for (const Atom& b : added) {
          true_.erase(b);
          open_.erase(b);
        }
        inferred_.erase(pick);
      }
    }
    fa_.insert(pick);
    structures();
    fa_.erase(pick);
    open_.insert(pick);
  }

  void complete_structure() {
    StructureInfo s;
    s.instance = &inst_;
    s.true_atoms = true_;
    for (const auto& [head, opt] : inferred_) {
      s.inferred[head] = InferenceChoice{opt->entry->axiom_id,
                                         opt->entry->existential_binding};
      s.bodies[head] = opt->bodies;
      s.axiom_of[head] = opt->axiom;
    }
    s.fa = fa_;
    if (!internal::inference_edges_acyclic(s)) return;

    std::set<Term> term_set;
    for (const Atom& a : true_) {
      for (const Term& t : a.args) {
        if (t.kind == Term::Kind::Const && inst_.sort_names.count(t.name))
          continue;
        term_set.insert(t);
      }
    }
    if (static_cast<int>(term_set.size()) > limits_.max_eq_terms) {
      throw HornError(ErrorCode::LimitExceeded,
                      "too many terms for exhaustive equality enumeration (" +
                          std::to_string(term_set.size()) + ", limit " +
                          std::to_string(limits_.max_eq_terms) + ")");
    }
    std::vector<Term> terms(term_set.begin(), term_set.end());

    // Every partition of the terms, as a restricted growth string.
    std::vector<int> block(terms.size(), 0);
    std::function<void(std::size_t, int)> partitions = [&](std::size_t i,
                                                            int used) {
      if (i == terms.size()) {
        handle_partition(s, terms, block);
        return;
      }
      for (int b = 0; b <= used; ++b) {
        block[i] = b;
        partitions(i + 1, b == used ? used + 1 : used);
      }
    };
    if (terms.empty()) {
      handle_partition(s, terms, block);
    } else {
      partitions(0, 0);
    }
  }

  void handle_partition(const StructureInfo& s, const std::vector<Term>& terms,
                        const std::vector<int>& block) {
    EqRelation eq;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        if (block[i] == block[j]) eq.relate(terms[i], terms[j]);
      }
    }
    auto related = [&eq](const Term& a, const Term& b) {
      return eq.related(a, b);
    };

    if (mode_ == FactoringMode::Bwda) {
      FactorOutcome outcome = internal::cluster_factoring(s.fa, related);
      handle_candidate(s, eq, outcome);
      return;
    }

    // Free factoring: each non-inferred atom is either assumed or factored
    // onto any other true atom it unifies with.
    std::vector<Atom> fa_vec(s.fa.begin(), s.fa.end());
    std::vector<std::vector<const Atom*>> targets(fa_vec.size());
    for (std::size_t i = 0; i < fa_vec.size(); ++i) {
      for (const Atom& t : s.true_atoms) {
        if (t == fa_vec[i]) continue;
        if (unifiable_under_eq(fa_vec[i], t, eq)) targets[i].push_back(&t);
      }
    }
    FactorOutcome outcome;
    std::function<void(std::size_t)> assign = [&](std::size_t i) {
      if (i == fa_vec.size()) {
        // A factoring target must not itself be factored.
        std::set<Atom> factored;
        for (const auto& [from, to] : outcome.factor_via) {
          (void)to;
          factored.insert(from);
        }
        for (const auto& [from, to] : outcome.factor_via) {
          (void)from;
          if (factored.count(to)) return;
        }
        if (!cost_flow_acyclic(s, outcome)) return;
        handle_candidate(s, eq, outcome);
        return;
      }
      outcome.abduced.insert(fa_vec[i]);
      assign(i + 1);
      outcome.abduced.erase(fa_vec[i]);
      for (const Atom* t : targets[i]) {
        outcome.factor_via.emplace_back(fa_vec[i], *t);
        assign(i + 1);
        outcome.factor_via.pop_back();
      }
    };
    assign(0);
  }

  void handle_candidate(const StructureInfo& s, const EqRelation& eq,
                        const FactorOutcome& outcome) {
    auto related = [&eq](const Term& a, const Term& b) {
      return eq.related(a, b);
    };
    std::vector<Violation> violations = internal::check_constraints_pieces(
        inst_, s.true_atoms, outcome.abduced, related);
    if (!violations.empty()) return;
    std::optional<long long> cost =
        internal::evaluate_candidate(s, outcome, obj_);
    if (!cost) return;
    if (!optima_.empty() && *cost > best_cost_) return;

    Solution sol;
    sol.objective = objective_label(obj_);
    sol.true_atoms = s.true_atoms;
    sol.inferred = s.inferred;
    for (const auto& [from, to] : outcome.factor_via) {
      sol.factored.emplace(from, to);
    }
    sol.abduced = outcome.abduced;
    sol.eq = eq;
    sol.objective_value = *cost;
    std::string key = render_solution(sol);
    if (optima_.empty() || *cost < best_cost_) {
      best_cost_ = *cost;
      optima_.clear();
    }
    optima_.emplace(std::move(key), std::move(sol));
  }

  const AbductionInstance& inst_;
  Objective obj_;
  FactoringMode mode_;
  OracleLimits limits_;

  std::map<Atom, std::vector<InferOption>> options_by_head_;

  std::set<Atom> true_;
  std::set<Atom> open_;
  std::map<Atom, const InferOption*> inferred_;
  std::set<Atom> fa_;

  long long best_cost_ = 0;
  std::map<std::string, Solution> optima_;
};

}  // namespace

OracleResult brute_force(const AbductionInstance& instance,
                         const PotentialGraph& graph, Objective objective,
                         FactoringMode mode, const OracleLimits& limits) {
  Enumerator enumerator(instance, graph, objective, mode, limits);
  return enumerator.run();
}

}  // namespace horn
