#pragma once

#include <horn/instance.hpp>

#include <map>
#include <set>

namespace horn {

enum class Objective { Card, Coherence, WeightedAbduction };

// Number of abduced atoms.
long long eval_card(const Solution& sol);

// For every atom reached from some goal along used inference steps
// (head to each body) and factoring steps (factored atom to its target),
// the set of goals that reach it. Goals reach themselves.
std::map<Atom, std::set<Atom>> reachable_from_goals(
    const AbductionInstance& instance, const Solution& sol);

// Number of unordered goal pairs with no commonly reachable atom.
long long eval_coherence(const AbductionInstance& instance, const Solution& sol);

using CostSet = std::map<Atom, std::set<long long>>;

// Propagate cost sets from the goals through the used steps: a goal starts
// with its initial cost; an inference gives each body atom
// max(1, trunc(c * w_i)) for every c in the head's set; factoring adds the
// factored atom's whole set to its target. Throws CycleDetected when the
// used steps do not admit a propagation order.
CostSet propagate_pcost(const AbductionInstance& instance, const Solution& sol);

// Sum over abduced atoms of the minimum of their cost set.
long long eval_wa(const AbductionInstance& instance, const Solution& sol);

long long eval_objective(const AbductionInstance& instance, const Solution& sol,
                         Objective objective);

}  // namespace horn
