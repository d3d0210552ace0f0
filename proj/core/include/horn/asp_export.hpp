#pragma once

#include <horn/instance.hpp>
#include <horn/objectives.hpp>

#include <string>

namespace horn {

// Which factoring machinery the emitted program uses. Fwda is the forward
// variant and only combines with the cardinality objective module.
enum class EncodingVariant { Bwdg, Bwdai, Bwda, Fwda };

// Instance facts: goal/1 in c-term form, sortname/1, numberofbodies/2.
std::string emit_facts(const AbductionInstance& instance);

// Per-axiom rewriting: mayInferVia/inferenceNeeds rules (backward variants)
// or infer/pot rules (Fwda), with structured witness assignments.
std::string emit_axiom_rules(const AbductionInstance& instance,
                             EncodingVariant variant);

// The variant's fixed rule set. Argument-extraction and factoring rules are
// emitted once per predicate arity from 1 to max_arity.
std::string emit_encoding(EncodingVariant variant, int max_arity = 2);

// Weak-constraint module for the objective. The weighted module assumes the
// uniform cost model: every goal seeds 100 and every axiom splits factor 6/5
// evenly over its body.
std::string emit_objective(Objective objective);

// One constraint per assumption nogood and per unique-slot value position.
std::string emit_global_constraints(const AbductionInstance& instance);

}  // namespace horn
