#include <horn/grounder.hpp>

#include <algorithm>
#include <deque>
#include <functional>

namespace horn {

namespace {

int compare_terms(const std::vector<Term>& a, const std::vector<Term>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (int c = compare(a[i], b[i])) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

}  // namespace

bool MayInferEntry::operator==(const MayInferEntry& o) const {
  return axiom_id == o.axiom_id && head == o.head &&
         existential_binding == o.existential_binding;
}

bool MayInferEntry::operator<(const MayInferEntry& o) const {
  if (axiom_id != o.axiom_id) return axiom_id < o.axiom_id;
  if (int c = compare(head, o.head)) return c < 0;
  return compare_terms(existential_binding, o.existential_binding) < 0;
}

bool NeedsEntry::operator==(const NeedsEntry& o) const {
  return head == o.head && axiom_id == o.axiom_id && body == o.body;
}

bool NeedsEntry::operator<(const NeedsEntry& o) const {
  if (int c = compare(head, o.head)) return c < 0;
  if (axiom_id != o.axiom_id) return axiom_id < o.axiom_id;
  return compare(body, o.body) < 0;
}

std::optional<Term> skolemize(const SkolemPolicy& policy,
                              const std::string& axiom_id,
                              const std::string& var_name,
                              const std::vector<Term>& head_args) {
  switch (policy.variant) {
    case SkolemPolicy::Variant::Unlimited:
      break;
    case SkolemPolicy::Variant::ParentDepth:
      for (const Term& arg : head_args)
        if (term_depth(arg) >= policy.depth) return std::nullopt;
      break;
    case SkolemPolicy::Variant::GenerationDepth:
      for (const Term& arg : head_args)
        if (same_origin_nesting(arg, axiom_id, var_name) >= policy.depth)
          return std::nullopt;
      break;
  }
  return Term::make_skolem(axiom_id, var_name, head_args);
}

namespace {

// Assigns flat stand-ins p1, p2, ... bijectively to structured inventions,
// in first-invention order, and expands them back for policy checks.
class FlatNamer {
 public:
  Term flat_for(const Term& structured) {
    auto it = index_of_.find(structured);
    if (it == index_of_.end()) {
      int id = next_++;
      it = index_of_.emplace(structured, id).first;
      structured_of_.emplace(id, structured);
    }
    return Term::make_flat(it->second);
  }

  Term expand(const Term& t) const {
    if (t.kind == Term::Kind::FlatSkolem) {
      auto it = structured_of_.find(t.flat_index);
      return it == structured_of_.end() ? t : it->second;
    }
    if (t.kind != Term::Kind::Skolem) return t;
    Term out = t;
    for (Term& arg : out.args) arg = expand(arg);
    return out;
  }

  const std::map<int, Term>& table() const { return structured_of_; }

 private:
  int next_ = 1;
  std::map<Term, int> index_of_;
  std::map<int, Term> structured_of_;
};

}  // namespace

PotentialGraph ground_potential_graph(const AbductionInstance& instance,
                                      const SkolemPolicy& policy,
                                      long long pot_limit) {
  PotentialGraph graph;
  FlatNamer namer;
  std::deque<Atom> queue;

  auto add_pot = [&](const Atom& atom) {
    if (!graph.pot.insert(atom).second) return;
    if (static_cast<long long>(graph.pot.size()) > pot_limit)
      throw HornError(ErrorCode::ResourceLimit,
                      "potential graph exceeds " + std::to_string(pot_limit) +
                          " atoms");
    queue.push_back(atom);
  };

  for (const Atom& g : instance.goal) add_pot(g);

  while (!queue.empty()) {
    Atom atom = queue.front();
    queue.pop_front();
    for (const AxiomSchema& ax : instance.axioms) {
      auto binding = match_head(ax.head, atom);
      if (!binding) continue;

      // Policy checks see fully structured argument values.
      std::vector<Term> expanded_args;
      expanded_args.reserve(ax.head_vars.size());
      for (const std::string& v : ax.head_vars)
        expanded_args.push_back(namer.expand(binding->at(v)));

      bool blocked = false;
      std::vector<Term> witnesses;
      for (const std::string& z : ax.existential_vars) {
        auto invented = skolemize(policy, ax.id, z, expanded_args);
        if (!invented) {
          blocked = true;  // one blocked witness cancels the whole instance
          break;
        }
        // A witness nested inside a witness of the same origin proves the
        // invention chain repeats forever: the same back-chaining sequence
        // applies verbatim to each deeper copy. Unlimited invention must
        // refuse such theories; depth-limited policies cut the chain.
        if (policy.variant == SkolemPolicy::Variant::Unlimited &&
            same_origin_nesting(*invented, ax.id, z) >= 2) {
          throw HornError(
              ErrorCode::CyclicTheory,
              "cyclic theory: axiom " + ax.id + " re-invents a witness for " +
                  z + " inside " + render(*invented) +
                  "; unlimited invention would not terminate");
        }
        Term value = policy.naming == SkolemPolicy::Naming::Flat
                         ? namer.flat_for(*invented)
                         : *invented;
        witnesses.push_back(value);
      }
      if (blocked) continue;

      for (std::size_t i = 0; i < ax.existential_vars.size(); ++i) {
        (*binding)[ax.existential_vars[i]] = witnesses[i];
        graph.invented_terms.insert(witnesses[i]);
      }
      graph.may_infer.insert({ax.id, atom, witnesses});
      for (const AtomPattern& b : ax.body) {
        Atom body_atom = substitute(b, *binding);
        graph.needs.insert({atom, ax.id, body_atom});
        add_pot(body_atom);
      }
    }
  }

  graph.skolem_count = static_cast<long long>(graph.invented_terms.size());
  if (policy.naming == SkolemPolicy::Naming::Flat)
    graph.flat_expansion = namer.table();
  return graph;
}

std::vector<std::vector<std::string>> detect_cycles(
    const AbductionInstance& instance) {
  // Tarjan over the head -> body predicate dependency graph.
  std::map<std::string, std::set<std::string>> edges;
  std::set<std::string> nodes;
  for (const AxiomSchema& ax : instance.axioms) {
    nodes.insert(ax.head.predicate);
    for (const AtomPattern& b : ax.body) {
      nodes.insert(b.predicate);
      edges[ax.head.predicate].insert(b.predicate);
    }
  }

  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  int counter = 0;
  std::vector<std::vector<std::string>> sccs;

  std::function<void(const std::string&)> strongconnect =
      [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const std::string& w : edges[v]) {
          if (!index.count(w)) {
            strongconnect(w);
            low[v] = std::min(low[v], low[w]);
          } else if (on_stack.count(w)) {
            low[v] = std::min(low[v], index[w]);
          }
        }
        if (low[v] == index[v]) {
          std::vector<std::string> component;
          while (true) {
            std::string w = stack.back();
            stack.pop_back();
            on_stack.erase(w);
            component.push_back(w);
            if (w == v) break;
          }
          bool self_loop =
              component.size() == 1 && edges[v].count(v) > 0;
          if (component.size() > 1 || self_loop) {
            std::sort(component.begin(), component.end());
            sccs.push_back(std::move(component));
          }
        }
      };

  for (const std::string& v : nodes)
    if (!index.count(v)) strongconnect(v);
  std::sort(sccs.begin(), sccs.end());
  return sccs;
}

GroundingStats grounding_stats(const PotentialGraph& graph) {
  GroundingStats stats;
  stats.pot_count = static_cast<long long>(graph.pot.size());
  stats.edge_count = static_cast<long long>(graph.needs.size());
  stats.skolem_count = graph.skolem_count;
  for (const Atom& atom : graph.pot)
    for (const Term& arg : atom.args)
      stats.max_term_depth =
          std::max(stats.max_term_depth, static_cast<long long>(term_depth(arg)));
  return stats;
}

}  // namespace horn
