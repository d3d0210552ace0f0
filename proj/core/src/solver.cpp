#include <horn/parser.hpp>
#include <horn/solver.hpp>

#include "candidate_eval.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <limits>

namespace horn {

namespace {

using internal::FactorOutcome;
using internal::StructureInfo;
using TermPair = std::pair<Term, Term>;

constexpr long long kInfiniteCost = std::numeric_limits<long long>::max() / 4;

TermPair norm_pair(const Term& a, const Term& b) {
  return a < b ? TermPair{a, b} : TermPair{b, a};
}

struct TimeoutSignal {};

// Union-find keyed by terms; queries never mutate observable structure.
class TermUnion {
 public:
  void unite(const Term& a, const Term& b) {
    std::size_t ra = root(index(a));
    std::size_t rb = root(index(b));
    if (ra != rb) parent_[ra] = rb;
  }
  bool same(const Term& a, const Term& b) {
    if (a == b) return true;
    return root(index(a)) == root(index(b));
  }
  std::size_t root_of(const Term& t) { return root(index(t)); }

 private:
  std::size_t index(const Term& t) {
    auto it = index_.find(t);
    if (it != index_.end()) return it->second;
    std::size_t id = parent_.size();
    index_.emplace(t, id);
    parent_.push_back(id);
    return id;
  }
  std::size_t root(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  std::map<Term, std::size_t> index_;
  std::vector<std::size_t> parent_;
};

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

class BwdaSearch {
 public:
  BwdaSearch(const AbductionInstance& instance, const PotentialGraph& graph,
             Objective objective, const SolveOptions& options)
      : inst_(instance), obj_(objective), opts_(options) {
    for (const MayInferEntry& entry : graph.may_infer) {
      InferOption opt;
      opt.entry = &entry;
      opt.axiom = find_axiom(instance, entry.axiom_id);
      opt.bodies = inference_bodies(
          instance, entry.head,
          InferenceChoice{entry.axiom_id, entry.existential_binding});
      options_by_head_[entry.head].push_back(std::move(opt));
    }
    global_scope_ = internal::eq_decision_scope(instance, graph.pot);
    if (opts_.time_limit_sec > 0.0) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(opts_.time_limit_sec));
      has_deadline_ = true;
    }
  }

  SolveResult run() {
    try {
      if (opts_.lazy) return run_lazy();
      reset_state();
      mode_ = Mode::Eager;
      structure_dfs();
      return finish();
    } catch (const TimeoutSignal&) {
      SolveResult r;
      r.status = SolveStatus::TimedOut;
      if (best_) r.solution = best_->sol;
      r.stats = stats_;
      return r;
    }
  }

 private:
  enum class Mode { DescentA, StratumB, Eager };

  struct InferOption {
    const MayInferEntry* entry = nullptr;
    const AxiomSchema* axiom = nullptr;
    std::vector<Atom> bodies;
  };

  struct Candidate {
    long long cost = 0;
    Solution sol;
    std::string key;  // rendering, for the deterministic tie-break
  };

  SolveResult run_lazy() {
    reset_state();
    mode_ = Mode::DescentA;
    descent_bound_ = opts_.bound ? *opts_.bound + 1 : kInfiniteCost;
    optimistic_cost_.reset();
    structure_dfs();
    if (!optimistic_cost_) {
      // No candidate satisfied the hard constraints within the bound.
      return finish();
    }
    if (!best_) {
      // The relaxation kept producing transitivity-violating candidates and
      // never hit a feasible one; fall back to the eager search, keeping the
      // learned nogoods as extra pruning.
      reset_state();
      mode_ = Mode::Eager;
      structure_dfs();
      return finish();
    }
    for (long long t = *optimistic_cost_; t <= best_->cost; ++t) {
      reset_state();
      mode_ = Mode::StratumB;
      stratum_bound_ = t;
      stratum_best_.reset();
      structure_dfs();
      if (stratum_best_) {
        SolveResult r;
        r.status = SolveStatus::Optimal;
        r.solution = stratum_best_->sol;
        r.stats = stats_;
        return r;
      }
    }
    return finish();
  }

  SolveResult finish() {
    SolveResult r;
    if (best_) {
      r.status = SolveStatus::Optimal;
      r.solution = best_->sol;
    } else {
      r.status = SolveStatus::Infeasible;
    }
    r.stats = stats_;
    return r;
  }

  void reset_state() {
    true_.clear();
    open_.clear();
    inferred_.clear();
    fai_.clear();
    up_.clear();
    decided_.clear();
    for (const Atom& g : inst_.goal) {
      if (true_.insert(g).second) open_.insert(g);
    }
  }

  void maybe_check_time() {
    if (!has_deadline_) return;
    // Probe on the first call so even trivially small searches honor the
    // deadline, then every 256th call to keep the clock off the hot path.
    if (++time_probe_ % 256 != 1) return;
    if (std::chrono::steady_clock::now() >= deadline_) throw TimeoutSignal{};
  }

  long long prune_ceiling() const {
    long long ceiling = kInfiniteCost;
    switch (mode_) {
      case Mode::DescentA:
        ceiling = descent_bound_ - 1;
        break;
      case Mode::StratumB:
        ceiling = stratum_bound_;
        break;
      case Mode::Eager:
        ceiling = best_ ? best_->cost : kInfiniteCost;
        break;
    }
    if (opts_.bound) ceiling = std::min(ceiling, *opts_.bound);
    return ceiling;
  }

  // --- structure phase -----------------------------------------------------

  bool creates_cycle(const Atom& head, const std::vector<Atom>& bodies) const {
    std::set<Atom> targets(bodies.begin(), bodies.end());
    std::deque<Atom> queue{head};
    std::set<Atom> seen{head};
    while (!queue.empty()) {
      Atom cur = queue.front();
      queue.pop_front();
      if (targets.count(cur)) return true;
      auto it = up_.find(cur);
      if (it == up_.end()) continue;
      for (const Atom& h : it->second) {
        if (seen.insert(h).second) queue.push_back(h);
      }
    }
    return false;
  }

  // Coarse optimistic clustering: non-sort argument positions may unify with
  // anything, so atoms group by predicate and the sort constants they pin.
  long long structure_lb() const {
    if (obj_ == Objective::Coherence) return 0;
    std::set<std::string> profiles;
    for (const Atom& a : fai_) {
      std::string key = a.predicate;
      key.push_back('/');
      key += std::to_string(a.args.size());
      for (const Term& t : a.args) {
        key.push_back('|');
        if (t.kind == Term::Kind::Const && inst_.sort_names.count(t.name))
          key += t.name;
        else
          key.push_back('*');
      }
      profiles.insert(key);
    }
    return static_cast<long long>(profiles.size());
  }

  void structure_dfs() {
    maybe_check_time();
    if (open_.empty()) {
      complete_structure();
      return;
    }
    if (structure_lb() > prune_ceiling()) return;
    Atom pick = *open_.begin();
    open_.erase(open_.begin());
    auto oit = options_by_head_.find(pick);
    if (oit != options_by_head_.end()) {
      for (const InferOption& opt : oit->second) {
        if (creates_cycle(pick, opt.bodies)) continue;
        ++stats_.nodes_explored;
        inferred_[pick] = &opt;
        std::vector<Atom> added_true;
        std::vector<Atom> added_up;
        for (const Atom& b : opt.bodies) {
          if (up_[b].insert(pick).second) added_up.push_back(b);
          if (true_.insert(b).second) {
            added_true.push_back(b);
            open_.insert(b);
          }
        }
        structure_dfs();
        for (const Atom& b : added_true) {
          true_.erase(b);
          open_.erase(b);
        }
        for (const Atom& b : added_up) up_[b].erase(pick);
        inferred_.erase(pick);
      }
    }
    ++stats_.nodes_explored;
    fai_.insert(pick);
    structure_dfs();
    fai_.erase(pick);
    open_.insert(pick);
  }

  // --- eq phase --------------------------------------------------------

  void complete_structure() {
    struct_info_.instance = &inst_;
    struct_info_.true_atoms = true_;
    struct_info_.inferred.clear();
    struct_info_.bodies.clear();
    struct_info_.axiom_of.clear();
    for (const auto& [head, opt] : inferred_) {
      struct_info_.inferred[head] = InferenceChoice{
          opt->entry->axiom_id, opt->entry->existential_binding};
      struct_info_.bodies[head] = opt->bodies;
      struct_info_.axiom_of[head] = opt->axiom;
    }
    struct_info_.fa = fai_;

    scoped_.clear();
    std::set<Term> arg_terms;
    for (const Atom& a : true_) {
      for (const Term& t : a.args) arg_terms.insert(t);
    }
    for (const TermPair& p : global_scope_) {
      if (arg_terms.count(p.first) && arg_terms.count(p.second))
        scoped_.push_back(p);
    }
    if (obj_ == Objective::WeightedAbduction) compute_base_min();
    eq_dfs(0);
  }

  // Minimum cost each true atom receives through inference steps alone;
  // factoring can only add the sets of cluster mates on top.
  void compute_base_min() {
    std::map<Atom, std::set<long long>> costs;
    std::map<Atom, std::size_t> remaining;
    for (const Atom& a : true_) remaining[a] = 0;
    for (const auto& [head, bodies] : struct_info_.bodies) {
      (void)head;
      for (const Atom& b : bodies) ++remaining[b];
    }
    for (const Atom& g : inst_.goal) costs[g].insert(inst_.initial_cost(g));
    std::set<Atom> ready;
    for (const auto& [atom, deg] : remaining) {
      if (deg == 0) ready.insert(atom);
    }
    while (!ready.empty()) {
      Atom cur = *ready.begin();
      ready.erase(ready.begin());
      auto bit = struct_info_.bodies.find(cur);
      if (bit != struct_info_.bodies.end()) {
        const AxiomSchema* ax = struct_info_.axiom_of.at(cur);
        for (std::size_t i = 0; i < bit->second.size(); ++i) {
          const Atom& b = bit->second[i];
          for (long long c : costs[cur]) {
            costs[b].insert(std::max(1LL, scale_trunc(c, ax->weights[i])));
          }
          if (--remaining[b] == 0) ready.insert(b);
        }
      }
    }
    base_min_.clear();
    for (const Atom& a : true_) {
      const std::set<long long>& set = costs[a];
      base_min_[a] = set.empty() ? inst_.initial_cost(a) : *set.begin();
    }
  }

  // Optimistic clusters: decided-true pairs plus every still-open pair.
  long long eq_lb(std::size_t next_index) {
    if (obj_ == Objective::Coherence) return 0;
    TermUnion uf;
    for (const auto& [pair, value] : decided_) {
      if (value) uf.unite(pair.first, pair.second);
    }
    for (std::size_t j = next_index; j < scoped_.size(); ++j) {
      uf.unite(scoped_[j].first, scoped_[j].second);
    }
    std::map<std::string, long long> group_min;
    for (const Atom& a : fai_) {
      std::string key = a.predicate;
      key.push_back('/');
      for (const Term& t : a.args) {
        key.push_back('|');
        key += std::to_string(uf.root_of(t));
      }
      long long base =
          obj_ == Objective::WeightedAbduction ? base_min_.at(a) : 1;
      auto [it, fresh] = group_min.emplace(key, base);
      if (!fresh) it->second = std::min(it->second, base);
    }
    long long lb = 0;
    for (const auto& [key, v] : group_min) {
      (void)key;
      lb += v;
    }
    return lb;
  }

  bool matches_learned_nogood() const {
    for (const auto& nogood : learned_) {
      bool all = true;
      for (const auto& [pair, value] : nogood) {
        auto it = decided_.find(pair);
        if (it == decided_.end() || it->second != value) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  }

  bool eager_consistent() {
    TermUnion uf;
    for (const auto& [pair, value] : decided_) {
      if (value) uf.unite(pair.first, pair.second);
    }
    for (const auto& [pair, value] : decided_) {
      if (!value && uf.same(pair.first, pair.second)) return false;
    }
    return true;
  }

  void eq_dfs(std::size_t i) {
    maybe_check_time();
    if (eq_lb(i) > prune_ceiling()) return;
    if (matches_learned_nogood()) return;
    if (i == scoped_.size()) {
      leaf_candidate();
      return;
    }
    for (bool value : {true, false}) {
      ++stats_.nodes_explored;
      decided_[scoped_[i]] = value;
      // The eager mode (initial or the no-incumbent fallback) keeps the
      // assignment transitively consistent at every step; the lazy modes
      // defer that to the leaf check.
      if (mode_ != Mode::Eager || eager_consistent()) eq_dfs(i + 1);
      decided_.erase(scoped_[i]);
    }
  }

  void leaf_candidate() {
    auto related = [this](const Term& a, const Term& b) {
      if (a == b) return true;
      auto it = decided_.find(norm_pair(a, b));
      return it != decided_.end() && it->second;
    };
    FactorOutcome outcome = internal::cluster_factoring(fai_, related);
    std::vector<Violation> hard = internal::check_constraints_pieces(
        inst_, true_, outcome.abduced, related);
    if (!hard.empty()) return;
    std::optional<long long> cost =
        internal::evaluate_candidate(struct_info_, outcome, obj_);
    if (!cost) return;
    if (opts_.bound && *cost > *opts_.bound) return;

    switch (mode_) {
      case Mode::DescentA: {
        if (*cost >= descent_bound_) return;
        descent_bound_ = *cost;
        optimistic_cost_ = *cost;
        if (!learn_violations()) record_feasible(*cost, outcome, nullptr);
        break;
      }
      case Mode::StratumB: {
        if (*cost > stratum_bound_) return;
        if (learn_violations()) return;
        record_feasible(*cost, outcome, &stratum_best_);
        break;
      }
      case Mode::Eager: {
        if (best_ && *cost > best_->cost) return;
        record_feasible(*cost, outcome, nullptr);
        break;
      }
    }
  }

  // Returns true when the candidate violated transitivity (and records the
  // violations as reusable nogoods).
  bool learn_violations() {
    std::vector<LazyNogood> found = find_lazy_violations(decided_, {});
    if (found.empty()) return false;
    for (const LazyNogood& ng : found) {
      std::vector<std::pair<TermPair, bool>> key;
      key.reserve(ng.eq_literals.size());
      for (const EqLiteral& lit : ng.eq_literals) {
        key.emplace_back(norm_pair(lit.a, lit.b), lit.value);
      }
      std::sort(key.begin(), key.end());
      if (learned_set_.insert(key).second) {
        learned_.push_back(key);
        ++stats_.nogoods_learned;
      }
    }
    return true;
  }

  void record_feasible(long long cost, const FactorOutcome& outcome,
                       std::optional<Candidate>* stratum_slot) {
    Candidate cand;
    cand.cost = cost;
    cand.sol = build_solution(cost, outcome);
    cand.key = render_solution(cand.sol);
    if (stratum_slot) {
      std::optional<Candidate>& slot = *stratum_slot;
      if (!slot || cand.cost < slot->cost ||
          (cand.cost == slot->cost && cand.key < slot->key)) {
        slot = cand;
      }
    }
    if (!best_ || cand.cost < best_->cost ||
        (cand.cost == best_->cost && cand.key < best_->key)) {
      best_ = std::move(cand);
      ++stats_.incumbent_updates;
    }
  }

  Solution build_solution(long long cost, const FactorOutcome& outcome) const {
    Solution sol;
    sol.objective = objective_label(obj_);
    sol.true_atoms = true_;
    for (const auto& [head, opt] : inferred_) {
      sol.inferred[head] =
          InferenceChoice{opt->entry->axiom_id, opt->entry->existential_binding};
    }
    for (const auto& [from, to] : outcome.factor_via) {
      sol.factored.emplace(from, to);
    }
    sol.abduced = outcome.abduced;
    EqRelation eq;
    for (const auto& [pair, value] : decided_) {
      if (value) eq.relate(pair.first, pair.second);
    }
    sol.eq = eq.transitive_closure();
    sol.objective_value = cost;
    return sol;
  }

  const AbductionInstance& inst_;
  Objective obj_;
  SolveOptions opts_;
  SolveStats stats_;

  std::map<Atom, std::vector<InferOption>> options_by_head_;
  std::set<TermPair> global_scope_;

  std::set<Atom> true_;
  std::set<Atom> open_;
  std::map<Atom, const InferOption*> inferred_;
  std::set<Atom> fai_;
  std::map<Atom, std::set<Atom>> up_;  // body -> heads it currently supports

  StructureInfo struct_info_;
  std::vector<TermPair> scoped_;
  std::map<TermPair, bool> decided_;
  std::map<Atom, long long> base_min_;

  std::vector<std::vector<std::pair<TermPair, bool>>> learned_;
  std::set<std::vector<std::pair<TermPair, bool>>> learned_set_;

  Mode mode_ = Mode::Eager;
  long long descent_bound_ = kInfiniteCost;
  long long stratum_bound_ = 0;
  std::optional<long long> optimistic_cost_;
  std::optional<Candidate> best_;
  std::optional<Candidate> stratum_best_;

  bool has_deadline_ = false;
  std::chrono::steady_clock::time_point deadline_;
  long long time_probe_ = 0;
};

}  // namespace

FactoringResult canonical_factoring(const std::set<Atom>& true_atoms,
                                    const std::set<Atom>& not_inferred,
                                    const EqRelation& eq) {
  for (const Atom& a : not_inferred) {
    if (!true_atoms.count(a)) {
      throw HornError(ErrorCode::InvalidArgument,
                      "factoring candidate is not a true atom: " + render(a));
    }
  }
  auto related = [&eq](const Term& a, const Term& b) { return eq.related(a, b); };
  FactorOutcome outcome = internal::cluster_factoring(not_inferred, related);
  FactoringResult result;
  result.abduced = std::move(outcome.abduced);
  for (const auto& [from, to] : outcome.factor_via) {
    result.factored.emplace(from, to);
  }
  return result;
}

std::vector<Violation> check_global_constraints(
    const Solution& sol, const EqRelation& eq,
    const AbductionInstance& instance) {
  auto related = [&eq](const Term& a, const Term& b) { return eq.related(a, b); };
  return internal::check_constraints_pieces(instance, sol.true_atoms,
                                            sol.abduced, related);
}

std::vector<LazyNogood> find_lazy_violations(
    const std::map<std::pair<Term, Term>, bool>& decided_eq,
    const std::vector<std::pair<Atom, Atom>>& edge_relation) {
  std::vector<LazyNogood> out;

  // Transitivity: adjacency over the decided-true pairs.
  std::map<Term, std::vector<Term>> adjacent;
  for (const auto& [pair, value] : decided_eq) {
    if (!value) continue;
    adjacent[pair.first].push_back(pair.second);
    adjacent[pair.second].push_back(pair.first);
  }
  for (const auto& [pair, value] : decided_eq) {
    if (value) continue;
    // Shortest chain of true pairs connecting the false pair's endpoints.
    std::map<Term, Term> parent;
    std::deque<Term> queue{pair.first};
    parent.emplace(pair.first, pair.first);
    bool connected = false;
    while (!queue.empty() && !connected) {
      Term cur = queue.front();
      queue.pop_front();
      auto it = adjacent.find(cur);
      if (it == adjacent.end()) continue;
      for (const Term& n : it->second) {
        if (parent.emplace(n, cur).second) {
          if (n == pair.second) {
            connected = true;
            break;
          }
          queue.push_back(n);
        }
      }
    }
    if (!connected) continue;
    LazyNogood nogood;
    Term cur = pair.second;
    while (cur != pair.first) {
      const Term& prev = parent.at(cur);
      TermPair step = norm_pair(prev, cur);
      nogood.eq_literals.push_back({step.first, step.second, true});
      cur = prev;
    }
    std::reverse(nogood.eq_literals.begin(), nogood.eq_literals.end());
    nogood.eq_literals.push_back({pair.first, pair.second, false});
    out.push_back(std::move(nogood));
  }

  // Acyclicity: one nogood per back edge found by depth-first search.
  std::map<Atom, std::vector<Atom>> next;
  std::set<Atom> nodes;
  for (const auto& [from, to] : edge_relation) {
    next[from].push_back(to);
    nodes.insert(from);
    nodes.insert(to);
  }
  std::map<Atom, int> state;  // 0 fresh, 1 on stack, 2 done
  std::vector<Atom> stack;
  std::function<void(const Atom&)> dfs = [&](const Atom& node) {
    state[node] = 1;
    stack.push_back(node);
    auto it = next.find(node);
    if (it != next.end()) {
      for (const Atom& n : it->second) {
        int st = state.count(n) ? state[n] : 0;
        if (st == 0) {
          dfs(n);
        } else if (st == 1) {
          LazyNogood nogood;
          std::size_t start = 0;
          while (stack[start] != n) ++start;
          for (std::size_t k = start; k + 1 < stack.size(); ++k) {
            nogood.edge_cycle.emplace_back(stack[k], stack[k + 1]);
          }
          nogood.edge_cycle.emplace_back(stack.back(), n);
          out.push_back(std::move(nogood));
        }
      }
    }
    stack.pop_back();
    state[node] = 2;
  };
  for (const Atom& n : nodes) {
    if (!state.count(n)) dfs(n);
  }
  return out;
}

SolveResult solve(const AbductionInstance& instance, const PotentialGraph& graph,
                  Objective objective, const SolveOptions& options) {
  if (options.factoring_mode == FactoringMode::BwdgOracle) {
    OracleResult oracle =
        brute_force(instance, graph, objective, FactoringMode::BwdgOracle);
    SolveResult r;
    if (!oracle.feasible ||
        (options.bound && oracle.optimal_cost > *options.bound)) {
      r.status = SolveStatus::Infeasible;
      return r;
    }
    r.status = SolveStatus::Optimal;
    r.solution = oracle.optima.front();
    return r;
  }
  BwdaSearch search(instance, graph, objective, options);
  return search.run();
}

}  // namespace horn
