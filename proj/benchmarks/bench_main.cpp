// Micro-benchmarks over the running example and synthetic chains:
// grounding, cost propagation, solving per objective, and ASP emission.

#include <benchmark/benchmark.h>

#include <horn/asp_export.hpp>
#include <horn/grounder.hpp>
#include <horn/objectives.hpp>
#include <horn/parser.hpp>
#include <horn/solver.hpp>

#include <sstream>
#include <string>

namespace {

using namespace horn;

const char* kRunningExample = R"(
sortname: person, male, female, dead, depressed.
axiom r4: inst(X, male) <- fatherof(X, Y).
axiom r5: inst(X, female) <- name(X, mary).
axiom r6: importantfor(Y, X) <- fatherof(Y, X).
axiom r7: inst(X, person) <- inst(X, male).
axiom r8: is(X, depressed) <- inst(X, pessimist).
axiom r9: is(X, depressed) <- is(Y, dead), importantfor(Y, X).
axiom r10: lost(X, Y) <- is(Y, dead), importantfor(Y, X), inst(Y, person).
goal: name(m, mary), lost(m, f), fatherof(f, m), inst(s, female),
      is(s, depressed).
)";

// A linear chain p1(x) <- p2(X) <- ... <- pn(X); depth scales grounding work.
std::string chain_instance(int depth) {
  std::ostringstream os;
  for (int i = 1; i < depth; ++i) {
    os << "axiom c" << i << ": p" << i << "(X) <- p" << (i + 1) << "(X).\n";
  }
  os << "goal: p1(a).\n";
  return os.str();
}

const AbductionInstance& running_example() {
  static AbductionInstance instance = parse_instance(kRunningExample);
  return instance;
}

const PotentialGraph& running_graph() {
  static PotentialGraph graph =
      ground_potential_graph(running_example(), SkolemPolicy::unlimited());
  return graph;
}

void BM_GroundRunningExample(benchmark::State& state) {
  const AbductionInstance& instance = running_example();
  for (auto _ : state) {
    PotentialGraph graph =
        ground_potential_graph(instance, SkolemPolicy::unlimited());
    benchmark::DoNotOptimize(graph.pot.size());
  }
}
BENCHMARK(BM_GroundRunningExample);

void BM_GroundChain(benchmark::State& state) {
  AbductionInstance instance =
      parse_instance(chain_instance(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    PotentialGraph graph =
        ground_potential_graph(instance, SkolemPolicy::unlimited());
    benchmark::DoNotOptimize(graph.pot.size());
  }
}
BENCHMARK(BM_GroundChain)->Arg(8)->Arg(32)->Arg(128);

void BM_SolveRunningExample(benchmark::State& state) {
  const AbductionInstance& instance = running_example();
  const PotentialGraph& graph = running_graph();
  Objective objective = static_cast<Objective>(state.range(0));
  for (auto _ : state) {
    SolveResult result = solve(instance, graph, objective);
    benchmark::DoNotOptimize(result.solution->objective_value);
  }
}
BENCHMARK(BM_SolveRunningExample)
    ->Arg(static_cast<int>(Objective::Card))
    ->Arg(static_cast<int>(Objective::Coherence))
    ->Arg(static_cast<int>(Objective::WeightedAbduction));

void BM_SolveRunningExampleEager(benchmark::State& state) {
  const AbductionInstance& instance = running_example();
  const PotentialGraph& graph = running_graph();
  SolveOptions options;
  options.lazy = false;
  for (auto _ : state) {
    SolveResult result =
        solve(instance, graph, Objective::WeightedAbduction, options);
    benchmark::DoNotOptimize(result.solution->objective_value);
  }
}
BENCHMARK(BM_SolveRunningExampleEager);

void BM_PropagatePcost(benchmark::State& state) {
  const AbductionInstance& instance = running_example();
  const PotentialGraph& graph = running_graph();
  SolveResult result = solve(instance, graph, Objective::WeightedAbduction);
  const Solution& sol = *result.solution;
  for (auto _ : state) {
    CostSet costs = propagate_pcost(instance, sol);
    benchmark::DoNotOptimize(costs.size());
  }
}
BENCHMARK(BM_PropagatePcost);

void BM_EmitProgram(benchmark::State& state) {
  const AbductionInstance& instance = running_example();
  for (auto _ : state) {
    std::string text = emit_facts(instance) +
                       emit_axiom_rules(instance, EncodingVariant::Bwda) +
                       emit_encoding(EncodingVariant::Bwda) +
                       emit_objective(Objective::WeightedAbduction) +
                       emit_global_constraints(instance);
    benchmark::DoNotOptimize(text.size());
  }
}
BENCHMARK(BM_EmitProgram);

}  // namespace

BENCHMARK_MAIN();
