// horn-abduce: command-line front end for the cost-optimal Horn abduction
// library. Subcommands: solve, ground, export-asp, verify, oracle, bench.
//
// Exit codes: 0 optimal/valid, 1 error, 2 timeout, 3 infeasible.

#include <CLI11.hpp>
#include <json.hpp>

#include <horn/asp_export.hpp>
#include <horn/grounder.hpp>
#include <horn/instance.hpp>
#include <horn/objectives.hpp>
#include <horn/parser.hpp>
#include <horn/solver.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace horn;

constexpr int kExitOptimal = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitInfeasible = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw HornError(ErrorCode::InvalidArgument, "cannot read file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw HornError(ErrorCode::InvalidArgument, "cannot write file: " + path);
  }
  out << text;
}

Objective parse_objective(const std::string& name) {
  if (name == "card") return Objective::Card;
  if (name == "coh") return Objective::Coherence;
  if (name == "wa") return Objective::WeightedAbduction;
  throw HornError(ErrorCode::InvalidArgument,
                  "unknown objective: " + name + " (use card, coh, or wa)");
}

SkolemPolicy parse_policy(const std::string& name,
                          const std::string& naming_name) {
  SkolemPolicy::Naming naming;
  if (naming_name == "structured") {
    naming = SkolemPolicy::Naming::Structured;
  } else if (naming_name == "flat") {
    naming = SkolemPolicy::Naming::Flat;
  } else {
    throw HornError(ErrorCode::InvalidArgument,
                    "unknown skolem naming: " + naming_name +
                        " (use structured or flat)");
  }
  if (name == "inf") return SkolemPolicy::unlimited(naming);
  if (name.size() >= 2 && (name[0] == 'p' || name[0] == 'g')) {
    int depth = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') depth = -1;
      if (depth < 0) break;
      depth = depth * 10 + (name[i] - '0');
    }
    if (depth >= 1) {
      return name[0] == 'p' ? SkolemPolicy::parent_depth(depth, naming)
                            : SkolemPolicy::generation_depth(depth, naming);
    }
  }
  throw HornError(ErrorCode::InvalidArgument,
                  "unknown skolem policy: " + name +
                      " (use inf, p<i>, or g<i>)");
}

EncodingVariant parse_encoding(const std::string& name) {
  if (name == "bwdg") return EncodingVariant::Bwdg;
  if (name == "bwdai") return EncodingVariant::Bwdai;
  if (name == "bwda") return EncodingVariant::Bwda;
  if (name == "fwda") return EncodingVariant::Fwda;
  throw HornError(ErrorCode::InvalidArgument,
                  "unknown encoding: " + name +
                      " (use bwdg, bwdai, bwda, or fwda)");
}

bool parse_switch(const std::string& value, const char* flag) {
  if (value == "on") return true;
  if (value == "off") return false;
  throw HornError(ErrorCode::InvalidArgument,
                  std::string(flag) + " takes on or off, got: " + value);
}

const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimedOut: return "timeout";
  }
  return "error";
}

int status_exit(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return kExitOptimal;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::TimedOut: return kExitTimeout;
  }
  return kExitError;
}

// Options shared by the subcommands that parse and ground an instance.
struct CommonOpts {
  std::string instance_path;
  std::string objective = "card";
  std::string skolem = "inf";
  std::string skolem_naming = "structured";
  std::string lazy = "on";
  std::string constraints = "on";
  std::string format = "json";
  double time_limit = 0.0;
  long long pot_limit = kDefaultPotLimit;
};

void add_instance_option(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-i,--instance", opts.instance_path, "instance file (.kb)")
      ->required();
}

void add_grounding_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--skolem", opts.skolem,
                  "skolemization policy: inf, p<i>, or g<i> (default inf)");
  cmd->add_option("--skolem-naming", opts.skolem_naming,
                  "invented-term naming: structured or flat");
  cmd->add_option("--pot-limit", opts.pot_limit,
                  "abort grounding past this many atoms");
}

void add_format_option(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--format", opts.format, "output format: json or text");
}

AbductionInstance load_instance(const CommonOpts& opts) {
  AbductionInstance instance = parse_instance(read_file(opts.instance_path));
  if (!parse_switch(opts.constraints, "--constraints")) {
    instance.nogoods.clear();
    instance.unique_slots.clear();
  }
  return instance;
}

nlohmann::ordered_json stats_json(const GroundingStats& gstats,
                                  const SolveStats& sstats) {
  nlohmann::ordered_json j;
  j["pot_count"] = gstats.pot_count;
  j["skolem_count"] = gstats.skolem_count;
  j["nodes_explored"] = sstats.nodes_explored;
  j["nogoods_learned"] = sstats.nogoods_learned;
  j["incumbent_updates"] = sstats.incumbent_updates;
  return j;
}

nlohmann::ordered_json report_json(const std::string& status,
                                   std::optional<long long> cost,
                                   long long wall_ms,
                                   const GroundingStats& gstats,
                                   const SolveStats& sstats) {
  nlohmann::ordered_json j;
  j["status"] = status;
  if (cost) j["cost"] = *cost;
  j["wall_time_ms"] = wall_ms;
  j["stats"] = stats_json(gstats, sstats);
  return j;
}

void print_solution_text(std::ostream& os, const Solution& sol) {
  os << "abduced:\n";
  for (const Atom& a : sol.abduced) os << "  " << render(a) << "\n";
  os << "inferred:\n";
  for (const auto& [atom, choice] : sol.inferred) {
    os << "  " << render(atom) << " via " << choice.axiom_id;
    if (!choice.skolem_args.empty()) {
      os << " [";
      for (std::size_t i = 0; i < choice.skolem_args.size(); ++i) {
        if (i) os << ", ";
        os << render(choice.skolem_args[i]);
      }
      os << "]";
    }
    os << "\n";
  }
  os << "factored:\n";
  for (const auto& [from, to] : sol.factored) {
    os << "  " << render(from) << " -> " << render(to) << "\n";
  }
  os << "eq:\n";
  for (const auto& cls : sol.eq.classes()) {
    os << " ";
    for (const Term& t : cls) os << " " << render(t);
    os << "\n";
  }
}

int cmd_solve(const CommonOpts& opts) {
  auto t0 = std::chrono::steady_clock::now();
  AbductionInstance instance = load_instance(opts);
  Objective objective = parse_objective(opts.objective);
  SkolemPolicy policy = parse_policy(opts.skolem, opts.skolem_naming);

  PotentialGraph graph =
      ground_potential_graph(instance, policy, opts.pot_limit);
  GroundingStats gstats = grounding_stats(graph);

  SolveOptions solve_opts;
  solve_opts.lazy = parse_switch(opts.lazy, "--lazy");
  solve_opts.time_limit_sec = opts.time_limit;
  SolveResult result = solve(instance, graph, objective, solve_opts);

  auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  std::optional<long long> cost;
  if (result.solution) cost = result.solution->objective_value;

  if (opts.format == "text") {
    std::cout << "status: " << status_name(result.status) << "\n";
    if (cost) std::cout << "cost: " << *cost << "\n";
    std::cout << "wall_time_ms: " << wall_ms << "\n"
              << "pot_count: " << gstats.pot_count << "\n"
              << "skolem_count: " << gstats.skolem_count << "\n"
              << "nodes_explored: " << result.stats.nodes_explored << "\n"
              << "nogoods_learned: " << result.stats.nogoods_learned << "\n"
              << "incumbent_updates: " << result.stats.incumbent_updates
              << "\n";
    if (result.solution) print_solution_text(std::cout, *result.solution);
  } else {
    nlohmann::ordered_json out;
    out["report"] = report_json(status_name(result.status), cost, wall_ms,
                                gstats, result.stats);
    if (result.solution) {
      out["solution"] = nlohmann::ordered_json::parse(render_solution(*result.solution));
    }
    std::cout << out.dump(2) << "\n";
  }
  return status_exit(result.status);
}

int cmd_ground(const CommonOpts& opts, bool stats_only) {
  AbductionInstance instance = load_instance(opts);
  SkolemPolicy policy = parse_policy(opts.skolem, opts.skolem_naming);
  PotentialGraph graph =
      ground_potential_graph(instance, policy, opts.pot_limit);
  GroundingStats gstats = grounding_stats(graph);

  if (opts.format == "text") {
    if (!stats_only) {
      for (const Atom& a : graph.pot) std::cout << "pot " << render(a) << "\n";
      for (const MayInferEntry& e : graph.may_infer) {
        std::cout << "may_infer " << e.axiom_id << " " << render(e.head);
        for (const Term& w : e.existential_binding) {
          std::cout << " " << render(w);
        }
        std::cout << "\n";
      }
      for (const NeedsEntry& e : graph.needs) {
        std::cout << "needs " << render(e.head) << " " << e.axiom_id << " "
                  << render(e.body) << "\n";
      }
    }
    std::cout << "pot_count: " << gstats.pot_count << "\n"
              << "edge_count: " << gstats.edge_count << "\n"
              << "skolem_count: " << gstats.skolem_count << "\n"
              << "max_term_depth: " << gstats.max_term_depth << "\n";
  } else {
    nlohmann::ordered_json out;
    if (!stats_only) {
      out["pot"] = nlohmann::json::array();
      for (const Atom& a : graph.pot) out["pot"].push_back(render(a));
      out["may_infer"] = nlohmann::json::array();
      for (const MayInferEntry& e : graph.may_infer) {
        nlohmann::ordered_json entry;
        entry["axiom"] = e.axiom_id;
        entry["head"] = render(e.head);
        entry["witnesses"] = nlohmann::json::array();
        for (const Term& w : e.existential_binding) {
          entry["witnesses"].push_back(render(w));
        }
        out["may_infer"].push_back(std::move(entry));
      }
      out["needs"] = nlohmann::json::array();
      for (const NeedsEntry& e : graph.needs) {
        nlohmann::ordered_json entry;
        entry["head"] = render(e.head);
        entry["axiom"] = e.axiom_id;
        entry["body"] = render(e.body);
        out["needs"].push_back(std::move(entry));
      }
    }
    nlohmann::ordered_json stats;
    stats["pot_count"] = gstats.pot_count;
    stats["edge_count"] = gstats.edge_count;
    stats["skolem_count"] = gstats.skolem_count;
    stats["max_term_depth"] = gstats.max_term_depth;
    out["stats"] = std::move(stats);
    std::cout << out.dump(2) << "\n";
  }
  return kExitOptimal;
}

int cmd_export(const CommonOpts& opts, const std::string& encoding_name,
               const std::string& out_path) {
  AbductionInstance instance = load_instance(opts);
  EncodingVariant variant = parse_encoding(encoding_name);
  Objective objective = parse_objective(opts.objective);
  if (variant == EncodingVariant::Fwda && objective != Objective::Card) {
    throw HornError(ErrorCode::InvalidArgument,
                    "the fwda encoding only supports the card objective");
  }
  if (objective == Objective::WeightedAbduction) {
    // The emitted weighted module hardcodes the uniform cost model: goal
    // seeds of 100 and the 6/5 factor split evenly over each body.
    bool uniform = true;
    for (const AxiomSchema& ax : instance.axioms) {
      Rational even(6, 5 * static_cast<long long>(ax.body.size()));
      for (const Rational& w : ax.weights) uniform &= (w == even);
    }
    for (const auto& [atom, cost] : instance.initial_costs) {
      (void)atom;
      uniform &= (cost == kDefaultInitialCost);
    }
    if (!uniform) {
      throw HornError(ErrorCode::InvalidArgument,
                      "the wa objective module assumes the uniform cost model;"
                      " this instance declares explicit weights or costs");
    }
  }
  int max_arity = std::max(2, instance.max_arity());
  std::string text = emit_facts(instance) +
                     emit_axiom_rules(instance, variant) +
                     emit_encoding(variant, max_arity) +
                     emit_objective(objective) +
                     emit_global_constraints(instance);
  write_output(out_path, text);
  return kExitOptimal;
}

int cmd_verify(const CommonOpts& opts, const std::string& solution_path) {
  AbductionInstance instance = load_instance(opts);
  Objective objective = parse_objective(opts.objective);
  Solution sol = parse_solution(read_file(solution_path));
  VerifyResult result = verify(instance, sol, objective);

  if (opts.format == "text") {
    if (result.valid) {
      std::cout << "valid (cost " << result.cost << ")\n";
    } else {
      std::cout << "invalid:\n";
      for (const std::string& r : result.reasons) std::cout << "  " << r << "\n";
    }
  } else {
    nlohmann::ordered_json out;
    out["valid"] = result.valid;
    if (result.valid) out["cost"] = result.cost;
    out["reasons"] = result.reasons;
    std::cout << out.dump(2) << "\n";
  }
  return result.valid ? kExitOptimal : kExitError;
}

int cmd_oracle(const CommonOpts& opts, const std::string& mode_name,
               int max_pot, int max_eq_terms) {
  AbductionInstance instance = load_instance(opts);
  Objective objective = parse_objective(opts.objective);
  SkolemPolicy policy = parse_policy(opts.skolem, opts.skolem_naming);
  PotentialGraph graph =
      ground_potential_graph(instance, policy, opts.pot_limit);

  FactoringMode mode;
  if (mode_name == "bwda") {
    mode = FactoringMode::Bwda;
  } else if (mode_name == "bwdg") {
    mode = FactoringMode::BwdgOracle;
  } else {
    throw HornError(ErrorCode::InvalidArgument,
                    "unknown oracle mode: " + mode_name +
                        " (use bwda or bwdg)");
  }
  OracleLimits limits;
  limits.max_pot = max_pot;
  limits.max_eq_terms = max_eq_terms;
  OracleResult result = brute_force(instance, graph, objective, mode, limits);

  if (opts.format == "text") {
    if (!result.feasible) {
      std::cout << "infeasible\n";
    } else {
      std::cout << "cost: " << result.optimal_cost << "\n"
                << "optima: " << result.optima.size() << "\n";
      print_solution_text(std::cout, result.optima.front());
    }
  } else {
    nlohmann::ordered_json out;
    out["feasible"] = result.feasible;
    if (result.feasible) {
      out["cost"] = result.optimal_cost;
      out["optima"] = nlohmann::json::array();
      for (const Solution& sol : result.optima) {
        out["optima"].push_back(nlohmann::ordered_json::parse(render_solution(sol)));
      }
    }
    std::cout << out.dump(2) << "\n";
  }
  return result.feasible ? kExitOptimal : kExitInfeasible;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

int cmd_bench(const std::vector<std::string>& instance_paths,
              const std::vector<std::string>& objectives,
              const std::vector<std::string>& policies,
              const CommonOpts& opts, const std::string& out_path) {
  std::ostringstream csv;
  csv << "instance,objective,policy,status,cost,wall_time_ms,pot_count,"
         "skolem_count,nodes_explored,nogoods_learned,incumbent_updates\n";
  for (const std::string& path : instance_paths) {
    CommonOpts local = opts;
    local.instance_path = path;
    AbductionInstance instance = load_instance(local);
    for (const std::string& policy_name : policies) {
      for (const std::string& objective_name : objectives) {
        std::string status;
        std::string cost;
        GroundingStats gstats;
        SolveStats sstats;
        auto t0 = std::chrono::steady_clock::now();
        try {
          SkolemPolicy policy = parse_policy(policy_name, opts.skolem_naming);
          PotentialGraph graph =
              ground_potential_graph(instance, policy, opts.pot_limit);
          gstats = grounding_stats(graph);
          SolveOptions solve_opts;
          solve_opts.lazy = parse_switch(opts.lazy, "--lazy");
          solve_opts.time_limit_sec = opts.time_limit;
          SolveResult result =
              solve(instance, graph, parse_objective(objective_name),
                    solve_opts);
          status = status_name(result.status);
          sstats = result.stats;
          if (result.solution) {
            cost = std::to_string(result.solution->objective_value);
          }
        } catch (const HornError& e) {
          status = "error";
          (void)e;
        }
        auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        csv << csv_quote(path) << "," << objective_name << "," << policy_name
            << "," << status << "," << cost << "," << wall_ms << ","
            << gstats.pot_count << "," << gstats.skolem_count << ","
            << sstats.nodes_explored << "," << sstats.nogoods_learned << ","
            << sstats.incumbent_updates << "\n";
      }
    }
  }
  write_output(out_path, csv.str());
  return kExitOptimal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cost-optimal Horn abduction without unique names"};
  app.require_subcommand(1);

  CommonOpts solve_opts;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "ground an instance and search for a "
                                  "cost-optimal solution");
  add_instance_option(solve_cmd, solve_opts);
  solve_cmd->add_option("--objective", solve_opts.objective,
                        "objective: card, coh, or wa (default card)");
  add_grounding_options(solve_cmd, solve_opts);
  solve_cmd->add_option("--lazy", solve_opts.lazy,
                        "on-demand eq constraints: on or off (default on)");
  solve_cmd->add_option("--time-limit", solve_opts.time_limit,
                        "wall-clock limit in seconds (0 = none)");
  solve_cmd->add_option("--constraints", solve_opts.constraints,
                        "enforce instance global constraints: on or off");
  add_format_option(solve_cmd, solve_opts);

  CommonOpts ground_opts;
  bool ground_stats = false;
  CLI::App* ground_cmd = app.add_subcommand(
      "ground", "print the potential proof graph of an instance");
  add_instance_option(ground_cmd, ground_opts);
  add_grounding_options(ground_cmd, ground_opts);
  ground_cmd->add_flag("--stats", ground_stats, "print only the counts");
  add_format_option(ground_cmd, ground_opts);
  ground_opts.format = "text";

  CommonOpts export_opts;
  std::string export_encoding = "bwda";
  std::string export_out;
  CLI::App* export_cmd = app.add_subcommand(
      "export-asp", "emit the instance as an ASP optimization program");
  add_instance_option(export_cmd, export_opts);
  export_cmd->add_option("--encoding", export_encoding,
                         "encoding variant: bwdg, bwdai, bwda, or fwda");
  export_cmd->add_option("--objective", export_opts.objective,
                         "objective module: card, coh, or wa");
  export_cmd->add_option("-o,--output", export_out,
                         "output file (default stdout)");
  export_cmd->add_option("--constraints", export_opts.constraints,
                         "emit instance global constraints: on or off");

  CommonOpts verify_opts;
  std::string verify_solution;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "check a solution JSON file against an instance");
  add_instance_option(verify_cmd, verify_opts);
  verify_cmd->add_option("-s,--solution", verify_solution,
                         "solution JSON file")
      ->required();
  verify_cmd->add_option("--objective", verify_opts.objective,
                         "objective: card, coh, or wa");
  verify_cmd->add_option("--constraints", verify_opts.constraints,
                         "enforce instance global constraints: on or off");
  add_format_option(verify_cmd, verify_opts);

  CommonOpts oracle_opts;
  std::string oracle_mode = "bwda";
  int oracle_max_pot = 12;
  int oracle_max_eq = 8;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "exhaustive reference search (small instances only)");
  add_instance_option(oracle_cmd, oracle_opts);
  oracle_cmd->add_option("--objective", oracle_opts.objective,
                         "objective: card, coh, or wa");
  add_grounding_options(oracle_cmd, oracle_opts);
  oracle_cmd->add_option("--mode", oracle_mode,
                         "factoring semantics: bwda or bwdg");
  oracle_cmd->add_option("--max-pot", oracle_max_pot,
                         "refuse graphs larger than this");
  oracle_cmd->add_option("--max-eq-terms", oracle_max_eq,
                         "refuse eq enumeration over more terms than this");
  oracle_cmd->add_option("--constraints", oracle_opts.constraints,
                         "enforce instance global constraints: on or off");
  add_format_option(oracle_cmd, oracle_opts);

  CommonOpts bench_opts;
  std::vector<std::string> bench_instances;
  std::vector<std::string> bench_objectives = {"card", "coh", "wa"};
  std::vector<std::string> bench_policies = {"inf"};
  std::string bench_out;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "run an instance x objective x policy matrix, write CSV");
  bench_cmd->add_option("-i,--instance", bench_instances, "instance files")
      ->required();
  bench_cmd->add_option("--objective", bench_objectives,
                        "objectives to run (default all three)");
  bench_cmd->add_option("--skolem", bench_policies,
                        "skolem policies to run (default inf)");
  bench_cmd->add_option("--skolem-naming", bench_opts.skolem_naming,
                        "invented-term naming: structured or flat");
  bench_cmd->add_option("--lazy", bench_opts.lazy,
                        "on-demand eq constraints: on or off");
  bench_cmd->add_option("--time-limit", bench_opts.time_limit,
                        "per-run wall-clock limit in seconds");
  bench_cmd->add_option("--pot-limit", bench_opts.pot_limit,
                        "abort grounding past this many atoms");
  bench_cmd->add_option("--constraints", bench_opts.constraints,
                        "enforce instance global constraints: on or off");
  bench_cmd->add_option("-o,--output", bench_out,
                        "output CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_opts);
    if (ground_cmd->parsed()) return cmd_ground(ground_opts, ground_stats);
    if (export_cmd->parsed()) {
      return cmd_export(export_opts, export_encoding, export_out);
    }
    if (verify_cmd->parsed()) return cmd_verify(verify_opts, verify_solution);
    if (oracle_cmd->parsed()) {
      return cmd_oracle(oracle_opts, oracle_mode, oracle_max_pot,
                        oracle_max_eq);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(bench_instances, bench_objectives, bench_policies,
                       bench_opts, bench_out);
    }
  } catch (const HornError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
