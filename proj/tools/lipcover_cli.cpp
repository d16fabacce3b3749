// Command-line front end: run configured problems, reproduce the benchmark
// experiments, print sufficient budgets, and train the mountain-car policy.
//
// Exit codes: 0 minimum found, 1 usage/validation error, 2 infeasibility
// certificate, 3 budget or node limit exhausted.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lipcover/lipcover.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lipcover;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBudget = 3;

json point_to_json(const std::optional<Point>& p) {
  if (!p) return nullptr;
  return json(*p);
}

json outcome_to_json(const RunOutcome& out, std::int64_t wall_ms,
                     const json& config_echo) {
  json j;
  j["status"] = to_string(out.status);
  j["best_point"] = point_to_json(out.best_point);
  j["best_value"] = out.best_value ? json(*out.best_value) : json(nullptr);
  j["delta_global"] =
      out.delta_global ? json(*out.delta_global) : json(nullptr);
  j["gamma"] = out.gamma ? json(*out.gamma) : json(nullptr);
  j["oracle_calls"] = out.oracle_calls;
  j["iterations"] = out.trace.size();
  std::int64_t infeasible_queries = 0;
  for (const auto& row : out.trace)
    if (!row.feasible_flag) ++infeasible_queries;
  j["infeasible_queries"] = infeasible_queries;
  j["node_limit_hit"] = out.node_limit_hit;
  j["wall_ms"] = wall_ms;
  j["config"] = config_echo;
  return j;
}

int status_to_exit(const RunOutcome& out) {
  switch (out.status) {
    case RunStatus::Minimum: return kExitOk;
    case RunStatus::Infeasible: return kExitInfeasible;
    case RunStatus::BudgetExhausted: return kExitBudget;
  }
  return kExitUsage;
}

std::optional<BenchmarkProblem> find_problem(const std::string& id) {
  for (const auto& p : suite()) {
    if (p.id == id) return p;
  }
  if (id == "INF") return infeasible_instance();
  if (id == "APXB-1") return appendix_examples().first;
  if (id == "APXB-2") return appendix_examples().second;
  if (id.rfind("ROSEN-", 0) == 0) {
    const int d = std::atoi(id.c_str() + 6);
    if (d >= 2 && d <= 6) return rosenbrock_problem(d);
  }
  return std::nullopt;
}

Point parse_point_arg(const std::string& s) {
  Point p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) p.push_back(std::stod(tok));
  return p;
}

std::int64_t env_max_nodes_override(std::int64_t fallback) {
  if (const char* env = std::getenv("LIPCOVER_MAX_NODES")) {
    const long long v = std::atoll(env);
    if (v > 0) return v;
  }
  return fallback;
}

/// Expands `--config file` (key=value per line, # comments) into `--key
/// value` pairs placed before the explicit flags, so explicit flags win.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> out;
  std::vector<std::string> file_args;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) continue;
      file_args.push_back("--" + key);
      file_args.push_back(value);
    }
  }
  // subcommand name first, then file-sourced options, then explicit flags
  std::vector<std::string> merged;
  if (!out.empty()) {
    merged.push_back(out.front());
    merged.insert(merged.end(), file_args.begin(), file_args.end());
    merged.insert(merged.end(), out.begin() + 1, out.end());
  } else {
    merged = file_args;
  }
  return merged;
}

struct SolveOptions {
  std::string problem_id;
  std::string algorithm = "constrained";
  std::string start = "infeasible";
  std::string infeasible_start_mode = "off";
  std::optional<double> eta, delta, lip_j, lip_h, mu, gap_tol;
  std::optional<std::int64_t> budget, max_nodes;
  std::optional<std::string> start_point;
  std::string trace_path, summary_path;
};

int run_solve(const SolveOptions& opt) {
  const auto problem = find_problem(opt.problem_id);
  if (!problem) {
    std::cerr << "unknown problem id: " << opt.problem_id << "\n";
    return kExitUsage;
  }
  ProblemSpec spec = make_problem_spec(
      *problem, opt.start == "feasible" ? StartChoice::Feasible
                                        : StartChoice::Infeasible);
  if (opt.eta) spec.eta = *opt.eta;
  if (opt.delta) spec.delta = *opt.delta;
  if (opt.lip_j) spec.lip_j = *opt.lip_j;
  if (opt.lip_h) spec.lip_h = *opt.lip_h;
  if (opt.mu) spec.convexity_mu = *opt.mu;
  if (opt.budget) spec.budget = *opt.budget;
  if (opt.start_point) spec.q1 = parse_point_arg(*opt.start_point);

  BnBConfig bnb = default_subsolver_config(spec);
  if (opt.gap_tol) bnb.abs_gap_tol = *opt.gap_tol;
  bnb.max_nodes = env_max_nodes_override(opt.max_nodes.value_or(bnb.max_nodes));

  json config_echo;
  config_echo["problem"] = opt.problem_id;
  config_echo["algorithm"] = opt.algorithm;
  config_echo["start"] = opt.start;
  config_echo["q1"] = spec.q1;
  config_echo["eta"] = spec.eta;
  config_echo["delta"] = spec.delta;
  config_echo["budget"] = spec.budget;
  config_echo["lip_j"] = spec.lip_j;
  config_echo["lip_h"] = spec.lip_h;
  config_echo["mu"] = spec.convexity_mu ? json(*spec.convexity_mu) : json(nullptr);
  config_echo["abs_gap_tol"] = bnb.abs_gap_tol;
  config_echo["max_nodes"] = bnb.max_nodes;
  config_echo["infeasible_start_mode"] = opt.infeasible_start_mode;

  const auto tic = std::chrono::steady_clock::now();
  RunOutcome out;
  try {
    if (opt.algorithm == "cover") {
      out = covering_method(spec, bnb);
    } else if (opt.algorithm == "constrained") {
      const auto mode = opt.infeasible_start_mode == "minimize-h"
                            ? InfeasibleStartMode::MinimizeHFirst
                            : InfeasibleStartMode::Off;
      out = constrained_covering(spec, bnb, mode);
    } else if (opt.algorithm == "relax-project") {
      out = relax_and_project(spec, bnb);
    } else {
      std::cerr << "unknown algorithm: " << opt.algorithm << "\n";
      return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - tic)
                           .count();

  if (!opt.trace_path.empty()) write_trace_csv(opt.trace_path, out.trace);
  const json summary = outcome_to_json(out, wall_ms, config_echo);
  if (!opt.summary_path.empty()) atomic_write(opt.summary_path, summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return status_to_exit(out);
}

struct BenchOptions {
  std::string out_dir = "bench_out";
  std::int64_t budget = 400;
  std::optional<std::int64_t> max_nodes;
};

int run_bench(const BenchOptions& opt) {
  fs::create_directories(opt.out_dir);
  std::string csv =
      "problem,start,algorithm,iterations,infeasible_queries,delta_global,"
      "gap_vs_reference,wall_ms\n";
  bool any_error = false;

  for (const auto& problem : suite()) {
    const auto ref = grid_reference_min(problem, 0.05, 0.0);
    const std::vector<std::pair<std::string, StartChoice>> starts{
        {"infeasible", StartChoice::Infeasible},
        {"feasible", StartChoice::Feasible}};
    for (const auto& [start_name, start] : starts) {
      std::vector<std::string> algorithms{"constrained"};
      const bool sc = problem.constraint.mu.has_value();
      if (sc && start == StartChoice::Feasible) algorithms.push_back("relax-project");
      for (const std::string& algo : algorithms) {
        ProblemSpec spec = make_problem_spec(problem, start);
        spec.budget = opt.budget;
        BnBConfig bnb = default_subsolver_config(spec);
        bnb.max_nodes = env_max_nodes_override(opt.max_nodes.value_or(bnb.max_nodes));
        const auto tic = std::chrono::steady_clock::now();
        RunOutcome out;
        try {
          out = algo == "relax-project" ? relax_and_project(spec, bnb)
                                        : constrained_covering(spec, bnb);
        } catch (const std::exception& e) {
          std::cerr << problem.id << " " << start_name << " " << algo
                    << " failed: " << e.what() << "\n";
          any_error = true;
          continue;
        }
        const auto wall_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - tic)
                .count();
        std::int64_t infeasible_queries = 0;
        for (const auto& row : out.trace)
          if (!row.feasible_flag) ++infeasible_queries;
        const std::string gap =
            out.best_value && ref
                ? detail::format_double(*out.best_value - ref->value)
                : "";
        csv += problem.id + "," + start_name + "," + algo + "," +
               std::to_string(out.trace.size()) + "," +
               std::to_string(infeasible_queries) + "," +
               (out.delta_global ? detail::format_double(*out.delta_global)
                                 : std::string("inf")) +
               "," + gap + "," + std::to_string(wall_ms) + "\n";
        write_trace_csv(fs::path(opt.out_dir) /
                            (problem.id + "_" + start_name + "_" + algo + ".csv"),
                        out.trace);
        std::cout << problem.id << " " << start_name << " " << algo << ": "
                  << to_string(out.status)
                  << " delta=" << (out.delta_global ? *out.delta_global : kInf)
                  << " wall_ms=" << wall_ms << "\n";
      }
    }
  }
  atomic_write(fs::path(opt.out_dir) / "bench.csv", csv);
  std::cout << "wrote " << (fs::path(opt.out_dir) / "bench.csv").string() << "\n";
  return any_error ? kExitUsage : kExitOk;
}

struct BudgetOptions {
  int dim = 0;
  double diam = 0.0, lip_j = 0.0, lip_h = 0.0, eta = 0.0, delta = 0.0;
  std::optional<double> mu, grad_j_max, grad_h_max;
};

int run_budget(const BudgetOptions& opt) {
  BudgetInputs in;
  in.dim = opt.dim;
  in.diam = opt.diam;
  in.lip_j = opt.lip_j;
  in.lip_h = opt.lip_h;
  in.eta = opt.eta;
  in.delta = opt.delta;
  in.mu = opt.mu;
  in.grad_j_max = opt.grad_j_max;
  in.grad_h_max = opt.grad_h_max;
  try {
    std::cout << "T_sufficient (unconstrained): "
              << t_sufficient_unconstrained(in) << "\n";
    if (in.grad_j_max) {
      const double slack = delta_gap_bound(*in.grad_j_max, in.delta, in.lip_h);
      if (in.eta < slack)
        std::cerr << "warning: eta < ||grad J||max sqrt(2 delta/L_H) = "
                  << slack
                  << "; the constrained-budget theorem needs eta >= that "
                     "slack\n";
    }
    std::cout << "T_sufficient (constrained):   "
              << t_sufficient_constrained(in) << "\n";
    std::cout << "kappa:                        " << budget_kappa(in) << "\n";
    std::cout << "T_sufficient (mu-convex):     " << t_sufficient_mu_convex(in)
              << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

struct MountainCarOptions {
  std::int64_t budget = 10;
  std::string out_dir = "mountaincar_out";
  std::optional<std::int64_t> max_nodes;
};

int run_mountaincar(const MountainCarOptions& opt) {
  namespace mc = mountaincar;
  fs::create_directories(opt.out_dir);

  auto run_one = [&](bool use_constraint) {
    mc::TrainConfig cfg;
    cfg.budget = opt.budget;
    cfg.use_constraint = use_constraint;
    cfg.subsolver.max_nodes =
        env_max_nodes_override(opt.max_nodes.value_or(cfg.subsolver.max_nodes));
    return mc::train(cfg);
  };

  const auto tic = std::chrono::steady_clock::now();
  const mc::TrainResult constrained = run_one(true);
  const mc::TrainResult unconstrained = run_one(false);
  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - tic)
                           .count();

  // row 0 is the initial policy q1, so a full run emits exactly T rows
  auto per_query_csv = [](const mc::TrainResult& r, const Point& q1) {
    const double reward_q1 = mc::run_episode(q1).cumulative_reward;
    const double energy_q1 = mc::energy_constraint(q1);
    std::string csv = "iter,reward,energy_gap,feasible\n";
    csv += "0," + detail::format_double(reward_q1) + "," +
           detail::format_double(energy_q1) + "," +
           (energy_q1 <= 0.0 ? "1" : "0") + "\n";
    for (const auto& row : r.outcome.trace) {
      csv += std::to_string(row.iter) + "," +
             detail::format_double(-row.j_at_query) + "," +
             detail::format_double(row.h_at_query) + "," +
             (row.feasible_flag ? "1" : "0") + "\n";
    }
    return csv;
  };
  const Point q1 = mc::TrainConfig{}.q1;
  atomic_write(fs::path(opt.out_dir) / "constrained.csv",
               per_query_csv(constrained, q1));
  atomic_write(fs::path(opt.out_dir) / "unconstrained.csv",
               per_query_csv(unconstrained, q1));

  auto to_json = [](const mc::TrainResult& r) {
    json j;
    j["status"] = to_string(r.outcome.status);
    j["episodes"] = r.episodes;
    j["episodes_separate_accounting"] = r.episodes_separate;
    j["oracle_calls"] = r.outcome.oracle_calls;
    j["best_reward"] = r.best_reward;
    j["success_reward_above_90"] = r.success;
    return j;
  };
  json summary;
  summary["constrained"] = to_json(constrained);
  summary["unconstrained"] = to_json(unconstrained);
  summary["constrained_beats_unconstrained"] =
      constrained.best_reward > unconstrained.best_reward;
  summary["wall_ms"] = wall_ms;
  atomic_write(fs::path(opt.out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lipcover: covering methods for constrained global optimization with "
      "Lipschitz-continuous gradients"};
  app.require_subcommand(1);
  // later occurrences win, so config-file values yield to explicit flags
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SolveOptions solve_opt;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "run one algorithm on a configured problem");
  solve_cmd->add_option("--problem", solve_opt.problem_id,
                        "P1..P8, INF, APXB-1, APXB-2, ROSEN-<d>")
      ->required();
  solve_cmd->add_option("--algorithm", solve_opt.algorithm,
                        "cover | constrained | relax-project");
  solve_cmd->add_option("--start", solve_opt.start, "infeasible | feasible");
  solve_cmd->add_option("--infeasible-start-mode",
                        solve_opt.infeasible_start_mode, "off | minimize-h");
  solve_cmd->add_option("--eta", solve_opt.eta);
  solve_cmd->add_option("--delta", solve_opt.delta);
  solve_cmd->add_option("--budget", solve_opt.budget);
  solve_cmd->add_option("--lip-j", solve_opt.lip_j);
  solve_cmd->add_option("--lip-h", solve_opt.lip_h);
  solve_cmd->add_option("--mu", solve_opt.mu);
  solve_cmd->add_option("--gap-tol", solve_opt.gap_tol,
                        "subsolver absolute gap tolerance");
  solve_cmd->add_option("--max-nodes", solve_opt.max_nodes);
  solve_cmd->add_option("--start-point", solve_opt.start_point,
                        "comma-separated q1 override");
  solve_cmd->add_option("--trace", solve_opt.trace_path, "trace CSV path");
  solve_cmd->add_option("--summary", solve_opt.summary_path,
                        "summary JSON path");

  BenchOptions bench_opt;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "run the P1-P8 suite under both algorithms and both starts");
  bench_cmd->add_option("--out", bench_opt.out_dir);
  bench_cmd->add_option("--budget", bench_opt.budget);
  bench_cmd->add_option("--max-nodes", bench_opt.max_nodes);

  BudgetOptions budget_opt;
  CLI::App* budget_cmd = app.add_subcommand(
      "budget", "print the worst-case sufficient budgets and kappa");
  budget_cmd->add_option("--d", budget_opt.dim)->required();
  budget_cmd->add_option("--diam", budget_opt.diam)->required();
  budget_cmd->add_option("--lip-j", budget_opt.lip_j)->required();
  budget_cmd->add_option("--lip-h", budget_opt.lip_h)->required();
  budget_cmd->add_option("--eta", budget_opt.eta)->required();
  budget_cmd->add_option("--delta", budget_opt.delta)->required();
  budget_cmd->add_option("--mu", budget_opt.mu);
  budget_cmd->add_option("--grad-j-max", budget_opt.grad_j_max);
  budget_cmd->add_option("--grad-h-max", budget_opt.grad_h_max);

  MountainCarOptions mc_opt;
  CLI::App* mc_cmd = app.add_subcommand(
      "mountaincar",
      "train the 5-parameter policy with and without the energy constraint");
  mc_cmd->add_option("--budget", mc_opt.budget);
  mc_cmd->add_option("--out", mc_opt.out_dir);
  mc_cmd->add_option("--max-nodes", mc_opt.max_nodes);

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI::App::parse pops from the back
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (solve_cmd->parsed()) return run_solve(solve_opt);
  if (bench_cmd->parsed()) return run_bench(bench_opt);
  if (budget_cmd->parsed()) return run_budget(budget_opt);
  if (mc_cmd->parsed()) return run_mountaincar(mc_opt);
  return kExitUsage;
}
