#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lipcover/geometry.hpp"
#include "lipcover/oracle.hpp"

namespace lipcover {

/// Full description of one constrained global optimization run:
/// minimize J(x) subject to H(x) <= 0 over an axis-aligned box, with
/// Lipschitz gradient constants, thresholds and an oracle-call budget.
struct ProblemSpec {
  int dim = 0;
  BoxDomain domain;
  FirstOrderOracle oracle;
  double lip_j = 0.0;                 // L_J
  double lip_h = 0.0;                 // L_H
  std::optional<double> convexity_mu; // mu, required by relax_and_project
  double eta = 0.0;                   // suboptimality threshold
  double delta = 0.0;                 // constraint relaxation threshold
  std::int64_t budget = 0;            // total oracle calls T (includes q1)
  std::optional<double> grad_j_max;   // sup ||grad J|| over the domain
  std::optional<double> grad_h_max;   // sup ||grad H|| over the domain
  Point q1;                           // initial solution guess
};

/// Checks every ProblemSpec invariant; returns it unchanged on success and
/// throws std::invalid_argument naming the first violation otherwise.
inline ProblemSpec validate_problem(ProblemSpec spec) {
  if (spec.dim <= 0) throw std::invalid_argument("ProblemSpec: dim must be >= 1");
  if (spec.domain.dim() != static_cast<std::size_t>(spec.dim))
    throw std::invalid_argument("ProblemSpec: domain dimension != dim");
  if (!std::isfinite(spec.domain.diameter()))
    throw std::invalid_argument("ProblemSpec: domain diameter is not finite");
  if (!spec.oracle.valid())
    throw std::invalid_argument("ProblemSpec: oracle has no evaluator");
  if (!(spec.lip_j >= 0.0) || !std::isfinite(spec.lip_j))
    throw std::invalid_argument("ProblemSpec: lip_j must be finite and >= 0");
  if (!(spec.lip_h >= 0.0) || !std::isfinite(spec.lip_h))
    throw std::invalid_argument("ProblemSpec: lip_h must be finite and >= 0");
  if (spec.convexity_mu) {
    if (!(*spec.convexity_mu > 0.0))
      throw std::invalid_argument("ProblemSpec: mu must be > 0");
    if (*spec.convexity_mu > spec.lip_h)
      throw std::invalid_argument("ProblemSpec: mu exceeds L_H");
  }
  if (!(spec.eta > 0.0)) throw std::invalid_argument("ProblemSpec: eta must be > 0");
  if (!(spec.delta > 0.0))
    throw std::invalid_argument("ProblemSpec: delta must be > 0");
  if (spec.budget < 1) throw std::invalid_argument("ProblemSpec: budget must be >= 1");
  if (spec.grad_j_max && !(*spec.grad_j_max >= 0.0))
    throw std::invalid_argument("ProblemSpec: grad_j_max must be >= 0");
  if (spec.grad_h_max && !(*spec.grad_h_max >= 0.0))
    throw std::invalid_argument("ProblemSpec: grad_h_max must be >= 0");
  if (!all_finite(spec.q1))
    throw std::invalid_argument("ProblemSpec: q1 has a non-finite coordinate");
  if (!spec.domain.contains(spec.q1))
    throw std::invalid_argument("ProblemSpec: q1 lies outside the domain");
  return spec;
}

enum class RunStatus { Minimum, Infeasible, BudgetExhausted };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Minimum: return "Minimum";
    case RunStatus::Infeasible: return "Infeasible";
    case RunStatus::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

/// Per-iteration log entry. One row per oracle query after q1.
struct IterationTrace {
  std::int64_t iter = 0;              // t, strictly increasing from 1
  Point query;                        // q_{t+1}
  std::optional<Point> relax_point;   // xi_{t+1}, relax-and-project only
  double j_at_query = 0.0;
  double h_at_query = 0.0;
  bool feasible_flag = false;         // H(q) <= 0
  bool within_delta_flag = false;     // H(q) <= delta
  double delta_global = kInf;         // current suboptimality bound
  double surrogate_lb = 0.0;          // certified bound of the iteration's subproblem
  std::int64_t subsolver_nodes = 0;
  std::int64_t wall_ms = 0;
  bool projection_clamped = false;    // box fallback fired in the Project step
};

/// Terminal result of an algorithm run.
struct RunOutcome {
  RunStatus status = RunStatus::BudgetExhausted;
  std::optional<Point> best_point;      // x^ddag
  std::optional<double> best_value;     // J(x^ddag)
  std::optional<double> delta_global;   // global suboptimality bound
  std::optional<double> gamma;          // infeasibility certificate
  std::vector<IterationTrace> trace;
  std::int64_t oracle_calls = 0;
  bool node_limit_hit = false;          // a subproblem stopped on its node cap
};

}  // namespace lipcover
