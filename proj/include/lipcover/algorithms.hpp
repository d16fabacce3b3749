#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lipcover/approximants.hpp"
#include "lipcover/geometry.hpp"
#include "lipcover/problem.hpp"
#include "lipcover/projection.hpp"
#include "lipcover/subsolver.hpp"

namespace lipcover {

/// Subsolver tolerances tied to the run thresholds: the branch-and-bound gap
/// must not consume the algorithm-level thresholds, so it defaults to
/// min(eta, delta)/10.
inline BnBConfig default_subsolver_config(const ProblemSpec& spec) {
  BnBConfig cfg;
  cfg.abs_gap_tol = std::min(spec.eta, spec.delta) / 10.0;
  return cfg;
}

enum class InfeasibleStartMode { Off, MinimizeHFirst };

namespace detail {

inline std::int64_t elapsed_ms(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - start)
      .count();
}

/// Tracks the incumbent over recorded queries. Eligibility is caller-defined
/// (all queries for the unconstrained/feasible-iterate algorithms, within-
/// delta queries otherwise). Earliest query wins ties.
struct Incumbent {
  std::optional<std::size_t> index;
  double value = kInf;

  void offer(std::size_t record_index, double j_value) {
    if (!index || j_value < value) {
      index = record_index;
      value = j_value;
    }
  }
};

}  // namespace detail

/// Covering method for box-constrained global minimization of J (the
/// constraint H is ignored). Queries the minimizer of the data-driven
/// minorant J_t^- until the suboptimality bound Delta_global falls below eta
/// or the budget runs out.
inline RunOutcome covering_method(const ProblemSpec& raw_spec,
                                  const BnBConfig& bnb) {
  const ProblemSpec spec = validate_problem(raw_spec);
  RunOutcome out;
  std::vector<QueryRecord> records;
  records.push_back(spec.oracle.evaluate(spec.q1));

  detail::Incumbent best;
  best.offer(0, records[0].j_value);
  double delta_global = kInf;

  for (std::int64_t t = 1; spec.oracle.call_count() < spec.budget; ++t) {
    const auto tic = std::chrono::steady_clock::now();
    SurrogateProblem sub;
    sub.kind = SurrogateKind::MinMinorant;
    sub.objective =
        make_approximant(j_pieces(records), spec.lip_j, ApproximantKind::Minorant);
    sub.box = spec.domain;
    const BnBResult res = solve(sub, bnb);
    if (res.status == BnBStatus::NodeLimit || !res.point) {
      out.node_limit_hit = true;
      break;
    }
    const QueryRecord rec = spec.oracle.evaluate(*res.point);
    records.push_back(rec);
    best.offer(records.size() - 1, rec.j_value);
    // certified lower bound folds the subsolver gap into Delta_global;
    // clamping keeps the bound monotone under bound wobble
    delta_global = std::min(delta_global, best.value - res.lower_bound);

    IterationTrace row;
    row.iter = t;
    row.query = rec.point;
    row.j_at_query = rec.j_value;
    row.h_at_query = rec.h_value;
    row.feasible_flag = rec.h_value <= 0.0;
    row.within_delta_flag = rec.h_value <= spec.delta;
    row.delta_global = delta_global;
    row.surrogate_lb = res.lower_bound;
    row.subsolver_nodes = res.nodes_expanded;
    row.wall_ms = detail::elapsed_ms(tic);
    out.trace.push_back(std::move(row));

    if (delta_global <= spec.eta) {
      out.status = RunStatus::Minimum;
      break;
    }
  }

  out.best_point = records[*best.index].point;
  out.best_value = best.value;
  if (std::isfinite(delta_global)) out.delta_global = delta_global;
  out.oracle_calls = spec.oracle.call_count();
  return out;
}

namespace detail {

/// Certified lower bound of inf over the box of the constraint minorant
/// H_t^-; the infeasibility certificate is gamma = -min(LB, 0), valid since
/// H >= H_t^- >= LB pointwise.
inline double h_minorant_lower_bound(const ProblemSpec& spec,
                                     const std::vector<QueryRecord>& records,
                                     const BnBConfig& bnb) {
  SurrogateProblem sub;
  sub.kind = SurrogateKind::MinMinorant;
  sub.objective =
      make_approximant(h_pieces(records), spec.lip_h, ApproximantKind::Minorant);
  sub.box = spec.domain;
  return solve(sub, bnb).lower_bound;
}

}  // namespace detail

/// Constrained covering method (smooth, possibly non-convex H, infeasible
/// start allowed). Ends in one of: Minimum (Delta_global <= eta), Infeasible
/// with a gamma certificate, or BudgetExhausted with the best data found.
/// MinimizeHFirst queries the minimizer of H_t^- until a within-delta point
/// appears, improving the certificate when feasibility is unknown.
inline RunOutcome constrained_covering(
    const ProblemSpec& raw_spec, const BnBConfig& bnb,
    InfeasibleStartMode mode = InfeasibleStartMode::Off) {
  const ProblemSpec spec = validate_problem(raw_spec);
  RunOutcome out;
  std::vector<QueryRecord> records;
  records.push_back(spec.oracle.evaluate(spec.q1));

  detail::Incumbent best;  // over within-delta queries only
  if (records[0].h_value <= spec.delta) best.offer(0, records[0].j_value);
  double delta_global = kInf;
  std::int64_t t = 0;

  auto push_row = [&](const QueryRecord& rec, double surrogate_lb,
                      std::int64_t nodes, const auto& tic) {
    IterationTrace row;
    row.iter = ++t;
    row.query = rec.point;
    row.j_at_query = rec.j_value;
    row.h_at_query = rec.h_value;
    row.feasible_flag = rec.h_value <= 0.0;
    row.within_delta_flag = rec.h_value <= spec.delta;
    row.delta_global = delta_global;
    row.surrogate_lb = surrogate_lb;
    row.subsolver_nodes = nodes;
    row.wall_ms = detail::elapsed_ms(tic);
    out.trace.push_back(std::move(row));
  };

  auto finish_infeasible = [&]() {
    const double lb = detail::h_minorant_lower_bound(spec, records, bnb);
    out.status = RunStatus::Infeasible;
    out.gamma = std::max(-lb, 0.0);
  };

  bool within_delta_seen = records[0].h_value <= spec.delta;

  if (mode == InfeasibleStartMode::MinimizeHFirst && !within_delta_seen) {
    while (spec.oracle.call_count() < spec.budget) {
      const auto tic = std::chrono::steady_clock::now();
      SurrogateProblem sub;
      sub.kind = SurrogateKind::MinMinorant;
      sub.objective = make_approximant(h_pieces(records), spec.lip_h,
                                       ApproximantKind::Minorant);
      sub.box = spec.domain;
      const BnBResult res = solve(sub, bnb);
      if (res.status == BnBStatus::NodeLimit || !res.point) {
        out.node_limit_hit = true;
        out.oracle_calls = spec.oracle.call_count();
        return out;
      }
      const QueryRecord rec = spec.oracle.evaluate(*res.point);
      records.push_back(rec);
      push_row(rec, res.lower_bound, res.nodes_expanded, tic);
      if (rec.h_value <= spec.delta) {
        within_delta_seen = true;
        break;
      }
    }
    if (!within_delta_seen) {
      if (!out.trace.empty()) finish_infeasible();
      out.oracle_calls = spec.oracle.call_count();
      return out;
    }
  }

  while (spec.oracle.call_count() < spec.budget) {
    const auto tic = std::chrono::steady_clock::now();
    SurrogateProblem sub;
    sub.kind = SurrogateKind::MinMinorantWithMinorantConstraint;
    sub.objective =
        make_approximant(j_pieces(records), spec.lip_j, ApproximantKind::Minorant);
    sub.constraint =
        make_approximant(h_pieces(records), spec.lip_h, ApproximantKind::Minorant);
    sub.box = spec.domain;
    for (const QueryRecord& r : records) {
      if (r.h_value <= 0.0) sub.seed_points.push_back(r.point);
    }
    const BnBResult res = solve(sub, bnb);
    if (res.status == BnBStatus::Infeasible) {
      // {H_t^- <= 0} empty and H_t^- <= H: the original problem is infeasible
      finish_infeasible();
      break;
    }
    if (res.status == BnBStatus::NodeLimit || !res.point) {
      out.node_limit_hit = true;
      break;
    }
    const QueryRecord rec = spec.oracle.evaluate(*res.point);
    records.push_back(rec);
    if (rec.h_value <= spec.delta) {
      best.offer(records.size() - 1, rec.j_value);
      delta_global = std::min(delta_global, best.value - res.lower_bound);
      within_delta_seen = true;
    }
    push_row(rec, res.lower_bound, res.nodes_expanded, tic);
    if (delta_global <= spec.eta) {
      out.status = RunStatus::Minimum;
      break;
    }
  }

  // Delta still infinite after a full run means no query ever landed within
  // delta; the final minorant certifies near-infeasibility. A run whose
  // budget allowed no iterations at all has nothing to certify with.
  if (out.status == RunStatus::BudgetExhausted && !std::isfinite(delta_global) &&
      !out.node_limit_hit && !out.trace.empty()) {
    finish_infeasible();
  }

  if (best.index) {
    out.best_point = records[*best.index].point;
    out.best_value = best.value;
  }
  if (std::isfinite(delta_global)) out.delta_global = delta_global;
  out.oracle_calls = spec.oracle.call_count();
  return out;
}

/// Relax-and-project method for strongly-convex H and a feasible start.
/// Every query provably satisfies H <= 0: the relax step optimizes over the
/// sc-minorant outer approximation, the project step maps the relaxed point
/// onto the ball-union inner approximation {H_t^+ <= 0}.
inline RunOutcome relax_and_project(const ProblemSpec& raw_spec,
                                    const BnBConfig& bnb) {
  const ProblemSpec spec = validate_problem(raw_spec);
  if (!spec.convexity_mu)
    throw std::invalid_argument(
        "relax_and_project: convexity_mu is required for the sc-minorant");
  RunOutcome out;
  std::vector<QueryRecord> records;
  records.push_back(spec.oracle.evaluate(spec.q1));
  if (records[0].h_value > 0.0)
    throw std::runtime_error(
        "relax_and_project: precondition violated, H(q1) > 0 (the initial "
        "guess must be feasible)");

  detail::Incumbent best;
  best.offer(0, records[0].j_value);
  double delta_global = kInf;

  for (std::int64_t t = 1; spec.oracle.call_count() < spec.budget; ++t) {
    const auto tic = std::chrono::steady_clock::now();
    SurrogateProblem sub;
    sub.kind = SurrogateKind::MinMinorantWithScMinorantConstraint;
    sub.objective =
        make_approximant(j_pieces(records), spec.lip_j, ApproximantKind::Minorant);
    sub.constraint = make_approximant(h_pieces(records), *spec.convexity_mu,
                                      ApproximantKind::ScMinorant);
    sub.box = spec.domain;
    for (const QueryRecord& r : records) sub.seed_points.push_back(r.point);
    const BnBResult res = solve(sub, bnb);
    if (res.status == BnBStatus::Infeasible)
      throw std::runtime_error(
          "relax_and_project: relax subproblem reported infeasible, which "
          "contradicts H_t^sc(q1) = H(q1) <= 0");
    if (res.status == BnBStatus::NodeLimit || !res.point) {
      out.node_limit_hit = true;
      break;
    }
    const Point xi = *res.point;

    const std::vector<Ball> balls =
        balls_from_majorant(h_pieces(records), spec.lip_h);
    const ProjectionResult proj = project_union(xi, balls, spec.domain);

    // black-box-checkable feasibility gate: H(q) <= H_t^+(q) <= 0
    const ApproximantSet h_major = make_approximant(
        h_pieces(records), spec.lip_h, ApproximantKind::Majorant);
    if (eval(h_major, proj.point) > bnb.feas_tol)
      throw std::runtime_error(
          "relax_and_project: projected point violates the majorant gate");

    const QueryRecord rec = spec.oracle.evaluate(proj.point);
    records.push_back(rec);
    best.offer(records.size() - 1, rec.j_value);
    delta_global = std::min(delta_global, best.value - res.lower_bound);

    IterationTrace row;
    row.iter = t;
    row.query = rec.point;
    row.relax_point = xi;
    row.j_at_query = rec.j_value;
    row.h_at_query = rec.h_value;
    row.feasible_flag = rec.h_value <= 0.0;
    row.within_delta_flag = rec.h_value <= spec.delta;
    row.delta_global = delta_global;
    row.surrogate_lb = res.lower_bound;
    row.subsolver_nodes = res.nodes_expanded;
    row.wall_ms = detail::elapsed_ms(tic);
    row.projection_clamped = proj.box_clamped;
    out.trace.push_back(std::move(row));

    if (delta_global <= spec.eta) {
      out.status = RunStatus::Minimum;
      break;
    }
  }

  out.best_point = records[*best.index].point;
  out.best_value = best.value;
  if (std::isfinite(delta_global)) out.delta_global = delta_global;
  out.oracle_calls = spec.oracle.call_count();
  return out;
}

/// Inputs of the worst-case sufficient-budget formulas.
struct BudgetInputs {
  int dim = 0;
  double diam = 0.0;
  double lip_j = 0.0;
  double lip_h = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  std::optional<double> mu;
  std::optional<double> grad_j_max;
  std::optional<double> grad_h_max;
};

namespace detail {

/// ceil with a relative snap so that real-arithmetic integers survive the
/// rounding of irrational inputs like diam = 20*sqrt(2).
inline std::int64_t snapped_ceil(long double x) {
  const long double snapped = x - std::max<long double>(1e-9L, std::abs(x) * 1e-12L);
  return static_cast<std::int64_t>(std::ceil(snapped));
}

inline long double covering_count(int d, double diam, double per_cell) {
  // (diam * sqrt(d))^d * per_cell^(d/2)
  return std::pow(static_cast<long double>(diam) * std::sqrt(static_cast<long double>(d)),
                  static_cast<long double>(d)) *
         std::pow(static_cast<long double>(per_cell),
                  static_cast<long double>(d) / 2.0L);
}

}  // namespace detail

/// T >= ceil((diam sqrt(d))^d eps^(-d/2)) + 1 forces two points within
/// sqrt(eps) of each other.
inline std::int64_t pigeonhole_budget(int d, double diam, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("pigeonhole_budget: eps <= 0");
  return detail::snapped_ceil(detail::covering_count(d, diam, 1.0 / eps)) + 1;
}

/// Sufficient budget for the unconstrained covering method.
inline std::int64_t t_sufficient_unconstrained(const BudgetInputs& in) {
  if (!(in.eta > 0.0))
    throw std::invalid_argument("t_sufficient_unconstrained: eta <= 0");
  return detail::snapped_ceil(
             detail::covering_count(in.dim, in.diam, in.lip_j / in.eta)) +
         1;
}

/// Sufficient budget for the constrained covering method. The theorem's
/// hypothesis additionally wants eta >= grad_j_max * sqrt(2 delta / lip_h);
/// use delta_gap_bound to check it.
inline std::int64_t t_sufficient_constrained(const BudgetInputs& in) {
  if (!(in.eta > 0.0) || !(in.delta > 0.0))
    throw std::invalid_argument("t_sufficient_constrained: eta or delta <= 0");
  return detail::snapped_ceil(
             detail::covering_count(in.dim, in.diam, in.lip_j / in.eta) +
             detail::covering_count(in.dim, in.diam, in.lip_h / in.delta)) +
         1;
}

/// kappa = L_J (L_H ||grad J||max / (2 L_J ||grad H||max) + 2 L_H / mu).
inline double budget_kappa(const BudgetInputs& in) {
  if (!in.mu || !in.grad_j_max || !in.grad_h_max)
    throw std::invalid_argument(
        "budget_kappa: mu, grad_j_max and grad_h_max are required");
  if (!(*in.mu > 0.0) || !(*in.grad_h_max > 0.0))
    throw std::invalid_argument("budget_kappa: mu and grad_h_max must be > 0");
  return in.lip_j * (in.lip_h * *in.grad_j_max / (2.0 * in.lip_j * *in.grad_h_max) +
                     2.0 * in.lip_h / *in.mu);
}

/// Sufficient budget for the relax-and-project method.
inline std::int64_t t_sufficient_mu_convex(const BudgetInputs& in) {
  if (!(in.eta > 0.0))
    throw std::invalid_argument("t_sufficient_mu_convex: eta <= 0");
  const double kappa = budget_kappa(in);
  return detail::snapped_ceil(
             detail::covering_count(in.dim, in.diam, kappa / in.eta)) +
         1;
}

/// Lower-side suboptimality slack of the delta-relaxation,
/// ||grad J||max * sqrt(2 delta / L_H).
inline double delta_gap_bound(double grad_j_max, double delta, double lip_h) {
  if (!(lip_h > 0.0)) throw std::invalid_argument("delta_gap_bound: lip_h <= 0");
  return grad_j_max * std::sqrt(2.0 * delta / lip_h);
}

}  // namespace lipcover
