#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lipcover/approximants.hpp"
#include "lipcover/geometry.hpp"

namespace lipcover {

/// The structured subproblems the sequential algorithms hand to the solver:
/// minimize an objective minorant over a box, optionally subject to a
/// constraint minorant (nonconvex) or strongly-convex minorant (convex).
enum class SurrogateKind {
  MinMinorant,
  MinMinorantWithMinorantConstraint,
  MinMinorantWithScMinorantConstraint,
};

struct SurrogateProblem {
  SurrogateKind kind = SurrogateKind::MinMinorant;
  ApproximantSet objective;                 // kind Minorant
  std::optional<ApproximantSet> constraint; // Minorant or ScMinorant
  BoxDomain box;
  /// Known surrogate-feasible points (e.g. past feasible queries). Evaluated
  /// once as incumbent candidates; they never affect bounds.
  std::vector<Point> seed_points;
};

struct BnBConfig {
  double abs_gap_tol = 1e-6;
  std::int64_t max_nodes = 2'000'000;
  double feas_tol = 1e-9;
};

enum class BnBStatus { Optimal, Infeasible, NodeLimit };

inline const char* to_string(BnBStatus s) {
  switch (s) {
    case BnBStatus::Optimal: return "Optimal";
    case BnBStatus::Infeasible: return "Infeasible";
    case BnBStatus::NodeLimit: return "NodeLimit";
  }
  return "?";
}

struct BnBResult {
  BnBStatus status = BnBStatus::NodeLimit;
  std::optional<Point> point;   // incumbent, feasible within feas_tol
  std::optional<double> value;  // objective at the incumbent (upper bound)
  double lower_bound = -kInf;   // certified bound over the feasible set
  std::int64_t nodes_expanded = 0;
};

enum class PruneVerdict { MaybeFeasible, ProvablyInfeasible };

namespace detail {

/// Separable secant overestimator of x.x on a box:
/// s(x) = sum_k [(l_k + u_k) x_k - l_k u_k] >= x.x, with equality at vertices.
/// Returns the coefficient pair (slope_k, constant) contribution per coord.
inline double secant_constant(const BoxDomain& box) {
  double c = 0.0;
  for (std::size_t k = 0; k < box.dim(); ++k) c -= box.lower[k] * box.upper[k];
  return c;
}

/// Minimizes the affine function w.x + b over the box, coordinatewise at a
/// vertex. Zero slopes resolve to the lower bound for determinism. Optionally
/// writes the minimizing vertex.
inline double affine_min_over_box(const Point& w, double b, const BoxDomain& box,
                                  Point* argmin = nullptr) {
  double v = b;
  if (argmin) argmin->resize(box.dim());
  for (std::size_t k = 0; k < box.dim(); ++k) {
    const double xk = w[k] >= 0.0 ? box.lower[k] : box.upper[k];
    v += w[k] * xk;
    if (argmin) (*argmin)[k] = xk;
  }
  return v;
}

/// Lower bound of one minorant-style piece  a(x) + quad_coeff * x.x
/// (quad_coeff <= 0) over the box: replace x.x by its secant overestimator,
/// then minimize the resulting affine exactly.
inline double concave_piece_lb(const AffineForm& a, double quad_coeff,
                               const BoxDomain& box, Point* argmin = nullptr) {
  Point w(box.dim());
  for (std::size_t k = 0; k < box.dim(); ++k)
    w[k] = a.slope[k] + quad_coeff * (box.lower[k] + box.upper[k]);
  // secant_constant already carries the minus sign of -l*u
  const double b = a.intercept + quad_coeff * secant_constant(box);
  return affine_min_over_box(w, b, box, argmin);
}

/// Exact minimum of the convex separable quadratic a(x) + quad_coeff * x.x
/// (quad_coeff > 0) over the box, by clamping each parabola vertex.
inline double convex_piece_min(const AffineForm& a, double quad_coeff,
                               const BoxDomain& box) {
  double v = a.intercept;
  for (std::size_t k = 0; k < box.dim(); ++k) {
    double xk = -a.slope[k] / (2.0 * quad_coeff);
    xk = std::clamp(xk, box.lower[k], box.upper[k]);
    v += a.slope[k] * xk + quad_coeff * xk * xk;
  }
  return v;
}

struct DecomposedProblem {
  AffineDecomposition objective;                   // quad_coeff <= 0, max
  std::optional<AffineDecomposition> constraint;   // minorant or sc-minorant
  bool constraint_is_convex = false;               // sc-minorant pieces
};

inline DecomposedProblem decompose(const SurrogateProblem& p) {
  DecomposedProblem d;
  d.objective = affine_decomposition(p.objective);
  if (p.constraint) {
    d.constraint = affine_decomposition(*p.constraint);
    d.constraint_is_convex =
        p.constraint->kind == ApproximantKind::ScMinorant;
  }
  return d;
}

inline double lower_bound_box_impl(const DecomposedProblem& dec,
                                   const BoxDomain& box,
                                   Point* best_vertex = nullptr) {
  double best = -kInf;
  Point vertex;
  for (const AffineForm& a : dec.objective.affines) {
    Point v;
    const double lb =
        concave_piece_lb(a, dec.objective.quad_coeff, box, best_vertex ? &v : nullptr);
    if (lb > best) {
      best = lb;
      if (best_vertex) vertex = std::move(v);
    }
  }
  if (best_vertex) *best_vertex = std::move(vertex);
  return best;
}

inline PruneVerdict prune_constraint_impl(const DecomposedProblem& dec,
                                          const BoxDomain& box, double feas_tol) {
  const AffineDecomposition& c = *dec.constraint;
  for (const AffineForm& a : c.affines) {
    const double piece_min =
        dec.constraint_is_convex
            ? convex_piece_min(a, c.quad_coeff, box)
            : concave_piece_lb(a, c.quad_coeff, box);
    if (piece_min > feas_tol) return PruneVerdict::ProvablyInfeasible;
  }
  return PruneVerdict::MaybeFeasible;
}

}  // namespace detail

/// Certified lower bound of the surrogate objective over a sub-box:
/// max over pieces of the exact box-minimum of the piece's secant relaxation.
/// Always <= the true minimum of the objective minorant over the box.
inline double lower_bound_box(const SurrogateProblem& problem,
                              const BoxDomain& box) {
  return detail::lower_bound_box_impl(detail::decompose(problem), box);
}

/// Sound infeasibility test for the surrogate constraint on a sub-box.
/// ProvablyInfeasible means no point of the box satisfies the true surrogate
/// constraint within feas_tol.
inline PruneVerdict prune_constraint(const SurrogateProblem& problem,
                                     const BoxDomain& box, double feas_tol) {
  if (!problem.constraint)
    throw std::invalid_argument("prune_constraint: unconstrained problem");
  return detail::prune_constraint_impl(detail::decompose(problem), box, feas_tol);
}

namespace detail {

inline bool candidate_feasible(const SurrogateProblem& p, const Point& x,
                               double feas_tol) {
  if (!p.constraint) return true;
  return eval(*p.constraint, x) <= feas_tol;
}

}  // namespace detail

/// Evaluates the true surrogate at the box center and at the bound's
/// minimizing vertex; returns the better point that satisfies the true
/// constraint within feas_tol, if any.
inline std::optional<std::pair<Point, double>> incumbent_candidate(
    const SurrogateProblem& problem, const BoxDomain& box,
    double feas_tol = 1e-9) {
  const auto dec = detail::decompose(problem);
  Point vertex;
  detail::lower_bound_box_impl(dec, box, &vertex);
  std::optional<std::pair<Point, double>> best;
  for (const Point& cand : {box.center(), vertex}) {
    if (!detail::candidate_feasible(problem, cand, feas_tol)) continue;
    const double v = eval(problem.objective, cand);
    if (!best || v < best->second ||
        (v == best->second && lex_less(cand, best->first))) {
      best = {cand, v};
    }
  }
  return best;
}

namespace detail {

struct Node {
  double lb;
  std::int64_t seq;
  BoxDomain box;
};

struct NodeOrder {
  // min-heap on (lb, seq): best bound first, creation order on ties
  bool operator()(const Node& a, const Node& b) const {
    if (a.lb != b.lb) return a.lb > b.lb;
    return a.seq > b.seq;
  }
};

}  // namespace detail

/// Spatial branch-and-bound over axis-aligned sub-boxes with closed-form
/// secant-envelope bounds. Deterministic: best-bound node selection (ties by
/// creation order), longest-edge midpoint branching (ties by lowest
/// coordinate), lexicographic incumbent tie-breaking.
inline BnBResult solve(const SurrogateProblem& problem, const BnBConfig& config) {
  if (!(config.abs_gap_tol > 0.0))
    throw std::invalid_argument("BnBConfig: abs_gap_tol must be > 0");
  if (problem.objective.kind != ApproximantKind::Minorant)
    throw std::invalid_argument("SurrogateProblem: objective must be a Minorant");
  const bool constrained = problem.kind != SurrogateKind::MinMinorant;
  if (constrained != bool(problem.constraint))
    throw std::invalid_argument(
        "SurrogateProblem: constraint presence does not match kind");
  if (problem.kind == SurrogateKind::MinMinorantWithMinorantConstraint &&
      problem.constraint->kind != ApproximantKind::Minorant)
    throw std::invalid_argument("SurrogateProblem: constraint must be a Minorant");
  if (problem.kind == SurrogateKind::MinMinorantWithScMinorantConstraint &&
      problem.constraint->kind != ApproximantKind::ScMinorant)
    throw std::invalid_argument(
        "SurrogateProblem: constraint must be an ScMinorant");

  const auto dec = detail::decompose(problem);
  BnBResult result;

  std::optional<Point> inc_point;
  double inc_value = kInf;
  auto offer = [&](const Point& x, double v) {
    if (v < inc_value || (v == inc_value && inc_point && lex_less(x, *inc_point))) {
      inc_value = v;
      inc_point = x;
    }
  };
  auto offer_if_feasible = [&](const Point& x) {
    if (!problem.box.contains(x)) return;
    if (!detail::candidate_feasible(problem, x, config.feas_tol)) return;
    offer(x, eval(problem.objective, x));
  };

  for (const Point& s : problem.seed_points) offer_if_feasible(s);

  std::priority_queue<detail::Node, std::vector<detail::Node>, detail::NodeOrder>
      open;
  std::int64_t seq = 0;
  bool pruned_by_gap = false;   // some region discarded as not gap-improving
  bool dropped_leaf = false;    // unsplittable box discarded
  double dropped_lb = kInf;     // best bound among dropped leaves

  {
    Point v;
    const double lb = detail::lower_bound_box_impl(dec, problem.box, &v);
    offer_if_feasible(problem.box.center());
    offer_if_feasible(v);
    open.push({lb, seq++, problem.box});
  }

  auto finish_lower_bound = [&](double heap_lb) {
    double lb = heap_lb;
    if (pruned_by_gap && inc_point)
      lb = std::min(lb, inc_value - config.abs_gap_tol);
    if (dropped_leaf) lb = std::min(lb, dropped_lb);
    return lb;
  };

  auto finish_with_incumbent = [&](double heap_lb) {
    result.point = inc_point;
    result.value = inc_value;
    result.lower_bound = finish_lower_bound(heap_lb);
    // a dropped fp-resolution leaf may hold the bound below the gap target;
    // in that case do not certify optimality
    const bool dropped_binding =
        dropped_leaf && dropped_lb < inc_value - config.abs_gap_tol;
    result.status = dropped_binding ? BnBStatus::NodeLimit : BnBStatus::Optimal;
  };

  while (!open.empty()) {
    const detail::Node node = open.top();
    if (inc_point && inc_value - node.lb <= config.abs_gap_tol) {
      finish_with_incumbent(node.lb);
      return result;
    }
    if (result.nodes_expanded >= config.max_nodes) {
      result.status = BnBStatus::NodeLimit;
      result.point = inc_point;
      if (inc_point) result.value = inc_value;
      result.lower_bound = finish_lower_bound(node.lb);
      return result;
    }
    open.pop();
    ++result.nodes_expanded;

    // split the longest edge at its midpoint
    const std::size_t k = node.box.longest_edge();
    const double lo = node.box.lower[k];
    const double hi = node.box.upper[k];
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo) || !(mid < hi)) {
      // box at floating-point resolution; keep its bound, drop the node
      dropped_leaf = true;
      dropped_lb = std::min(dropped_lb, node.lb);
      continue;
    }
    for (int side = 0; side < 2; ++side) {
      BoxDomain child = node.box;
      if (side == 0)
        child.upper[k] = mid;
      else
        child.lower[k] = mid;
      if (constrained && detail::prune_constraint_impl(dec, child,
                                                       config.feas_tol) ==
                             PruneVerdict::ProvablyInfeasible) {
        continue;  // sound: child contains no feasible point
      }
      Point vertex;
      const double clb = detail::lower_bound_box_impl(dec, child, &vertex);
      offer_if_feasible(child.center());
      offer_if_feasible(vertex);
      if (inc_point && clb >= inc_value - config.abs_gap_tol) {
        pruned_by_gap = true;  // cannot improve past the gap tolerance
        continue;
      }
      open.push({clb, seq++, std::move(child)});
    }
  }

  // queue drained
  if (inc_point) {
    finish_with_incumbent(inc_value);
    return result;
  }
  if (constrained && !dropped_leaf && !pruned_by_gap) {
    // every region was removed by a constraint-infeasibility proof
    result.status = BnBStatus::Infeasible;
    result.lower_bound = kInf;
    return result;
  }
  // no incumbent and no clean proof: report honestly as a node-limit-style stop
  result.status = BnBStatus::NodeLimit;
  result.lower_bound = dropped_leaf ? dropped_lb : kInf;
  return result;
}

/// Independent test oracle: dense grid evaluation of the true surrogate,
/// filtered by the true constraint. Guarded to d <= 3.
struct GridReference {
  std::optional<Point> point;
  std::optional<double> value;
  bool grid_feasible = false;
};

inline GridReference brute_force_reference(const SurrogateProblem& problem,
                                           double grid_step,
                                           double feas_tol = 1e-9) {
  const std::size_t d = problem.box.dim();
  if (d > 3)
    throw std::invalid_argument("brute_force_reference: d must be <= 3");
  if (!(grid_step > 0.0))
    throw std::invalid_argument("brute_force_reference: grid_step must be > 0");

  std::vector<std::vector<double>> axes(d);
  for (std::size_t k = 0; k < d; ++k) {
    double v = problem.box.lower[k];
    while (v < problem.box.upper[k]) {
      axes[k].push_back(v);
      v += grid_step;
    }
    axes[k].push_back(problem.box.upper[k]);
  }

  GridReference ref;
  std::vector<std::size_t> idx(d, 0);
  Point x(d);
  bool done = false;
  while (!done) {
    for (std::size_t k = 0; k < d; ++k) x[k] = axes[k][idx[k]];
    if (detail::candidate_feasible(problem, x, feas_tol)) {
      const double v = eval(problem.objective, x);
      if (!ref.grid_feasible || v < *ref.value) {
        ref.grid_feasible = true;
        ref.point = x;
        ref.value = v;
      }
    }
    for (std::size_t k = 0;; ++k) {
      if (k == d) {
        done = true;
        break;
      }
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
    }
  }
  return ref;
}

}  // namespace lipcover
