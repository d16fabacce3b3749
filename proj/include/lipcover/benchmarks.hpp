#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lipcover/geometry.hpp"
#include "lipcover/oracle.hpp"
#include "lipcover/problem.hpp"

namespace lipcover {

/// White-box scalar test function with an analytic gradient plus the
/// Lipschitz-gradient constant the experiments configure for it.
struct TestFunction {
  std::string name;
  std::function<FunctionSample(const Point&)> evaluator;
  double configured_lip = 0.0;            // L_f used by the algorithms
  std::optional<double> true_lip;          // K_f when known/estimated
  std::optional<double> mu;                // strong-convexity constant, if any

  FunctionSample operator()(const Point& x) const { return evaluator(x); }
  double value(const Point& x) const { return evaluator(x).value; }
};

inline constexpr double kBowlRadius = 10.0;
inline const Point kBowlCenter{-3.0, -3.0};

inline FunctionSample branin(const Point& x) {
  constexpr double pi = std::numbers::pi;
  const double a = 5.1 / (4.0 * pi * pi);
  const double b = 5.0 / pi;
  const double s = 10.0 * (1.0 - 1.0 / (8.0 * pi));
  const double inner = x[1] - a * x[0] * x[0] + b * x[0] - 6.0;
  FunctionSample r;
  r.value = inner * inner + s * std::cos(x[0]) + 10.0;
  r.grad = {2.0 * inner * (-2.0 * a * x[0] + b) - s * std::sin(x[0]),
            2.0 * inner};
  return r;
}

inline FunctionSample modified_branin(const Point& x) {
  FunctionSample r = branin(x);
  r.value += 20.0 * x[0] - 30.0 * x[1];
  r.grad[0] += 20.0;
  r.grad[1] -= 30.0;
  return r;
}

inline FunctionSample bowl(const Point& x) {
  FunctionSample r;
  r.value = 0.5 * (squared_distance(x, kBowlCenter) - kBowlRadius * kBowlRadius);
  r.grad = subtract(x, kBowlCenter);
  return r;
}

inline FunctionSample invbowl(const Point& x) {
  FunctionSample r = bowl(x);
  r.value = -r.value;
  for (double& g : r.grad) g = -g;
  return r;
}

inline FunctionSample sinq(const Point& x) {
  const double rsq = (x[0] * x[0] + x[1] * x[1]) / 10.0;
  FunctionSample r;
  r.value = std::sin(rsq);
  const double c = std::cos(rsq);
  r.grad = {c * 2.0 * x[0] / 10.0, c * 2.0 * x[1] / 10.0};
  return r;
}

/// d-dimensional Rosenbrock, global minimum 0 at the all-ones vector.
inline FunctionSample rosenbrock(const Point& x) {
  const std::size_t d = x.size();
  FunctionSample r;
  r.value = 0.0;
  r.grad.assign(d, 0.0);
  for (std::size_t i = 0; i + 1 < d; ++i) {
    const double gap = x[i + 1] - x[i] * x[i];
    const double one = 1.0 - x[i];
    r.value += 100.0 * gap * gap + one * one;
    r.grad[i] += -400.0 * x[i] * gap - 2.0 * one;
    r.grad[i + 1] += 200.0 * gap;
  }
  return r;
}

inline TestFunction branin_fn() { return {"Br", branin, 75.0, 65.0, {}}; }
inline TestFunction modified_branin_fn() {
  return {"MBr", modified_branin, 75.0, 65.0, {}};
}
inline TestFunction bowl_fn() { return {"Bowl", bowl, 2.0, 1.0, 0.5}; }
inline TestFunction invbowl_fn() { return {"InvBowl", invbowl, 2.0, 1.0, {}}; }
inline TestFunction sinq_fn() { return {"SinQ", sinq, 6.0, 4.2, {}}; }

/// One configured benchmark instance, with both tabulated start points.
struct BenchmarkProblem {
  std::string id;
  TestFunction objective;
  TestFunction constraint;
  BoxDomain domain;
  Point infeasible_start;
  Point feasible_start;
  double eta = 0.1;
  double delta = 1e-5;
  std::int64_t budget = 400;
};

inline FirstOrderOracle make_benchmark_oracle(const BenchmarkProblem& p) {
  return make_analytic_oracle(p.objective.evaluator, p.constraint.evaluator);
}

enum class StartChoice { Infeasible, Feasible };

inline ProblemSpec make_problem_spec(const BenchmarkProblem& p,
                                     StartChoice start) {
  ProblemSpec spec;
  spec.dim = static_cast<int>(p.domain.dim());
  spec.domain = p.domain;
  spec.oracle = make_benchmark_oracle(p);
  spec.lip_j = p.objective.configured_lip;
  spec.lip_h = p.constraint.configured_lip;
  spec.convexity_mu = p.constraint.mu;
  spec.eta = p.eta;
  spec.delta = p.delta;
  spec.budget = p.budget;
  spec.q1 = start == StartChoice::Infeasible ? p.infeasible_start
                                             : p.feasible_start;
  return spec;
}

/// The eight two-dimensional benchmark problems on [-10,10]^2.
inline std::vector<BenchmarkProblem> suite() {
  constexpr double pi = std::numbers::pi;
  const BoxDomain box{{-10.0, -10.0}, {10.0, 10.0}};
  const double r_infeas = std::sqrt(40.0 * pi / 3.0);
  const Point sinq_infeasible{-r_infeas, r_infeas};
  const double r_feas = std::sqrt(20.0 * pi / 3.0);
  const Point sinq_feasible{r_feas, r_feas};
  const Point corner_start{5.5, -9.0};
  const Point top_start{0.0, 10.0};
  const double h = kBowlRadius / 2.0 / std::numbers::sqrt2;
  const Point bowl_inner{kBowlCenter[0] + h, kBowlCenter[1] + h};

  std::vector<BenchmarkProblem> probs;
  probs.push_back({"P1", branin_fn(), sinq_fn(), box, sinq_infeasible, sinq_feasible});
  probs.push_back({"P2", modified_branin_fn(), sinq_fn(), box, sinq_infeasible,
                   sinq_feasible});
  probs.push_back({"P3", branin_fn(), modified_branin_fn(), box, corner_start,
                   top_start});
  probs.push_back({"P4", modified_branin_fn(), modified_branin_fn(), box,
                   corner_start, top_start});
  probs.push_back({"P5", branin_fn(), invbowl_fn(), box, bowl_inner, corner_start});
  probs.push_back({"P6", modified_branin_fn(), invbowl_fn(), box, bowl_inner,
                   corner_start});
  probs.push_back({"P7", branin_fn(), bowl_fn(), box, corner_start, bowl_inner});
  probs.push_back({"P8", modified_branin_fn(), bowl_fn(), box, corner_start,
                   bowl_inner});
  return probs;
}

/// minimize MBr(x) subject to Br(x) <= 0: infeasible, since min Br > 0.
inline BenchmarkProblem infeasible_instance() {
  const BoxDomain box{{-10.0, -10.0}, {10.0, 10.0}};
  BenchmarkProblem p{"INF",          modified_branin_fn(), branin_fn(), box,
                     {5.5, -9.0},    {5.5, -9.0}};
  return p;
}

namespace detail {

/// sin(x)/(2x) - 0.02 x with the removable singularity at 0 filled in by the
/// series value 1/2 (gradient -0.02 there).
inline FunctionSample sinc_objective(const Point& x) {
  const double t = x[0];
  FunctionSample r;
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    r.value = 0.5 * (1.0 - t2 / 6.0 + t2 * t2 / 120.0) - 0.02 * t;
    r.grad = {-t / 6.0 + t * t2 / 60.0 - 0.02};
  } else {
    r.value = std::sin(t) / (2.0 * t) - 0.02 * t;
    r.grad = {(t * std::cos(t) - std::sin(t)) / (2.0 * t * t) - 0.02};
  }
  return r;
}

inline FunctionSample quartic_band_constraint(const Point& x) {
  const double t = x[0];
  const double w = t * t - 36.0;
  FunctionSample r;
  r.value = (w * w - 900.0) / 4000.0;
  r.grad = {4.0 * t * w / 4000.0};
  return r;
}

inline FunctionSample shifted_parabola_constraint(const Point& x) {
  const double t = x[0];
  FunctionSample r;
  r.value = ((t - 1.0) * (t - 1.0) - 49.0) / 100.0;
  r.grad = {2.0 * (t - 1.0) / 100.0};
  return r;
}

}  // namespace detail

/// The two one-dimensional illustration problems on [-10, 10]. The first has
/// a non-convex two-interval feasible set; the second a strongly-convex
/// constraint with feasible set [-6, 8].
inline std::pair<BenchmarkProblem, BenchmarkProblem> appendix_examples() {
  const BoxDomain box{{-10.0}, {10.0}};
  TestFunction obj{"SincLinear", detail::sinc_objective, 0.2, {}, {}};
  TestFunction h1{"QuarticBand", detail::quartic_band_constraint, 0.2, {}, {}};
  TestFunction h2{"ShiftedParabola", detail::shifted_parabola_constraint, 1.2,
                  0.02, 0.01};
  BenchmarkProblem ex1{"APXB-1", obj, h1, box, {0.0}, {3.0},
                       0.01,     1e-8, 400};
  BenchmarkProblem ex2{"APXB-2", obj, h2, box, {9.0}, {0.0},
                       0.01,     1e-5, 400};
  return {ex1, ex2};
}

/// Rosenbrock scalability configuration: constraint ball blocking the line
/// from the corner start to the optimum, feasible on both sides.
inline BenchmarkProblem rosenbrock_problem(int d) {
  if (d < 2) throw std::invalid_argument("rosenbrock_problem: d must be >= 2");
  Point lower(d, -10.0), upper(d, 10.0);
  Point q1(d, -10.0), xstar(d, 1.0);
  Point center(d);
  for (int k = 0; k < d; ++k) center[k] = 0.5 * (q1[k] + xstar[k]);
  const double radius = 0.4 * distance(xstar, q1);

  TestFunction obj{"Rosenbrock", rosenbrock, 60.0, {}, {}};
  TestFunction con{
      "InvBowl-" + std::to_string(d),
      [center, radius](const Point& x) {
        FunctionSample r;
        r.value = -0.5 * (squared_distance(x, center) - radius * radius);
        r.grad = subtract(center, x);
        return r;
      },
      2.0,
      1.0,
      {}};
  BenchmarkProblem p{"ROSEN-" + std::to_string(d),
                     obj,
                     con,
                     BoxDomain{lower, upper},
                     q1,
                     q1,
                     0.1,
                     1e-5,
                     400};
  return p;
}

/// Grid search over the feasible set followed by a projected-gradient
/// polishing pass, the reference optimum the experiments compare against.
/// h_threshold selects the constraint relaxation (0 for the true problem,
/// delta for the relaxed one); pass +inf for unconstrained references.
struct ReferenceMin {
  Point point;
  double value = 0.0;
};

inline std::optional<ReferenceMin> grid_reference_min(
    const BenchmarkProblem& problem, double grid_step,
    double h_threshold = 0.0) {
  const std::size_t d = problem.domain.dim();
  if (d > 3) throw std::invalid_argument("grid_reference_min: d must be <= 3");

  std::vector<std::vector<double>> axes(d);
  for (std::size_t k = 0; k < d; ++k) {
    double v = problem.domain.lower[k];
    while (v < problem.domain.upper[k]) {
      axes[k].push_back(v);
      v += grid_step;
    }
    axes[k].push_back(problem.domain.upper[k]);
  }

  std::optional<ReferenceMin> best;
  std::vector<std::size_t> idx(d, 0);
  Point x(d);
  bool done = false;
  while (!done) {
    for (std::size_t k = 0; k < d; ++k) x[k] = axes[k][idx[k]];
    if (problem.constraint.value(x) <= h_threshold) {
      const double v = problem.objective.value(x);
      if (!best || v < best->value) best = ReferenceMin{x, v};
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
  if (!best) return std::nullopt;

  // polish: projected gradient descent with backtracking, rejecting steps
  // that leave the feasible set
  Point cur = best->point;
  double cur_val = best->value;
  for (int it = 0; it < 200; ++it) {
    const FunctionSample g = problem.objective(cur);
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
      Point cand = problem.domain.clamp(axpy(cur, -step, g.grad));
      if (problem.constraint.value(cand) > h_threshold) continue;
      const double v = problem.objective.value(cand);
      if (v < cur_val - 1e-12) {
        cur = std::move(cand);
        cur_val = v;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return ReferenceMin{cur, cur_val};
}

/// Checks the boundary-regularity assumption ||grad H(x)|| >= sqrt(2 L_H
/// delta) over the band {0 < H <= delta} by grid scan. An empty band passes
/// vacuously.
struct Assumption2Report {
  std::size_t band_points = 0;
  double min_grad_norm = kInf;
  double required = 0.0;
  bool pass = true;
};

inline Assumption2Report assumption2_audit(const TestFunction& constraint,
                                           const BoxDomain& box, double delta,
                                           double lip_h, double grid_step) {
  Assumption2Report rep;
  rep.required = std::sqrt(2.0 * lip_h * delta);
  const std::size_t d = box.dim();
  std::vector<std::vector<double>> axes(d);
  for (std::size_t k = 0; k < d; ++k) {
    double v = box.lower[k];
    while (v < box.upper[k]) {
      axes[k].push_back(v);
      v += grid_step;
    }
    axes[k].push_back(box.upper[k]);
  }
  std::vector<std::size_t> idx(d, 0);
  Point x(d);
  bool done = false;
  while (!done) {
    for (std::size_t k = 0; k < d; ++k) x[k] = axes[k][idx[k]];
    const FunctionSample s = constraint(x);
    if (s.value > 0.0 && s.value <= delta) {
      ++rep.band_points;
      rep.min_grad_norm = std::min(rep.min_grad_norm, norm(s.grad));
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
  rep.pass = rep.band_points == 0 || rep.min_grad_norm >= rep.required;
  return rep;
}

/// Adversarial-style fixture: the constraint oracle always answers H = c > 0
/// with zero gradient, so no algorithm can ever observe a feasible point.
/// The objective defaults to SinQ.
inline FirstOrderOracle resistive_oracle(
    double c, std::function<FunctionSample(const Point&)> j = sinq) {
  if (!(c > 0.0)) throw std::invalid_argument("resistive_oracle: c must be > 0");
  return make_analytic_oracle(std::move(j), [c](const Point& x) {
    FunctionSample r;
    r.value = c;
    r.grad.assign(x.size(), 0.0);
    return r;
  });
}

}  // namespace lipcover
