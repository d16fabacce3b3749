#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "lipcover/algorithms.hpp"
#include "lipcover/benchmarks.hpp"

using namespace lipcover;

namespace {

Point random_point(std::mt19937& rng, const BoxDomain& box) {
  Point x(box.dim());
  for (std::size_t k = 0; k < box.dim(); ++k) {
    std::uniform_real_distribution<double> dist(box.lower[k], box.upper[k]);
    x[k] = dist(rng);
  }
  return x;
}

void check_gradient(const TestFunction& f, const BoxDomain& box, int points,
                    unsigned seed) {
  std::mt19937 rng(seed);
  const double h = 1e-6;
  for (int i = 0; i < points; ++i) {
    const Point x = random_point(rng, box);
    const FunctionSample s = f(x);
    for (std::size_t k = 0; k < box.dim(); ++k) {
      Point xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (f.value(xp) - f.value(xm)) / (2.0 * h);
      const double scale = std::max(1.0, std::abs(s.grad[k]));
      REQUIRE(std::abs(fd - s.grad[k]) / scale <= 1e-5);
    }
  }
}

}  // namespace

TEST_CASE("test function values at pinned points") {
  REQUIRE(bowl(kBowlCenter).value == Catch::Approx(-50.0));
  REQUIRE(bowl(kBowlCenter).grad == Point{0.0, 0.0});
  // the linear correction of MBr vanishes at the origin
  REQUIRE(modified_branin({0.0, 0.0}).value == Catch::Approx(branin({0.0, 0.0}).value));
  REQUIRE(branin({std::numbers::pi, 2.275}).value == Catch::Approx(0.3979).margin(1e-3));
  REQUIRE(sinq({0.0, 0.0}).value == 0.0);
  REQUIRE(invbowl({0.0, 0.0}).value == Catch::Approx(-bowl({0.0, 0.0}).value));
  REQUIRE(rosenbrock(Point{1.0, 1.0, 1.0}).value == 0.0);
}

TEST_CASE("analytic gradients match central differences") {
  const BoxDomain box2{{-10.0, -10.0}, {10.0, 10.0}};
  check_gradient(branin_fn(), box2, 1000, 101);
  check_gradient(modified_branin_fn(), box2, 1000, 103);
  check_gradient(bowl_fn(), box2, 1000, 107);
  check_gradient(invbowl_fn(), box2, 1000, 109);
  check_gradient(sinq_fn(), box2, 1000, 113);
  const BoxDomain box3{{-10.0, -10.0, -10.0}, {10.0, 10.0, 10.0}};
  check_gradient(TestFunction{"Rosenbrock", rosenbrock, 60.0, {}, {}}, box3,
                 300, 127);
}

TEST_CASE("configured Lipschitz constants dominate sampled gradient ratios") {
  std::mt19937 rng(131);
  const BoxDomain box{{-10.0, -10.0}, {10.0, 10.0}};
  for (const TestFunction& f :
       {branin_fn(), modified_branin_fn(), bowl_fn(), invbowl_fn(), sinq_fn()}) {
    double worst = 0.0;
    for (int i = 0; i < 4000; ++i) {
      const Point x = random_point(rng, box);
      const Point y = random_point(rng, box);
      const double dy = distance(x, y);
      if (dy < 1e-8) continue;
      const double dg = distance(f(x).grad, f(y).grad);
      worst = std::max(worst, dg / dy);
    }
    INFO(f.name);
    REQUIRE(worst <= f.configured_lip);
    if (f.true_lip) REQUIRE(worst <= *f.true_lip * 1.05);
  }
}

TEST_CASE("bowl satisfies the strong-convexity inequality with mu = 0.5") {
  std::mt19937 rng(137);
  const BoxDomain box{{-10.0, -10.0}, {10.0, 10.0}};
  const double mu = *bowl_fn().mu;
  for (int i = 0; i < 2000; ++i) {
    const Point x = random_point(rng, box);
    const Point y = random_point(rng, box);
    const FunctionSample sx = bowl(x);
    const double rhs = sx.value + dot(sx.grad, subtract(y, x)) +
                       0.5 * mu * squared_distance(y, x);
    REQUIRE(bowl(y).value >= rhs - 1e-9);
  }
}

TEST_CASE("suite matches the tabulated configuration") {
  const auto probs = suite();
  REQUIRE(probs.size() == 8);
  REQUIRE(probs[0].id == "P1");
  REQUIRE(probs[0].objective.name == "Br");
  REQUIRE(probs[0].constraint.name == "SinQ");
  const double r = std::sqrt(40.0 * std::numbers::pi / 3.0);
  REQUIRE(probs[0].infeasible_start[0] == Catch::Approx(-r));
  REQUIRE(probs[0].infeasible_start[1] == Catch::Approx(r));

  REQUIRE(probs[6].id == "P7");
  REQUIRE(probs[6].constraint.name == "Bowl");
  REQUIRE(probs[6].constraint.mu == 0.5);  // eligible for relax-and-project

  for (const auto& p : probs) {
    INFO(p.id);
    REQUIRE(p.domain.contains(p.infeasible_start));
    REQUIRE(p.domain.contains(p.feasible_start));
    // the start labels must be truthful
    REQUIRE(p.constraint.value(p.infeasible_start) > 0.0);
    REQUIRE(p.constraint.value(p.feasible_start) <= 0.0);
    REQUIRE(p.eta == 0.1);
    REQUIRE(p.delta == 1e-5);
    REQUIRE(p.budget == 400);
  }
}

TEST_CASE("infeasible instance: the Branin sublevel set is empty") {
  const BenchmarkProblem inf = infeasible_instance();
  REQUIRE(inf.objective.name == "MBr");
  REQUIRE(inf.constraint.name == "Br");
  const auto ref = grid_reference_min(inf, 0.05);
  REQUIRE_FALSE(ref.has_value());  // no feasible grid point

  // unconstrained Branin reference: min approx 0.3979 > 0
  BenchmarkProblem unconstrained = inf;
  std::swap(unconstrained.objective, unconstrained.constraint);
  const auto branin_min = grid_reference_min(unconstrained, 0.05, kInf);
  REQUIRE(branin_min.has_value());
  REQUIRE(branin_min->value == Catch::Approx(0.3979).margin(1e-3));
}

TEST_CASE("appendix examples are configured as published") {
  const auto [ex1, ex2] = appendix_examples();
  // continuous extension of sin(x)/(2x) at 0
  REQUIRE(ex1.objective.value({0.0}) == Catch::Approx(0.5));
  REQUIRE(ex1.objective({0.0}).grad[0] == Catch::Approx(-0.02));
  check_gradient(ex1.objective, BoxDomain{{-10.0}, {10.0}}, 500, 139);
  check_gradient(ex1.constraint, BoxDomain{{-10.0}, {10.0}}, 500, 149);

  // example 2 boundary: H(8) = 0, feasible set [-6, 8]
  REQUIRE(ex2.constraint.value({8.0}) == Catch::Approx(0.0));
  REQUIRE(ex2.constraint.value({-6.0}) == Catch::Approx(0.0));
  REQUIRE(ex2.constraint.value({0.0}) < 0.0);
  REQUIRE(ex2.constraint.value({9.0}) > 0.0);

  // example 1 feasible intervals bracket sqrt(6) and sqrt(66)
  const double lo = std::sqrt(6.0), hi = std::sqrt(66.0);
  REQUIRE(ex1.constraint.value({lo}) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(ex1.constraint.value({hi}) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(ex1.constraint.value({0.5 * (lo + hi)}) < 0.0);
  REQUIRE(ex1.constraint.value({0.0}) > 0.0);
  REQUIRE(ex1.constraint.value({9.0}) > 0.0);

  REQUIRE(ex1.eta == 0.01);
  REQUIRE(ex1.delta == 1e-8);
  REQUIRE(ex2.eta == 0.01);
}

TEST_CASE("grid reference finds the constrained optimum of P7") {
  const auto probs = suite();
  const auto ref = grid_reference_min(probs[6], 0.05);
  REQUIRE(ref.has_value());
  // the bowl contains the Branin global minimum (pi, 2.275): distance to
  // c_bowl is about 8.1 < 10, so the constrained and unconstrained optima agree
  REQUIRE(probs[6].constraint.value(ref->point) <= 0.0);
  REQUIRE(ref->value == Catch::Approx(0.3979).margin(1e-3));
}

TEST_CASE("assumption 2 audit") {
  const BoxDomain box{{-10.0, -10.0}, {10.0, 10.0}};

  SECTION("bowl passes: the band is an annulus with unit-scale gradients") {
    const auto rep = assumption2_audit(bowl_fn(), box, 1e-5, 2.0, 0.01);
    REQUIRE(rep.pass);
  }

  SECTION("a constant constraint yields an empty band, vacuous pass") {
    TestFunction flat{"Zero",
                      [](const Point& x) {
                        return FunctionSample{0.0, Point(x.size(), 0.0)};
                      },
                      1.0,
                      {},
                      {}};
    const auto rep = assumption2_audit(flat, box, 1e-5, 1.0, 0.5);
    REQUIRE(rep.band_points == 0);
    REQUIRE(rep.pass);
  }

  SECTION("a cubic-flat boundary crossing fails") {
    TestFunction cubic{"Cubic",
                       [](const Point& x) {
                         return FunctionSample{x[0] * x[0] * x[0],
                                               {3.0 * x[0] * x[0], 0.0}};
                       },
                       60.0,
                       {},
                       {}};
    const auto rep = assumption2_audit(cubic, box, 1e-5, 60.0, 0.001);
    REQUIRE(rep.band_points > 0);
    REQUIRE_FALSE(rep.pass);
  }
}

TEST_CASE("resistive oracle always reports H = c with zero gradient") {
  FirstOrderOracle oracle = resistive_oracle(1.0);
  std::mt19937 rng(151);
  const BoxDomain box{{-10.0, -10.0}, {10.0, 10.0}};
  for (int i = 0; i < 20; ++i) {
    const QueryRecord r = oracle.evaluate(random_point(rng, box));
    REQUIRE(r.h_value == 1.0);
    REQUIRE(r.h_grad == Point{0.0, 0.0});
  }
  REQUIRE_THROWS(resistive_oracle(0.0));
}

TEST_CASE("rosenbrock scaling problem is feasible at its start") {
  for (int d : {2, 3}) {
    const BenchmarkProblem p = rosenbrock_problem(d);
    REQUIRE(p.domain.dim() == std::size_t(d));
    REQUIRE(p.constraint.value(p.feasible_start) <= 0.0);
    // the optimum (all ones) is also outside the blocking ball
    REQUIRE(p.constraint.value(Point(d, 1.0)) <= 0.0);
    // but the segment midpoint is inside it (the ball actually blocks)
    Point mid(d);
    for (int k = 0; k < d; ++k) mid[k] = 0.5 * (-10.0 + 1.0);
    REQUIRE(p.constraint.value(mid) > 0.0);
  }
}
