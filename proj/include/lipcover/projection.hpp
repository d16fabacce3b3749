#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lipcover/approximants.hpp"
#include "lipcover/geometry.hpp"

namespace lipcover {

struct Ball {
  Point center;
  double radius = 0.0;

  bool contains(const Point& x) const {
    return squared_distance(x, center) <= radius * radius;
  }
};

/// Rewrites the sublevel set of a data-driven majorant as a union of balls:
/// {H_t^+ <= 0} = union_i Ball(q_i - grad H(q_i)/L_H,
///                             sqrt(||grad H(q_i)||^2/L_H^2 - 2 H(q_i)/L_H)).
/// Pieces with a negative discriminant contribute an empty set and are
/// dropped (cannot happen when every H(q_i) <= 0).
inline std::vector<Ball> balls_from_majorant(const std::vector<Piece>& h_pieces,
                                             double lip_h) {
  if (!(lip_h > 0.0))
    throw std::invalid_argument("balls_from_majorant: lip_h must be > 0");
  std::vector<Ball> balls;
  balls.reserve(h_pieces.size());
  for (const Piece& p : h_pieces) {
    const double disc =
        squared_norm(p.grad) / (lip_h * lip_h) - 2.0 * p.value / lip_h;
    if (disc < 0.0) continue;
    Ball b;
    b.center = axpy(p.center, -1.0 / lip_h, p.grad);
    b.radius = std::sqrt(disc);
    balls.push_back(std::move(b));
  }
  return balls;
}

/// Closed-form projection of z onto one ball: z itself when inside, otherwise
/// center + radius * unit(z - center).
inline Point project_ball(const Point& z, const Ball& ball) {
  const double dist = distance(z, ball.center);
  if (dist <= ball.radius) return z;
  return axpy(ball.center, ball.radius / dist, subtract(z, ball.center));
}

struct ProjectionResult {
  Point point;
  std::size_t ball_index = 0;  // the ball whose candidate won
  bool box_clamped = false;    // the box fallback was taken
};

namespace detail {

/// Fallback when the nearest union point leaves the box: walk the clamped
/// segment from the ball center toward z, bisecting the radial parameter to
/// the farthest point that is still inside the ball. Always returns a point
/// of ball-and-box (the ball center's box clamp belongs to both whenever the
/// intersection is nonempty).
inline Point project_ball_in_box(const Point& z, const Ball& ball,
                                 const BoxDomain& box) {
  const Point dir = subtract(z, ball.center);
  auto at = [&](double s) { return box.clamp(axpy(ball.center, s, dir)); };
  double lo = 0.0, hi = 1.0;
  if (ball.contains(at(1.0))) return at(1.0);
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ball.contains(at(mid)))
      lo = mid;
    else
      hi = mid;
  }
  return at(lo);
}

}  // namespace detail

/// Exact two-step projection of z onto (union of balls) intersected with the
/// box: per-ball closed-form projection, then the candidate nearest to z
/// (ties to the lowest ball index). If the winning candidate leaves the box a
/// flagged bisection fallback onto ball-and-box is used instead.
inline ProjectionResult project_union(const Point& z,
                                      const std::vector<Ball>& balls,
                                      const BoxDomain& box) {
  if (balls.empty())
    throw std::invalid_argument(
        "project_union: empty ball list (requires a feasible q1)");
  ProjectionResult best;
  double best_dist = kInf;
  bool best_needs_clamp = false;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    Point cand = project_ball(z, balls[i]);
    const bool outside = !box.contains(cand);
    if (outside) cand = detail::project_ball_in_box(z, balls[i], box);
    const double d = distance(z, cand);
    if (d < best_dist) {
      best_dist = d;
      best.point = std::move(cand);
      best.ball_index = i;
      best_needs_clamp = outside;
    }
  }
  best.box_clamped = best_needs_clamp;
  return best;
}

}  // namespace lipcover
