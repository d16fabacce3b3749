#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lipcover/geometry.hpp"
#include "lipcover/oracle.hpp"

namespace lipcover {

/// One oracle data point (q, f(q), grad f(q)) for a single scalar function.
struct Piece {
  Point center;
  double value = 0.0;
  Point grad;
};

enum class ApproximantKind { Minorant, Majorant, ScMinorant };

/// First-order approximation of f about the piece center,
/// f(q) + grad f(q) . (x - q).
inline double linearization(const Piece& piece, const Point& x) {
  double s = piece.value;
  for (std::size_t k = 0; k < x.size(); ++k)
    s += piece.grad[k] * (x[k] - piece.center[k]);
  return s;
}

/// Data-driven piecewise-quadratic bound of a smooth function built from
/// oracle samples. With curvature c:
///   Minorant    max_i [ l_i(x) - (c/2)||x - q_i||^2 ]   (c = L_f)
///   Majorant    min_i [ l_i(x) + (c/2)||x - q_i||^2 ]   (c = L_f)
///   ScMinorant  max_i [ l_i(x) + (c/2)||x - q_i||^2 ]   (c = mu, f mu-convex)
/// Pieces are append-only; ties in the max/min go to the lowest piece index.
struct ApproximantSet {
  std::vector<Piece> pieces;
  double curvature = 0.0;
  ApproximantKind kind = ApproximantKind::Minorant;
};

inline ApproximantSet make_approximant(std::vector<Piece> pieces,
                                       double curvature, ApproximantKind kind) {
  if (pieces.empty())
    throw std::invalid_argument("ApproximantSet: needs at least one piece");
  if (!(curvature >= 0.0))
    throw std::invalid_argument("ApproximantSet: curvature must be >= 0");
  if (kind == ApproximantKind::ScMinorant && !(curvature > 0.0))
    throw std::invalid_argument("ApproximantSet: ScMinorant needs curvature > 0");
  return ApproximantSet{std::move(pieces), curvature, kind};
}

inline Piece j_piece(const QueryRecord& r) {
  return Piece{r.point, r.j_value, r.j_grad};
}
inline Piece h_piece(const QueryRecord& r) {
  return Piece{r.point, r.h_value, r.h_grad};
}

inline std::vector<Piece> j_pieces(const std::vector<QueryRecord>& records) {
  std::vector<Piece> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(j_piece(r));
  return out;
}
inline std::vector<Piece> h_pieces(const std::vector<QueryRecord>& records) {
  std::vector<Piece> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(h_piece(r));
  return out;
}

inline double eval(const ApproximantSet& approx, const Point& x) {
  const double half_c = 0.5 * approx.curvature;
  const bool take_max = approx.kind != ApproximantKind::Majorant;
  const double quad_sign = approx.kind == ApproximantKind::Minorant ? -1.0 : 1.0;
  double best = 0.0;
  bool first = true;
  for (const Piece& p : approx.pieces) {
    const double v =
        linearization(p, x) + quad_sign * half_c * squared_distance(x, p.center);
    if (first || (take_max ? v > best : v < best)) {
      best = v;
      first = false;
    }
  }
  return best;
}

/// Affine function slope . x + intercept.
struct AffineForm {
  Point slope;
  double intercept = 0.0;

  double operator()(const Point& x) const { return dot(slope, x) + intercept; }
};

/// Exact re-expansion of an ApproximantSet as a common quadratic term plus a
/// max (or min, for majorants) of affine functions:
///   eval(x) = quad_coeff * (x . x) + combine_i affines[i](x)
/// with quad_coeff = -c/2 (Minorant), +c/2 (Majorant), +mu/2 (ScMinorant).
struct AffineDecomposition {
  double quad_coeff = 0.0;
  bool take_max = true;
  std::vector<AffineForm> affines;

  double operator()(const Point& x) const {
    double best = affines.front()(x);
    for (std::size_t i = 1; i < affines.size(); ++i) {
      const double v = affines[i](x);
      if (take_max ? v > best : v < best) best = v;
    }
    return best + quad_coeff * dot(x, x);
  }
};

inline AffineDecomposition affine_decomposition(const ApproximantSet& approx) {
  const double c = approx.curvature;
  AffineDecomposition dec;
  dec.take_max = approx.kind != ApproximantKind::Majorant;
  // l_i(x) -+ (c/2)||x - q_i||^2 = +-(c/2) x.x + (g_i +- c q_i).x
  //   + f_i - g_i.q_i -+ (c/2) q_i.q_i
  const double qs = approx.kind == ApproximantKind::Minorant ? 1.0 : -1.0;
  dec.quad_coeff = -qs * 0.5 * c;
  dec.affines.reserve(approx.pieces.size());
  for (const Piece& p : approx.pieces) {
    AffineForm a;
    a.slope.resize(p.center.size());
    for (std::size_t k = 0; k < p.center.size(); ++k)
      a.slope[k] = p.grad[k] + qs * c * p.center[k];
    a.intercept =
        p.value - dot(p.grad, p.center) - qs * 0.5 * c * squared_norm(p.center);
    dec.affines.push_back(std::move(a));
  }
  return dec;
}

/// Result of a white-box sandwich check on a grid. All violations are
/// reported as max(0, gap); exact zero means the property held everywhere.
struct SandwichReport {
  double max_minorant_violation = 0.0;   // max of minorant(x) - f(x)
  double max_majorant_violation = 0.0;   // max of f(x) - majorant(x)
  double max_error_bound_violation = 0.0; // vs L_f * min_i ||x - q_i||^2
  double max_interpolation_error = 0.0;  // |approximant(q_i) - f(q_i)| relative
  std::size_t grid_points = 0;

  bool clean() const {
    return max_minorant_violation == 0.0 && max_majorant_violation == 0.0 &&
           max_error_bound_violation == 0.0;
  }
};

/// Scans a uniform grid of a known function and audits the bound properties:
/// minorant <= f <= majorant and both errors <= L_f * min_i ||x - q_i||^2.
inline SandwichReport sandwich_audit(
    const std::vector<Piece>& pieces,
    const std::function<double(const Point&)>& true_f, const BoxDomain& box,
    std::size_t points_per_dim, double lip) {
  ApproximantSet minor = make_approximant(pieces, lip, ApproximantKind::Minorant);
  ApproximantSet major = make_approximant(pieces, lip, ApproximantKind::Majorant);
  SandwichReport rep;

  const std::size_t d = box.dim();
  std::vector<std::size_t> idx(d, 0);
  Point x(d);
  bool done = false;
  while (!done) {
    for (std::size_t k = 0; k < d; ++k) {
      const double t = points_per_dim > 1
                           ? double(idx[k]) / double(points_per_dim - 1)
                           : 0.5;
      x[k] = box.lower[k] + t * (box.upper[k] - box.lower[k]);
    }
    const double f = true_f(x);
    const double lo = eval(minor, x);
    const double hi = eval(major, x);
    double min_sq = kInf;
    for (const Piece& p : pieces)
      min_sq = std::min(min_sq, squared_distance(x, p.center));
    const double err_cap = lip * min_sq;
    rep.max_minorant_violation = std::max(rep.max_minorant_violation, lo - f);
    rep.max_majorant_violation = std::max(rep.max_majorant_violation, f - hi);
    rep.max_error_bound_violation = std::max(
        {rep.max_error_bound_violation, (f - lo) - err_cap, (hi - f) - err_cap});
    ++rep.grid_points;

    for (std::size_t k = 0;; ++k) {
      if (k == d) {
        done = true;
        break;
      }
      if (++idx[k] < points_per_dim) break;
      idx[k] = 0;
    }
  }

  for (const Piece& p : pieces) {
    const double f = true_f(p.center);
    const double scale = std::max(1.0, std::abs(f));
    rep.max_interpolation_error =
        std::max({rep.max_interpolation_error,
                  std::abs(eval(minor, p.center) - f) / scale,
                  std::abs(eval(major, p.center) - f) / scale});
  }
  rep.max_minorant_violation = std::max(rep.max_minorant_violation, 0.0);
  rep.max_majorant_violation = std::max(rep.max_majorant_violation, 0.0);
  rep.max_error_bound_violation = std::max(rep.max_error_bound_violation, 0.0);
  return rep;
}

}  // namespace lipcover
