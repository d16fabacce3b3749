#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lipcover {

/// Decision vector in R^d. Plain vector of doubles; helpers below keep the
/// call sites readable without dragging in a linear-algebra dependency.
using Point = std::vector<double>;

inline bool all_finite(const Point& x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double squared_norm(const Point& a) { return dot(a, a); }

inline double norm(const Point& a) { return std::sqrt(squared_norm(a)); }

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

inline double distance(const Point& a, const Point& b) {
  return std::sqrt(squared_distance(a, b));
}

/// a + s*b
inline Point axpy(const Point& a, double s, const Point& b) {
  Point r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + s * b[k];
  return r;
}

inline Point subtract(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
  return r;
}

/// Strict lexicographic order; used for deterministic tie-breaking.
inline bool lex_less(const Point& a, const Point& b) {
  for (std::size_t k = 0; k < a.size() && k < b.size(); ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return a.size() < b.size();
}

/// Axis-aligned box {x : lower <= x <= upper}. The search domain of every
/// algorithm in this library is a box.
struct BoxDomain {
  Point lower;
  Point upper;

  BoxDomain() = default;
  BoxDomain(Point lo, Point up) : lower(std::move(lo)), upper(std::move(up)) {
    if (lower.size() != upper.size())
      throw std::invalid_argument("BoxDomain: lower/upper dimension mismatch");
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (!(lower[k] <= upper[k]))
        throw std::invalid_argument("BoxDomain: lower[" + std::to_string(k) +
                                    "] > upper[" + std::to_string(k) + "]");
      if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]))
        throw std::invalid_argument("BoxDomain: non-finite bound");
    }
  }

  std::size_t dim() const { return lower.size(); }

  /// Euclidean norm of (upper - lower).
  double diameter() const { return distance(upper, lower); }

  bool contains(const Point& x, double tol = 0.0) const {
    if (x.size() != dim()) return false;
    for (std::size_t k = 0; k < dim(); ++k) {
      if (x[k] < lower[k] - tol || x[k] > upper[k] + tol) return false;
    }
    return true;
  }

  Point clamp(const Point& x) const {
    Point r(x);
    for (std::size_t k = 0; k < dim(); ++k) {
      if (r[k] < lower[k]) r[k] = lower[k];
      if (r[k] > upper[k]) r[k] = upper[k];
    }
    return r;
  }

  Point center() const {
    Point c(dim());
    for (std::size_t k = 0; k < dim(); ++k) c[k] = 0.5 * (lower[k] + upper[k]);
    return c;
  }

  double width(std::size_t k) const { return upper[k] - lower[k]; }

  /// Index of the widest edge; ties go to the lowest coordinate.
  std::size_t longest_edge() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < dim(); ++k) {
      if (width(k) > width(best)) best = k;
    }
    return best;
  }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace lipcover
