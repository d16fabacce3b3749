#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "lipcover/geometry.hpp"

namespace lipcover {

/// One first-order sample of a scalar function: value and gradient.
struct FunctionSample {
  double value = 0.0;
  Point grad;
};

/// Joint response of the J/H oracles at a query point.
struct OracleSample {
  double j_value = 0.0;
  Point j_grad;
  double h_value = 0.0;
  Point h_grad;
};

/// One recorded oracle evaluation: the query point together with the values
/// and gradients of both the objective J and the constraint H.
struct QueryRecord {
  Point point;
  double j_value = 0.0;
  Point j_grad;
  double h_value = 0.0;
  Point h_grad;
};

/// First-order oracle for the pair (J, H). Evaluation is deterministic; the
/// call counter is the budget currency of every sequential algorithm here.
/// Copies share the underlying evaluator and counters.
class FirstOrderOracle {
 public:
  using Evaluator = std::function<OracleSample(const Point&)>;

  FirstOrderOracle() = default;

  explicit FirstOrderOracle(Evaluator fn)
      : state_(std::make_shared<State>(std::move(fn))) {}

  bool valid() const { return state_ != nullptr && bool(state_->fn); }

  QueryRecord evaluate(const Point& x) const {
    if (!valid()) throw std::runtime_error("FirstOrderOracle: no evaluator set");
    OracleSample s = state_->fn(x);
    state_->calls.fetch_add(1, std::memory_order_relaxed);
    if (!std::isfinite(s.j_value) || !std::isfinite(s.h_value) ||
        !all_finite(s.j_grad) || !all_finite(s.h_grad)) {
      throw std::runtime_error(
          "FirstOrderOracle: oracle returned a non-finite value or gradient");
    }
    return QueryRecord{x, s.j_value, std::move(s.j_grad), s.h_value,
                       std::move(s.h_grad)};
  }

  std::int64_t call_count() const {
    return state_ ? state_->calls.load(std::memory_order_relaxed) : 0;
  }

  /// Underlying black-box episodes consumed so far. Zero unless the oracle
  /// was built by finite_diff_oracle (analytic oracles have no episodes).
  /// Accounting: the base-point rollout is shared between J and H (counted
  /// once); each finite-difference offset is simulated per function.
  std::int64_t episodes() const {
    return state_ ? state_->episodes.load(std::memory_order_relaxed) : 0;
  }

  /// Episode count under the alternative bookkeeping where the base-point
  /// rollout is also run once per function (J and H fully separate).
  std::int64_t episodes_separate() const {
    return state_ ? state_->episodes_separate.load(std::memory_order_relaxed)
                  : 0;
  }

  void reset_counters() const {
    if (!state_) return;
    state_->calls.store(0);
    state_->episodes.store(0);
    state_->episodes_separate.store(0);
  }

 private:
  struct State {
    explicit State(Evaluator f) : fn(std::move(f)) {}
    Evaluator fn;
    std::atomic<std::int64_t> calls{0};
    std::atomic<std::int64_t> episodes{0};
    std::atomic<std::int64_t> episodes_separate{0};
  };

  friend FirstOrderOracle finite_diff_oracle(std::function<double(const Point&)>,
                                             std::function<double(const Point&)>,
                                             double);

  std::shared_ptr<State> state_;
};

/// Oracle from closed-form evaluators of J and H.
inline FirstOrderOracle make_analytic_oracle(
    std::function<FunctionSample(const Point&)> j,
    std::function<FunctionSample(const Point&)> h) {
  return FirstOrderOracle([j = std::move(j), h = std::move(h)](const Point& x) {
    FunctionSample sj = j(x);
    FunctionSample sh = h(x);
    return OracleSample{sj.value, std::move(sj.grad), sh.value,
                        std::move(sh.grad)};
  });
}

/// Oracle whose gradients are forward differences of scalar black boxes,
/// (f(x + step*e_k) - f(x)) / step. One evaluation of the returned oracle
/// counts as one call at the sequential-algorithm level; raw black-box
/// episodes are tracked on the auxiliary counters (base rollout shared
/// between J and H, offset rollouts per function, so 1 + 2d per call).
inline FirstOrderOracle finite_diff_oracle(
    std::function<double(const Point&)> black_box_j,
    std::function<double(const Point&)> black_box_h, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_oracle: step <= 0");
  FirstOrderOracle oracle;
  auto state = std::make_shared<FirstOrderOracle::State>(nullptr);
  std::weak_ptr<FirstOrderOracle::State> weak_state = state;
  auto fn = [j = std::move(black_box_j), h = std::move(black_box_h), step,
             weak_state](const Point& x) {
    const std::size_t d = x.size();
    OracleSample s;
    s.j_value = j(x);
    s.h_value = h(x);
    if (!std::isfinite(s.j_value) || !std::isfinite(s.h_value))
      throw std::runtime_error("finite_diff_oracle: non-finite black-box output");
    s.j_grad.assign(d, 0.0);
    s.h_grad.assign(d, 0.0);
    std::int64_t runs = 1;            // base rollout, shared
    std::int64_t runs_separate = 2;   // or one per function
    Point xs = x;
    for (std::size_t k = 0; k < d; ++k) {
      xs[k] = x[k] + step;
      const double jk = j(xs);
      const double hk = h(xs);
      xs[k] = x[k];
      if (!std::isfinite(jk) || !std::isfinite(hk))
        throw std::runtime_error(
            "finite_diff_oracle: non-finite black-box output");
      s.j_grad[k] = (jk - s.j_value) / step;
      s.h_grad[k] = (hk - s.h_value) / step;
      runs += 2;
      runs_separate += 2;
    }
    if (auto st = weak_state.lock()) {
      st->episodes.fetch_add(runs, std::memory_order_relaxed);
      st->episodes_separate.fetch_add(runs_separate, std::memory_order_relaxed);
    }
    return s;
  };
  state->fn = std::move(fn);
  oracle.state_ = std::move(state);
  return oracle;
}

}  // namespace lipcover
