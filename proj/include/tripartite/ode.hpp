#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>

#include "tripartite/types.hpp"

namespace tripartite {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double h_init = 0.0;  ///< 0 picks a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 100'000'000;
};

/// Dormand–Prince 5(4) embedded Runge–Kutta with FSAL and a 4th-order
/// continuous extension. State is any Eigen dense type with complex or real
/// coefficients.
template <class State>
class DormandPrince {
 public:
  using Rhs = std::function<void(double t, const State& y, State& dydt)>;

  DormandPrince(Rhs rhs, IntegratorOptions options = {})
      : rhs_(std::move(rhs)), opt_(options) {}

  void initialize(double t0, const State& y0) {
    t_ = t_prev_ = t0;
    y_ = y_prev_ = y0;
    k1_.resizeLike(y0);
    rhs_(t_, y_, k1_);
    h_ = opt_.h_init > 0.0 ? opt_.h_init : initial_step();
    steps_ = 0;
  }

  /// Advances by one accepted step without passing t_limit.
  void step(double t_limit) {
    while (true) {
      if (++steps_ > opt_.max_steps) throw NumericalError("integrator exceeded its step budget");
      double h = std::min({h_, opt_.h_max, t_limit - t_});
      const bool clipped = h < h_;
      if (h <= 1e-14 * std::max(1.0, std::abs(t_)))
        throw NumericalError("step size underflow at t = " + std::to_string(t_));

      attempt(h);
      const double err = error_norm();
      if (err <= 1.0) {
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        t_prev_ = t_;
        y_prev_.swap(y_);
        t_ = (h == t_limit - t_) ? t_limit : t_ + h;
        y_.swap(y_new_);
        // Dense-output coefficients need k1 of this step before FSAL swap.
        build_dense(h);
        k1_.swap(k7_);
        h_last_ = h;
        if (!clipped || fac < 1.0) h_ = h * fac;
        return;
      }
      h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
    }
  }

  /// State at t ∈ [previous_time(), time()].
  State dense(double t) const {
    if (h_last_ == 0.0) return y_;
    const double th = (t - t_prev_) / h_last_;
    const double th1 = 1.0 - th;
    return r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
  }

  double time() const { return t_; }
  double previous_time() const { return t_prev_; }
  const State& state() const { return y_; }
  const State& previous_state() const { return y_prev_; }
  long steps() const { return steps_; }

 private:
  void attempt(double h) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    tmp_ = y_ + h * a21 * k1_;
    rhs_(t_ + h / 5.0, tmp_, k2_);
    tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
    rhs_(t_ + 3.0 * h / 10.0, tmp_, k3_);
    tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(t_ + 4.0 * h / 5.0, tmp_, k4_);
    tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(t_ + 8.0 * h / 9.0, tmp_, k5_);
    tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(t_ + h, tmp_, k6_);
    y_new_ = y_ + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    rhs_(t_ + h, y_new_, k7_);
    err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
  }

  double error_norm() const {
    const auto scale =
        (opt_.atol + opt_.rtol * y_.cwiseAbs().cwiseMax(y_new_.cwiseAbs()).array()).eval();
    const double n = static_cast<double>(err_.size());
    return std::sqrt((err_.cwiseAbs().array() / scale).square().sum() / n);
  }

  void build_dense(double h) {
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    r1_ = y_prev_;
    r2_ = y_ - y_prev_;
    r3_ = h * k1_ - r2_;
    r4_ = r2_ - h * k7_ - r3_;
    r5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
  }

  double initial_step() const {
    const double y_norm = y_.cwiseAbs().maxCoeff();
    const double f_norm = k1_.cwiseAbs().maxCoeff();
    const double scale = opt_.atol + opt_.rtol * y_norm;
    double h = (f_norm > 0.0) ? 0.01 * std::max(y_norm, scale) / f_norm : 1e-3;
    return std::clamp(h, 1e-8, std::min(opt_.h_max, 1.0));
  }

  Rhs rhs_;
  IntegratorOptions opt_;
  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0, h_last_ = 0.0;
  long steps_ = 0;
  State y_, y_prev_, y_new_, tmp_, err_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  State r1_, r2_, r3_, r4_, r5_;
};

/// Integrates from t0 and reports the state at every requested time
/// (nondecreasing, all ≥ t0) through observer(index, t, state).
template <class State, class Observer>
State integrate(typename DormandPrince<State>::Rhs rhs, const State& y0, double t0,
                std::span<const double> times, Observer&& observer,
                IntegratorOptions options = {}) {
  DormandPrince<State> stepper(std::move(rhs), options);
  stepper.initialize(t0, y0);
  std::size_t next = 0;
  while (next < times.size() && times[next] <= t0) observer(next, times[next], y0), ++next;
  while (next < times.size()) {
    stepper.step(times.back());
    while (next < times.size() && times[next] <= stepper.time()) {
      observer(next, times[next], stepper.dense(times[next]));
      ++next;
    }
  }
  return stepper.state();
}

}  // namespace tripartite
