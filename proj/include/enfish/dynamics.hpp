#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "enfish/detail/format.hpp"
#include "enfish/errors.hpp"
#include "enfish/fleet.hpp"
#include "enfish/model.hpp"
#include "enfish/policy.hpp"

// Time-domain machinery: integrate the stock equation xdot = F(x) - q
// under an enforcement policy, evaluate discounted welfare along a
// trajectory, and run a discrete dynamic-programming solve of the same
// control problem as an independent check on the golden-rule steady
// states.

namespace enfish {

struct EnforcementPolicy {
  enum class Mode { fixed_detection, catch_target, feedback };
  Mode mode = Mode::fixed_detection;
  double value = 0.0;                                // theta or catch target
  std::vector<std::pair<double, double>> table;      // feedback: stock -> target

  static EnforcementPolicy fixed_detection(double theta) {
    EnforcementPolicy p;
    p.mode = Mode::fixed_detection;
    p.value = theta;
    return p;
  }
  static EnforcementPolicy catch_target(double target) {
    EnforcementPolicy p;
    p.mode = Mode::catch_target;
    p.value = target;
    return p;
  }
  static EnforcementPolicy feedback(std::vector<std::pair<double, double>> table) {
    EnforcementPolicy p;
    p.mode = Mode::feedback;
    p.table = std::move(table);
    return p;
  }

  void validate() const {
    switch (mode) {
      case Mode::fixed_detection:
        if (!(value >= 0.0 && value < 1.0))
          throw validation_error("policy: fixed detection probability must lie in [0, 1)");
        break;
      case Mode::catch_target:
        if (!(value > 0.0)) throw validation_error("policy: catch target must be > 0");
        break;
      case Mode::feedback:
        if (table.empty()) throw validation_error("policy: feedback table is empty");
        for (std::size_t i = 0; i < table.size(); ++i) {
          if (!(table[i].second > 0.0))
            throw validation_error("policy: feedback targets must be > 0");
          if (i > 0 && !(table[i].first > table[i - 1].first))
            throw validation_error("policy: feedback stocks must be strictly increasing");
        }
        break;
    }
  }

  // Catch target at a given stock (feedback tables interpolate linearly
  // and clamp at the ends).
  double target_at(double stock) const {
    if (mode == Mode::catch_target) return value;
    if (stock <= table.front().first) return table.front().second;
    if (stock >= table.back().first) return table.back().second;
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (stock <= table[i].first) {
        const auto& [x0, q0] = table[i - 1];
        const auto& [x1, q1] = table[i];
        const double w = (stock - x0) / (x1 - x0);
        return q0 + w * (q1 - q0);
      }
    }
    return table.back().second;
  }
};

struct Trajectory {
  std::vector<double> time;
  std::vector<double> stock;
  std::vector<double> catch_rate;
  std::vector<double> detection;
  std::vector<double> welfare_flow;
  std::optional<double> extinction_time;  // first time the stock hit zero
};

inline void write_trajectory_csv(const Trajectory& t, std::ostream& os) {
  os << "t,x,q,theta,welfare_flow\n";
  for (std::size_t i = 0; i < t.time.size(); ++i) {
    os << detail::format_full(t.time[i]) << ',' << detail::format_full(t.stock[i]) << ','
       << detail::format_full(t.catch_rate[i]) << ',' << detail::format_full(t.detection[i])
       << ',' << detail::format_full(t.welfare_flow[i]) << '\n';
  }
}

namespace detail {

// Catch realized at a state under a policy, with the detection
// probability that sustains it. Catch targets must be inducible: the
// fleet cannot be pushed below the attainable infimum, nor made to fish
// more than it would under free access.
struct StageOutcome {
  double catch_rate = 0.0;
  double detection = 0.0;
};

inline double checked_target(const Scenario& s, const EnforcementPolicy& pol, double stock) {
  const double target = pol.target_at(stock);
  const double q_free = open_access_aggregate(s, stock);
  if (target > q_free)
    throw unattainable_error("integrate: catch target " + std::to_string(target) +
                                 " exceeds the open-access catch " + std::to_string(q_free) +
                                 " at stock " + std::to_string(stock),
                             q_free);
  return target;
}

// Drift of the stock equation. Total in x: non-positive stocks are
// treated as an absorbing extinct state.
inline double policy_drift(const Scenario& s, const EnforcementPolicy& pol, double stock) {
  if (stock <= 0.0) return 0.0;
  double q = 0.0;
  if (pol.mode == EnforcementPolicy::Mode::fixed_detection) {
    q = aggregate_catch(s, pol.value, stock);
  } else {
    q = checked_target(s, pol, stock);
    // Raises unattainable_error when the target is below the infimum.
    invert_detection(s, q, stock);
  }
  return growth(s.stock, stock) - q;
}

inline StageOutcome sample_outcome(const Scenario& s, const EnforcementPolicy& pol,
                                   double stock) {
  StageOutcome o;
  if (stock <= 0.0) {
    o.detection = pol.mode == EnforcementPolicy::Mode::fixed_detection ? pol.value : 0.0;
    return o;
  }
  if (pol.mode == EnforcementPolicy::Mode::fixed_detection) {
    o.detection = pol.value;
    o.catch_rate = aggregate_catch(s, pol.value, stock);
  } else {
    o.catch_rate = checked_target(s, pol, stock);
    o.detection = invert_detection(s, o.catch_rate, stock);
  }
  return o;
}

inline double welfare_flow_at(const Scenario& s, double catch_rate, double stock,
                              double detection) {
  const double cost = stock > 0.0 ? aggregate_cost(s.fleet, catch_rate, stock) : 0.0;
  return demand_integral(s.market, catch_rate) - cost - effort_cost(s.enforcement, detection);
}

}  // namespace detail

// Classical fourth-order one-step integration of the stock equation under
// the given policy. The stock is clamped at zero (and the event recorded)
// if a step crosses it.
inline Trajectory integrate(const Scenario& s, const EnforcementPolicy& pol, double x0,
                            double horizon, double dt) {
  s.validate();
  pol.validate();
  if (!(x0 > 0.0 && x0 <= s.stock.carrying_capacity))
    throw validation_error("integrate: x0 must lie in (0, K]");
  if (!(dt > 0.0)) throw validation_error("integrate: dt must be > 0");
  if (!(horizon >= dt)) throw validation_error("integrate: horizon must be >= dt");

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  auto drift = [&](double x) { return detail::policy_drift(s, pol, x); };

  Trajectory traj;
  traj.time.reserve(steps + 1);
  double x = x0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = i * dt;
    const auto out = detail::sample_outcome(s, pol, x);
    traj.time.push_back(t);
    traj.stock.push_back(x);
    traj.catch_rate.push_back(out.catch_rate);
    traj.detection.push_back(out.detection);
    traj.welfare_flow.push_back(detail::welfare_flow_at(s, out.catch_rate, x, out.detection));
    if (i == steps) break;

    const double k1 = drift(x);
    const double k2 = drift(x + 0.5 * dt * k1);
    const double k3 = drift(x + 0.5 * dt * k2);
    const double k4 = drift(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(x)) throw solver_error("integrate: non-finite stock at t = " +
                                              std::to_string(t + dt));
    if (x < 0.0) {
      x = 0.0;
      if (!traj.extinction_time) traj.extinction_time = t + dt;
    }
  }
  return traj;
}

struct DiscountedWelfare {
  double value = 0.0;
  double tail_fraction = 0.0;  // share contributed by the constant-flow tail
  bool tail_warning = false;   // tail above 1% of the total
};

// Present value of the welfare flow: trapezoidal quadrature of
// exp(-delta t) * flow over the recorded horizon plus an analytic tail
// holding the terminal flow constant forever after.
inline DiscountedWelfare discounted_welfare(const Scenario& s, const Trajectory& traj) {
  const double delta = s.discount_rate;
  if (!(delta > 0.0))
    throw validation_error(
        "discounted_welfare: the infinite-horizon tail requires discount_rate > 0");
  if (traj.time.size() < 2)
    throw validation_error("discounted_welfare: trajectory must hold at least two samples");

  double integral = 0.0;
  double prev = std::exp(-delta * traj.time.front()) * traj.welfare_flow.front();
  for (std::size_t i = 1; i < traj.time.size(); ++i) {
    const double cur = std::exp(-delta * traj.time[i]) * traj.welfare_flow[i];
    integral += 0.5 * (prev + cur) * (traj.time[i] - traj.time[i - 1]);
    prev = cur;
  }
  const double tail =
      traj.welfare_flow.back() * std::exp(-delta * traj.time.back()) / delta;

  DiscountedWelfare out;
  out.value = integral + tail;
  const double scale = std::max(std::abs(out.value), 1e-300);
  out.tail_fraction = std::abs(tail) / scale;
  out.tail_warning = out.tail_fraction > 0.01;
  return out;
}

// Horizon long enough that the constant-flow tail is a rounding error.
inline double suggested_horizon(const Scenario& s) {
  return std::max(200.0, s.discount_rate > 0.0 ? 10.0 / s.discount_rate : 200.0);
}

struct DPGridSpec {
  int points = 400;  // >= 200, covering [0.02 K, K]
};

struct DPSolution {
  std::vector<double> stock_grid;
  std::vector<double> value;
  std::vector<double> policy;  // catch chosen at each grid stock
  double steady_stock = 0.0;   // grid stock where the policy drift changes sign
  int steady_index = 0;
  int sweeps = 0;
};

namespace detail {

inline constexpr double kDPSupNormTol = 1e-9;
inline constexpr int kDPMaxSweeps = 100'000;

}  // namespace detail

// Discrete dynamic-programming solve of the harvesting problem on a
// stock grid: value iteration over
//
//   V(x) = max_q { dt [benefit(q) - C(q,x) - E(q,x)] + e^{-delta dt} V(x + dt (F(x)-q)) }
//
// with linear interpolation between grid points and only inducible
// catches admitted (any non-negative catch when enforcement is costless).
// The control set is parameterized by the stock displacement per step:
// sub-cell resolution near zero drift pins the induced steady state to a
// grid cell, geometric spacing covers large draw-downs. States below the
// grid floor take the floor's value, which keeps the oracle aligned with
// the interior solutions of the continuous model.
inline DPSolution dp_oracle(const Scenario& s, const DPGridSpec& grid, double dt,
                            bool include_enforcement = true) {
  s.validate();
  if (grid.points < 200) throw validation_error("dp_oracle: grid must have >= 200 points");
  if (!(dt > 0.0)) throw validation_error("dp_oracle: dt must be > 0");
  if (!(s.discount_rate > 0.0))
    throw validation_error("dp_oracle: discounting must be positive");

  const double K = s.stock.carrying_capacity;
  const double floor = 0.02 * K;
  const int n = grid.points;
  const double cell = (K - floor) / (n - 1);

  DPSolution sol;
  sol.stock_grid.resize(n);
  for (int i = 0; i < n; ++i) sol.stock_grid[i] = floor + i * cell;

  // Candidate per-step displacements, finest near zero.
  std::vector<double> displacements;
  for (int k = -24; k <= 24; ++k) displacements.push_back(k * cell / 24.0);
  for (int cells : {2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384}) {
    displacements.push_back(cells * cell);
    displacements.push_back(-cells * cell);
  }

  struct Option {
    double discounted_flow;  // dt * flow, ready to add
    int idx;                 // interpolation cell of the next state
    double weight;           // weight on idx+1
    double catch_rate;
  };
  std::vector<std::vector<Option>> options(n);

  auto locate = [&](double x) {
    double pos = (x - floor) / cell;
    pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    int idx = std::min(static_cast<int>(pos), n - 2);
    return std::pair<int, double>{idx, pos - idx};
  };

  for (int i = 0; i < n; ++i) {
    const double x = sol.stock_grid[i];
    const double fx = growth(s.stock, x);
    double q_lo = 0.0;
    double q_hi = std::max(fx + (x - floor) / dt, 0.0);  // deepest on-grid draw-down
    if (include_enforcement) {
      q_hi = std::min(q_hi, open_access_aggregate(s, x));
      q_lo = aggregate_catch(s, detail::kDetectionSup, x);
    }
    std::vector<double> catches;
    for (double d : displacements) {
      const double q = fx - d / dt;
      if (q >= q_lo && q <= q_hi) catches.push_back(q);
    }
    catches.push_back(q_lo);
    if (q_hi > q_lo) catches.push_back(q_hi);
    std::sort(catches.begin(), catches.end());
    catches.erase(std::unique(catches.begin(), catches.end()), catches.end());

    options[i].reserve(catches.size());
    for (double q : catches) {
      Option opt;
      opt.catch_rate = q;
      double flow = demand_integral(s.market, q) - aggregate_cost(s.fleet, q, x);
      if (include_enforcement && q > 0.0)
        flow -= effort_cost(s.enforcement, invert_detection(s, q, x));
      opt.discounted_flow = dt * flow;
      const auto [idx, w] = locate(x + dt * (fx - q));
      opt.idx = idx;
      opt.weight = w;
      options[i].push_back(opt);
    }
    if (options[i].empty())
      throw solver_error("dp_oracle: no admissible catch at stock " + std::to_string(x));
  }

  const double beta = std::exp(-s.discount_rate * dt);
  std::vector<double> value(n, 0.0), next(n, 0.0);
  int sweeps = 0;
  for (; sweeps < detail::kDPMaxSweeps; ++sweeps) {
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = -1e300;
      for (const Option& o : options[i]) {
        const double cont = value[o.idx] + o.weight * (value[o.idx + 1] - value[o.idx]);
        const double v = o.discounted_flow + beta * cont;
        if (v > best) best = v;
      }
      next[i] = best;
      sup = std::max(sup, std::abs(best - value[i]));
    }
    value.swap(next);
    if (sup <= detail::kDPSupNormTol) break;
  }
  if (sweeps >= detail::kDPMaxSweeps)
    throw solver_error("dp_oracle: value iteration did not converge");
  sol.sweeps = sweeps + 1;
  sol.value = value;

  // Greedy policy at the converged value; ties go to the smaller catch
  // (options are sorted ascending).
  sol.policy.resize(n);
  for (int i = 0; i < n; ++i) {
    double best = -1e300, best_q = options[i].front().catch_rate;
    for (const Option& o : options[i]) {
      const double cont = value[o.idx] + o.weight * (value[o.idx + 1] - value[o.idx]);
      const double v = o.discounted_flow + beta * cont;
      if (v > best) {
        best = v;
        best_q = o.catch_rate;
      }
    }
    sol.policy[i] = best_q;
  }

  // The induced steady state is the stable sign change of the policy
  // drift: growth exceeds the chosen catch below it and falls short above.
  int best_i = -1;
  double best_gap = 1e300;
  for (int i = 0; i + 1 < n; ++i) {
    const double d0 = growth(s.stock, sol.stock_grid[i]) - sol.policy[i];
    const double d1 = growth(s.stock, sol.stock_grid[i + 1]) - sol.policy[i + 1];
    if (d0 >= 0.0 && d1 < 0.0) {
      const double gap = std::abs(d0) + std::abs(d1);
      if (gap < best_gap) {
        best_gap = gap;
        best_i = std::abs(d0) <= std::abs(d1) ? i : i + 1;
      }
    }
  }
  if (best_i < 0)
    throw solver_error("dp_oracle: policy drift never changes sign on the grid");
  sol.steady_index = best_i;
  sol.steady_stock = sol.stock_grid[best_i];
  return sol;
}

}  // namespace enfish
