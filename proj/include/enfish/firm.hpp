#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "enfish/errors.hpp"
#include "enfish/model.hpp"
#include "enfish/numeric.hpp"

// Single-firm catch choice under imperfect enforcement. A risk-neutral
// price taker maximizes
//
//   price*q - (c/2) q^2 / x - theta * fee(q - quota)
//
// over q >= 0. Below quota the objective is strictly concave; above
// quota the expected fee is concave, so the objective need not be, and
// the marginal condition
//
//   price - (c/x) q = theta * max_fine * severity * exp(-severity (q - quota))
//
// can hold at zero, one, or two points. All of them plus the quota
// corner are evaluated and the global maximum wins.

namespace enfish {

enum class Regime { under_quota, compliant, violating };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::under_quota: return "under-quota";
    case Regime::compliant: return "exactly-compliant";
    case Regime::violating: return "violating";
  }
  return "?";
}

struct FirmDecision {
  double catch_rate = 0.0;
  double violation = 0.0;
  double expected_profit = 0.0;
  Regime regime = Regime::compliant;
};

namespace detail {

inline constexpr double kRegimeTol = 1e-12;   // catch-vs-quota classification
inline constexpr double kFirmRootTol = 1e-13; // bisection tolerance in q

inline void check_firm_domain(double theta, double stock, double quota) {
  if (!(theta >= 0.0 && theta < 1.0))
    throw validation_error("firm: detection probability must lie in [0, 1)");
  if (!(stock > 0.0)) throw validation_error("firm: stock must be > 0");
  if (!(quota >= 0.0)) throw validation_error("firm: quota must be >= 0");
}

inline Regime classify(double catch_rate, double quota) {
  if (catch_rate > quota + kRegimeTol) return Regime::violating;
  if (catch_rate < quota - kRegimeTol) return Regime::under_quota;
  return Regime::compliant;
}

}  // namespace detail

// Expected profit flow at a candidate catch, Eq-style: profit before
// penalty minus the expected fee.
inline double expected_profit(double price, const FirmCostParams& fc,
                              const PenaltySchedule& ps, double theta, double stock,
                              double quota, double catch_rate) {
  detail::check_firm_domain(theta, stock, quota);
  if (!(catch_rate >= 0.0)) throw validation_error("firm: catch must be >= 0");
  return price * catch_rate - firm_cost(fc, catch_rate, stock) -
         theta * penalty_fee(ps, catch_rate - quota);
}

// Catch a firm would choose with no quota and no enforcement: the
// unconstrained profit maximum price*x/c.
inline double open_access_catch(double price, const FirmCostParams& fc, double stock) {
  if (!(stock > 0.0)) throw validation_error("open_access_catch: stock must be > 0");
  return price * stock / fc.cost_coefficient;
}

// Marginal-condition residual: marginal profit minus the expected marginal
// fee, using the right-hand fee limit at the quota itself so the corner
// endpoint carries the marginal cost of the first illegal unit. Concave in
// q above quota for these forms, hence at most two roots there.
inline double foc_residual(double price, const FirmCostParams& fc, const PenaltySchedule& ps,
                           double theta, double stock, double quota, double catch_rate) {
  const double v = catch_rate - quota;
  const double marginal_fee =
      v >= 0.0 ? ps.max_fine * ps.severity * std::exp(-ps.severity * v) : 0.0;
  return price - fc.cost_coefficient * catch_rate / stock - theta * marginal_fee;
}

// All marginal-condition roots on (quota, open-access catch]. Brackets come
// from the sign pattern of the concave residual around its stationary point,
// so none can be missed; each bracket is closed by bisection.
inline std::vector<double> violating_roots(double price, const FirmCostParams& fc,
                                           const PenaltySchedule& ps, double theta,
                                           double stock, double quota) {
  detail::check_firm_domain(theta, stock, quota);
  std::vector<double> roots;
  const double pressure = theta * ps.max_fine * ps.severity;  // expected marginal fee at quota
  if (pressure <= 0.0) return roots;
  const double q_free = open_access_catch(price, fc, stock);
  if (q_free <= quota) return roots;

  auto g = [&](double q) { return foc_residual(price, fc, ps, theta, stock, quota, q); };
  const double g_lo = g(quota);
  const double g_hi = g(q_free);  // = -expected marginal fee there, always < 0

  const double cx = fc.cost_coefficient / stock;
  const double peak_arg = pressure * ps.severity / cx;  // >1 iff residual rises at quota
  if (peak_arg <= 1.0) {
    // Residual strictly decreasing: single root iff positive at the quota.
    if (g_lo > 0.0)
      roots.push_back(num::bisect(g, quota, q_free, g_lo, g_hi, detail::kFirmRootTol));
    return roots;
  }

  const double q_peak = quota + std::log(peak_arg) / ps.severity;
  if (q_peak >= q_free) return roots;  // rising throughout yet negative at the end
  const double g_peak = g(q_peak);
  if (g_peak < 0.0) return roots;
  if (g_lo < 0.0)
    roots.push_back(num::bisect(g, quota, q_peak, g_lo, g_peak, detail::kFirmRootTol));
  else if (g_lo == 0.0)
    roots.push_back(quota);
  roots.push_back(num::bisect(g, q_peak, q_free, g_peak, g_hi, detail::kFirmRootTol));
  return roots;
}

// Global expected-profit maximizer over q >= 0. Candidates: the
// unconstrained optimum when it is legal, the quota corner, and every
// marginal-condition root above quota. Ties go to the smaller catch.
inline FirmDecision best_response(double price, const FirmCostParams& fc,
                                  const PenaltySchedule& ps, double theta, double stock,
                                  double quota) {
  detail::check_firm_domain(theta, stock, quota);
  const double q_free = open_access_catch(price, fc, stock);

  FirmDecision out;
  const double pressure = theta * ps.max_fine * ps.severity;
  if (q_free <= quota || pressure <= 0.0) {
    // Quota slack, or no expected penalty at all: open-access catch, exactly.
    out.catch_rate = q_free;
  } else {
    std::vector<double> candidates{quota};
    for (double r : violating_roots(price, fc, ps, theta, stock, quota))
      if (r > quota) candidates.push_back(r);
    double best_q = candidates.front();
    double best_v = expected_profit(price, fc, ps, theta, stock, quota, best_q);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      const double v = expected_profit(price, fc, ps, theta, stock, quota, candidates[i]);
      if (v > best_v || (v == best_v && candidates[i] < best_q)) {
        best_q = candidates[i];
        best_v = v;
      }
    }
    out.catch_rate = best_q;
  }
  out.violation = std::max(out.catch_rate - quota, 0.0);
  out.expected_profit = expected_profit(price, fc, ps, theta, stock, quota, out.catch_rate);
  out.regime = detail::classify(out.catch_rate, quota);
  return out;
}

struct ResponseGradient {
  double wrt_detection = 0.0;
  double wrt_stock = 0.0;
  double wrt_quota = 0.0;
};

// Finite-difference sensitivities of the chosen catch. Only meaningful
// where the decision regime is locally stable; a regime switch across the
// stencil is a genuine non-differentiable point and is reported as such.
inline ResponseGradient response_partials(double price, const FirmCostParams& fc,
                                          const PenaltySchedule& ps, double theta,
                                          double stock, double quota) {
  auto solve = [&](double th, double x, double qs) {
    return best_response(price, fc, ps, th, x, qs);
  };
  const FirmDecision center = solve(theta, stock, quota);

  // Derivative of catch along one coordinate; falls back to a one-sided
  // difference when the stencil would leave the domain.
  auto fd = [&](double v, auto&& in_domain, auto&& eval) {
    const double h = 1e-5 * std::max(std::abs(v), 1e-2);
    const double lo = v - h, hi = v + h;
    const bool lo_ok = in_domain(lo), hi_ok = in_domain(hi);
    if (!lo_ok && !hi_ok) throw validation_error("response_partials: step leaves domain");
    const FirmDecision d_lo = lo_ok ? eval(lo) : center;
    const FirmDecision d_hi = hi_ok ? eval(hi) : center;
    if (d_lo.regime != center.regime || d_hi.regime != center.regime)
      throw kink_error("response_partials: regime changes across the stencil");
    const double span = (hi_ok ? hi : v) - (lo_ok ? lo : v);
    return (d_hi.catch_rate - d_lo.catch_rate) / span;
  };

  ResponseGradient grad;
  grad.wrt_detection = fd(
      theta, [](double th) { return th >= 0.0 && th < 1.0; },
      [&](double th) { return solve(th, stock, quota); });
  grad.wrt_stock = fd(
      stock, [](double x) { return x > 0.0; },
      [&](double x) { return solve(theta, x, quota); });
  grad.wrt_quota = fd(
      quota, [](double qs) { return qs >= 0.0; },
      [&](double qs) { return solve(theta, stock, qs); });
  return grad;
}

// MarketParams front ends, valid in constant-price mode. Under linear
// demand the price is a fleet-level fixed point; see fleet.hpp.
inline double expected_profit(const MarketParams& mp, const FirmCostParams& fc,
                              const PenaltySchedule& ps, double theta, double stock,
                              double quota, double catch_rate) {
  return expected_profit(market_price(mp), fc, ps, theta, stock, quota, catch_rate);
}
inline double open_access_catch(const MarketParams& mp, const FirmCostParams& fc,
                                double stock) {
  return open_access_catch(market_price(mp), fc, stock);
}
inline FirmDecision best_response(const MarketParams& mp, const FirmCostParams& fc,
                                  const PenaltySchedule& ps, double theta, double stock,
                                  double quota) {
  return best_response(market_price(mp), fc, ps, theta, stock, quota);
}
inline ResponseGradient response_partials(const MarketParams& mp, const FirmCostParams& fc,
                                          const PenaltySchedule& ps, double theta,
                                          double stock, double quota) {
  return response_partials(market_price(mp), fc, ps, theta, stock, quota);
}

}  // namespace enfish
