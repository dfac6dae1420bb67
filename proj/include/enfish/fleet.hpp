#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "enfish/errors.hpp"
#include "enfish/firm.hpp"
#include "enfish/model.hpp"

// Fleet-level machinery: sum the firm best responses into the aggregate
// catch function q(theta, x, quotas), invert it for the least detection
// probability that induces a catch target, and compose with the effort
// cost curve to obtain the enforcement cost function E(q, x) and its
// numeric partial derivatives.

namespace enfish {

struct FleetOutcome {
  double price = 0.0;  // market price firms faced (fixed point under linear demand)
  double total_catch = 0.0;
  double total_violation = 0.0;
  std::vector<FirmDecision> decisions;  // fleet order
};

namespace detail {

// Largest detection probability probed when searching for the attainable
// infimum of aggregate catch; effort cost is astronomically high there.
inline constexpr double kDetectionSup = 1.0 - 1e-9;
// Bisection width in theta. Tight enough that the finite-difference
// enforcement-cost partials built on top keep golden-rule residuals
// below their 1e-8 tolerance.
inline constexpr double kInvertTol = 1e-14;
inline constexpr double kPriceFixedPointTol = 1e-10;
inline constexpr int kPriceFixedPointMaxIter = 10'000;

inline bool same_slot(const FirmSlot& a, const FirmSlot& b) {
  return a.cost.cost_coefficient == b.cost.cost_coefficient && a.quota == b.quota;
}

inline double fleet_catch_at_price(const Fleet& fleet, const PenaltySchedule& ps,
                                   double price, double theta, double stock) {
  // Adjacent identical firms share one solve; the decision is a pure
  // function of the slot parameters.
  double total = 0.0;
  double cached = 0.0;
  const FirmSlot* prev = nullptr;
  for (const auto& slot : fleet.firms) {
    if (!prev || !same_slot(*prev, slot))
      cached = best_response(price, slot.cost, ps, theta, stock, slot.quota).catch_rate;
    total += cached;
    prev = &slot;
  }
  return total;
}

// Clearing price under linear demand: fixed point of
//   price -> inverse_demand(aggregate catch at that price).
// Each firm's catch moves at most x/c_i per unit price, which bounds the
// map's slope and fixes the damping weight that makes the iteration a
// contraction.
inline double resolve_price(const Fleet& fleet, const MarketParams& mp,
                            const PenaltySchedule& ps, double theta, double stock) {
  if (mp.mode == DemandMode::constant_price) return mp.price;
  double slope_bound = 0.0;
  for (const auto& slot : fleet.firms) slope_bound += stock / slot.cost.cost_coefficient;
  const double damping = 1.0 / (1.0 + mp.slope * slope_bound);
  double price = 0.5 * mp.choke_price;
  for (int i = 0; i < kPriceFixedPointMaxIter; ++i) {
    const double q = fleet_catch_at_price(fleet, ps, price, theta, stock);
    const double target = inverse_demand(mp, q);
    const double next = price + damping * (target - price);
    if (std::abs(next - price) <= kPriceFixedPointTol) return next;
    price = next;
  }
  throw solver_error("fleet: market-clearing price iteration did not converge");
}

}  // namespace detail

// Per-firm decisions at a common detection probability, with the market
// price resolved first when demand is linear.
inline FleetOutcome fleet_response(const Fleet& fleet, const MarketParams& mp,
                                   const PenaltySchedule& ps, double theta, double stock) {
  if (!(stock > 0.0)) throw validation_error("fleet: stock must be > 0");
  if (!(theta >= 0.0 && theta < 1.0))
    throw validation_error("fleet: detection probability must lie in [0, 1)");
  FleetOutcome out;
  out.price = detail::resolve_price(fleet, mp, ps, theta, stock);
  out.decisions.reserve(fleet.firms.size());
  const FirmSlot* prev = nullptr;
  for (const auto& slot : fleet.firms) {
    if (prev && detail::same_slot(*prev, slot))
      out.decisions.push_back(out.decisions.back());
    else
      out.decisions.push_back(best_response(out.price, slot.cost, ps, theta, stock, slot.quota));
    out.total_catch += out.decisions.back().catch_rate;
    out.total_violation += out.decisions.back().violation;
    prev = &slot;
  }
  return out;
}

inline double aggregate_catch(const Fleet& fleet, const MarketParams& mp,
                              const PenaltySchedule& ps, double theta, double stock) {
  return fleet_response(fleet, mp, ps, theta, stock).total_catch;
}

inline double aggregate_violation(const Fleet& fleet, const MarketParams& mp,
                                  const PenaltySchedule& ps, double theta, double stock) {
  return fleet_response(fleet, mp, ps, theta, stock).total_violation;
}

// Aggregate catch with no enforcement at all.
inline double open_access_aggregate(const Fleet& fleet, const MarketParams& mp,
                                    const PenaltySchedule& ps, double stock) {
  return aggregate_catch(fleet, mp, ps, 0.0, stock);
}

// Smallest detection probability whose induced aggregate catch does not
// exceed the target. Returns 0 when free access already satisfies it.
// Targets below the attainable infimum (the bounded fee genuinely caps
// deterrence) are a hard error carrying that infimum; clamping here would
// silently corrupt everything built on top.
inline double invert_detection(const Fleet& fleet, const MarketParams& mp,
                               const PenaltySchedule& ps, double target_catch,
                               double stock) {
  if (!(stock > 0.0)) throw validation_error("invert_detection: stock must be > 0");
  if (!(target_catch > 0.0)) throw validation_error("invert_detection: target must be > 0");
  auto q_at = [&](double th) { return aggregate_catch(fleet, mp, ps, th, stock); };
  if (q_at(0.0) <= target_catch) return 0.0;
  const double q_floor = q_at(detail::kDetectionSup);
  if (target_catch < q_floor)
    throw unattainable_error(
        "invert_detection: target " + std::to_string(target_catch) +
            " lies below the attainable infimum " + std::to_string(q_floor),
        q_floor);
  // Invariant: q(lo) > target >= q(hi). Converges to the lower edge of a
  // flat segment when compliance corners make the aggregate locally flat.
  double lo = 0.0, hi = detail::kDetectionSup;
  while (hi - lo > detail::kInvertTol) {
    const double mid = 0.5 * (lo + hi);
    (q_at(mid) <= target_catch ? hi : lo) = mid;
  }
  return hi;
}

// Enforcement cost function E(q, x): least spend that induces aggregate
// catch q at stock x. Identically zero at and above the open-access catch.
inline double enforcement_cost(const Fleet& fleet, const EnforcementTech& et,
                               const MarketParams& mp, const PenaltySchedule& ps,
                               double catch_rate, double stock) {
  return effort_cost(et, invert_detection(fleet, mp, ps, catch_rate, stock));
}

struct EnforcementGradient {
  double wrt_catch = 0.0;  // <= 0 away from corners: allowing less costs more
  double wrt_stock = 0.0;  // >= 0: richer stock tempts harder, needs more watching
};

// Central finite differences of E with relative step 1e-5, cross-checked
// for regime stability: if any firm switches regime across a stencil, or
// enforcement switches on/off, the point is a kink and is reported rather
// than differenced through.
inline EnforcementGradient enforcement_cost_partials(const Fleet& fleet,
                                                     const EnforcementTech& et,
                                                     const MarketParams& mp,
                                                     const PenaltySchedule& ps,
                                                     double catch_rate, double stock,
                                                     double relative_step = 1e-5) {
  const double theta_center = invert_detection(fleet, mp, ps, catch_rate, stock);
  if (theta_center == 0.0) return {0.0, 0.0};  // E vanishes on a neighborhood above

  struct Probe {
    double cost;
    std::vector<Regime> regimes;
  };
  auto probe = [&](double q, double x) {
    const double th = invert_detection(fleet, mp, ps, q, x);
    if (th == 0.0)
      throw kink_error("enforcement_cost_partials: stencil crosses the zero-enforcement edge");
    Probe p;
    p.cost = effort_cost(et, th);
    for (const auto& d : fleet_response(fleet, mp, ps, th, x).decisions)
      p.regimes.push_back(d.regime);
    return p;
  };
  auto diff = [&](const Probe& a, const Probe& b, double span) {
    if (a.regimes != b.regimes)
      throw kink_error("enforcement_cost_partials: firm regime switches across the stencil");
    return (b.cost - a.cost) / span;
  };

  const double hq = relative_step * catch_rate;
  const double hx = relative_step * stock;
  EnforcementGradient grad;
  grad.wrt_catch = diff(probe(catch_rate - hq, stock), probe(catch_rate + hq, stock), 2.0 * hq);
  grad.wrt_stock = diff(probe(catch_rate, stock - hx), probe(catch_rate, stock + hx), 2.0 * hx);
  return grad;
}

// --- fleet-level harvesting cost ---------------------------------------
//
// The planner's aggregate cost of catching q at stock x, taking the
// least-cost allocation across firms. For quadratic firm costs that
// allocation is proportional to 1/c_i and preserves the functional form:
// C(q, x) = (cbar/2) q^2 / x with 1/cbar the sum of the 1/c_i.

inline double aggregate_cost_coefficient(const Fleet& fleet) {
  double inv = 0.0;
  for (const auto& slot : fleet.firms) inv += 1.0 / slot.cost.cost_coefficient;
  return 1.0 / inv;
}

inline double aggregate_cost(const Fleet& fleet, double catch_rate, double stock) {
  if (!(stock > 0.0)) throw validation_error("aggregate_cost: stock must be > 0");
  const double cbar = aggregate_cost_coefficient(fleet);
  return 0.5 * cbar * catch_rate * catch_rate / stock;
}

inline double aggregate_cost_marginal(const Fleet& fleet, double catch_rate, double stock) {
  return aggregate_cost_coefficient(fleet) * catch_rate / stock;
}

inline double aggregate_cost_stock_partial(const Fleet& fleet, double catch_rate,
                                           double stock) {
  const double cbar = aggregate_cost_coefficient(fleet);
  return -0.5 * cbar * catch_rate * catch_rate / (stock * stock);
}

// Scenario-based conveniences.
inline FleetOutcome fleet_response(const Scenario& s, double theta, double stock) {
  return fleet_response(s.fleet, s.market, s.penalty, theta, stock);
}
inline double aggregate_catch(const Scenario& s, double theta, double stock) {
  return aggregate_catch(s.fleet, s.market, s.penalty, theta, stock);
}
inline double aggregate_violation(const Scenario& s, double theta, double stock) {
  return aggregate_violation(s.fleet, s.market, s.penalty, theta, stock);
}
inline double open_access_aggregate(const Scenario& s, double stock) {
  return open_access_aggregate(s.fleet, s.market, s.penalty, stock);
}
inline double invert_detection(const Scenario& s, double target_catch, double stock) {
  return invert_detection(s.fleet, s.market, s.penalty, target_catch, stock);
}
inline double enforcement_cost(const Scenario& s, double catch_rate, double stock) {
  return enforcement_cost(s.fleet, s.enforcement, s.market, s.penalty, catch_rate, stock);
}
inline EnforcementGradient enforcement_cost_partials(const Scenario& s, double catch_rate,
                                                     double stock,
                                                     double relative_step = 1e-5) {
  return enforcement_cost_partials(s.fleet, s.enforcement, s.market, s.penalty, catch_rate,
                                   stock, relative_step);
}

}  // namespace enfish
