#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "enfish/errors.hpp"

// Parameter records and the concrete functional forms of the model:
// logistic stock growth, quadratic harvest cost, saturating penalty
// schedule, constant or linear inverse demand, and the detection-effort
// cost curve. Everything downstream (firm behavior, fleet aggregation,
// golden rules, dynamics) is built from these pure functions, so an
// alternate functional form only needs to change here.

namespace enfish {

struct StockParams {
  double intrinsic_growth = 0.0;   // r, per unit time
  double carrying_capacity = 0.0;  // K, biomass units

  void validate() const {
    if (!(intrinsic_growth > 0.0)) throw validation_error("stock.r: must be > 0");
    if (!(carrying_capacity > 0.0)) throw validation_error("stock.K: must be > 0");
  }
};

// Fee for catching `violation` units above quota: max_fine * (1 - exp(-severity*v)).
// Zero at no violation, increasing, concave, strictly below max_fine.
struct PenaltySchedule {
  double max_fine = 0.0;  // finite upper bound on the fee
  double severity = 0.0;  // per unit violation

  void validate() const {
    if (!(max_fine >= 0.0)) throw validation_error("penalty.max_fine: must be >= 0");
    if (!(severity > 0.0)) throw validation_error("penalty.severity: must be > 0");
  }
};

struct FirmCostParams {
  double cost_coefficient = 0.0;  // c in (c/2) q^2 / x

  void validate() const {
    if (!(cost_coefficient > 0.0)) throw validation_error("cost_coefficient: must be > 0");
  }
};

enum class DemandMode { constant_price, linear };

struct MarketParams {
  DemandMode mode = DemandMode::constant_price;
  double price = 0.0;        // constant mode
  double choke_price = 0.0;  // linear mode: p(q) = max(choke - slope*q, 0)
  double slope = 0.0;

  static MarketParams constant(double p) {
    MarketParams m;
    m.mode = DemandMode::constant_price;
    m.price = p;
    return m;
  }
  static MarketParams linear(double choke, double slope) {
    MarketParams m;
    m.mode = DemandMode::linear;
    m.choke_price = choke;
    m.slope = slope;
    return m;
  }

  void validate() const {
    if (mode == DemandMode::constant_price) {
      if (!(price > 0.0)) throw validation_error("market.price: must be > 0");
    } else {
      if (!(choke_price > 0.0)) throw validation_error("market.choke_price: must be > 0");
      if (!(slope > 0.0)) throw validation_error("market.slope: must be > 0");
    }
  }
};

// Reduced-form cost of sustaining a detection probability theta:
// effort_scale * theta / (1 - theta). Zero effort is free, certain
// detection is unaffordable by construction.
struct EnforcementTech {
  double effort_scale = 0.0;  // w, money per unit time

  void validate() const {
    if (!(effort_scale > 0.0)) throw validation_error("enforcement.effort_scale: must be > 0");
  }
};

struct FirmSlot {
  FirmCostParams cost;
  double quota = 0.0;  // individual non-transferable catch ceiling
};

struct Fleet {
  std::vector<FirmSlot> firms;

  double total_quota() const {
    double s = 0.0;
    for (const auto& f : firms) s += f.quota;
    return s;
  }

  void validate() const {
    if (firms.empty()) throw validation_error("fleet: must contain at least one firm");
    for (std::size_t i = 0; i < firms.size(); ++i) {
      if (!(firms[i].cost.cost_coefficient > 0.0))
        throw validation_error("fleet.firms[" + std::to_string(i) + "].cost: must be > 0");
      if (!(firms[i].quota >= 0.0))
        throw validation_error("fleet.firms[" + std::to_string(i) + "].quota: must be >= 0");
    }
  }
};

struct Scenario {
  StockParams stock;
  MarketParams market;
  Fleet fleet;
  PenaltySchedule penalty;
  EnforcementTech enforcement;
  double discount_rate = 0.0;  // >= 0; scenario files additionally require > 0

  void validate() const {
    stock.validate();
    market.validate();
    fleet.validate();
    penalty.validate();
    enforcement.validate();
    if (!(discount_rate >= 0.0)) throw validation_error("discount_rate: must be >= 0");
  }
};

// --- functional forms -------------------------------------------------

// Logistic natural growth r x (1 - x/K).
inline double growth(const StockParams& sp, double stock) {
  if (!(stock >= 0.0)) throw validation_error("growth: stock must be >= 0");
  return sp.intrinsic_growth * stock * (1.0 - stock / sp.carrying_capacity);
}

// Exact derivative r (1 - 2x/K).
inline double growth_derivative(const StockParams& sp, double stock) {
  if (!(stock >= 0.0)) throw validation_error("growth_derivative: stock must be >= 0");
  return sp.intrinsic_growth * (1.0 - 2.0 * stock / sp.carrying_capacity);
}

// Fee charged on conviction for a violation of size v. Legal catch (v <= 0)
// costs nothing; the fee saturates below max_fine.
inline double penalty_fee(const PenaltySchedule& ps, double violation) {
  if (violation <= 0.0) return 0.0;
  return ps.max_fine * (1.0 - std::exp(-ps.severity * violation));
}

// Marginal fee: zero at and below the quota, max_fine * severity * exp(-severity v)
// above it. The v -> 0+ limit is max_fine * severity; corner logic that
// needs that right-hand limit evaluates it explicitly.
inline double penalty_marginal(const PenaltySchedule& ps, double violation) {
  if (violation <= 0.0) return 0.0;
  return ps.max_fine * ps.severity * std::exp(-ps.severity * violation);
}

// Harvest cost (c/2) q^2 / x: quadratic in catch, falling in stock.
inline double firm_cost(const FirmCostParams& fc, double catch_rate, double stock) {
  if (!(stock > 0.0)) throw validation_error("firm_cost: stock must be > 0");
  if (!(catch_rate >= 0.0)) throw validation_error("firm_cost: catch must be >= 0");
  return 0.5 * fc.cost_coefficient * catch_rate * catch_rate / stock;
}

inline double inverse_demand(const MarketParams& mp, double quantity) {
  if (!(quantity >= 0.0)) throw validation_error("inverse_demand: quantity must be >= 0");
  if (mp.mode == DemandMode::constant_price) return mp.price;
  return std::max(mp.choke_price - mp.slope * quantity, 0.0);
}

// Integral of inverse demand from 0 to q (gross consumer benefit).
inline double demand_integral(const MarketParams& mp, double quantity) {
  if (!(quantity >= 0.0)) throw validation_error("demand_integral: quantity must be >= 0");
  if (mp.mode == DemandMode::constant_price) return mp.price * quantity;
  const double choke_quantity = mp.choke_price / mp.slope;
  const double q = std::min(quantity, choke_quantity);
  return mp.choke_price * q - 0.5 * mp.slope * q * q;
}

// Price a single price-taking firm faces. Only defined for constant
// demand; with linear demand the price is endogenous and resolved by the
// fleet fixed point.
inline double market_price(const MarketParams& mp) {
  if (mp.mode != DemandMode::constant_price)
    throw validation_error("market_price: price is endogenous under linear demand");
  return mp.price;
}

// Least-cost spend needed to sustain detection probability theta.
inline double effort_cost(const EnforcementTech& et, double detection) {
  if (!(detection >= 0.0 && detection < 1.0))
    throw validation_error("effort_cost: detection probability must lie in [0, 1)");
  return et.effort_scale * detection / (1.0 - detection);
}

}  // namespace enfish
