#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "enfish/errors.hpp"
#include "enfish/fleet.hpp"
#include "enfish/model.hpp"

// Steady-state optimal policy. With enforcement priced in, the optimum
// solves the transformed golden rule
//
//   delta - F'(x) = -(C_x + E_x) / (p - C_q - E_q)
//
// evaluated along the sustainable-catch locus q = F(x); dropping the E
// terms gives the usual modified golden rule of costless, perfect
// control. Both are solved by scanning the residual for sign changes and
// closing each bracket with bisection.

namespace enfish {

struct SteadyState {
  double stock = 0.0;
  double catch_rate = 0.0;
  double price = 0.0;
  double shadow_price = 0.0;  // p - C_q - E_q at the root
  double welfare_flow = 0.0;
  double residual = 0.0;           // |golden-rule residual| at the root
  bool multiple_roots = false;     // more than one bracket solved; best welfare kept
};

inline std::pair<double, double> msy(const StockParams& sp) {
  sp.validate();
  const double x = 0.5 * sp.carrying_capacity;
  return {x, growth(sp, x)};
}

// Net benefit flow sustained at stock x: gross consumer benefit of the
// sustainable catch minus harvest cost, minus the enforcement spend
// needed to hold the fleet at that catch when the flag is set. Penalty
// fees never appear: they are transfers, not resource costs.
inline double steady_welfare(const Scenario& s, double stock, bool include_enforcement) {
  if (!(stock > 0.0 && stock <= s.stock.carrying_capacity))
    throw validation_error("steady_welfare: stock must lie in (0, K]");
  const double q = growth(s.stock, stock);
  double w = demand_integral(s.market, q) - aggregate_cost(s.fleet, q, stock);
  if (include_enforcement && q > 0.0) w -= enforcement_cost(s, q, stock);
  return w;
}

namespace detail {

inline constexpr int kRuleScanPoints = 200;
inline constexpr double kRuleBisectTol = 1e-10;  // in x
inline constexpr int kKinkRetries = 5;

enum class RuleFailure { unattainable, kink, nonpositive_denominator, no_catch };

struct RuleTerms {
  double stock = 0.0;
  double catch_rate = 0.0;
  double price = 0.0;
  double cost_marginal = 0.0;
  double cost_stock = 0.0;
  EnforcementGradient enforcement;
  double denominator = 0.0;
  double residual = 0.0;
};

// Golden-rule residual at stock x, or the reason it is undefined there.
// Enforcement-regime kinks are dodged by nudging x (the spec'd retry);
// everything else is reported to the caller, which treats the sample as
// outside the solvable region.
inline std::optional<RuleFailure> rule_terms(const Scenario& s, double x, bool enforced,
                                             RuleTerms& out) {
  const double K = s.stock.carrying_capacity;
  for (int attempt = 0; attempt <= kKinkRetries; ++attempt) {
    const double xx = x + attempt * 1e-7 * K;
    const double q = growth(s.stock, xx);
    if (!(q > 0.0)) return RuleFailure::no_catch;
    out.stock = xx;
    out.catch_rate = q;
    out.price = inverse_demand(s.market, q);
    out.cost_marginal = aggregate_cost_marginal(s.fleet, q, xx);
    out.cost_stock = aggregate_cost_stock_partial(s.fleet, q, xx);
    out.enforcement = {};
    if (enforced) {
      try {
        out.enforcement = enforcement_cost_partials(s, q, xx);
      } catch (const kink_error&) {
        continue;  // nudge and retry
      } catch (const unattainable_error&) {
        return RuleFailure::unattainable;
      }
    }
    out.denominator = out.price - out.cost_marginal - out.enforcement.wrt_catch;
    if (!(out.denominator > 0.0)) return RuleFailure::nonpositive_denominator;
    out.residual = s.discount_rate - growth_derivative(s.stock, xx) +
                   (out.cost_stock + out.enforcement.wrt_stock) / out.denominator;
    return std::nullopt;
  }
  return RuleFailure::kink;
}

inline SteadyState solve_golden_rule(const Scenario& s, bool enforced) {
  s.validate();
  const double K = s.stock.carrying_capacity;
  const double x_lo = 0.02 * K;   // keeps clear of the cost singularity at x -> 0
  const double x_hi = 0.999 * K;

  struct Sample {
    double x;
    std::optional<double> residual;
  };
  std::vector<Sample> samples;
  samples.reserve(kRuleScanPoints);
  int n_unattainable = 0, n_kink = 0, n_bad_denominator = 0;
  for (int i = 0; i < kRuleScanPoints; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (kRuleScanPoints - 1);
    RuleTerms terms;
    const auto fail = rule_terms(s, x, enforced, terms);
    if (!fail) {
      samples.push_back({x, terms.residual});
    } else {
      samples.push_back({x, std::nullopt});
      switch (*fail) {
        case RuleFailure::unattainable: ++n_unattainable; break;
        case RuleFailure::kink: ++n_kink; break;
        case RuleFailure::nonpositive_denominator: ++n_bad_denominator; break;
        case RuleFailure::no_catch: break;
      }
    }
  }

  auto residual_at = [&](double x) {
    RuleTerms terms;
    const auto fail = rule_terms(s, x, enforced, terms);
    if (fail)
      throw solver_error("golden rule: residual became undefined inside a bracket near x = " +
                         std::to_string(x));
    return terms.residual;
  };

  // Sign changes between consecutive defined samples.
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    if (!a.residual || !b.residual) continue;
    const double fa = *a.residual, fb = *b.residual;
    if (fa == 0.0) {
      roots.push_back(a.x);
      continue;
    }
    if ((fa > 0.0) != (fb > 0.0))
      roots.push_back(num::bisect(residual_at, a.x, b.x, fa, fb, kRuleBisectTol));
  }
  if (roots.empty()) {
    std::string msg = enforced ? "transformed golden rule: " : "modified golden rule: ";
    msg += "no sign change on [" + std::to_string(x_lo) + ", " + std::to_string(x_hi) + "]";
    int shown = 0;
    for (const auto& smp : samples) {
      if (!smp.residual) continue;
      if (shown++ % 40 == 0)
        msg += "; G(" + std::to_string(smp.x) + ") = " + std::to_string(*smp.residual);
    }
    if (shown == 0) msg += "; residual undefined at every sampled stock";
    if (n_unattainable)
      msg += "; " + std::to_string(n_unattainable) + " samples unattainable";
    if (n_bad_denominator)
      msg += "; " + std::to_string(n_bad_denominator) + " samples with non-positive denominator";
    if (n_kink) msg += "; " + std::to_string(n_kink) + " samples stuck on regime kinks";
    throw solver_error(msg);
  }

  SteadyState best;
  bool have_best = false;
  for (double root : roots) {
    RuleTerms terms;
    const auto fail = rule_terms(s, root, enforced, terms);
    if (fail) continue;
    SteadyState ss;
    ss.stock = terms.stock;
    ss.catch_rate = terms.catch_rate;
    ss.price = terms.price;
    ss.shadow_price = terms.denominator;
    ss.residual = std::abs(terms.residual);
    ss.welfare_flow = steady_welfare(s, terms.stock, enforced);
    ss.multiple_roots = roots.size() > 1;
    if (!have_best || ss.welfare_flow > best.welfare_flow) {
      best = ss;
      have_best = true;
    }
  }
  if (!have_best)
    throw solver_error("golden rule: every bracketed root failed verification");
  return best;
}

}  // namespace detail

// Steady state under costly, imperfect enforcement (E terms live).
inline SteadyState golden_rule_enforced(const Scenario& s) {
  return detail::solve_golden_rule(s, true);
}

// Steady state under costless, perfect control (E identically zero).
inline SteadyState golden_rule_costless(const Scenario& s) {
  return detail::solve_golden_rule(s, false);
}

enum class CatchOrderingCase { both_below_msy, both_above_msy, straddling_msy };

struct PolicyComparison {
  SteadyState enforced;
  SteadyState costless;
  double msy_stock = 0.0;
  double stock_gap = 0.0;  // costless stock minus enforced stock
  CatchOrderingCase ordering_case = CatchOrderingCase::both_below_msy;
  // Set when both stocks sit below MSY, where theory predicts the
  // enforced catch is the lower one; left unset for straddling stocks.
  bool catch_ordering_applies = false;
  bool enforced_catch_lower = false;
};

inline PolicyComparison compare_policies(const Scenario& s) {
  PolicyComparison cmp;
  cmp.enforced = golden_rule_enforced(s);
  cmp.costless = golden_rule_costless(s);
  cmp.msy_stock = msy(s.stock).first;
  cmp.stock_gap = cmp.costless.stock - cmp.enforced.stock;
  const bool below_e = cmp.enforced.stock < cmp.msy_stock;
  const bool below_c = cmp.costless.stock < cmp.msy_stock;
  if (below_e && below_c)
    cmp.ordering_case = CatchOrderingCase::both_below_msy;
  else if (!below_e && !below_c)
    cmp.ordering_case = CatchOrderingCase::both_above_msy;
  else
    cmp.ordering_case = CatchOrderingCase::straddling_msy;
  cmp.catch_ordering_applies = cmp.ordering_case == CatchOrderingCase::both_below_msy;
  cmp.enforced_catch_lower = cmp.enforced.catch_rate < cmp.costless.catch_rate;
  return cmp;
}

}  // namespace enfish
