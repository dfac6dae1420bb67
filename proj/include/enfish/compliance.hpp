#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "enfish/detail/format.hpp"
#include "enfish/errors.hpp"
#include "enfish/fleet.hpp"
#include "enfish/model.hpp"

// Compliance experiments: how the aggregate violation responds to the
// public authority's levers (detection probability, sanction size), and
// the detection-versus-sanction tradeoff at equal expected marginal
// penalty. All sweeps are deterministic pure evaluations.

namespace enfish {

struct SweepResult {
  std::string lever;
  std::vector<double> values;
  std::vector<double> violation;
  std::vector<double> total_catch;
  std::vector<double> enforcement_cost;  // effort spend e(theta) in the swept state
  std::vector<int> compliant_firms;
};

inline void write_sweep_csv(const SweepResult& r, std::ostream& os) {
  os << "lever,value,violation,catch,enforcement_cost,compliant_firms\n";
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    os << r.lever << ',' << detail::format_full(r.values[i]) << ','
       << detail::format_full(r.violation[i]) << ',' << detail::format_full(r.total_catch[i])
       << ',' << detail::format_full(r.enforcement_cost[i]) << ',' << r.compliant_firms[i]
       << '\n';
  }
}

namespace detail {

inline int count_compliant(const FleetOutcome& out) {
  int n = 0;
  for (const auto& d : out.decisions)
    if (d.regime != Regime::violating) ++n;
  return n;
}

inline void require_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      throw validation_error(std::string("sweep: ") + what + " must be strictly increasing");
}

}  // namespace detail

// Violation response to the detection probability.
inline SweepResult sweep_detection(const Scenario& s, const std::vector<double>& thetas,
                                   double stock) {
  s.validate();
  if (!(stock > 0.0)) throw validation_error("sweep_detection: stock must be > 0");
  if (thetas.empty()) throw validation_error("sweep_detection: empty grid");
  detail::require_increasing(thetas, "detection grid");
  SweepResult r;
  r.lever = "theta";
  for (double th : thetas) {
    if (!(th >= 0.0 && th < 1.0))
      throw validation_error("sweep_detection: theta values must lie in [0, 1)");
    const FleetOutcome out = fleet_response(s, th, stock);
    r.values.push_back(th);
    r.violation.push_back(out.total_violation);
    r.total_catch.push_back(out.total_catch);
    r.enforcement_cost.push_back(effort_cost(s.enforcement, th));
    r.compliant_firms.push_back(detail::count_compliant(out));
  }
  return r;
}

// Violation response to the sanction bound at a fixed detection
// probability. A zero bound is admitted: it is the no-penalty case.
inline SweepResult sweep_sanction(const Scenario& s, const std::vector<double>& max_fines,
                                  double theta, double stock) {
  s.validate();
  if (!(stock > 0.0)) throw validation_error("sweep_sanction: stock must be > 0");
  if (!(theta >= 0.0 && theta < 1.0))
    throw validation_error("sweep_sanction: theta must lie in [0, 1)");
  if (max_fines.empty()) throw validation_error("sweep_sanction: empty grid");
  detail::require_increasing(max_fines, "sanction grid");
  SweepResult r;
  r.lever = "fmax";
  for (double fine : max_fines) {
    if (!(fine >= 0.0)) throw validation_error("sweep_sanction: max fines must be >= 0");
    PenaltySchedule ps = s.penalty;
    ps.max_fine = fine;
    const FleetOutcome out = fleet_response(s.fleet, s.market, ps, theta, stock);
    r.values.push_back(fine);
    r.violation.push_back(out.total_violation);
    r.total_catch.push_back(out.total_catch);
    r.enforcement_cost.push_back(effort_cost(s.enforcement, theta));
    r.compliant_firms.push_back(detail::count_compliant(out));
  }
  return r;
}

struct TradeoffRow {
  double detection = 0.0;
  double max_fine = 0.0;
  double violation = 0.0;
  double effort_spend = 0.0;
  bool feasible = false;  // effort spend within budget
};

struct TradeoffReport {
  double marginal_penalty_level = 0.0;  // theta * max_fine * severity held fixed
  double budget = 0.0;
  std::vector<TradeoffRow> rows;
  int cheapest_index = -1;  // cheapest feasible mix attaining the least violation
  int skipped_infeasible = 0;
};

// The probability-versus-magnitude dispute, quantified for this model:
// sweep (theta, max_fine) pairs holding the expected marginal penalty at
// the quota margin, theta * max_fine * severity, equal to what the
// scenario's own fine could deliver when the whole budget buys detection.
// Under the saturating fee the expected penalty depends on theta and
// max_fine only through their product, so every pair deters identically;
// what differs is the effort bill e(theta), which prices detection but
// not sanctions. Pairs whose effort spend exceeds the budget are skipped
// as infeasible.
inline TradeoffReport expected_penalty_tradeoff(const Scenario& s, double stock,
                                                double budget) {
  s.validate();
  if (!(stock > 0.0)) throw validation_error("tradeoff: stock must be > 0");
  if (!(budget > 0.0)) throw validation_error("tradeoff: budget must be > 0");

  TradeoffReport rep;
  rep.budget = budget;
  // Detection level the budget can just sustain: e(theta_budget) = budget.
  const double theta_budget = budget / (s.enforcement.effort_scale + budget);
  rep.marginal_penalty_level = theta_budget * s.penalty.max_fine * s.penalty.severity;

  double best_violation = 1e300, best_spend = 1e300;
  for (int i = 1; i <= 19; ++i) {
    TradeoffRow row;
    row.detection = 0.05 * i;
    row.max_fine = rep.marginal_penalty_level / (row.detection * s.penalty.severity);
    row.effort_spend = effort_cost(s.enforcement, row.detection);
    row.feasible = row.effort_spend <= budget * (1.0 + 1e-12);
    PenaltySchedule ps = s.penalty;
    ps.max_fine = row.max_fine;
    row.violation = aggregate_violation(s.fleet, s.market, ps, row.detection, stock);
    if (!row.feasible) ++rep.skipped_infeasible;
    rep.rows.push_back(row);
    if (row.feasible &&
        (row.violation < best_violation - 1e-12 ||
         (row.violation < best_violation + 1e-12 && row.effort_spend < best_spend))) {
      best_violation = std::min(best_violation, row.violation);
      best_spend = row.effort_spend;
      rep.cheapest_index = static_cast<int>(rep.rows.size()) - 1;
    }
  }
  return rep;
}

}  // namespace enfish
