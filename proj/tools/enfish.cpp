// Scenario-driven command line for the fishery enforcement model:
// firm decisions, golden-rule steady states, trajectory simulation,
// compliance sweeps, and the dynamic-programming cross-check. All data
// output is deterministic: fixed 12-significant-digit report lines,
// full-precision CSV, no timestamps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "enfish/enfish.hpp"

namespace {

using enfish::detail::format_full;
using enfish::detail::format_sig;

void emit(const std::string& key, double v) {
  std::cout << key << ": " << format_sig(v) << "\n";
}
void emit(const std::string& key, const std::string& v) {
  std::cout << key << ": " << v << "\n";
}

std::vector<double> parse_grid(const std::string& spec) {
  // lo:hi:count
  double lo = 0, hi = 0;
  int count = 0;
  char extra = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &count, &extra) != 3 || count < 1)
    throw enfish::validation_error("grid must be lo:hi:count, got '" + spec + "'");
  std::vector<double> values;
  if (count == 1) {
    values.push_back(lo);
    return values;
  }
  for (int i = 0; i < count; ++i) values.push_back(lo + (hi - lo) * i / (count - 1));
  return values;
}

enfish::EnforcementPolicy parse_policy(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw enfish::validation_error("policy must be theta:<v>, catch:<v>, or feedback:<csv>");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "theta") return enfish::EnforcementPolicy::fixed_detection(std::stod(arg));
  if (kind == "catch") return enfish::EnforcementPolicy::catch_target(std::stod(arg));
  if (kind == "feedback") {
    std::ifstream in(arg);
    if (!in) throw enfish::validation_error("cannot open feedback table '" + arg + "'");
    std::vector<std::pair<double, double>> table;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      double x = 0, q = 0;
      if (std::sscanf(line.c_str(), "%lf,%lf", &x, &q) != 2)
        throw enfish::validation_error("feedback table rows must be 'stock,target'");
      table.emplace_back(x, q);
    }
    return enfish::EnforcementPolicy::feedback(std::move(table));
  }
  throw enfish::validation_error("unknown policy kind '" + kind + "'");
}

void print_steady(const std::string& prefix, const enfish::SteadyState& ss) {
  emit(prefix + "stock", ss.stock);
  emit(prefix + "catch", ss.catch_rate);
  emit(prefix + "price", ss.price);
  emit(prefix + "shadow_price", ss.shadow_price);
  emit(prefix + "welfare_flow", ss.welfare_flow);
  emit(prefix + "residual", ss.residual);
  emit(prefix + "multiple_roots", ss.multiple_roots ? "true" : "false");
}

int run_firm(const enfish::Scenario& s, double theta, double stock, int firm_index) {
  if (firm_index < 0 || firm_index >= static_cast<int>(s.fleet.firms.size()))
    throw enfish::validation_error("firm-index out of range");
  const auto outcome = enfish::fleet_response(s, theta, stock);
  const auto& d = outcome.decisions[firm_index];
  const auto& slot = s.fleet.firms[firm_index];
  emit("firm_index", format_sig(firm_index));
  emit("price", outcome.price);
  emit("catch", d.catch_rate);
  emit("violation", d.violation);
  emit("regime", enfish::regime_name(d.regime));
  emit("expected_profit", d.expected_profit);
  emit("foc_residual", enfish::foc_residual(outcome.price, slot.cost, s.penalty, theta, stock,
                                            slot.quota, d.catch_rate));
  return 0;
}

int run_steady(const enfish::Scenario& s, bool costless, bool compare) {
  if (compare) {
    const auto cmp = enfish::compare_policies(s);
    print_steady("enforced.", cmp.enforced);
    print_steady("costless.", cmp.costless);
    emit("msy_stock", cmp.msy_stock);
    emit("stock_gap", cmp.stock_gap);
    emit("stock_ordering", cmp.stock_gap > 0.0 ? "enforced below costless" : "inverted");
    switch (cmp.ordering_case) {
      case enfish::CatchOrderingCase::both_below_msy:
        emit("catch_ordering", std::string("both stocks below MSY; enforced catch ") +
                                   (cmp.enforced_catch_lower ? "lower" : "not lower") +
                                   " than costless");
        break;
      case enfish::CatchOrderingCase::both_above_msy:
        emit("catch_ordering", std::string("both stocks above MSY; enforced catch ") +
                                   (cmp.enforced_catch_lower ? "lower" : "higher"));
        break;
      case enfish::CatchOrderingCase::straddling_msy:
        emit("catch_ordering", std::string("stocks straddle MSY; enforced catch ") +
                                   (cmp.enforced_catch_lower ? "lower" : "higher") +
                                   " (no theoretical ordering asserted)");
        break;
    }
    return 0;
  }
  const auto ss = costless ? enfish::golden_rule_costless(s) : enfish::golden_rule_enforced(s);
  emit("rule", costless ? "costless" : "enforced");
  print_steady("", ss);
  return 0;
}

int run_simulate(const enfish::Scenario& s, const std::string& policy_spec, double x0,
                 double horizon, double dt, const std::string& out_path, bool halve_check) {
  const auto policy = parse_policy(policy_spec);
  const auto traj = enfish::integrate(s, policy, x0, horizon, dt);
  const auto welfare = enfish::discounted_welfare(s, traj);
  emit("samples", format_sig(static_cast<double>(traj.time.size())));
  emit("terminal_stock", traj.stock.back());
  emit("discounted_welfare", welfare.value);
  emit("tail_fraction", welfare.tail_fraction);
  if (welfare.tail_warning)
    emit("tail_warning", "tail exceeds 1% of discounted welfare; extend the horizon");
  if (traj.extinction_time) emit("extinction_time", *traj.extinction_time);
  if (halve_check) {
    const auto half = enfish::integrate(s, policy, x0, horizon, dt / 2.0);
    const auto quarter = enfish::integrate(s, policy, x0, horizon, dt / 4.0);
    const double e1 = std::abs(traj.stock.back() - half.stock.back());
    const double e2 = std::abs(half.stock.back() - quarter.stock.back());
    emit("step_halving_delta", e1);
    emit("step_quartering_delta", e2);
    emit("convergence_ratio", e2 > 0.0 ? e1 / e2 : 0.0);
  }
  if (out_path.empty()) {
    enfish::write_trajectory_csv(traj, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw enfish::validation_error("cannot open output file '" + out_path + "'");
    enfish::write_trajectory_csv(traj, out);
  }
  return 0;
}

int run_sweep(const enfish::Scenario& s, const std::string& lever, const std::string& grid,
              double theta, double stock, const std::string& out_path) {
  enfish::SweepResult result;
  if (lever == "theta")
    result = enfish::sweep_detection(s, parse_grid(grid), stock);
  else if (lever == "fmax")
    result = enfish::sweep_sanction(s, parse_grid(grid), theta, stock);
  else
    throw enfish::validation_error("unknown lever '" + lever + "'; valid levers: theta, fmax");
  if (out_path.empty()) {
    enfish::write_sweep_csv(result, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw enfish::validation_error("cannot open output file '" + out_path + "'");
    enfish::write_sweep_csv(result, out);
  }
  return 0;
}

int run_oracle(const enfish::Scenario& s, int grid_points, double dt) {
  const enfish::DPGridSpec grid{grid_points};
  const double cell =
      (s.stock.carrying_capacity - 0.02 * s.stock.carrying_capacity) / (grid_points - 1);
  emit("grid_points", format_sig(grid_points));
  emit("dt", dt);
  emit("cell", cell);
  bool ok = true;
  {
    const auto rule = enfish::golden_rule_enforced(s);
    const auto dp = enfish::dp_oracle(s, grid, dt, true);
    const double cells = std::abs(dp.steady_stock - rule.stock) / cell;
    emit("enforced.golden_rule_stock", rule.stock);
    emit("enforced.dp_stock", dp.steady_stock);
    emit("enforced.cells_apart", cells);
    ok = ok && cells <= 1.0;
  }
  {
    const auto rule = enfish::golden_rule_costless(s);
    const auto dp = enfish::dp_oracle(s, grid, dt, false);
    const double cells = std::abs(dp.steady_stock - rule.stock) / cell;
    emit("costless.golden_rule_stock", rule.stock);
    emit("costless.dp_stock", dp.steady_stock);
    emit("costless.cells_apart", cells);
    ok = ok && cells <= 1.0;
  }
  emit("agreement_within_one_cell", ok ? "true" : "false");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fisheries enforcement economics: firm behavior, enforcement costs, "
               "golden rules, dynamics, compliance sweeps"};
  app.require_subcommand(1);

  std::string scenario_path;
  double theta = 0.0, stock = 1.0, x0 = 0.5, horizon = 0.0, dt = 0.01;
  int firm_index = 0, grid_points = 400;
  double oracle_dt = 0.02;
  bool costless = false, compare = false, halve_check = false;
  std::string policy_spec, out_path, lever, grid_spec;

  auto* firm = app.add_subcommand("firm", "solve one firm's catch decision");
  firm->add_option("--scenario", scenario_path, "scenario file")->required();
  firm->add_option("--theta", theta, "detection probability")->required();
  firm->add_option("--stock", stock, "stock level")->required();
  firm->add_option("--firm-index", firm_index, "fleet position (default 0)");

  auto* steady = app.add_subcommand("steady", "solve golden-rule steady states");
  steady->add_option("--scenario", scenario_path, "scenario file")->required();
  steady->add_flag("--costless", costless, "costless, perfect enforcement rule");
  steady->add_flag("--compare", compare, "solve both rules and compare");

  auto* simulate = app.add_subcommand("simulate", "integrate the stock equation");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--policy", policy_spec, "theta:<v> | catch:<v> | feedback:<csv>")
      ->required();
  simulate->add_option("--x0", x0, "initial stock")->required();
  simulate->add_option("--horizon", horizon, "time horizon (default max(200, 10/delta))");
  simulate->add_option("--dt", dt, "step size (default 0.01)");
  simulate->add_option("--out", out_path, "trajectory CSV path (default stdout)");
  simulate->add_flag("--halve-check", halve_check, "print step-halving convergence ratio");

  auto* sweep = app.add_subcommand("sweep", "compliance lever sweeps");
  sweep->add_option("--scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--lever", lever, "theta | fmax")->required();
  sweep->add_option("--grid", grid_spec, "lo:hi:count")->required();
  sweep->add_option("--theta", theta, "fixed detection for fmax sweeps");
  sweep->add_option("--stock", stock, "stock level")->required();
  sweep->add_option("--out", out_path, "CSV path (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "dynamic-programming cross-check of both rules");
  oracle->add_option("--scenario", scenario_path, "scenario file")->required();
  oracle->add_option("--grid-points", grid_points, "stock grid size (default 400)");
  oracle->add_option("--dt", oracle_dt, "DP step size (default 0.02)");

  try {
    app.parse(argc, argv);
    const enfish::Scenario s = enfish::load_scenario(scenario_path);
    if (firm->parsed()) return run_firm(s, theta, stock, firm_index);
    if (steady->parsed()) return run_steady(s, costless, compare);
    if (simulate->parsed()) {
      if (horizon <= 0.0) horizon = enfish::suggested_horizon(s);
      return run_simulate(s, policy_spec, x0, horizon, dt, out_path, halve_check);
    }
    if (sweep->parsed()) return run_sweep(s, lever, grid_spec, theta, stock, out_path);
    if (oracle->parsed()) return run_oracle(s, grid_points, oracle_dt);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: validation: " << e.what() << "\n";
    return 2;
  } catch (const enfish::error& e) {
    std::cerr << "error: " << enfish::errc_name(e.code()) << ": " << e.what() << "\n";
    switch (e.code()) {
      case enfish::errc::validation: return 2;
      case enfish::errc::unattainable: return 4;
      default: return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: solver: " << e.what() << "\n";
    return 3;
  }
}
