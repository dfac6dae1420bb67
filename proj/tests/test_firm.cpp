#include <catch2/catch_amalgamated.hpp>

#include "enfish/firm.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace enfish;
using Catch::Matchers::WithinAbs;

namespace {
const FirmCostParams kCost{5.0};
const PenaltySchedule kPenalty{20.0, 1.0};
constexpr double kPrice = 10.0;
}  // namespace

TEST_CASE("expected profit") {
  // Compliant catch carries no expected fee.
  CHECK_THAT(expected_profit(kPrice, kCost, kPenalty, 0.5, 1.0, 0.5, 0.5),
             WithinAbs(4.375, 1e-15));
  // Zero detection removes the penalty term entirely.
  CHECK_THAT(expected_profit(kPrice, kCost, kPenalty, 0.0, 1.0, 0.5, 2.0),
             WithinAbs(10.0, 1e-15));
  // Violating catch: profit net of the expected fee.
  CHECK_THAT(expected_profit(kPrice, kCost, kPenalty, 0.5, 1.0, 0.5, 1.5),
             WithinAbs(3.0537944117144233, 1e-12));

  CHECK_THROWS_AS(expected_profit(kPrice, kCost, kPenalty, 1.0, 1.0, 0.5, 1.0),
                  validation_error);
  CHECK_THROWS_AS(expected_profit(kPrice, kCost, kPenalty, 0.5, 0.0, 0.5, 1.0),
                  validation_error);
  CHECK_THROWS_AS(expected_profit(kPrice, kCost, kPenalty, 0.5, 1.0, -0.1, 1.0),
                  validation_error);
}

TEST_CASE("open access catch") {
  CHECK_THAT(open_access_catch(10.0, kCost, 1.0), WithinAbs(2.0, 1e-15));
  CHECK_THAT(open_access_catch(10.0, kCost, 0.5), WithinAbs(1.0, 1e-15));
  CHECK_THAT(open_access_catch(10.0, FirmCostParams{20.0}, 1.0), WithinAbs(0.5, 1e-15));
  CHECK_THROWS_AS(open_access_catch(10.0, kCost, 0.0), validation_error);
}

TEST_CASE("best response corners") {
  // No detection: the open-access catch, exactly.
  auto d = best_response(kPrice, kCost, kPenalty, 0.0, 1.0, 0.5);
  CHECK(d.catch_rate == 2.0);
  CHECK(d.regime == Regime::violating);
  CHECK_THAT(d.violation, WithinAbs(1.5, 1e-15));

  // Quota above the unconstrained optimum never binds.
  d = best_response(kPrice, kCost, kPenalty, 0.9, 1.0, 2.5);
  CHECK(d.catch_rate == 2.0);
  CHECK(d.regime == Regime::under_quota);
  CHECK(d.violation == 0.0);

  // Strong deterrence at a tight quota: exact compliance.
  d = best_response(kPrice, kCost, kPenalty, 0.5, 1.0, 0.5);
  CHECK(d.catch_rate == 0.5);
  CHECK(d.regime == Regime::compliant);
  CHECK_THAT(d.expected_profit, WithinAbs(4.375, 1e-12));
}

TEST_CASE("best response agrees with the grid-search oracle") {
  // The catch the oracle finds at the quota corner point.
  auto o = oracle::grid_search_best_response(kPrice, 5.0, 20.0, 1.0, 0.5, 1.0, 0.5, 4.0, 1e-5);
  auto d = best_response(kPrice, kCost, kPenalty, 0.5, 1.0, 0.5);
  CHECK_THAT(d.catch_rate, WithinAbs(o.catch_rate, 1e-5));
  CHECK(d.expected_profit >= o.profit - 1e-8);

  // An interior violating optimum, frozen after oracle verification.
  o = oracle::grid_search_best_response(kPrice, 5.0, 20.0, 1.0, 0.3, 1.0, 0.5, 4.0, 1e-5);
  d = best_response(kPrice, kCost, kPenalty, 0.3, 1.0, 0.5);
  CHECK_THAT(d.catch_rate, WithinAbs(o.catch_rate, 1e-5));
  CHECK(d.expected_profit >= o.profit - 1e-8);
  CHECK(d.regime == Regime::violating);
  CHECK_THAT(d.catch_rate, WithinAbs(1.6009233619057266, 1e-9));
  CHECK_THAT(d.expected_profit, WithinAbs(5.5972277827905552, 1e-9));
}

TEST_CASE("zero detection always yields the open-access catch") {
  support::Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    const double price = rng.uniform(2.0, 20.0);
    const FirmCostParams fc{rng.uniform(1.0, 30.0)};
    const double stock = rng.uniform(0.05, 2.0);
    const double quota = rng.uniform(0.0, 1.5);
    const auto d = best_response(price, fc, kPenalty, 0.0, stock, quota);
    CHECK_THAT(d.catch_rate, WithinAbs(price * stock / fc.cost_coefficient, 1e-12));
  }
}

TEST_CASE("catch responds monotonically to detection and stock") {
  const int n = 8;
  for (int qi = 0; qi < n; ++qi) {
    const double quota = 2.0 * qi / (n - 1);
    for (int xi = 0; xi < n; ++xi) {
      const double stock = 0.1 + 0.9 * xi / (n - 1);
      double prev = 1e300;
      for (int ti = 0; ti < n; ++ti) {
        const double theta = 0.95 * ti / (n - 1);
        const double c = best_response(kPrice, kCost, kPenalty, theta, stock, quota).catch_rate;
        CHECK(c <= prev + 1e-9);
        prev = c;
      }
    }
    for (int ti = 0; ti < n; ++ti) {
      const double theta = 0.95 * ti / (n - 1);
      double prev = -1e300;
      for (int xi = 0; xi < n; ++xi) {
        const double stock = 0.1 + 0.9 * xi / (n - 1);
        const double c = best_response(kPrice, kCost, kPenalty, theta, stock, quota).catch_rate;
        CHECK(c >= prev - 1e-9);
        prev = c;
      }
    }
  }
}

TEST_CASE("catch response to the quota by regime") {
  // Compliant corner: catch tracks the quota one for one.
  const double c1 = best_response(kPrice, kCost, kPenalty, 0.5, 1.0, 0.5).catch_rate;
  const double c2 = best_response(kPrice, kCost, kPenalty, 0.5, 1.0, 0.6).catch_rate;
  CHECK_THAT(c2 - c1, WithinAbs(0.1, 1e-9));

  // Unconstrained optimum: the quota is irrelevant.
  const double f1 = best_response(kPrice, kCost, kPenalty, 0.2, 1.0, 2.5).catch_rate;
  const double f2 = best_response(kPrice, kCost, kPenalty, 0.2, 1.0, 3.0).catch_rate;
  CHECK(f1 == f2);

  // Interior violating optimum: with a concave, saturating fee the
  // marginal expected penalty at a fixed catch grows as the quota moves
  // toward it, so the optimum shifts down slightly as the quota rises.
  const double v1 = best_response(kPrice, kCost, kPenalty, 0.25, 1.0, 0.02).catch_rate;
  const double v2 = best_response(kPrice, kCost, kPenalty, 0.25, 1.0, 0.04).catch_rate;
  CHECK(v1 > 0.02 + 1e-6);  // both violating
  CHECK(v2 > 0.04 + 1e-6);
  CHECK(v2 < v1);
  CHECK(v1 - v2 < 0.02);  // response magnitude stays below one-for-one
}

TEST_CASE("no optimum strictly between quota and the smallest marginal root") {
  support::Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double theta = rng.uniform(0.05, 0.9);
    const double stock = rng.uniform(0.2, 1.5);
    const double quota = rng.uniform(0.0, 1.0);
    const PenaltySchedule ps{rng.uniform(5.0, 40.0), rng.uniform(0.3, 2.0)};
    const auto roots = violating_roots(kPrice, kCost, ps, theta, stock, quota);
    if (roots.empty()) continue;
    const auto d = best_response(kPrice, kCost, ps, theta, stock, quota);
    if (d.catch_rate > quota + 1e-9) CHECK(d.catch_rate >= roots.front() - 1e-9);
  }
}

TEST_CASE("oracle equivalence on randomized draws") {
  support::Rng rng(99);
  for (int i = 0; i < 25; ++i) {
    const double theta = rng.uniform(0.0, 0.95);
    const double stock = rng.uniform(0.1, 1.0);
    const double quota = rng.uniform(0.0, 2.0 * stock);
    const double fine = rng.uniform(5.0, 40.0);
    const double severity = rng.uniform(0.3, 2.0);
    const PenaltySchedule ps{fine, severity};
    const auto d = best_response(kPrice, kCost, ps, theta, stock, quota);
    const auto o =
        oracle::grid_search_best_response(kPrice, 5.0, fine, severity, theta, stock, quota,
                                          2.0 * stock + 0.5, 1e-4);
    CHECK(d.expected_profit >= o.profit - 1e-8);
    CHECK_THAT(d.catch_rate, WithinAbs(o.catch_rate, 1e-3));

    // Global-max sanity against the obvious alternatives.
    CHECK(d.expected_profit >=
          expected_profit(kPrice, kCost, ps, theta, stock, quota, quota) - 1e-12);
    CHECK(d.expected_profit >=
          expected_profit(kPrice, kCost, ps, theta, stock, quota, 0.0) - 1e-12);
  }
}

TEST_CASE("response partials") {
  // Quota corner: catch pinned to the quota, so only the quota moves it.
  auto g = response_partials(kPrice, kCost, kPenalty, 0.5, 1.0, 0.5);
  CHECK(g.wrt_detection == 0.0);
  CHECK(g.wrt_stock == 0.0);
  CHECK_THAT(g.wrt_quota, WithinAbs(1.0, 1e-9));

  // Open access at theta = 0 (one-sided stencil at the domain edge).
  g = response_partials(kPrice, kCost, kPenalty, 0.0, 1.0, 0.5);
  CHECK(g.wrt_detection <= 0.0);
  CHECK_THAT(g.wrt_detection, WithinAbs(-0.89251784629595921, 1e-6));
  CHECK_THAT(g.wrt_stock, WithinAbs(2.0, 1e-6));
  CHECK_THAT(g.wrt_quota, WithinAbs(0.0, 1e-12));

  // Interior violating optimum: anchors recorded from the verified stencil.
  g = response_partials(kPrice, kCost, kPenalty, 0.3, 1.0, 0.5);
  CHECK(g.wrt_detection <= 0.0);
  CHECK(g.wrt_stock >= 0.0);
  CHECK_THAT(g.wrt_detection, WithinAbs(-2.2136857626417892, 1e-6));
  CHECK_THAT(g.wrt_stock, WithinAbs(2.6641057287974945, 1e-6));
  CHECK_THAT(g.wrt_quota, WithinAbs(-0.66410569892139315, 1e-6));
}

TEST_CASE("response partials report the compliance switch as a kink") {
  // Between theta = 0.3 (violating) and theta = 0.5 (compliant) the
  // optimum jumps to the corner; locate the switch and difference across it.
  double lo = 0.3, hi = 0.5;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    const auto d = best_response(kPrice, kCost, kPenalty, mid, 1.0, 0.5);
    (d.regime == Regime::violating ? lo : hi) = mid;
  }
  CHECK_THROWS_AS(response_partials(kPrice, kCost, kPenalty, 0.5 * (lo + hi), 1.0, 0.5),
                  kink_error);
}
