#pragma once

#include <cstdint>

#include "enfish/enfish.hpp"

namespace support {

// splitmix64-based generator: deterministic and platform-independent, so
// randomized tests reproduce exactly everywhere.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// The scenario shipped as scenarios/default.json: ten identical firms,
// constant price, quotas well below both the open-access catch and the
// maximum sustainable yield.
inline enfish::Scenario default_scenario() {
  enfish::Scenario s;
  s.stock = {1.0, 1.0};
  s.market = enfish::MarketParams::constant(10.0);
  s.fleet.firms.assign(10, enfish::FirmSlot{{5.0}, 0.02});
  s.penalty = {20.0, 1.0};
  s.enforcement = {1.0};
  s.discount_rate = 0.05;
  return s;
}

// A low-pressure fishery whose open-access equilibrium sits at K/2:
// growth r x (1-x) meets the free-access catch p x sum(1/c) = 0.5 x there.
inline enfish::Scenario coastal_scenario() {
  enfish::Scenario s;
  s.stock = {1.0, 1.0};
  s.market = enfish::MarketParams::constant(2.0);
  s.fleet.firms.assign(10, enfish::FirmSlot{{40.0}, 0.01});
  s.penalty = {20.0, 1.0};
  s.enforcement = {1.0};
  s.discount_rate = 0.05;
  return s;
}

}  // namespace support
