#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hisd/theory.hpp"

namespace hisd::verify {

using theory::PropertyCheck;

struct BatteryOptions {
  std::uint64_t seed = 20240101;
  long trials = 500;
  std::string only;         // run a single named suite; empty runs everything
  std::string inject_fault; // self-test hook: sign-flip the named suite's bound
};

/// Names of every suite, in execution order.
std::vector<std::string> battery_suites();

/// The full randomized property battery: linear-algebra identities,
/// benchmark stationarity and inertia, eigensolver frame invariants,
/// contraction on quadratic landscapes, and the closed-form bound suite.
std::vector<PropertyCheck> run_battery(const BatteryOptions& opts);

bool battery_clean(const std::vector<PropertyCheck>& checks);

} // namespace hisd::verify
