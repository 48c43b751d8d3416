#include "doctest.h"
#include "hisd/verify.hpp"

using namespace hisd::verify;
using hisd::Error;

TEST_CASE("single-suite filter runs exactly one suite") {
  BatteryOptions opts;
  opts.trials = 40;
  opts.only = "lemma3.4";
  const auto checks = run_battery(opts);
  REQUIRE(checks.size() == 1);
  CHECK(checks[0].name == "lemma3.4");
  CHECK(checks[0].violations == 0);
}

TEST_CASE("unknown suite names are rejected with the available list") {
  BatteryOptions opts;
  opts.only = "lemma9.9";
  CHECK_THROWS_WITH_AS(run_battery(opts), doctest::Contains("available"), Error);
}

TEST_CASE("battery smoke run is clean at reduced trial count") {
  BatteryOptions opts;
  opts.trials = 40;
  const auto checks = run_battery(opts);
  CHECK(checks.size() == battery_suites().size());
  for (const auto& check : checks) {
    CAPTURE(check.name);
    CAPTURE(check.detail);
    CHECK(check.violations == 0);
  }
  CHECK(battery_clean(checks));
}

TEST_CASE("fault injection fails exactly the targeted suite") {
  BatteryOptions opts;
  opts.trials = 40;
  opts.inject_fault = "lemma4.3";
  const auto checks = run_battery(opts);
  CHECK(!battery_clean(checks));
  for (const auto& check : checks) {
    if (check.name == "lemma4.3")
      CHECK(check.violations > 0);
    else
      CHECK(check.violations == 0);
  }
}
