#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gddim {

struct SelfTestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Fast invariant suite: moment-map round trips, reverse-step identity,
/// DDIM equivalence, schedule identities, and a finite-difference gradient
/// spot-check. Runs in a few seconds.
std::vector<SelfTestCheck> run_selftest();

/// Prints one row per check; returns true if every check passed.
bool print_selftest(std::ostream& out, const std::vector<SelfTestCheck>& checks);

}  // namespace gddim
