#pragma once

#include <string>
#include <vector>

namespace growsim {

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  int draws = 0;
};

struct VerifyReport {
  std::string level;  // quick | full
  int draws = 0;
  bool all_pass = false;
  std::vector<PropertyCheck> properties;
};

struct VerifyOptions {
  int draws = 100;
  // test hook: multiplies one tangent entry to prove the FD property catches
  // a broken tangent; 0 keeps the tangent untouched
  double tangent_perturbation = 0.0;
};

// Runs the cross-module property suites (kernel identities, FD consistency,
// fixed points, transformation identities, element checks) on seeded random
// draws and reports measured errors per property.
VerifyReport run_verification(const VerifyOptions& opts);

std::string report_to_json(const VerifyReport& report);

}  // namespace growsim
