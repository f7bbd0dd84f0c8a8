#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "butterfly_lab/report.hpp"

namespace butterfly_lab {

// Test-only negative control: after the suite runs, the named check gets `residual`
// recorded on top of its measured value.
struct FaultInjection {
  std::string check;
  double residual = 1.0;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  int samples = 16;
  // Largest q for the symmetry suite (trace identity is exhaustive up to here).
  int qmax = 8;
  int semiclassical_grid = 32;
  std::optional<FaultInjection> fault;
};

// Symmetries and trace identity, graphene factorisation, kagome theorem structure,
// band-structure properties and the semiclassical checks, merged into one report.
IdentityReport run_verification(const VerifyOptions& options = {});

}  // namespace butterfly_lab
