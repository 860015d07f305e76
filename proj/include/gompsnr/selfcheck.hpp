#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gompsnr/omniphase.hpp"

namespace gompsnr {

struct SelfcheckOptions {
  std::uint64_t seed = 0;
  // Test hook: overrides the kernel bank under check. Default bank when null.
  const KernelBank* kernels = nullptr;
};

struct SelfcheckGroup {
  std::string name;
  bool passed = false;
  std::string detail;  // filled on failure
};

struct SelfcheckResult {
  std::vector<SelfcheckGroup> groups;
  bool all_passed() const;
};

// Runs the embedded invariant suite: anti-wrap periodicity/range, kernel
// bank structure and loop-oracle equivalence, denominator nonnegativity on
// random grids, and finite-difference gradient spot checks. Deterministic
// for a fixed seed.
SelfcheckResult run_selfcheck(const SelfcheckOptions& options = {});

}  // namespace gompsnr
