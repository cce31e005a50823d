#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vortexlab {

struct SelfTestItem {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Quick invariant suite over small random inputs drawn from `seed`.
std::vector<SelfTestItem> run_selftest(std::uint64_t seed);

}  // namespace vortexlab
