#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flipspec::cli {

struct Check {
  std::string suite;
  std::string name;
  bool pass;
  double value;
  double threshold;
  std::string detail;
};

// operators, prop31, hankel, odd, discrepancy, overlay, precond, cluster.
const std::vector<std::string>& suite_names();

// `sizes` overrides the default sizes of prop31 and hankel when non-empty.
std::vector<Check> run_suite(const std::string& name, const std::vector<int>& sizes,
                             std::uint64_t seed);

}  // namespace flipspec::cli
