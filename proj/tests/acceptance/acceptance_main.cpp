#include <cstdlib>
#include <iostream>
#include <string>

#include "verify/criteria.hpp"

// Usage: scramble_acceptance [criterion ...]; no arguments runs all of them.
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  const auto results = scramble::verify::run_criteria(ids, std::cout);
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}
