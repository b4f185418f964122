#pragma once

// Seeded generators for the randomized families used by the suites.
// Generator: std::mt19937_64; uniforms from std::uniform_real_distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "symspace/stepfn.hpp"

namespace symspace {

using Rng = std::mt19937_64;

/// Decreasing step function on (0, length) with heavy-tailed values.
/// Interior breakpoints length*exp(-12 U), values exp(6 U) sorted descending
/// and normalized so that the first value is 1.
inline StepFunction random_decreasing(Rng& rng, std::size_t pieces, double length = 1.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> bp{0.0};
  while (bp.size() < pieces) {
    const double b = length * std::exp(-12.0 * unif(rng));
    if (b > 0.0 && b < length) bp.push_back(b);
  }
  bp.push_back(length);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> v(bp.size() - 1);
  for (double& x : v) x = std::exp(6.0 * unif(rng));
  std::sort(v.begin(), v.end(), std::greater<>());
  const double top = v.front();
  for (double& x : v) x /= top;
  return StepFunction(std::move(bp), std::move(v));
}

inline StepFunction random_decreasing(std::uint64_t seed, std::size_t pieces, double length = 1.0) {
  Rng rng(seed);
  return random_decreasing(rng, pieces, length);
}

/// Unsorted step function with uniform breakpoints and values in [lo, hi).
inline StepFunction random_step(Rng& rng, std::size_t pieces, double length = 1.0, double lo = -1.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> bp{0.0};
  while (bp.size() < pieces) bp.push_back(length * unif(rng));
  bp.push_back(length);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> v(bp.size() - 1);
  for (double& x : v) x = lo + (hi - lo) * unif(rng);
  return StepFunction(std::move(bp), std::move(v));
}

}  // namespace symspace
