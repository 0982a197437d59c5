#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "dsurf/immersion.hpp"

namespace testing {

inline std::string corpus(const std::string& name) {
  return std::string(DSURF_CORPUS_DIR) + "/" + name + ".imm";
}

inline dsurf::ImmersionSpec load(const std::string& name) { return dsurf::load_immersion(corpus(name)); }

// DIRAC_SURFACE_SEED overrides the default seed of the randomized tests.
inline std::uint64_t seed() {
  if (const char* s = std::getenv("DIRAC_SURFACE_SEED")) return std::strtoull(s, nullptr, 10);
  return 20240601ULL;
}

// R = exp(A) for a random antisymmetric A with entries in [-pi, pi].
inline dsurf::Mat4 random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  dsurf::Mat4 A = dsurf::Mat4::Zero();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      A(i, j) = u(rng);
      A(j, i) = -A(i, j);
    }
  return A.exp();
}

}  // namespace testing
