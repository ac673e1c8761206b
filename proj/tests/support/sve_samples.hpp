#pragma once

#include "pdstab/error.hpp"
#include "pdstab/sve.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace samples {

// Subcritical parameter sets satisfying the speed assumptions, drawn until
// `count` are accepted by characteristic_roots.
inline std::vector<pdstab::sve::SveParameters> valid_sve_parameters(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> g(9.7, 9.9);
  std::uniform_real_distribution<double> log_a(std::log(1e-4), std::log(5e-2));
  std::uniform_real_distribution<double> h(0.2, 5.0);
  std::uniform_real_distribution<double> froude(0.05, 0.9);
  std::uniform_real_distribution<double> cf(1e-3, 5e-2);
  std::vector<pdstab::sve::SveParameters> out;
  while (static_cast<int>(out.size()) < count) {
    const double gg = g(rng);
    const double hh = h(rng);
    const double vv = froude(rng) * std::sqrt(gg * hh);
    const auto p = pdstab::sve::make_equilibrium(gg, std::exp(log_a(rng)), hh, vv, cf(rng));
    try {
      pdstab::sve::characteristic_roots(p);
    } catch (const pdstab::Error&) {
      continue;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace samples
