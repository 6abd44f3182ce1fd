// Shared generators and finite-difference oracles for the test suites.
#pragma once

#include <thinfilm/core.hpp>

#include <cmath>
#include <cstdint>
#include <random>

namespace tftest {

using thinfilm::Params;
using thinfilm::State;

/// Deterministic generator of parameters and states; every suite seeds its own.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  Params params(double lo = 0.1, double hi = 2.0) {
    return Params(uniform(lo, hi), uniform(lo, hi));
  }
  State interior(double lo = 0.1, double hi = 3.0) {
    return {uniform(lo, hi), uniform(lo, hi)};
  }
  /// Second state on the ray of @p u with a different height.
  State on_ray(const State &u, double lo = 0.1, double hi = 3.0) {
    const double h = uniform(lo, hi);
    return {h, u.b / u.h * h};
  }
  std::mt19937_64 &engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

/// Central difference of a scalar function of (h, b).
template <class F>
thinfilm::Vec2 fd_gradient(F &&f, const State &u, double step = 1e-6) {
  const double eh = step * std::max(1.0, u.h), eb = step * std::max(1.0, u.b);
  return {(f(State{u.h + eh, u.b}) - f(State{u.h - eh, u.b})) / (2 * eh),
          (f(State{u.h, u.b + eb}) - f(State{u.h, u.b - eb})) / (2 * eb)};
}

} // namespace tftest
