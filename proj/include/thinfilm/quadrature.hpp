/**
 * @file quadrature.hpp
 * @brief Compactly supported test functions and piecewise Gauss quadrature.
 */
#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace thinfilm {

/// Standard mollifier exp(-1/(1-s^2)) on (-1, 1).
inline double bump1d(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

inline double bump1d_prime(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double d = 1.0 - s * s;
  return bump1d(s) * (-2.0 * s / (d * d));
}

/// Tensor bump phi(x,t) = psi((x-xc)/rx) psi((t-tc)/rt).
struct TestFunction {
  double xc, tc, rx, rt;

  double value(double x, double t) const {
    return bump1d((x - xc) / rx) * bump1d((t - tc) / rt);
  }
  double dx(double x, double t) const {
    return bump1d_prime((x - xc) / rx) / rx * bump1d((t - tc) / rt);
  }
  double dt(double x, double t) const {
    return bump1d((x - xc) / rx) * bump1d_prime((t - tc) / rt) / rt;
  }
  double x_lo() const { return xc - rx; }
  double x_hi() const { return xc + rx; }
  double t_lo() const { return tc - rt; }
  double t_hi() const { return tc + rt; }
};

/// 20-point Gauss-Legendre on @p panels equal subintervals of [a, b].
template <class F>
double composite_gauss(F &&f, double a, double b, int panels) {
  if (!(b > a)) return 0.0;
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * w;
    s += Rule::integrate(f, lo, i + 1 == panels ? b : lo + w);
  }
  return s;
}

/**
 * @brief Integrate over [a, b] with Gauss panels restarted at every breakpoint
 * inside the interval, so kinks and jumps of the integrand fall on panel edges.
 */
template <class F>
double piecewise_gauss(F &&f, double a, double b, std::vector<double> breaks, int panels) {
  if (!(b > a)) return 0.0;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double s = 0.0;
  double prev = a;
  for (double c : breaks) {
    if (c <= prev) continue;
    if (c > b) break;
    s += composite_gauss(f, prev, c, panels);
    prev = c;
  }
  return s;
}

} // namespace thinfilm
