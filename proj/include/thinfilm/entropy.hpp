/**
 * @file entropy.hpp
 *
 * @brief Entropy / entropy-flux pairs of the form
 *
 *   eta = Psi(w1) + sqrt(w1) Theta(p),
 *   q   = 3 (w1 Psi(w1) - int_1^{w1} Psi) + w1^{3/2} Theta(p),   p = 3 alpha w2 + kappa,
 *
 * with convexity diagnostics and finite-difference verifiers.
 */
#pragma once

#include "core.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace thinfilm {

/// A scalar function of one variable together with its first two derivatives.
struct ScalarFn {
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

struct EntropyPair {
  std::string name;
  ScalarFn psi;
  /// Antiderivative of psi, normalized to vanish at w1 = 1.
  std::function<double(double)> psi_antideriv;
  ScalarFn theta;
};

/// Psi(w) = c w^{-n}.
inline ScalarFn power_psi(int n, double c = 1.0) {
  const double nn = n;
  return {[=](double w) { return c * std::pow(w, -nn); },
          [=](double w) { return -nn * c * std::pow(w, -nn - 1); },
          [=](double w) { return nn * (nn + 1) * c * std::pow(w, -nn - 2); }};
}

/// int_1^w c s^{-n} ds.
inline std::function<double(double)> power_psi_antideriv(int n, double c = 1.0) {
  if (n == 1) return [=](double w) { return c * std::log(w); };
  const double m = 1.0 - n;
  return [=](double w) { return c * (std::pow(w, m) - 1.0) / m; };
}

/// Theta(p) = A sqrt(p) + B / sqrt(p).
inline ScalarFn sqrt_theta(double A, double B) {
  return {[=](double p) { return A * std::sqrt(p) + B / std::sqrt(p); },
          [=](double p) { return 0.5 * A / std::sqrt(p) - 0.5 * B * std::pow(p, -1.5); },
          [=](double p) { return -0.25 * A * std::pow(p, -1.5) + 0.75 * B * std::pow(p, -2.5); }};
}

inline EntropyPair make_power_pair(int n, double A, double B, double c = 1.0) {
  return {"psi=w^-" + std::to_string(n) + ",A=" + std::to_string(A) + ",B=" + std::to_string(B),
          power_psi(n, c), power_psi_antideriv(n, c), sqrt_theta(A, B)};
}

/// Psi = 1/(3 w1), Theta = sqrt(3/p): eta = h + 1/(3 alpha h b + kappa h^2).
inline EntropyPair canonical_pair() {
  EntropyPair e = make_power_pair(1, 0.0, std::sqrt(3.0), 1.0 / 3.0);
  e.name = "canonical";
  return e;
}

/// Psi = w^{-n}, n = 1..3, each with Theta = sqrt(3/p) and Theta = sqrt(p).
inline std::vector<EntropyPair> pair_catalog() {
  std::vector<EntropyPair> out;
  for (int n = 1; n <= 3; ++n) {
    EntropyPair a = make_power_pair(n, 0.0, std::sqrt(3.0));
    a.name = "psi=w^-" + std::to_string(n) + ",theta=sqrt(3/p)";
    EntropyPair b = make_power_pair(n, 1.0, 0.0);
    b.name = "psi=w^-" + std::to_string(n) + ",theta=sqrt(p)";
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }
  return out;
}

namespace detail {

struct EntropyVars {
  double w1, w2, p;
};

inline EntropyVars entropy_vars(const State &u, const Params &prm, const char *what) {
  if (!(u.h > 0.0) || !(u.b > 0.0))
    throw DomainError(std::string(what) + ": requires an interior state");
  const auto w = riemann_invariants(u, prm);
  return {w.w1, w.w2, 3.0 * prm.alpha() * w.w2 + prm.kappa()};
}

} // namespace detail

inline double entropy(const State &u, const EntropyPair &e, const Params &prm) {
  const auto v = detail::entropy_vars(u, prm, "entropy");
  return e.psi.f(v.w1) + std::sqrt(v.w1) * e.theta.f(v.p);
}

inline double entropy_flux(const State &u, const EntropyPair &e, const Params &prm) {
  const auto v = detail::entropy_vars(u, prm, "entropy_flux");
  return 3.0 * (v.w1 * e.psi.f(v.w1) - e.psi_antideriv(v.w1)) +
         std::pow(v.w1, 1.5) * e.theta.f(v.p);
}

/// |grad q - grad eta . DF| with central differences of step @p step.
template <class Eta, class Q>
double compatibility_residual(const State &u, Eta &&eta, Q &&q, const Params &prm,
                              double step = 1e-5) {
  auto grad = [&](auto &&f) {
    return Vec2{(f(State{u.h + step, u.b}) - f(State{u.h - step, u.b})) / (2 * step),
                (f(State{u.h, u.b + step}) - f(State{u.h, u.b - step})) / (2 * step)};
  };
  const Vec2 ge = grad(eta);
  const Vec2 gq = grad(q);
  const Mat2 J = jacobian(u, prm);
  const double r0 = gq[0] - (ge[0] * J[0][0] + ge[1] * J[1][0]);
  const double r1 = gq[1] - (ge[0] * J[0][1] + ge[1] * J[1][1]);
  return std::hypot(r0, r1);
}

inline double compatibility_residual(const State &u, const EntropyPair &e, const Params &prm,
                                     double step = 1e-5) {
  return compatibility_residual(
      u, [&](const State &v) { return entropy(v, e, prm); },
      [&](const State &v) { return entropy_flux(v, e, prm); }, prm, step);
}

/// Quadratic forms r^T Hess(eta) r along the two eigenvectors.
struct ConvexityForms {
  double along_r2; ///< 2 w1 (2 w1 Psi'' + Psi')
  double along_r1; ///< 9 alpha^2 sqrt(w1) (4p^2 Theta'' + 4p Theta' - Theta) - 18 alpha^2 w1 Psi'
};

inline ConvexityForms convexity_forms(const State &u, const EntropyPair &e, const Params &prm) {
  const auto v = detail::entropy_vars(u, prm, "convexity_forms");
  const double a2 = prm.alpha() * prm.alpha();
  const double dpsi = e.psi.d1(v.w1), d2psi = e.psi.d2(v.w1);
  const double th = e.theta.f(v.p), dth = e.theta.d1(v.p), d2th = e.theta.d2(v.p);
  return {2.0 * v.w1 * (2.0 * v.w1 * d2psi + dpsi),
          9.0 * a2 * std::sqrt(v.w1) * (4.0 * v.p * v.p * d2th + 4.0 * v.p * dth - th) -
              18.0 * a2 * v.w1 * dpsi};
}

/// Central-difference Hessian of eta in (h, b).
inline Mat2 entropy_hessian_fd(const State &u, const EntropyPair &e, const Params &prm,
                               double step = 1e-4) {
  auto f = [&](double dh, double db) { return entropy({u.h + dh, u.b + db}, e, prm); };
  const double s = step, f0 = f(0, 0);
  const double hh = (f(s, 0) - 2 * f0 + f(-s, 0)) / (s * s);
  const double bb = (f(0, s) - 2 * f0 + f(0, -s)) / (s * s);
  const double hb = (f(s, s) - f(s, -s) - f(-s, s) + f(-s, -s)) / (4 * s * s);
  return {{{hh, hb}, {hb, bb}}};
}

inline double quadratic_form(const Mat2 &H, const Vec2 &r) {
  return r[0] * (H[0][0] * r[0] + H[0][1] * r[1]) + r[1] * (H[1][0] * r[0] + H[1][1] * r[1]);
}

/// Residual of 4p^2 Theta'' + 4p Theta' - Theta, which vanishes for A sqrt(p) + B/sqrt(p).
inline double theta_ode_residual(const ScalarFn &theta, double p) {
  return 4.0 * p * p * theta.d2(p) + 4.0 * p * theta.d1(p) - theta.f(p);
}

enum class FamilyVerdict { convex, not_in_family, inconclusive };

inline const char *to_string(FamilyVerdict v) {
  switch (v) {
  case FamilyVerdict::convex: return "convex";
  case FamilyVerdict::not_in_family: return "not_in_family";
  case FamilyVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

/**
 * @brief Check the sufficient conditions for strict convexity on sampled
 * invariants: Psi'' > 0, Psi' < 0, 2 w1 Psi'' + Psi' > 0 on @p w1_samples and
 * Theta = A sqrt(p) + B/sqrt(p) with A, B >= 0 on @p p_samples.
 *
 * With alpha = 0 the second form vanishes identically and the verdict is
 * inconclusive for pairs that otherwise pass.
 */
inline FamilyVerdict check_sufficient_family(const EntropyPair &e, const Params &prm,
                                             const std::vector<double> &w1_samples,
                                             const std::vector<double> &p_samples,
                                             double tol = 1e-10) {
  for (double w : w1_samples) {
    const double d1 = e.psi.d1(w), d2 = e.psi.d2(w);
    if (!(d2 > 0.0) || !(d1 < 0.0) || !(2.0 * w * d2 + d1 > 0.0))
      return FamilyVerdict::not_in_family;
  }
  for (double p : p_samples) {
    const double th = e.theta.f(p), dth = e.theta.d1(p);
    const double scale = 1.0 + std::abs(th) + std::abs(p * dth) + std::abs(p * p * e.theta.d2(p));
    if (std::abs(theta_ode_residual(e.theta, p)) > tol * scale)
      return FamilyVerdict::not_in_family;
    // A sqrt(p) = Theta/2 + p Theta', B/sqrt(p) = Theta/2 - p Theta'.
    const double A_part = 0.5 * th + p * dth;
    const double B_part = 0.5 * th - p * dth;
    if (A_part < -tol * scale || B_part < -tol * scale)
      return FamilyVerdict::not_in_family;
  }
  if (prm.alpha() == 0.0) return FamilyVerdict::inconclusive;
  return FamilyVerdict::convex;
}

} // namespace thinfilm
