/**
 * @file core.hpp
 *
 * @brief Parameters, states, flux and eigenstructure of the gravity-driven
 * thin-film / anti-surfactant system
 *
 *   h_t + (h phi)_x = 0,   b_t + (b phi)_x = 0,   phi = alpha h b + kappa h^2/3,
 *
 * a Keyfitz-Kranzer system on the closed quadrant h, b >= 0.
 */
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace thinfilm {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;

/// Default threshold below which h (or b) counts as lying on the boundary.
inline constexpr double default_h_tol = 1e-10;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class of all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Invalid parameters, states or Riemann data (violates stated invariants).
struct InvalidData : Error {
  using Error::Error;
};
/// Operation evaluated outside the domain where it is defined.
struct DomainError : Error {
  using Error::Error;
};
/// Two waves that were expected to collide never meet.
struct NoInteraction : Error {
  using Error::Error;
};
/// A geometric precondition of an interaction does not hold.
struct GeometryError : Error {
  using Error::Error;
};
/// The front tracker ran out of its event budget.
struct BudgetExceeded : Error {
  using Error::Error;
};
/// A finite-volume run produced NaN or negative values.
struct SchemeFailure : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Parameters and states
// ---------------------------------------------------------------------------

/// Surface-tension (alpha) and gravity (kappa) coefficients.
class Params {
public:
  Params(double alpha, double kappa) : alpha_(alpha), kappa_(kappa) {
    if (!(alpha >= 0.0) || !(kappa >= 0.0))
      throw InvalidData("Params: alpha and kappa must be nonnegative");
    if (alpha + kappa <= 0.0)
      throw InvalidData("Params: alpha = kappa = 0 gives a zero flux");
  }

  double alpha() const { return alpha_; }
  double kappa() const { return kappa_; }

  friend bool operator==(const Params &, const Params &) = default;

private:
  double alpha_;
  double kappa_;
};

/// A point (h, b) of the state space.
struct State {
  double h = 0.0;
  double b = 0.0;

  Vec2 vec() const { return {h, b}; }
  friend bool operator==(const State &, const State &) = default;
};

inline bool is_valid(const State &u) {
  return std::isfinite(u.h) && std::isfinite(u.b) && u.h >= 0.0 && u.b >= 0.0;
}

inline void require_valid(const State &u, const char *what) {
  if (!is_valid(u))
    throw InvalidData(std::string(what) + ": state outside h, b >= 0");
}

inline bool on_boundary(const State &u, double h_tol = default_h_tol) {
  return u.h <= h_tol;
}

inline bool nearly_equal(const State &a, const State &b, double rel = 1e-13) {
  const double scale = 1.0 + std::abs(a.h) + std::abs(a.b);
  return std::abs(a.h - b.h) <= rel * scale && std::abs(a.b - b.b) <= rel * scale;
}

// ---------------------------------------------------------------------------
// Flux and eigenstructure
// ---------------------------------------------------------------------------

/// Common velocity factor phi = alpha h b + kappa h^2/3 (equals lambda1 and w1).
inline double velocity(const State &u, const Params &p) {
  return p.alpha() * u.h * u.b + p.kappa() * u.h * u.h / 3.0;
}

inline Vec2 flux(const State &u, const Params &p) {
  const double phi = velocity(u, p);
  return {u.h * phi, u.b * phi};
}

/// Exact derivative of flux with respect to (h, b).
inline Mat2 jacobian(const State &u, const Params &p) {
  const double a = p.alpha(), k = p.kappa();
  const double h = u.h, b = u.b;
  const double phi = velocity(u, p);
  const double phi_h = a * b + 2.0 * k * h / 3.0;
  const double phi_b = a * h;
  return {{{phi + h * phi_h, h * phi_b}, {b * phi_h, phi + b * phi_b}}};
}

struct Eigenvalues {
  double lambda1;
  double lambda2;
};

inline Eigenvalues eigenvalues(const State &u, const Params &p) {
  const double l1 = velocity(u, p);
  return {l1, 3.0 * p.alpha() * u.h * u.b + p.kappa() * u.h * u.h};
}

struct Eigenstructure {
  double lambda1;
  double lambda2;
  Vec2 r1;
  Vec2 r2;
};

inline Eigenstructure eigenstructure(const State &u, const Params &p) {
  const auto [l1, l2] = eigenvalues(u, p);
  return {l1,
          l2,
          {-3.0 * p.alpha() * u.h, 3.0 * p.alpha() * u.b + 2.0 * p.kappa() * u.h},
          {u.h, u.b}};
}

inline double lambda1(const State &u, const Params &p) { return velocity(u, p); }
inline double lambda2(const State &u, const Params &p) {
  return eigenvalues(u, p).lambda2;
}

// ---------------------------------------------------------------------------
// Riemann invariants
// ---------------------------------------------------------------------------

/// Riemann invariants: w1 = lambda1 (constant across 1-contacts), w2 = b/h
/// (constant across 2-shocks and 2-rarefactions).
struct Invariants {
  double w1;
  double w2;
};

inline Invariants riemann_invariants(const State &u, const Params &p) {
  if (!(u.h > 0.0))
    throw DomainError("riemann_invariants: w2 = b/h undefined at h = 0");
  return {velocity(u, p), u.b / u.h};
}

/// Inverse of riemann_invariants: h = sqrt(3 w1 / (3 alpha w2 + kappa)).
inline State state_from_invariants(const Invariants &w, const Params &p) {
  const double denom = 3.0 * p.alpha() * w.w2 + p.kappa();
  if (!(denom > 0.0))
    throw DomainError("state_from_invariants: 3 alpha w2 + kappa = 0");
  if (w.w1 < 0.0 || w.w2 < 0.0)
    throw DomainError("state_from_invariants: negative invariant");
  const double h = std::sqrt(3.0 * w.w1 / denom);
  return {h, w.w2 * h};
}

/// Coefficient k with lambda1 = k h^2 along the ray b = w2 h.
inline double ray_coefficient(double w2, const Params &p) {
  return p.alpha() * w2 + p.kappa() / 3.0;
}

// ---------------------------------------------------------------------------
// Characteristic fields
// ---------------------------------------------------------------------------

enum class FieldType { linearly_degenerate, genuinely_nonlinear };

struct FieldClassification {
  FieldType field1;
  FieldType field2;
  double grad_lambda1_dot_r1; ///< identically zero
  double grad_lambda2_dot_r2; ///< 2 lambda2 = h (6 alpha b + 2 kappa h)
};

inline FieldClassification characteristic_fields(const State &u,
                                                 const Params &p,
                                                 double h_tol = default_h_tol) {
  const double a = p.alpha(), k = p.kappa();
  const auto es = eigenstructure(u, p);
  const Vec2 grad_l1{a * u.b + 2.0 * k * u.h / 3.0, a * u.h};
  const Vec2 grad_l2{3.0 * a * u.b + 2.0 * k * u.h, 3.0 * a * u.h};
  const double d1 = grad_l1[0] * es.r1[0] + grad_l1[1] * es.r1[1];
  const double d2 = grad_l2[0] * es.r2[0] + grad_l2[1] * es.r2[1];
  const bool gnl = u.h > h_tol && std::abs(d2) > 0.0;
  return {FieldType::linearly_degenerate,
          gnl ? FieldType::genuinely_nonlinear : FieldType::linearly_degenerate,
          d1, d2};
}

} // namespace thinfilm
