/**
 * @file riemann.hpp
 *
 * @brief Exact Riemann solver: classification, wave construction, self-similar
 * sampling and weak-form residuals, including the delta-shock measure solution
 * that appears when the right film height vanishes.
 */
#pragma once

#include "core.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace thinfilm {

/// Two constant states separated at x = 0.
struct RiemannData {
  State left;
  State right;
  Params params;
  double h_tol = default_h_tol;
};

enum class RiemannCase { j_r, j_s, pure_j, composite_jr, delta_shock };

inline const char *to_string(RiemannCase c) {
  switch (c) {
  case RiemannCase::j_r: return "J+R";
  case RiemannCase::j_s: return "J+S";
  case RiemannCase::pure_j: return "pure-J";
  case RiemannCase::composite_jr: return "composite-JR";
  case RiemannCase::delta_shock: return "delta-shock";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Waves
// ---------------------------------------------------------------------------

/// 1-contact discontinuity; w1 is continuous across it.
struct Contact {
  double speed;
  State left, right;
};

/// 2-shock on a ray b/h = const.
struct Shock {
  double speed;
  State left, right;
};

/// Centered 2-rarefaction; fan states lie on the ray of @c anchor.
struct Rarefaction {
  double xi_lo, xi_hi;
  State anchor;
};

/// Delta shock carrying a Dirac mass beta(t) = strength_rate * t in b.
struct DeltaShock {
  double speed;
  double strength_rate;
  State left, right;
};

/// Contact and rarefaction tail merged on x = 0 (left film height zero).
struct CompositeJR {
  double xi_hi;
  State left, right;
};

using Wave = std::variant<Contact, Shock, Rarefaction, DeltaShock, CompositeJR>;

/// Smallest and largest self-similar speeds occupied by a wave.
inline std::pair<double, double> wave_span(const Wave &w) {
  return std::visit(
      [](const auto &x) -> std::pair<double, double> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Rarefaction>) return {x.xi_lo, x.xi_hi};
        else if constexpr (std::is_same_v<T, CompositeJR>) return {0.0, x.xi_hi};
        else return {x.speed, x.speed};
      },
      w);
}

inline const char *wave_kind(const Wave &w) {
  static constexpr const char *names[] = {"contact", "shock", "rarefaction", "delta_shock",
                                          "composite_jr"};
  return names[w.index()];
}

struct WaveFan {
  RiemannData data;
  RiemannCase tag;
  std::vector<Wave> waves;
  std::optional<State> intermediate;
};

struct SampledValue {
  State regular;
  double singular_weight = 0.0;
};

// ---------------------------------------------------------------------------
// Elementary wave relations
// ---------------------------------------------------------------------------

inline double contact_speed(const State &left, const Params &p) { return lambda1(left, p); }

/// Ray slope shared by two states; a vacuum state lies on every ray.
inline double common_ray(const State &a, const State &b, double rel_tol = 1e-10) {
  if (a.h <= 0.0 && a.b <= 0.0) return b.h > 0.0 ? b.b / b.h : 0.0;
  if (b.h <= 0.0 && b.b <= 0.0) return a.b / a.h;
  if (!(a.h > 0.0) || !(b.h > 0.0))
    throw InvalidData("shock: states not on a common ray b/h = const");
  const double mismatch = std::abs(a.b * b.h - b.b * a.h);
  if (mismatch > rel_tol * (a.b * b.h + b.b * a.h + a.h * b.h))
    throw InvalidData("shock: states not on a common ray b/h = const");
  return a.h >= b.h ? a.b / a.h : b.b / b.h;
}

/**
 * @brief Rankine-Hugoniot speed between two states on a common ray,
 * k (h^2 + h h_l + h_l^2) with k = alpha b/h + kappa/3.
 *
 * Admissible (Lax) 2-shocks have right.h < left.h; the relation itself is
 * symmetric and is also used for the fronts of a discretized rarefaction.
 */
inline double shock_speed(const State &left, const State &right, const Params &p) {
  const double k = ray_coefficient(common_ray(left, right), p);
  return k * (right.h * right.h + right.h * left.h + left.h * left.h);
}

/// State of a centered 2-fan on the ray of @p anchor at x/t = xi in [0, lambda2(anchor)].
inline State rarefaction_state(double xi, const State &anchor, const Params &p) {
  if (!(anchor.h > 0.0)) throw DomainError("rarefaction_state: anchor must have h > 0");
  const double xi_max = lambda2(anchor, p);
  const double slack = 1e-12 * std::max(1.0, xi_max);
  if (!(xi >= -slack && xi <= xi_max + slack))
    throw DomainError("rarefaction_state: xi outside the fan");
  xi = std::clamp(xi, 0.0, xi_max);
  const double w2 = anchor.b / anchor.h;
  const double h = std::sqrt(xi / (3.0 * ray_coefficient(w2, p)));
  return {h, w2 * h};
}

inline State rarefaction_state(double xi, const Rarefaction &r, const Params &p) {
  const double slack = 1e-12 * std::max(1.0, std::abs(r.xi_hi));
  if (!(xi >= r.xi_lo - slack && xi <= r.xi_hi + slack))
    throw DomainError("rarefaction_state: xi outside the fan");
  return rarefaction_state(std::clamp(xi, r.xi_lo, r.xi_hi), r.anchor, p);
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace detail {

struct BoundaryFlags {
  bool hl, bl, hr, br;
  bool left_vacuum() const { return hl && bl; }
  bool right_vacuum() const { return hr && br; }
  int zeros() const { return int(hl) + int(bl) + int(hr) + int(br); }
};

inline BoundaryFlags boundary_flags(const RiemannData &d) {
  return {d.left.h <= d.h_tol, d.left.b <= d.h_tol, d.right.h <= d.h_tol,
          d.right.b <= d.h_tol};
}

inline bool w1_tie(double a, double b) {
  return std::abs(a - b) <= 1e-14 * std::max(std::abs(a), std::abs(b));
}

} // namespace detail

/**
 * @brief Case of the Riemann solution.
 *
 * Interior data are ordered by w1: w1(left) < w1(right) gives a contact plus
 * rarefaction, > gives a contact plus shock, equality a lone contact.
 * A vanishing left height gives the composite wave, a vanishing right height
 * the delta shock. A vacuum state (h = b = 0) on one side is accepted.
 */
inline RiemannCase classify(const RiemannData &d) {
  require_valid(d.left, "classify: left");
  require_valid(d.right, "classify: right");
  if (d.left == d.right) return RiemannCase::pure_j;
  const auto z = detail::boundary_flags(d);
  if (z.left_vacuum() && z.right_vacuum()) return RiemannCase::pure_j;
  if (z.left_vacuum() || z.right_vacuum()) {
    if (z.zeros() != 2)
      throw InvalidData("classify: vacuum opposite a boundary state violates Assumption (A)");
    return z.left_vacuum() ? RiemannCase::composite_jr : RiemannCase::delta_shock;
  }
  if (z.zeros() > 1) throw InvalidData("classify: more than one of h-, h+, b-, b+ vanishes");
  if (z.hl) return RiemannCase::composite_jr;
  if (z.hr) return RiemannCase::delta_shock;
  if (z.br && d.params.kappa() == 0.0)
    throw InvalidData("classify: b+ = 0 with kappa = 0 leaves the right state immobile");
  const double w1l = lambda1(d.left, d.params), w1r = lambda1(d.right, d.params);
  if (detail::w1_tie(w1l, w1r)) return RiemannCase::pure_j;
  return w1l < w1r ? RiemannCase::j_r : RiemannCase::j_s;
}

/// State joined to the left by a contact and to the right by a 2-wave.
inline State intermediate_state(const RiemannData &d) {
  if (!(d.left.h > d.h_tol) || !(d.right.h > d.h_tol))
    throw DomainError("intermediate_state: requires h-, h+ > 0");
  const Params &p = d.params;
  const double N = 3.0 * p.alpha() * d.left.b + p.kappa() * d.left.h;
  const double D = 3.0 * p.alpha() * d.right.b + p.kappa() * d.right.h;
  if (!(D > 0.0)) throw DomainError("intermediate_state: 3 alpha b+ + kappa h+ = 0");
  const double h = std::sqrt(d.left.h * d.right.h * N / D);
  return {h, d.right.b / d.right.h * h};
}

/// Delta shock for data whose right film height vanishes.
inline DeltaShock delta_shock(const RiemannData &d) {
  if (!(d.right.h <= d.h_tol)) throw DomainError("delta_shock: requires h+ = 0");
  if (!(d.left.h > d.h_tol)) throw DomainError("delta_shock: requires h- > 0");
  const double sigma = lambda1(d.left, d.params);
  // Overcompressive: 0 = lambda1(right) < sigma < lambda2(left) = 3 sigma.
  if (!(sigma > 0.0))
    throw InvalidData("delta_shock: speed lambda1(left) = 0, not overcompressive");
  return {sigma, d.right.b * sigma, d.left, d.right};
}

// ---------------------------------------------------------------------------
// Solution
// ---------------------------------------------------------------------------

inline WaveFan solve(const RiemannData &d) {
  WaveFan fan{d, classify(d), {}, std::nullopt};
  const Params &p = d.params;
  switch (fan.tag) {
  case RiemannCase::pure_j:
    if (!(d.left == d.right) &&
        !(detail::boundary_flags(d).left_vacuum() && detail::boundary_flags(d).right_vacuum()))
      fan.waves.push_back(Contact{contact_speed(d.left, p), d.left, d.right});
    break;
  case RiemannCase::j_r:
  case RiemannCase::j_s: {
    const State m = intermediate_state(d);
    fan.intermediate = m;
    if (!nearly_equal(m, d.left)) fan.waves.push_back(Contact{contact_speed(d.left, p), d.left, m});
    if (!nearly_equal(m, d.right)) {
      if (fan.tag == RiemannCase::j_r)
        fan.waves.push_back(Rarefaction{lambda2(m, p), lambda2(d.right, p), d.right});
      else
        fan.waves.push_back(Shock{shock_speed(m, d.right, p), m, d.right});
    }
    break;
  }
  case RiemannCase::composite_jr:
    fan.waves.push_back(CompositeJR{lambda2(d.right, p), d.left, d.right});
    break;
  case RiemannCase::delta_shock:
    fan.waves.push_back(delta_shock(d));
    break;
  }
  return fan;
}

/// Solution on the ray x/t = xi; on a delta ray the regular part is the right state.
inline SampledValue sample(const WaveFan &fan, double xi) {
  const Params &p = fan.data.params;
  State cur = fan.data.left;
  for (const Wave &w : fan.waves) {
    if (const auto *c = std::get_if<Contact>(&w)) {
      if (xi < c->speed) return {cur};
      cur = c->right;
    } else if (const auto *s = std::get_if<Shock>(&w)) {
      if (xi < s->speed) return {cur};
      cur = s->right;
    } else if (const auto *r = std::get_if<Rarefaction>(&w)) {
      if (xi < r->xi_lo) return {cur};
      if (xi <= r->xi_hi) return {rarefaction_state(xi, *r, p)};
      cur = r->anchor;
    } else if (const auto *ds = std::get_if<DeltaShock>(&w)) {
      if (xi < ds->speed) return {cur};
      if (xi == ds->speed) return {ds->right, ds->strength_rate};
      cur = ds->right;
    } else if (const auto *cj = std::get_if<CompositeJR>(&w)) {
      if (xi < 0.0) return {cur};
      if (xi <= cj->xi_hi) return {rarefaction_state(xi, cj->right, p)};
      cur = cj->right;
    }
  }
  return {cur};
}

/**
 * @brief Allocation-free point evaluation of the exact solution at x/t = xi.
 *
 * Same result as sample(solve(d), xi) for the regular part. Pairs outside the
 * admissible set are not classified here; see classify().
 */
inline State sample_state(const RiemannData &d, double xi) {
  const Params &p = d.params;
  const State &L = d.left, &R = d.right;
  switch (classify(d)) {
  case RiemannCase::pure_j:
    return (d.left == d.right || xi < lambda1(L, p)) ? L : R;
  case RiemannCase::delta_shock:
    return xi < lambda1(L, p) ? L : R;
  case RiemannCase::composite_jr:
    if (xi < 0.0) return L;
    return xi <= lambda2(R, p) ? rarefaction_state(xi, R, p) : R;
  case RiemannCase::j_r: {
    if (xi < lambda1(L, p)) return L;
    const State m = intermediate_state(d);
    if (xi < lambda2(m, p)) return m;
    return xi <= lambda2(R, p) ? rarefaction_state(xi, R, p) : R;
  }
  case RiemannCase::j_s: {
    if (xi < lambda1(L, p)) return L;
    const State m = intermediate_state(d);
    return xi < shock_speed(m, R, p) ? m : R;
  }
  }
  return R;
}

/// Speeds at which the regular part can be discontinuous or kinked.
inline std::vector<double> breakpoint_speeds(const WaveFan &fan) {
  std::vector<double> v;
  for (const Wave &w : fan.waves) {
    const auto [lo, hi] = wave_span(w);
    v.push_back(lo);
    if (hi != lo) v.push_back(hi);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Weak formulation
// ---------------------------------------------------------------------------

struct WeakResidualOptions {
  int t_panels = 16;         ///< Gauss panels across the t-support
  int x_panels = 4;          ///< Gauss panels per smooth x-piece
  bool include_singular = true;
};

struct WeakResidual {
  double h;
  double b;
};

/**
 * @brief Residual of the weak form
 *
 *   int int (U phi_t + F(U) phi_x) dx dt + int beta(t) (phi_t + sigma phi_x)(sigma t, t) dt
 *
 * for a test function supported in t > 0. The singular pairing uses beta(t)
 * per unit t along the delta line, which is what the generalized
 * Rankine-Hugoniot relation dbeta/dt = sigma [b] - [b phi] balances.
 */
inline WeakResidual weak_residual(const WaveFan &fan, const TestFunction &phi,
                                  const WeakResidualOptions &opt = {}) {
  const Params &p = fan.data.params;
  if (!(phi.t_lo() >= 0.0)) throw DomainError("weak_residual: test function must live in t > 0");
  const auto speeds = breakpoint_speeds(fan);
  auto x_integral = [&](double t, int comp) {
    std::vector<double> breaks;
    for (double s : speeds) breaks.push_back(s * t);
    auto f = [&](double x) {
      const State u = sample(fan, x / t).regular;
      const auto F = flux(u, p);
      const double uc = comp == 0 ? u.h : u.b;
      return uc * phi.dt(x, t) + F[comp] * phi.dx(x, t);
    };
    return piecewise_gauss(f, phi.x_lo(), phi.x_hi(), breaks, opt.x_panels);
  };
  WeakResidual r{
      composite_gauss([&](double t) { return x_integral(t, 0); }, phi.t_lo(), phi.t_hi(),
                      opt.t_panels),
      composite_gauss([&](double t) { return x_integral(t, 1); }, phi.t_lo(), phi.t_hi(),
                      opt.t_panels)};
  if (opt.include_singular) {
    for (const Wave &w : fan.waves) {
      if (const auto *ds = std::get_if<DeltaShock>(&w)) {
        auto g = [&](double t) {
          const double x = ds->speed * t;
          return ds->strength_rate * t * (phi.dt(x, t) + ds->speed * phi.dx(x, t));
        };
        r.b += composite_gauss(g, phi.t_lo(), phi.t_hi(), opt.t_panels);
      }
    }
  }
  return r;
}

} // namespace thinfilm
