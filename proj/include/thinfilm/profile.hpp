/**
 * @file profile.hpp
 * @brief Snapshot of a piecewise solution at fixed time: constant pieces,
 * centered fans and point masses in b, with L1 distances between snapshots.
 */
#pragma once

#include "riemann.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace thinfilm {

inline constexpr double inf = std::numeric_limits<double>::infinity();

/// A piece [x_lo, x_hi) holding a constant state or a centered fan.
struct Segment {
  double x_lo, x_hi;
  State state{};
  bool fan = false;
  double x_center = 0.0; ///< fan origin in x
  double age = 0.0;      ///< time since the fan origin
  State anchor{};        ///< fan ray and head state

  State at(double x, const Params &p) const {
    if (!fan) return state;
    if (!(age > 0.0)) return anchor;
    const double xi = std::clamp((x - x_center) / age, 0.0, lambda2(anchor, p));
    return rarefaction_state(xi, anchor, p);
  }
};

struct PointMass {
  double x;
  double weight;
};

struct Profile {
  Params params;
  double t = 0.0;
  std::vector<Segment> segments; ///< sorted, covering the real line
  std::vector<PointMass> masses;

  State state_at(double x) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), x,
                               [](double v, const Segment &s) { return v < s.x_hi; });
    if (it == segments.end()) --it;
    return it->at(x, params);
  }

  std::vector<double> breakpoints() const {
    std::vector<double> v;
    for (std::size_t i = 1; i < segments.size(); ++i) v.push_back(segments[i].x_lo);
    return v;
  }

  double total_mass() const {
    double m = 0.0;
    for (const auto &pm : masses) m += pm.weight;
    return m;
  }
};

/// Incremental left-to-right construction of a Profile.
class ProfileBuilder {
public:
  ProfileBuilder(Params p, double t, State left) : prof_{p, t, {}, {}} {
    cur_.x_lo = -inf;
    cur_.state = left;
  }

  /// End the current piece at @p x and continue with constant @p next.
  ProfileBuilder &jump(double x, State next) {
    x = close(x);
    cur_ = Segment{x, inf, next};
    return *this;
  }

  /// End the current piece at @p x and continue with a fan.
  ProfileBuilder &fan(double x, double x_center, double age, State anchor) {
    x = close(x);
    cur_ = Segment{x, inf, {}, true, x_center, age, anchor};
    return *this;
  }

  ProfileBuilder &mass(double x, double w) {
    if (w != 0.0) prof_.masses.push_back({x, w});
    return *this;
  }

  Profile finish() {
    cur_.x_hi = inf;
    prof_.segments.push_back(cur_);
    return std::move(prof_);
  }

private:
  double close(double x) {
    // Zero-width pieces are dropped; overlapping input is clipped.
    x = std::max(x, cur_.x_lo);
    cur_.x_hi = x;
    if (cur_.x_hi > cur_.x_lo) prof_.segments.push_back(cur_);
    return x;
  }

  Profile prof_;
  Segment cur_{};
};

/// Exact solution of a Riemann fan centered at (x_origin, 0), at time t.
inline Profile profile_of(const WaveFan &fan, double t, double x_origin = 0.0) {
  const Params &p = fan.data.params;
  ProfileBuilder b(p, t, fan.data.left);
  if (!(t > 0.0)) {
    if (!fan.waves.empty()) b.jump(x_origin, fan.data.right);
    return b.finish();
  }
  for (const Wave &w : fan.waves) {
    if (const auto *c = std::get_if<Contact>(&w)) {
      b.jump(x_origin + c->speed * t, c->right);
    } else if (const auto *s = std::get_if<Shock>(&w)) {
      b.jump(x_origin + s->speed * t, s->right);
    } else if (const auto *r = std::get_if<Rarefaction>(&w)) {
      b.fan(x_origin + r->xi_lo * t, x_origin, t, r->anchor);
      b.jump(x_origin + r->xi_hi * t, r->anchor);
    } else if (const auto *d = std::get_if<DeltaShock>(&w)) {
      b.mass(x_origin + d->speed * t, d->strength_rate * t);
      b.jump(x_origin + d->speed * t, d->right);
    } else if (const auto *cj = std::get_if<CompositeJR>(&w)) {
      b.fan(x_origin, x_origin, t, cj->right);
      b.jump(x_origin + cj->xi_hi * t, cj->right);
    }
  }
  return b.finish();
}

/**
 * @brief Integral of |h_a - h_b| + |b_a - b_b| over [x_lo, x_hi] (regular parts
 * only), with adaptive Gauss-Kronrod on pieces between the union of breakpoints.
 */
inline double l1_distance(const Profile &a, const Profile &b, double x_lo, double x_hi,
                          double tol = 1e-12) {
  std::vector<double> br = a.breakpoints();
  const auto bb = b.breakpoints();
  br.insert(br.end(), bb.begin(), bb.end());
  br.push_back(x_lo);
  br.push_back(x_hi);
  std::sort(br.begin(), br.end());
  auto f = [&](double x) {
    const State u = a.state_at(x), v = b.state_at(x);
    return std::abs(u.h - v.h) + std::abs(u.b - v.b);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double s = 0.0;
  double prev = x_lo;
  for (double c : br) {
    if (c <= prev) continue;
    if (c > x_hi) break;
    s += GK::integrate(f, prev, c, 12, tol);
    prev = c;
  }
  return s;
}

/// Integral of (h, b) over [x_lo, x_hi], point masses in b included.
inline Vec2 integral(const Profile &a, double x_lo, double x_hi, double tol = 1e-12) {
  std::vector<double> br = a.breakpoints();
  br.push_back(x_lo);
  br.push_back(x_hi);
  std::sort(br.begin(), br.end());
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  Vec2 s{0.0, 0.0};
  double prev = x_lo;
  for (double c : br) {
    if (c <= prev) continue;
    if (c > x_hi) break;
    s[0] += GK::integrate([&](double x) { return a.state_at(x).h; }, prev, c, 12, tol);
    s[1] += GK::integrate([&](double x) { return a.state_at(x).b; }, prev, c, 12, tol);
    prev = c;
  }
  for (const auto &m : a.masses)
    if (m.x >= x_lo && m.x <= x_hi) s[1] += m.weight;
  return s;
}

} // namespace thinfilm
