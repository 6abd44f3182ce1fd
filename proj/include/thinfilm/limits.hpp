/**
 * @file limits.hpp
 * @brief Vanishing-parameter studies: Riemann solutions at kappa -> 0
 * (alpha = 1/2, thin-film flux) and alpha -> 0 (kappa = 1, triangular flux
 * with f(h) = h^2/3) compared with closed-form limit solutions.
 */
#pragma once

#include "parallel.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "riemann.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace thinfilm {

enum class LimitKind {
  vanishing_gravity, ///< kappa -> 0 at alpha = 1/2
  vanishing_tension  ///< alpha -> 0 at kappa = 1
};

inline const char *to_string(LimitKind k) {
  return k == LimitKind::vanishing_gravity ? "kappa" : "alpha";
}

/// Parameters of the limit system.
inline Params limit_params(LimitKind k) {
  return k == LimitKind::vanishing_gravity ? Params(0.5, 0.0) : Params(0.0, 1.0);
}

/// Parameters of the family member at @p value of the vanishing parameter.
inline Params family_params(LimitKind k, double value, double fixed) {
  return k == LimitKind::vanishing_gravity ? Params(fixed, value) : Params(value, fixed);
}

/**
 * @brief Exact Riemann solution of the limit system, built directly from the
 * limit formulas (not through the general solver).
 *
 * Thin film (phi = hb/2): contact speed h-b-/2, intermediate
 * (sqrt(h-h+b-/b+), sqrt(h-b-b+/h+)), fan (sqrt(2x h+/(3b+t)), sqrt(2x b+/(3h+t))).
 * Triangular (phi = h^2/3): contact speed h-^2/3, intermediate (h-, b+ h-/h+),
 * fan ray x/t = h^2.
 */
inline WaveFan limit_target(const RiemannData &d, LimitKind k) {
  const Params lp = limit_params(k);
  const RiemannData ld{d.left, d.right, lp, d.h_tol};
  const double hl = d.left.h, bl = d.left.b, hr = d.right.h, br = d.right.b;
  const bool gravity = k == LimitKind::vanishing_gravity;
  auto w1 = [&](double h, double b) { return gravity ? 0.5 * h * b : h * h / 3.0; };
  WaveFan fan{ld, RiemannCase::pure_j, {}, std::nullopt};
  if (d.left == d.right) return fan;
  if (hr <= d.h_tol) {
    const double s = w1(hl, bl);
    if (!(s > 0.0)) throw InvalidData("limit_target: delta speed vanishes");
    fan.tag = RiemannCase::delta_shock;
    fan.waves.push_back(DeltaShock{s, br * s, d.left, d.right});
    return fan;
  }
  const double head = 3.0 * w1(hr, br);
  if (hl <= d.h_tol) {
    fan.tag = RiemannCase::composite_jr;
    fan.waves.push_back(CompositeJR{head, d.left, d.right});
    return fan;
  }
  const State m = gravity ? State{std::sqrt(hl * hr * bl / br), std::sqrt(hl * bl * br / hr)}
                          : State{hl, br * hl / hr};
  fan.intermediate = m;
  const double wl = w1(hl, bl), wr = w1(hr, br);
  if (wl == wr) {
    fan.waves.push_back(Contact{wl, d.left, d.right});
    return fan;
  }
  fan.waves.push_back(Contact{wl, d.left, m});
  if (wl < wr) {
    fan.tag = RiemannCase::j_r;
    fan.waves.push_back(Rarefaction{3.0 * wl, head, d.right});
  } else {
    fan.tag = RiemannCase::j_s;
    // Rankine-Hugoniot speed on the right ray.
    const double s = gravity ? 0.5 * (hl * bl + std::sqrt(hl * hr * bl * br) + hr * br)
                             : (m.h * m.h + m.h * hr + hr * hr) / 3.0;
    fan.waves.push_back(Shock{s, m, d.right});
  }
  return fan;
}

/// Inside a limit-system fan: thin film sqrt(2 xi h+/(3 b+)), triangular sqrt(xi).
inline State limit_fan_state(double xi, const State &anchor, LimitKind k) {
  const double w2 = anchor.b / anchor.h;
  const double h = k == LimitKind::vanishing_gravity ? std::sqrt(2.0 * xi / (3.0 * w2))
                                                     : std::sqrt(xi);
  return {h, w2 * h};
}

struct LimitStudy {
  LimitKind kind = LimitKind::vanishing_gravity;
  std::vector<double> values; ///< strictly decreasing, positive
  double fixed = 0.5;         ///< alpha for the gravity study, kappa for the tension study
  RiemannData data;
  double t_eval = 1.0;

  void validate() const {
    if (values.empty()) throw InvalidData("LimitStudy: no parameter values");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0)) throw InvalidData("LimitStudy: values must be positive");
      if (i > 0 && !(values[i] < values[i - 1]))
        throw InvalidData("LimitStudy: values must be strictly decreasing");
    }
    if (!(t_eval > 0.0)) throw InvalidData("LimitStudy: t_eval must be positive");
  }
};

/// Standard studies: the parameter fixed at its limit-theorem value.
inline LimitStudy default_study(LimitKind k, const RiemannData &d, std::vector<double> values,
                                double t_eval = 1.0) {
  return {k, std::move(values), k == LimitKind::vanishing_gravity ? 0.5 : 1.0, d, t_eval};
}

struct LimitRow {
  double value;
  RiemannCase tag;
  double l1;                        ///< regular-part L1 distance at t_eval
  double dsigma;                    ///< |delta speed difference|, 0 without deltas
  double dbeta_rate;                ///< |strength-rate difference|, 0 without deltas
  std::array<double, 3> weak;       ///< |<U - U0, phi_k>| for the witness bumps
};

struct LimitTable {
  LimitStudy study;
  std::vector<LimitRow> rows;
  bool l1_strictly_decreasing;
  bool weak_monotone;
};

namespace detail {

inline double fan_speed_scale(const WaveFan &fan) {
  double s = 0.0;
  for (const auto &w : fan.waves) s = std::max(s, wave_span(w).second);
  return std::max(s, 1e-3);
}

inline double delta_speed(const WaveFan &fan, double *rate = nullptr) {
  for (const auto &w : fan.waves)
    if (const auto *ds = std::get_if<DeltaShock>(&w)) {
      if (rate) *rate = ds->strength_rate;
      return ds->speed;
    }
  if (rate) *rate = 0.0;
  return 0.0;
}

/// Per-component pairing: int int phi u dx dt plus the singular b term.
inline Vec2 pairing(const WaveFan &fan, const TestFunction &phi) {
  const auto speeds = breakpoint_speeds(fan);
  Vec2 r{0.0, 0.0};
  for (int comp = 0; comp < 2; ++comp) {
    auto inner = [&](double t) {
      std::vector<double> br;
      for (double s : speeds) br.push_back(s * t);
      return piecewise_gauss(
          [&](double x) {
            const State u = sample(fan, x / t).regular;
            return phi.value(x, t) * (comp == 0 ? u.h : u.b);
          },
          phi.x_lo(), phi.x_hi(), br, 2);
    };
    r[comp] = composite_gauss(inner, phi.t_lo(), phi.t_hi(), 8);
  }
  double rate = 0.0;
  const double s = delta_speed(fan, &rate);
  if (rate != 0.0)
    r[1] += composite_gauss([&](double t) { return phi.value(s * t, t) * rate * t; }, phi.t_lo(),
                            phi.t_hi(), 8);
  return r;
}

} // namespace detail

/**
 * @brief Witness bumps for weak convergence: one straddling the leading
 * wave ray of the target, one containing the whole fan, one to the right of it.
 */
inline std::array<TestFunction, 3> witness_bumps(const WaveFan &target, double t_eval) {
  double s = detail::delta_speed(target);
  if (s == 0.0) s = detail::fan_speed_scale(target);
  const double tc = t_eval, rt = 0.9 * t_eval;
  return {TestFunction{s * tc, tc, 0.25 * s * tc + 0.1, rt},
          TestFunction{s * tc, tc, 2.5 * s * tc + 1.0, rt},
          TestFunction{3.5 * s * tc + 1.0, tc, 0.5 * s * tc + 0.2, rt}};
}

inline LimitTable convergence_table(const LimitStudy &study) {
  study.validate();
  const WaveFan target = limit_target(study.data, study.kind);
  const double t = study.t_eval;
  double rate0 = 0.0;
  const double s0 = detail::delta_speed(target, &rate0);
  const auto bumps = witness_bumps(target, t);
  std::array<Vec2, 3> base;
  for (int k = 0; k < 3; ++k) base[k] = detail::pairing(target, bumps[k]);
  const Profile p0 = profile_of(target, t);
  std::vector<LimitRow> rows(study.values.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const double v = study.values[i];
    RiemannData d = study.data;
    d.params = family_params(study.kind, v, study.fixed);
    const WaveFan fan = solve(d);
    double rate = 0.0;
    const double s = detail::delta_speed(fan, &rate);
    const double reach = t * std::max(detail::fan_speed_scale(fan), detail::fan_speed_scale(target));
    LimitRow row{v, fan.tag, l1_distance(profile_of(fan, t), p0, -1.0, 2.0 * reach + 1.0),
                 std::abs(s - s0), std::abs(rate - rate0), {}};
    for (int k = 0; k < 3; ++k) {
      const Vec2 pk = detail::pairing(fan, bumps[k]);
      row.weak[k] = std::abs(pk[0] - base[k][0]) + std::abs(pk[1] - base[k][1]);
    }
    rows[i] = row;
  });
  LimitTable tab{study, std::move(rows), true, true};
  for (std::size_t i = 1; i < tab.rows.size(); ++i) {
    tab.l1_strictly_decreasing = tab.l1_strictly_decreasing && tab.rows[i].l1 < tab.rows[i - 1].l1;
    for (int k = 0; k < 3; ++k)
      tab.weak_monotone = tab.weak_monotone &&
                          tab.rows[i].weak[k] <= tab.rows[i - 1].weak[k] * (1 + 1e-9) + 1e-14;
  }
  return tab;
}

/// Analytic partial derivatives of the intermediate state in alpha and kappa.
struct IntermediateSensitivity {
  double dh_dalpha, dh_dkappa, db_dalpha, db_dkappa;
};

inline IntermediateSensitivity intermediate_sensitivity(const RiemannData &d) {
  const Params &p = d.params;
  const double N = 3.0 * p.alpha() * d.left.b + p.kappa() * d.left.h;
  const double D = 3.0 * p.alpha() * d.right.b + p.kappa() * d.right.h;
  const State m = intermediate_state(d);
  const double w2 = d.right.b / d.right.h;
  // h* = sqrt(h- h+ N / D): d log h* = (dN/N - dD/D) / 2.
  const double da = 0.5 * m.h * (3.0 * d.left.b / N - 3.0 * d.right.b / D);
  const double dk = 0.5 * m.h * (d.left.h / N - d.right.h / D);
  return {da, dk, w2 * da, w2 * dk};
}

} // namespace thinfilm
