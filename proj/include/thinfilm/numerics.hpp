/**
 * @file numerics.hpp
 * @brief First-order finite-volume solvers (exact-Riemann Godunov and local
 * Lax-Friedrichs) with conservation, error, delta-mass and invariant-transport
 * diagnostics.
 */
#pragma once

#include "interactions.hpp"
#include "profile.hpp"
#include "quadrature.hpp"
#include "riemann.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace thinfilm {

struct Grid {
  double x_min;
  double x_max;
  int n_cells;

  Grid(double lo, double hi, int n) : x_min(lo), x_max(hi), n_cells(n) {
    if (!(hi > lo) || n <= 0) throw InvalidData("Grid: need x_max > x_min and n_cells > 0");
  }
  /// Grid on [lo, hi] with spacing as close as possible to @p dx.
  static Grid with_spacing(double lo, double hi, double dx) {
    if (!(dx > 0.0)) throw InvalidData("Grid: dx must be positive");
    return Grid(lo, hi, std::max(1, int(std::lround((hi - lo) / dx))));
  }
  double dx() const { return (x_max - x_min) / n_cells; }
  double center(int j) const { return x_min + (j + 0.5) * dx(); }
  double face(int j) const { return x_min + j * dx(); }
  /// Index of the cell containing x, clamped to the grid.
  int cell_of(double x) const {
    return std::clamp(int(std::floor((x - x_min) / dx())), 0, n_cells - 1);
  }
};

struct FVField {
  Grid grid;
  std::vector<double> h;
  std::vector<double> b;
  double t = 0.0;

  State at(int j) const { return {h[j], b[j]}; }
  Vec2 total() const {
    double sh = 0.0, sb = 0.0;
    for (int j = 0; j < grid.n_cells; ++j) { sh += h[j]; sb += b[j]; }
    return {sh * grid.dx(), sb * grid.dx()};
  }
};

enum class Scheme { godunov, llf };

inline const char *to_string(Scheme s) { return s == Scheme::godunov ? "godunov" : "llf"; }

struct SchemeConfig {
  Scheme scheme = Scheme::godunov;
  double cfl = 0.45;
  double t_end = 1.0;
  double h_tol = default_h_tol;
  long max_steps = 50'000'000;

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidData("SchemeConfig: cfl must lie in (0, 1]");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidData("SchemeConfig: t_end must be finite and >= 0");
    if (max_steps <= 0) throw InvalidData("SchemeConfig: max_steps must be positive");
  }
};

// ---------------------------------------------------------------------------
// Interface fluxes
// ---------------------------------------------------------------------------

/**
 * @brief Flux of the exact Riemann solution on the ray x/t = 0.
 *
 * Cells with h below @p h_tol go through the boundary branches of the solver.
 * Pairs outside the admissible set (e.g. two boundary states produced by
 * round-off) fall back to the upwind flux F(uL); every wave speed is
 * nonnegative on the state space, so the two coincide whenever both exist.
 */
inline Vec2 godunov_flux(const State &uL, const State &uR, const Params &p,
                         double h_tol = default_h_tol) {
  if (uL == uR) return flux(uL, p);
  try {
    return flux(sample_state({uL, uR, p, h_tol}, 0.0), p);
  } catch (const InvalidData &) {
    return flux(uL, p);
  }
}

/// Local Lax-Friedrichs (Rusanov) flux with a = max(lambda2(uL), lambda2(uR)).
inline Vec2 llf_flux(const State &uL, const State &uR, const Params &p) {
  const Vec2 fl = flux(uL, p), fr = flux(uR, p);
  const double a = std::max(std::abs(lambda2(uL, p)), std::abs(lambda2(uR, p)));
  return {0.5 * (fl[0] + fr[0]) - 0.5 * a * (uR.h - uL.h),
          0.5 * (fl[1] + fr[1]) - 0.5 * a * (uR.b - uL.b)};
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

struct StepInfo {
  double dt = 0.0;
  bool stagnant = false;     ///< all speeds vanish on nonconstant data
  Vec2 boundary_flux{0, 0};  ///< F_left - F_right through the domain ends
  double conservation_defect = 0.0;
};

/// Smallest component allowed before a cell counts as negative.
inline constexpr double positivity_floor = -1e-13;

namespace detail {

inline bool constant_field(const FVField &f) {
  for (int j = 1; j < f.grid.n_cells; ++j)
    if (f.h[j] != f.h[0] || f.b[j] != f.b[0]) return false;
  return true;
}

} // namespace detail

/**
 * @brief One forward-Euler step with outflow ghost cells, capped at cfg.t_end.
 *
 * Throws SchemeFailure if a cell becomes non-finite or negative.
 */
inline FVField step(const FVField &f, const SchemeConfig &cfg, const Params &p,
                    StepInfo *info = nullptr) {
  const int n = f.grid.n_cells;
  const double dx = f.grid.dx();
  double smax = 0.0;
  for (int j = 0; j < n; ++j) smax = std::max(smax, std::abs(lambda2(f.at(j), p)));
  const double remaining = cfg.t_end - f.t;
  StepInfo si;
  FVField g = f;
  if (!(remaining > 0.0)) {
    if (info) *info = si;
    return g;
  }
  if (!(smax > 0.0)) {
    // Every flux vanishes; the field is stationary.
    si.stagnant = !detail::constant_field(f);
    si.dt = remaining;
    g.t = cfg.t_end;
    if (info) *info = si;
    return g;
  }
  const double dt = std::min(cfg.cfl * dx / smax, remaining);
  std::vector<Vec2> F(n + 1);
  auto face_flux = [&](const State &l, const State &r) {
    return cfg.scheme == Scheme::godunov ? godunov_flux(l, r, p, cfg.h_tol) : llf_flux(l, r, p);
  };
  F[0] = face_flux(f.at(0), f.at(0));
  for (int j = 1; j < n; ++j) F[j] = face_flux(f.at(j - 1), f.at(j));
  F[n] = face_flux(f.at(n - 1), f.at(n - 1));
  const double r = dt / dx;
  for (int j = 0; j < n; ++j) {
    g.h[j] = f.h[j] - r * (F[j + 1][0] - F[j][0]);
    g.b[j] = f.b[j] - r * (F[j + 1][1] - F[j][1]);
    if (!std::isfinite(g.h[j]) || !std::isfinite(g.b[j]))
      throw SchemeFailure("step: non-finite value in cell " + std::to_string(j));
    if (g.h[j] < positivity_floor || g.b[j] < positivity_floor)
      throw SchemeFailure("step: negative value in cell " + std::to_string(j));
  }
  g.t = f.t + dt;
  si.dt = dt;
  si.boundary_flux = {F[0][0] - F[n][0], F[0][1] - F[n][1]};
  const Vec2 before = f.total(), after = g.total();
  const double scale = 1.0 + std::abs(before[0]) + std::abs(before[1]);
  si.conservation_defect =
      std::max(std::abs(after[0] - before[0] - dt * si.boundary_flux[0]),
               std::abs(after[1] - before[1] - dt * si.boundary_flux[1])) / scale;
  if (info) *info = si;
  return g;
}

// ---------------------------------------------------------------------------
// Initial fields
// ---------------------------------------------------------------------------

/**
 * @brief Exact cell averages of a profile; point masses are spread over the
 * cell that contains them when @p include_masses is set.
 */
inline FVField cell_averages(const Profile &prof, const Grid &g, bool include_masses = true) {
  FVField f{g, std::vector<double>(g.n_cells), std::vector<double>(g.n_cells), prof.t};
  const auto br = prof.breakpoints();
  const double dx = g.dx();
  for (int j = 0; j < g.n_cells; ++j) {
    const double lo = g.face(j), hi = g.face(j + 1);
    auto first = std::upper_bound(br.begin(), br.end(), lo);
    auto last = std::lower_bound(br.begin(), br.end(), hi);
    if (first == last) {
      // No breakpoint inside: constant or smooth fan piece.
      const Segment &s = *std::upper_bound(prof.segments.begin(), prof.segments.end(), 0.5 * (lo + hi),
                                           [](double v, const Segment &sg) { return v < sg.x_hi; });
      if (!s.fan) {
        f.h[j] = s.state.h;
        f.b[j] = s.state.b;
        continue;
      }
    }
    const std::vector<double> inside(first, last);
    f.h[j] = piecewise_gauss([&](double x) { return prof.state_at(x).h; }, lo, hi, inside, 1) / dx;
    f.b[j] = piecewise_gauss([&](double x) { return prof.state_at(x).b; }, lo, hi, inside, 1) / dx;
  }
  if (include_masses)
    for (const auto &m : prof.masses)
      if (m.x >= g.x_min && m.x < g.x_max) f.b[g.cell_of(m.x)] += m.weight / dx;
  return f;
}

/// Exact cell averages of Riemann data with the jump at x = 0.
inline FVField initial_field(const RiemannData &d, const Grid &g) {
  ProfileBuilder pb(d.params, 0.0, d.left);
  return cell_averages(pb.jump(0.0, d.right).finish(), g);
}

/// Exact cell averages of three-state data with jumps at -eps and +eps.
inline FVField initial_field(const PerturbedData &d, const Grid &g) {
  ProfileBuilder pb(d.params, 0.0, d.left);
  return cell_averages(pb.jump(-d.epsilon, d.middle).jump(d.epsilon, d.right).finish(), g);
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

struct RunOptions {
  int record_every = 0;                          ///< snapshot cadence in steps; 0 = none
  std::function<double(const FVField &)> probe;  ///< scalar recorded with every snapshot
};

struct Diagnostics {
  long steps = 0;
  std::vector<double> times;
  std::vector<double> mass_h;
  std::vector<double> mass_b;
  std::vector<double> probe;
  double max_conservation_defect = 0.0;
  bool stagnation_warning = false;
};

struct RunResult {
  FVField field;
  Diagnostics diagnostics;
};

inline RunResult run(FVField init, const SchemeConfig &cfg, const Params &p,
                     const RunOptions &opt = {}) {
  cfg.validate();
  if (init.t > cfg.t_end) throw InvalidData("run: initial time exceeds t_end");
  Diagnostics dg;
  auto record = [&](const FVField &f) {
    const Vec2 m = f.total();
    dg.times.push_back(f.t);
    dg.mass_h.push_back(m[0]);
    dg.mass_b.push_back(m[1]);
    if (opt.probe) dg.probe.push_back(opt.probe(f));
  };
  record(init);
  FVField f = std::move(init);
  while (f.t < cfg.t_end) {
    if (dg.steps >= cfg.max_steps) throw SchemeFailure("run: step limit reached");
    StepInfo si;
    f = step(f, cfg, p, &si);
    ++dg.steps;
    dg.max_conservation_defect = std::max(dg.max_conservation_defect, si.conservation_defect);
    dg.stagnation_warning = dg.stagnation_warning || si.stagnant;
    if (opt.record_every > 0 && dg.steps % opt.record_every == 0 && f.t < cfg.t_end) record(f);
  }
  if (dg.times.back() != f.t) record(f);
  return {std::move(f), std::move(dg)};
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Sum over cells of the integral of |u_j - u_exact| in both components (regular part).
inline double l1_error(const FVField &f, const Profile &exact) {
  const auto br = exact.breakpoints();
  const double dx = f.grid.dx();
  double s = 0.0;
  for (int j = 0; j < f.grid.n_cells; ++j) {
    const double lo = f.grid.face(j), hi = lo + dx;
    const State u = f.at(j);
    const std::vector<double> inside(std::upper_bound(br.begin(), br.end(), lo),
                                     std::lower_bound(br.begin(), br.end(), hi));
    s += piecewise_gauss(
        [&](double x) {
          const State v = exact.state_at(x);
          return std::abs(u.h - v.h) + std::abs(u.b - v.b);
        },
        lo, hi, inside, 1);
  }
  return s;
}

/// L1 distance between two fields on the same grid.
inline double l1_distance(const FVField &a, const FVField &b) {
  if (a.grid.n_cells != b.grid.n_cells) throw InvalidData("l1_distance: grids differ");
  double s = 0.0;
  for (int j = 0; j < a.grid.n_cells; ++j) s += std::abs(a.h[j] - b.h[j]) + std::abs(a.b[j] - b.b[j]);
  return s * a.grid.dx();
}

/// Cell of largest b in [x_lo, x_hi].
inline int spike_cell(const FVField &f, double x_lo, double x_hi) {
  const int j0 = f.grid.cell_of(x_lo), j1 = f.grid.cell_of(x_hi);
  int best = j0;
  for (int j = j0; j <= j1; ++j)
    if (f.b[j] > f.b[best]) best = j;
  return best;
}

/**
 * @brief Excess b over a step background inside [x_lo, x_hi].
 *
 * The background is @p background.first.b left of the largest-b cell,
 * @p background.second.b right of it and their mean in that cell.
 */
inline double delta_mass(const FVField &f, std::pair<double, double> window,
                         std::pair<State, State> background) {
  const auto [x_lo, x_hi] = window;
  if (!(x_lo >= f.grid.x_min && x_hi <= f.grid.x_max && x_hi > x_lo))
    throw InvalidData("delta_mass: window must lie inside the grid");
  const int j0 = f.grid.cell_of(x_lo), j1 = f.grid.cell_of(x_hi);
  const int js = spike_cell(f, x_lo, x_hi);
  const double bl = background.first.b, br = background.second.b;
  double m = 0.0;
  for (int j = j0; j <= j1; ++j) {
    const double bg = j < js ? bl : (j > js ? br : 0.5 * (bl + br));
    m += f.b[j] - bg;
  }
  return m * f.grid.dx();
}

struct TransportResidual {
  double w1; ///< mean |(w1)_t + 3 w1 (w1)_x|
  double w2; ///< mean |(w2)_t + w1 (w2)_x|
  int cells; ///< cells that passed the smoothness mask
};

/**
 * @brief Finite-difference residuals of the diagonal transport equations
 *   (w1)_t + 3 w1 (w1)_x = 0,  (w2)_t + w1 (w2)_x = 0
 * between two snapshots on the same grid, averaged over cells in [x_lo, x_hi]
 * whose centered differences stay below @p max_gradient.
 */
inline TransportResidual invariant_transport_residual(const FVField &f0, const FVField &f1,
                                                      const Params &p, double x_lo, double x_hi,
                                                      double max_gradient = 20.0,
                                                      double h_tol = default_h_tol) {
  if (f0.grid.n_cells != f1.grid.n_cells) throw InvalidData("invariant_transport_residual: grids differ");
  const double dt = f1.t - f0.t;
  if (!(dt > 0.0)) throw InvalidData("invariant_transport_residual: snapshots must advance in time");
  const Grid &g = f0.grid;
  const double dx = g.dx();
  const int n = g.n_cells;
  auto inv = [&](const FVField &f, int j) -> std::optional<Invariants> {
    if (!(f.h[j] > h_tol)) return std::nullopt;
    return riemann_invariants(f.at(j), p);
  };
  double r1 = 0.0, r2 = 0.0;
  int count = 0;
  for (int j = std::max(1, g.cell_of(x_lo)); j <= std::min(n - 2, g.cell_of(x_hi)); ++j) {
    const auto a = inv(f0, j - 1), c = inv(f0, j), e = inv(f0, j + 1), d = inv(f1, j);
    if (!a || !c || !e || !d) continue;
    const double g1 = (e->w1 - a->w1) / (2 * dx), g2 = (e->w2 - a->w2) / (2 * dx);
    if (std::abs(g1) > max_gradient || std::abs(g2) > max_gradient) continue;
    r1 += std::abs((d->w1 - c->w1) / dt + 3.0 * c->w1 * g1);
    r2 += std::abs((d->w2 - c->w2) / dt + c->w1 * g2);
    ++count;
  }
  if (count == 0) return {0.0, 0.0, 0};
  return {r1 / count, r2 / count, count};
}

} // namespace thinfilm
