#include "support.hpp"

#include <thinfilm/limits.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace thinfilm;
using tftest::Gen;

namespace {

const RiemannData ex_jr{{1.24, 0.90}, {1.5, 1.56}, Params(0.5, 1.0)};
const RiemannData ex_js{{1.5, 1.6}, {1.25, 1.15}, Params(0.5, 1.0)};
const RiemannData ex_delta{{2.9, 1.70}, {0.0, 5.56}, Params(0.5, 1.0)};

const std::vector<double> sweep{1.0, 0.5, 0.1, 0.01, 0.001};

/// Max-norm distance between two fans sampled on a ray grid.
double ray_distance(const WaveFan &a, const WaveFan &b, double xi_max) {
  double m = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double xi = -0.5 + (xi_max + 1.0) * i / 2000.0;
    const State u = sample(a, xi).regular, v = sample(b, xi).regular;
    m = std::max({m, std::abs(u.h - v.h), std::abs(u.b - v.b)});
  }
  return m;
}

} // namespace

TEST(LimitTarget, ThinFilmExamples) {
  const auto t = limit_target(ex_jr, LimitKind::vanishing_gravity);
  ASSERT_EQ(t.tag, RiemannCase::j_r);
  EXPECT_NEAR(std::get<Contact>(t.waves[0]).speed, 0.558, 1e-15);
  EXPECT_NEAR(std::get<Rarefaction>(t.waves[1]).xi_hi, 3.51, 1e-14);
  const auto d = limit_target(ex_delta, LimitKind::vanishing_gravity);
  const auto &ds = std::get<DeltaShock>(d.waves[0]);
  EXPECT_DOUBLE_EQ(ds.speed, 2.9 * 1.70 / 2);
  EXPECT_DOUBLE_EQ(ds.strength_rate, 5.56 * 2.9 * 1.70 / 2);
}

TEST(LimitTarget, AgreesWithSolverAtLimitParameters) {
  Gen g(701);
  for (LimitKind k : {LimitKind::vanishing_gravity, LimitKind::vanishing_tension}) {
    for (int i = 0; i < 200; ++i) {
      RiemannData d{g.interior(), g.interior(), limit_params(k)};
      const auto a = limit_target(d, k), b = solve(d);
      ASSERT_EQ(a.tag, b.tag);
      EXPECT_LT(ray_distance(a, b, 30.0), 1e-12);
      for (std::size_t j = 0; j < a.waves.size(); ++j) {
        const auto [lo, hi] = wave_span(a.waves[j]);
        const auto [lo2, hi2] = wave_span(b.waves[j]);
        EXPECT_NEAR(lo, lo2, 1e-12 * (1 + lo));
        EXPECT_NEAR(hi, hi2, 1e-12 * (1 + hi));
      }
    }
  }
}

TEST(LimitTarget, FanLaws) {
  const State anchor{1.5, 1.56};
  for (double xi : {0.1, 1.0, 3.0}) {
    const State u = limit_fan_state(xi, anchor, LimitKind::vanishing_gravity);
    EXPECT_NEAR(u.h, std::sqrt(2 * xi * 1.5 / (3 * 1.56)), 1e-15);
    EXPECT_NEAR(u.b, std::sqrt(2 * xi * 1.56 / (3 * 1.5)), 1e-15);
    EXPECT_NEAR(lambda2(u, limit_params(LimitKind::vanishing_gravity)), xi, 1e-13);
    // Triangular system: x/t = h^2 regardless of b.
    const State v = limit_fan_state(xi, anchor, LimitKind::vanishing_tension);
    EXPECT_NEAR(v.h * v.h, xi, 1e-14);
    EXPECT_NEAR(lambda2(v, limit_params(LimitKind::vanishing_tension)), xi, 1e-13);
  }
}

TEST(LimitTarget, ShockSpeedLimit) {
  const auto t = limit_target(ex_js, LimitKind::vanishing_gravity);
  ASSERT_EQ(t.tag, RiemannCase::j_s);
  const double hl = 1.5, bl = 1.6, hr = 1.25, br = 1.15;
  const double s = std::get<Shock>(t.waves[1]).speed;
  EXPECT_NEAR(s, 0.5 * (hl * bl + std::sqrt(hl * hr * bl * br) + hr * br), 1e-14);
  RiemannData d = ex_js;
  double prev = inf;
  for (double kappa : sweep) {
    d.params = Params(0.5, kappa);
    const double e = std::abs(std::get<Shock>(solve(d).waves[1]).speed - s);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_LT(prev, 2.0 * sweep.back());
}

TEST(LimitTarget, DeltaIdentitiesAreAffine) {
  Gen g(702);
  for (int i = 0; i < 100; ++i) {
    RiemannData d{g.interior(), {0.0, g.interior().b}, Params(0.5, 1.0)};
    const double hl = d.left.h, bl = d.left.b;
    const double s0 = std::get<DeltaShock>(limit_target(d, LimitKind::vanishing_gravity).waves[0]).speed;
    for (double kappa : sweep) {
      d.params = Params(0.5, kappa);
      const double s = std::get<DeltaShock>(solve(d).waves[0]).speed;
      EXPECT_NEAR(std::abs(s - s0), kappa * hl * hl / 3, 1e-14 * (1 + s));
    }
    const double t0 = std::get<DeltaShock>(limit_target(d, LimitKind::vanishing_tension).waves[0]).speed;
    for (double alpha : sweep) {
      d.params = Params(alpha, 1.0);
      const double s = std::get<DeltaShock>(solve(d).waves[0]).speed;
      EXPECT_NEAR(std::abs(s - t0), alpha * hl * bl, 1e-14 * (1 + s));
    }
  }
}

TEST(ConvergenceTable, GravitySweepOnContactRarefaction) {
  const auto tab = convergence_table(default_study(LimitKind::vanishing_gravity, ex_jr, sweep));
  ASSERT_EQ(tab.rows.size(), sweep.size());
  EXPECT_TRUE(tab.l1_strictly_decreasing);
  // First-order rate: l1 / kappa settles near 2.06 at t = 1.
  const auto &r3 = tab.rows[3], &r4 = tab.rows[4];
  EXPECT_NEAR(r4.l1 / r4.value, r3.l1 / r3.value, 0.01 * r3.l1 / r3.value);
  EXPECT_LE(r4.l1, 2.1e-3);
  for (const auto &r : tab.rows) {
    EXPECT_EQ(r.dsigma, 0.0);
    EXPECT_EQ(r.tag, RiemannCase::j_r);
  }
}

TEST(ConvergenceTable, TensionSweepOnContactRarefaction) {
  const auto tab = convergence_table(default_study(LimitKind::vanishing_tension, ex_jr, sweep));
  EXPECT_TRUE(tab.l1_strictly_decreasing);
  // The distance is exactly linear in alpha on this data.
  for (const auto &r : tab.rows)
    EXPECT_NEAR(r.l1 / r.value, tab.rows[0].l1, 1e-6 * tab.rows[0].l1);
}

TEST(ConvergenceTable, DeltaSweeps) {
  for (LimitKind k : {LimitKind::vanishing_gravity, LimitKind::vanishing_tension}) {
    const auto tab = convergence_table(default_study(k, ex_delta, sweep, 0.1));
    EXPECT_TRUE(tab.weak_monotone);
    const double coef = k == LimitKind::vanishing_gravity ? 2.9 * 2.9 / 3 : 2.9 * 1.70;
    for (const auto &r : tab.rows) {
      EXPECT_EQ(r.tag, RiemannCase::delta_shock);
      EXPECT_NEAR(r.dsigma, r.value * coef, 1e-14);
      EXPECT_NEAR(r.dbeta_rate, 5.56 * r.value * coef, 1e-13);
    }
    // Linear decay once the parameter is small.
    for (std::size_t i = 3; i < tab.rows.size(); ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_LE(tab.rows[i].weak[j],
                  tab.rows[i - 1].weak[j] * tab.rows[i].value / tab.rows[i - 1].value * 1.05 + 1e-15);
    // The bump right of every wave sees nothing.
    for (const auto &r : tab.rows) EXPECT_EQ(r.weak[2], 0.0);
    // The straddling bump sees the moving mass.
    EXPECT_GT(tab.rows.front().weak[0], 1e-4);
  }
}

TEST(ConvergenceTable, RejectsBadStudies) {
  EXPECT_THROW(convergence_table(default_study(LimitKind::vanishing_gravity, ex_jr, {})), InvalidData);
  EXPECT_THROW(convergence_table(default_study(LimitKind::vanishing_gravity, ex_jr, {0.1, 0.5})),
               InvalidData);
  EXPECT_THROW(convergence_table(default_study(LimitKind::vanishing_gravity, ex_jr, {1.0, -0.1})),
               InvalidData);
}

TEST(ConvergenceTable, IndependentOfThreadCount) {
  const auto study = default_study(LimitKind::vanishing_gravity, ex_js, sweep);
  setenv("THINFILM_THREADS", "1", 1);
  const auto a = convergence_table(study);
  setenv("THINFILM_THREADS", "4", 1);
  const auto b = convergence_table(study);
  unsetenv("THINFILM_THREADS");
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].l1, b.rows[i].l1);
    EXPECT_EQ(a.rows[i].weak, b.rows[i].weak);
  }
}

TEST(IntermediateSensitivity, MatchesFiniteDifferences) {
  Gen g(703);
  for (int i = 0; i < 200; ++i) {
    RiemannData d{g.interior(), g.interior(), g.params()};
    const auto s = intermediate_sensitivity(d);
    const double a = d.params.alpha(), k = d.params.kappa(), step = 1e-5;
    auto at = [&](double aa, double kk) {
      RiemannData e = d;
      e.params = Params(aa, kk);
      return intermediate_state(e);
    };
    const State pa = at(a + step, k), ma = at(a - step, k), pk = at(a, k + step), mk = at(a, k - step);
    EXPECT_NEAR(s.dh_dalpha, (pa.h - ma.h) / (2 * step), 1e-6);
    EXPECT_NEAR(s.db_dalpha, (pa.b - ma.b) / (2 * step), 1e-6);
    EXPECT_NEAR(s.dh_dkappa, (pk.h - mk.h) / (2 * step), 1e-6);
    EXPECT_NEAR(s.db_dkappa, (pk.b - mk.b) / (2 * step), 1e-6);
  }
}
