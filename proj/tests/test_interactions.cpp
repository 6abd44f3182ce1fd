#include "support.hpp"

#include <thinfilm/interactions.hpp>

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace thinfilm;
using tftest::Gen;

namespace {

const Params half_zero(0.5, 0.0);
const Params half_one(0.5, 1.0);

PerturbedData pd(double eps, State l, State m, State r, Params p, double tol = default_h_tol) {
  return {eps, l, m, r, p, tol};
}

PerturbedData case1_example(double eps = 0.1) {
  return pd(eps, {1.5, 1.6}, {0.95, 1.62}, {1.25, 1.15}, half_zero);
}
PerturbedData case2_example(double eps = 0.1) {
  return pd(eps, {1.24, 0.90}, {0.75, 1.25}, {1.5, 1.56}, half_zero);
}
PerturbedData case5_example(double eps = 0.1) {
  return pd(eps, {2.9, 1.70}, {1e-5, 5.5}, {1.5, 1.56}, half_zero, 1e-4);
}
PerturbedData case6_example(double eps = 0.1) {
  return pd(eps, {2.0, 1.0}, {1.0, 1.0}, {0.0, 1.5}, half_one);
}
PerturbedData case7_example(double eps = 0.1) {
  return pd(eps, {0.5, 0.5}, {1.0, 1.0}, {0.0, 2.0}, half_one);
}

/// Random interior data of the requested interaction pattern (rejection sampling).
PerturbedData random_case(Gen &g, InteractionCase want) {
  for (;;) {
    const auto d = pd(g.uniform(0.01, 0.3), g.interior(0.3, 2.5), g.interior(0.3, 2.5),
                      g.interior(0.3, 2.5), g.params(0.2, 1.5));
    const double a = lambda1(d.left, d.params), b = lambda1(d.middle, d.params),
                 c = lambda1(d.right, d.params);
    if (std::abs(a - b) < 0.05 * b || std::abs(b - c) < 0.05 * b || std::abs(a - c) < 0.05 * c) continue;
    if (classify_case(d) == want) return d;
  }
}

/// Integral of the initial data over [x_lo, x_hi].
Vec2 initial_integral(const PerturbedData &d, double x_lo, double x_hi) {
  const double e = d.epsilon;
  return {d.left.h * (-e - x_lo) + 2 * e * d.middle.h + d.right.h * (x_hi - e),
          d.left.b * (-e - x_lo) + 2 * e * d.middle.b + d.right.b * (x_hi - e)};
}

/// |int U(t) - int U(0) - t (F(L) - F(R))| relative to the integral size.
double conservation_defect(const InteractionTimeline &tl, double t) {
  const auto &d = tl.data;
  const auto [x_lo, x_hi] = wave_domain(d, t);
  const Vec2 now = integral(tl.profile_at(t), x_lo, x_hi);
  const Vec2 ini = initial_integral(d, x_lo, x_hi);
  const Vec2 fl = flux(d.left, d.params), fr = flux(d.right, d.params);
  const double eh = now[0] - ini[0] - t * (fl[0] - fr[0]);
  const double eb = now[1] - ini[1] - t * (fl[1] - fr[1]);
  return std::hypot(eh, eb) / (1.0 + std::hypot(ini[0], ini[1]));
}

double l1_to_outer(const InteractionTimeline &tl, double t, double x_lo, double x_hi) {
  return l1_distance(tl.profile_at(t), profile_of(tl.final_fan, t), x_lo, x_hi);
}

} // namespace

TEST(ClassifyCase, Examples) {
  EXPECT_EQ(classify_case(case1_example()), InteractionCase::js_js);
  EXPECT_EQ(classify_case(case2_example()), InteractionCase::js_jr);
  EXPECT_EQ(classify_case(case5_example()), InteractionCase::ds_jr);
  EXPECT_EQ(classify_case(pd(0.1, {2.9, 1.7}, {0.0, 5.5}, {1.5, 1.56}, half_zero)),
            InteractionCase::ds_jr);
  EXPECT_EQ(classify_case(case6_example()), InteractionCase::js_ds);
  EXPECT_EQ(classify_case(case7_example()), InteractionCase::jr_ds);
  EXPECT_EQ(classify_case(pd(0.1, {1, 1}, {1, 1}, {2, 1}, half_one)), InteractionCase::degenerate);
}

TEST(ClassifyCase, RejectsInvalid) {
  EXPECT_THROW(classify_case(pd(0.0, {1, 1}, {1, 2}, {2, 1}, half_one)), InvalidData);
  EXPECT_THROW(classify_case(pd(0.1, {1, 1}, {0, 1}, {0, 2}, half_one)), InvalidData);
}

TEST(CatchUp, ClosedFormPoint) {
  const auto pt = catch_up({-0.1, 0.0, 2.0}, {0.1, 0.0, 1.0});
  ASSERT_TRUE(pt);
  EXPECT_NEAR(pt->x, 0.3, 1e-15);
  EXPECT_NEAR(pt->t, 0.2, 1e-15);
  EXPECT_FALSE(catch_up({-0.1, 0.0, 1.0}, {0.1, 0.0, 1.0}));
}

TEST(ShockContact, HomogeneousInEpsilonAndContactSpeedPreserved) {
  Gen g(501);
  for (int i = 0; i < 200; ++i) {
    const auto d = random_case(g, InteractionCase::js_js);
    const auto tl = run_timeline(d, 1e9);
    ASSERT_EQ(tl.engine, Engine::closed_form);
    ASSERT_EQ(tl.events.size(), 2u);
    auto half = d;
    half.epsilon *= 0.5;
    const auto th = run_timeline(half, 1e9);
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(th.events[k].point.x, 0.5 * tl.events[k].point.x, 1e-12 * (1 + std::abs(tl.events[k].point.x)));
      EXPECT_NEAR(th.events[k].point.t, 0.5 * tl.events[k].point.t, 1e-12 * tl.events[k].point.t);
    }
    // Outgoing contact of the first event moves with lambda1(left).
    const auto sw = solve({intermediate_state(d.first()), intermediate_state(d.second()), d.params});
    ASSERT_FALSE(sw.waves.empty());
    const auto *c = std::get_if<Contact>(&sw.waves.front());
    ASSERT_NE(c, nullptr);
    EXPECT_NEAR(c->speed, lambda1(d.left, d.params), 1e-12 * c->speed);
  }
}

TEST(ShockContact, NoInteractionWhenShockSlower) {
  const State m{1, 1};
  const Shock s{0.5, {2, 2}, m};
  const Contact j{1.0, m, {0.5, 1}};
  EXPECT_THROW(interact_shock_contact(s, -0.1, j, 0.1, half_one), NoInteraction);
}

TEST(ShockChase, ExampleEndsInOuterSolution) {
  const auto d = case1_example();
  const auto tl = run_timeline(d, 1e9);
  ASSERT_EQ(tl.events.size(), 2u);
  EXPECT_LT(tl.events[0].point.t, tl.events[1].point.t);
  const State p3 = *tl.final_fan.intermediate;
  ASSERT_EQ(tl.final_fan.waves.size(), 2u);
  const double mu3 = lambda1(d.left, d.params);
  const double s4 = std::get<Shock>(tl.final_fan.waves[1]).speed;
  EXPECT_GT(s4, mu3);
  // Beyond the last event the solution is the outer fan shifted by the event geometry.
  const double t = 4.0 * tl.events[1].point.t;
  const Profile prof = tl.profile_at(t);
  const double xj = tl.events[0].point.x + mu3 * (t - tl.events[0].point.t);
  const double xs = tl.events[1].point.x + s4 * (t - tl.events[1].point.t);
  const double x_j1 = -d.epsilon + mu3 * t;
  EXPECT_TRUE(prof.state_at(x_j1 - 1e-6) == d.left);
  EXPECT_TRUE(prof.state_at(0.5 * (x_j1 + xj)) == intermediate_state(d.first()));
  const State mid = prof.state_at(0.5 * (xj + xs));
  EXPECT_NEAR(mid.h, p3.h, 1e-13);
  EXPECT_NEAR(mid.b, p3.b, 1e-13);
  EXPECT_TRUE(prof.state_at(xs + 1e-6) == d.right);
  // Closed form of the second event point.
  const auto sw = solve(d.second());
  const double s2 = std::get<Shock>(sw.waves[1]).speed;
  const double s3 = shock_speed(p3, *sw.intermediate, d.params);
  const double x1 = tl.events[0].point.x, t1 = tl.events[0].point.t, e = d.epsilon;
  EXPECT_NEAR(tl.events[1].point.t, (x1 - e - s3 * t1) / (s2 - s3), 1e-13);
  EXPECT_NEAR(tl.events[1].point.x, e + s2 * tl.events[1].point.t, 1e-13);
}

TEST(ShockChase, RequiresFasterTrailingShock) {
  const Shock a{1.0, {2, 2}, {1, 1}}, b{2.0, {1, 1}, {0.5, 0.5}};
  EXPECT_THROW(interact_shock_shock_chase(a, {0, 0}, b, {1, 0}, half_one), NoInteraction);
}

TEST(Timeline, TrivialMiddleHasNoEvents) {
  const auto d = pd(0.1, {1.5, 1.6}, {1.5, 1.6}, {1.25, 1.15}, half_zero);
  const auto tl = run_timeline(d, 50.0);
  EXPECT_EQ(tl.tag, InteractionCase::degenerate);
  EXPECT_TRUE(tl.events.empty());
  EXPECT_LT(l1_to_outer(tl, 5.0, -10, 30), 2e-13 + 2 * 0.1 * 1.0);
}

TEST(ShockThroughFan, EntryAndPoleConditions) {
  const State anchor{2.0, 2.0};
  const State left{1.0, 1.0}; // h3 = 2 h2 with tail height 0.5
  const State tail{0.5, 0.5};
  const double t2 = 1.0;
  const Point entry{0.1 + lambda2(tail, half_one) * t2, t2};
  const auto s = shock_through_fan(entry, left, anchor, 0.1, half_one);
  EXPECT_NEAR(s.height_at(t2), 0.5, 1e-14);
  EXPECT_FALSE(s.exit);
  EXPECT_NEAR(s.height_at(1e12), 1.0, 1e-3);
  // Height increases and the path accelerates.
  double prev_h = 0.0, prev_v = -inf;
  for (double t = 1.0; t < 50.0; t *= 1.3) {
    const double h = s.height_at(t);
    const double dt = 1e-4 * t;
    const double v = (s.curve.x_of_t(t + dt) - s.curve.x_of_t(t - dt)) / (2 * dt);
    EXPECT_GT(h, prev_h);
    EXPECT_GT(v, prev_v);
    prev_h = h;
    prev_v = v;
  }
  EXPECT_THROW(shock_through_fan({100.0, 1.0}, left, anchor, 0.1, half_one), GeometryError);
}

TEST(ShockThroughFan, PathIsAShock) {
  // Along the curve, dx/dt must equal the Rankine-Hugoniot speed between left and fan state.
  Gen g(502);
  for (int i = 0; i < 50; ++i) {
    const auto d = random_case(g, InteractionCase::js_jr);
    const auto tl = run_timeline(d, 1e9);
    ASSERT_EQ(tl.curves.size(), 1u);
    const auto &c = tl.curves[0];
    const State p3 = intermediate_state(d.outer());
    const double t_hi = std::isfinite(c.t_end) ? c.t_end : 20 * c.t_begin;
    for (int k = 1; k < 10; ++k) {
      const double t = c.t_begin + (t_hi - c.t_begin) * k / 10.0;
      const double dt = 1e-5 * t;
      const double v = (c.x_of_t(t + dt) - c.x_of_t(t - dt)) / (2 * dt);
      EXPECT_NEAR(v, shock_speed(p3, c.fan_state_of_t(t), d.params), 1e-6 * v);
    }
  }
}

TEST(ShockThroughFan, ExitTimeMatchesOdeIntegration) {
  namespace ode = boost::numeric::odeint;
  Gen g(503);
  int checked = 0;
  while (checked < 10) {
    const auto d = random_case(g, InteractionCase::js_jr);
    if (!(lambda1(d.left, d.params) > lambda1(d.right, d.params))) continue;
    const auto tl = run_timeline(d, 1e9);
    ASSERT_EQ(tl.events.size(), 3u);
    const Point entry = tl.events[1].point;
    const double t_exit = tl.events[2].point.t;
    const Params &p = d.params;
    const State p3 = intermediate_state(d.outer());
    const double k = ray_coefficient(d.right.b / d.right.h, p);
    const double e = d.epsilon, xi_head = lambda2(d.right, p), h3 = p3.h;
    // dx/dt = sigma(h3, h(x,t)), h from the centered fan at (e, 0).
    auto rhs = [&](const std::array<double, 1> &x, std::array<double, 1> &dx, double t) {
      const double xi = std::clamp((x[0] - e) / t, 0.0, xi_head);
      const double h = std::sqrt(xi / (3 * k));
      dx[0] = k * (h3 * h3 + h3 * h + h * h);
    };
    auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<std::array<double, 1>>());
    std::array<double, 1> x{entry.x};
    stepper.initialize(x, entry.t, 1e-3 * entry.t);
    auto gap = [&](double xx, double t) { return (xx - e) / t - xi_head; };
    for (;;) {
      stepper.do_step(rhs);
      if (gap(stepper.current_state()[0], stepper.current_time()) >= 0) break;
    }
    double lo = stepper.previous_time(), hi = stepper.current_time();
    std::array<double, 1> tmp;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      stepper.calc_state(mid, tmp);
      (gap(tmp[0], mid) < 0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(0.5 * (lo + hi), t_exit, 1e-8 * t_exit);
    ++checked;
  }
}

TEST(DeltaContactSplit, ExampleEventAndStrength) {
  for (double eps : {0.1, 0.05}) {
    const auto d = case5_example(eps);
    const auto s = delta_contact_split(d);
    EXPECT_NEAR(s.event.point.t, 6 * eps / 7.395, 1e-14);
    EXPECT_DOUBLE_EQ(s.event.point.x, eps);
    EXPECT_DOUBLE_EQ(*s.event.delta_strength, 2 * 5.5 * eps);
    EXPECT_DOUBLE_EQ(s.delta_contact.speed, lambda1(d.left, d.params));
    ASSERT_TRUE(s.shock.exit); // w1(left) > w1(right)
    // Shock starts tangent to the contact line and speeds up.
    const double t1 = s.event.point.t;
    const double v0 = (s.shock.curve.x_of_t(t1 * (1 + 1e-6)) - eps) / (t1 * 1e-6);
    EXPECT_NEAR(v0, lambda1(d.left, d.params), 1e-2 * v0);
    const double tm = 0.5 * (t1 + s.shock.exit->t);
    const double dt = 1e-4 * tm;
    const double acc = (s.shock.curve.x_of_t(tm + dt) - 2 * s.shock.curve.x_of_t(tm) +
                        s.shock.curve.x_of_t(tm - dt)) / (dt * dt);
    EXPECT_GT(acc, 0.0);
  }
  EXPECT_THROW(delta_contact_split(case1_example()), InvalidData);
}

TEST(DeltaContactSplit, AsymptoticSubcase) {
  const auto d = pd(0.1, {1.0, 1.0}, {0.0, 2.0}, {1.5, 1.56}, half_zero);
  const auto tl = run_timeline(d, 1e9);
  EXPECT_FALSE(tl.terminates);
  const double w1l = lambda1(d.left, d.params);
  const double t = 1e8;
  EXPECT_NEAR((tl.curves[0].x_of_t(t) - d.epsilon) / t, 3 * w1l, 1e-3);
}

TEST(ShockOvertakesDelta, EventAndContinuity) {
  const auto d = case6_example();
  const auto m = shock_overtakes_delta(d);
  const State p1 = intermediate_state(d.first());
  const double s1 = shock_speed(p1, d.middle, d.params), sd = lambda1(d.middle, d.params);
  const double e = d.epsilon;
  EXPECT_NEAR(m.event.point.t, 2 * e / (s1 - sd), 1e-14);
  EXPECT_NEAR(m.event.point.x, (s1 + sd) * e / (s1 - sd), 1e-14);
  EXPECT_NEAR(m.strength_at_event, d.right.b * sd * m.event.point.t, 1e-14);
  EXPECT_NEAR(m.delta.speed, lambda1(d.left, d.params), 1e-14);
  const auto tl = run_timeline(d, 1e9);
  const double t1 = m.event.point.t;
  const double before = tl.profile_at(t1 * (1 - 1e-9)).total_mass();
  const double after = tl.profile_at(t1 * (1 + 1e-9)).total_mass();
  EXPECT_NEAR(before, after, 1e-8);
  EXPECT_THROW(shock_overtakes_delta(case7_example()), InvalidData);
}

TEST(DeltaThroughFan, ClosedFormEventsAndCurve) {
  const auto d = case7_example();
  const double e = d.epsilon;
  const auto f = delta_through_fan(d);
  EXPECT_NEAR(f.entry.point.t, 1.2 * e, 1e-14);
  EXPECT_NEAR(f.entry.point.x, 2 * e, 1e-14);
  EXPECT_NEAR(*f.entry.delta_strength, d.right.b * e, 1e-14);
  const auto &c = f.curve;
  // Entry on the curve, dx/dt = (x + eps) / (3t), deceleration.
  EXPECT_NEAR(c.x_of_t(c.t_begin), 2 * e, 1e-14);
  for (double t = c.t_begin * 1.01; t < c.t_end; t *= 1.2) {
    const double dt = 1e-5 * t;
    const double v = (c.x_of_t(t + dt) - c.x_of_t(t - dt)) / (2 * dt);
    EXPECT_NEAR(v, (c.x_of_t(t) + e) / (3 * t), 1e-10);
    const double acc = (c.x_of_t(t + dt) - 2 * c.x_of_t(t) + c.x_of_t(t - dt)) / (dt * dt);
    EXPECT_LT(acc, 0.0);
  }
  // Exit where the delta reaches the fan tail, lambda2 of the intermediate state.
  const double xi_tail = lambda2(intermediate_state(d.first()), d.params);
  EXPECT_NEAR((f.exit.point.x + e) / f.exit.point.t, xi_tail, 1e-12);
  EXPECT_NEAR(*f.exit.delta_strength, c.strength_of_t(c.t_end), 1e-14);
  EXPECT_NEAR(f.strength_rate_after, d.right.b * lambda1(d.left, d.params), 1e-14);
}

TEST(Timeline, ConservationAllClosedFormCases) {
  Gen g(504);
  for (auto c : {InteractionCase::js_js, InteractionCase::js_jr}) {
    for (int i = 0; i < 10; ++i) {
      const auto d = random_case(g, c);
      const auto tl = run_timeline(d, 1e9);
      const double tmax = std::max(1.0, 3 * tl.max_event_time());
      for (double t : {0.3 * tmax, tmax}) EXPECT_LT(conservation_defect(tl, t), 1e-9) << to_string(c);
    }
  }
  // Exact conservation needs a middle height of exactly zero in the delta/composite case.
  const auto d5 = pd(0.1, {2.9, 1.70}, {0.0, 5.5}, {1.5, 1.56}, half_zero);
  for (const auto &d : {d5, case6_example(), case7_example()}) {
    const auto tl = run_timeline(d, 1e9);
    const double tmax = std::max(1.0, 3 * tl.max_event_time());
    for (double t : {0.5 * tl.events[0].point.t, 0.3 * tmax, tmax})
      EXPECT_LT(conservation_defect(tl, t), 1e-9) << to_string(tl.tag) << " t=" << t;
  }
}

TEST(FrontTracking, ConservesAndTerminatesForRarefactionCases) {
  Gen g(505);
  for (auto c : {InteractionCase::jr_jr, InteractionCase::jr_js}) {
    for (int i = 0; i < 5; ++i) {
      const auto d = random_case(g, c);
      TrackerOptions opt;
      opt.fan_fronts = 16;
      const auto tl = run_timeline(d, 50.0, opt);
      EXPECT_EQ(tl.engine, Engine::front_tracking);
      for (std::size_t k = 1; k < tl.events.size(); ++k)
        EXPECT_LE(tl.events[k - 1].point.t, tl.events[k].point.t);
      EXPECT_LT(conservation_defect(tl, 10.0), 1e-9) << to_string(c);
    }
  }
}

TEST(FrontTracking, BudgetExceededIsReported) {
  Gen g(506);
  const auto d = random_case(g, InteractionCase::jr_jr);
  TrackerOptions opt;
  opt.event_budget = 1;
  EXPECT_THROW(run_timeline(d, 1e9, opt), BudgetExceeded);
}

TEST(FrontTracking, ReproducesClosedFormCase1) {
  Gen g(507);
  for (int i = 0; i < 20; ++i) {
    const auto d = i == 0 ? case1_example() : random_case(g, InteractionCase::js_js);
    const auto exact = run_timeline(d, 1e9);
    TrackerOptions opt;
    opt.force_generic = true;
    const auto gen = run_timeline(d, 1e9, opt);
    ASSERT_EQ(gen.events.size(), exact.events.size());
    for (std::size_t k = 0; k < exact.events.size(); ++k) {
      EXPECT_NEAR(gen.events[k].point.x, exact.events[k].point.x, 1e-12);
      EXPECT_NEAR(gen.events[k].point.t, exact.events[k].point.t, 1e-12);
    }
  }
}

TEST(FrontTracking, Case2ExitTimeConvergesWithFanResolution) {
  // w1(left) > w1(right): the shock crosses the whole fan.
  const auto d = pd(0.1, {2.0, 1.6}, {0.75, 1.25}, {1.5, 1.56}, half_zero);
  const auto exact = run_timeline(d, 1e9);
  ASSERT_TRUE(exact.terminates);
  ASSERT_EQ(exact.events.size(), 3u);
  const double t3 = exact.events.back().point.t;
  double prev = inf;
  for (int n : {16, 32, 64, 128}) {
    TrackerOptions opt;
    opt.fan_fronts = n;
    opt.force_generic = true;
    const auto gen = run_timeline(d, 10 * t3, opt);
    const double err = std::abs(gen.max_event_time() - t3);
    EXPECT_LT(err, prev) << n;
    prev = err;
  }
  EXPECT_LT(prev, 2e-2 * t3);
}

TEST(Timeline, ShockRarefactionCaseMatchesOuterSolution) {
  for (double eps : {0.1, 0.05}) {
    const auto tl = run_timeline(case2_example(eps), 15.0);
    EXPECT_LT(l1_to_outer(tl, 15.0, -20, 40), 3.0 * eps) << eps;
  }
}

TEST(EpsilonLimit, Case1LinearRate) {
  const auto rep = epsilon_limit_report(case1_example(), {0.2, 0.1, 0.05, 0.025}, 5.0);
  EXPECT_TRUE(rep.l1_monotone);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double ratio = rep.rows[i - 1].l1 / rep.rows[i].l1;
    EXPECT_GE(ratio, 1.5);
    EXPECT_LE(ratio, 2.5);
    EXPECT_LT(rep.rows[i].max_event_time, rep.rows[i - 1].max_event_time);
  }
  EXPECT_THROW(epsilon_limit_report(case1_example(), {0.1, 0.0}, 5.0), InvalidData);
  EXPECT_THROW(epsilon_limit_report(case1_example(), {0.1}, 5.0), InvalidData);
}

TEST(EpsilonLimit, DeltaCasesRecoverStrengthRate) {
  for (const auto &d : {case5_example(), case6_example(), case7_example()}) {
    const auto rep = epsilon_limit_report(d, {0.1, 0.05, 0.025}, 5.0);
    EXPECT_TRUE(rep.l1_monotone) << to_string(classify_case(d));
    EXPECT_TRUE(rep.strength_monotone) << to_string(classify_case(d));
    EXPECT_LT(rep.rows.back().strength_error, 1.0 * rep.rows.front().strength_error + 1e-12);
  }
  // Rarefaction-delta case: strength rate after the fan is exactly the outer rate.
  const auto rep = epsilon_limit_report(case7_example(), {0.1, 0.05}, 5.0);
  for (const auto &r : rep.rows) EXPECT_LT(r.strength_rate_error, 1e-12);
}
