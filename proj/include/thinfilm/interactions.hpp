/**
 * @file interactions.hpp
 *
 * @brief Wave interactions for the three-state initial value problem
 *
 *   U(x,0) = left for x < -eps,  middle for |x| < eps,  right for x > eps.
 *
 * Closed-form resolvers cover shock/contact, shock/shock, shock through a
 * rarefaction, delta/composite splitting, shock overtaking a delta and a delta
 * crossing a rarefaction. Remaining configurations go through a generic front
 * tracker that replaces rarefactions by fans of Rankine-Hugoniot fronts.
 */
#pragma once

#include "profile.hpp"
#include "riemann.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace thinfilm {

struct PerturbedData {
  double epsilon;
  State left;
  State middle;
  State right;
  Params params;
  double h_tol = default_h_tol;

  RiemannData first() const { return {left, middle, params, h_tol}; }
  RiemannData second() const { return {middle, right, params, h_tol}; }
  RiemannData outer() const { return {left, right, params, h_tol}; }
};

/// Interaction pattern: numbered cases follow the pairing of the two
/// sub-problem solutions; @c degenerate means one sub-problem is trivial.
enum class InteractionCase {
  js_js = 1,
  js_jr = 2,
  jr_jr = 3,
  jr_js = 4,
  ds_jr = 5,
  js_ds = 6,
  jr_ds = 7,
  degenerate = 8,
  other = 9
};

inline const char *to_string(InteractionCase c) {
  switch (c) {
  case InteractionCase::js_js: return "JS-JS";
  case InteractionCase::js_jr: return "JS-JR";
  case InteractionCase::jr_jr: return "JR-JR";
  case InteractionCase::jr_js: return "JR-JS";
  case InteractionCase::ds_jr: return "dS-JR";
  case InteractionCase::js_ds: return "JS-dS";
  case InteractionCase::jr_ds: return "JR-dS";
  case InteractionCase::degenerate: return "degenerate";
  case InteractionCase::other: return "other";
  }
  return "?";
}

inline int case_number(InteractionCase c) { return static_cast<int>(c); }

struct Point {
  double x;
  double t;
};

/// Straight wave path x = x0 + speed (t - t0).
struct Track {
  double x0, t0, speed;
  double at(double t) const { return x0 + speed * (t - t0); }
};

/// Point where @p behind catches @p ahead; nullopt if it never does.
inline std::optional<Point> catch_up(const Track &behind, const Track &ahead) {
  const double ds = behind.speed - ahead.speed;
  if (!(ds > 0.0)) return std::nullopt;
  const double t = (ahead.x0 - ahead.speed * ahead.t0 - behind.x0 + behind.speed * behind.t0) / ds;
  return Point{behind.at(t), t};
}

struct Event {
  Point point;
  std::vector<std::string> incoming;
  std::vector<std::string> outgoing;
  std::optional<double> delta_strength;
};

enum class CurveKind { shock_in_fan, delta_in_fan };

inline const char *to_string(CurveKind k) {
  return k == CurveKind::shock_in_fan ? "shock_in_fan" : "delta_in_fan";
}

/// A wave following a curved path through a rarefaction fan.
struct CurvedWave {
  CurveKind kind;
  double t_begin;
  double t_end; ///< exit time, infinity if the fan is never crossed
  std::function<double(double)> x_of_t;
  std::function<State(double)> fan_state_of_t; ///< state on the fan side of the wave
  std::function<double(double)> strength_of_t; ///< delta weight; empty for shocks
};

// ---------------------------------------------------------------------------
// Closed-form resolvers
// ---------------------------------------------------------------------------

struct PairInteraction {
  Event event;
  WaveFan outgoing; ///< Riemann solution issued from the event point
};

/**
 * @brief Shock issued from (x_shock, 0) overtaking a contact issued from
 * (x_contact, 0); the new Riemann problem joins shock.left to contact.right.
 */
inline PairInteraction interact_shock_contact(const Shock &s, double x_shock, const Contact &j,
                                              double x_contact, const Params &p,
                                              double h_tol = default_h_tol) {
  const auto pt = catch_up({x_shock, 0.0, s.speed}, {x_contact, 0.0, j.speed});
  if (!pt || !(x_contact > x_shock))
    throw NoInteraction("interact_shock_contact: shock does not overtake the contact");
  PairInteraction r{{*pt, {"S1", "J2"}, {"J3", "S3"}, std::nullopt},
                    solve({s.left, j.right, p, h_tol})};
  return r;
}

/// Faster trailing shock @p s3 catching the leading shock @p s2.
inline PairInteraction interact_shock_shock_chase(const Shock &s3, Point s3_origin,
                                                  const Shock &s2, Point s2_origin,
                                                  const Params &p,
                                                  double h_tol = default_h_tol) {
  if (!(s3.speed > s2.speed))
    throw NoInteraction("interact_shock_shock_chase: trailing shock is not faster");
  const auto pt = catch_up({s3_origin.x, s3_origin.t, s3.speed}, {s2_origin.x, s2_origin.t, s2.speed});
  if (!pt || pt->t < std::max(s3_origin.t, s2_origin.t))
    throw NoInteraction("interact_shock_shock_chase: shocks do not meet");
  return {{*pt, {"S3", "S2"}, {"S4"}, std::nullopt}, solve({s3.left, s2.right, p, h_tol})};
}

/**
 * @brief Shock with constant left state entering a centered 2-rarefaction
 * from behind.
 *
 * With g(h) = (h3 - h)^2 (h3 + 2h) the shock path satisfies t g(h) = const
 * and x = x_center + lambda2(h) t, h increasing toward h3. The shock leaves
 * the fan when h reaches the head height, which happens iff h3 > h_head.
 */
struct ShockInFan {
  CurvedWave curve;
  std::optional<Point> exit;
  State left;
  State anchor;
  double x_center;
  double law_constant; ///< t g(h) along the path

  /// Fan-side height at time t (t >= entry time).
  double height_at(double t) const { return curve.fan_state_of_t(t).h; }
};

namespace detail {

inline double shock_law_g(double h3, double h) { return (h3 - h) * (h3 - h) * (h3 + 2.0 * h); }

/// Root h in [lo, hi] of g(h) = target with g decreasing on [0, h3].
inline double invert_shock_law(double h3, double target, double lo, double hi) {
  if (target >= shock_law_g(h3, lo)) return lo;
  if (target <= shock_law_g(h3, hi)) return hi;
  auto f = [&](double h) { return shock_law_g(h3, h) - target; };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

} // namespace detail

inline ShockInFan shock_through_fan(Point entry, const State &left, const State &anchor,
                                    double x_center, const Params &p) {
  if (!(entry.t > 0.0)) throw GeometryError("shock_through_fan: entry must have t > 0");
  const double xi = (entry.x - x_center) / entry.t;
  const double xi_head = lambda2(anchor, p);
  const double slack = 1e-10 * std::max(1.0, xi_head);
  if (xi < -slack || xi > xi_head + slack)
    throw GeometryError("shock_through_fan: entry point is not inside the fan");
  const State e = rarefaction_state(std::clamp(xi, 0.0, xi_head), anchor, p);
  common_ray(left, anchor);
  const double h3 = left.h;
  if (!(h3 > e.h)) throw GeometryError("shock_through_fan: left height must exceed the fan height at entry");
  const double K = entry.t * detail::shock_law_g(h3, e.h);
  const double h_top = std::min(h3, anchor.h);
  const double w2 = anchor.b / anchor.h;
  const double h_entry = e.h;
  std::optional<Point> exit;
  double t_end = inf;
  if (h3 > anchor.h) {
    t_end = K / detail::shock_law_g(h3, anchor.h);
    exit = Point{x_center + xi_head * t_end, t_end};
  }
  auto height = [=](double t) {
    if (t <= entry.t) return h_entry;
    return detail::invert_shock_law(h3, K / t, h_entry, h_top);
  };
  const double k3 = 3.0 * ray_coefficient(w2, p);
  CurvedWave c{CurveKind::shock_in_fan, entry.t, t_end,
               [=](double t) {
                 const double h = height(t);
                 return x_center + k3 * h * h * t;
               },
               [=](double t) {
                 const double h = height(t);
                 return State{h, w2 * h};
               },
               {}};
  return {std::move(c), exit, left, anchor, x_center, K};
}

/// Delta shock splitting into a delta contact and a shock on meeting a composite wave.
struct DeltaContactSplit {
  Event event;
  Track delta_contact;   ///< frozen-strength delta on the contact line
  double frozen_strength;
  State intermediate;    ///< between the delta contact and the shock
  ShockInFan shock;
};

inline InteractionCase classify_case(const PerturbedData &d);

inline DeltaContactSplit delta_contact_split(const PerturbedData &d) {
  if (classify_case(d) != InteractionCase::ds_jr)
    throw InvalidData("delta_contact_split: data are not of delta/composite type");
  const Params &p = d.params;
  const double eps = d.epsilon;
  const double w1l = lambda1(d.left, p);
  const double t1 = 2.0 * eps / w1l;
  const double beta1 = 2.0 * d.middle.b * eps;
  const State m = intermediate_state(d.outer());
  ShockInFan s = shock_through_fan({eps, t1}, m, d.right, eps, p);
  Event e{{eps, t1}, {"dS1", "J2R2"}, {"dJ3", "S3"}, beta1};
  return {e, {eps, t1, w1l}, beta1, m, std::move(s)};
}

/// Shock overtaking a delta shock; the result is a single delta shock.
struct ShockDeltaMerge {
  Event event;
  Track delta;
  double strength_at_event;
  double strength_rate; ///< b+ lambda1(left) after the event
  State left;           ///< state behind the merged delta
};

inline ShockDeltaMerge shock_overtakes_delta(const PerturbedData &d) {
  if (classify_case(d) != InteractionCase::js_ds)
    throw InvalidData("shock_overtakes_delta: data are not of shock/delta type");
  const Params &p = d.params;
  const double eps = d.epsilon;
  const State p1 = intermediate_state(d.first());
  const double s1 = shock_speed(p1, d.middle, p);
  const double sd2 = lambda1(d.middle, p);
  const auto pt = catch_up({-eps, 0.0, s1}, {eps, 0.0, sd2});
  if (!pt) throw NoInteraction("shock_overtakes_delta: shock slower than the delta");
  const double beta1 = d.right.b * sd2 * pt->t;
  const double sd3 = lambda1(p1, p);
  return {{*pt, {"S1", "dS2"}, {"dS3"}, beta1}, {pt->x, pt->t, sd3}, beta1, d.right.b * sd3, p1};
}

/// Delta shock crossing a rarefaction from its head to its tail.
struct DeltaInFan {
  Event entry;
  CurvedWave curve;
  Event exit;
  Track delta_after;
  double strength_rate_after;
  double curve_constant; ///< C in x = C t^{1/3} - eps
  State left_after;      ///< state behind the delta once the fan is crossed
};

inline DeltaInFan delta_through_fan(const PerturbedData &d) {
  if (classify_case(d) != InteractionCase::jr_ds)
    throw InvalidData("delta_through_fan: data are not of rarefaction/delta type");
  const Params &p = d.params;
  const double eps = d.epsilon;
  const double w1m = lambda1(d.middle, p);
  const double w1l = lambda1(d.left, p);
  const double bp = d.right.b;
  const double t1 = eps / w1m;
  const double beta1 = bp * eps;
  const double C = std::cbrt(27.0 * eps * eps * w1m);
  const double t2 = std::pow(C / (3.0 * w1l), 1.5);
  const double x2 = C * std::cbrt(t2) - eps;
  const double beta2 = bp * C * (std::cbrt(t2) - std::cbrt(t1)) + beta1;
  const State anchor = d.middle;
  const State p1 = intermediate_state(d.first());
  const Params pc = p;
  CurvedWave c{CurveKind::delta_in_fan, t1, t2,
               [=](double t) { return C * std::cbrt(t) - eps; },
               [=](double t) {
                 const double xi = C * std::cbrt(t) / t;
                 return rarefaction_state(std::clamp(xi, 0.0, lambda2(anchor, pc)), anchor, pc);
               },
               [=](double t) { return bp * C * (std::cbrt(t) - std::cbrt(t1)) + beta1; }};
  return {{{2.0 * eps, t1}, {"R1", "dS2"}, {"dS3"}, beta1},
          std::move(c),
          {{x2, t2}, {"dS3"}, {"dS4"}, beta2},
          {x2, t2, w1l},
          bp * w1l,
          C,
          p1};
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

inline void validate(const PerturbedData &d) {
  if (!(d.epsilon > 0.0) || !std::isfinite(d.epsilon))
    throw InvalidData("perturbed data: epsilon must be positive");
  require_valid(d.left, "perturbed data: left");
  require_valid(d.middle, "perturbed data: middle");
  require_valid(d.right, "perturbed data: right");
}

inline InteractionCase classify_case(const PerturbedData &d) {
  validate(d);
  const RiemannCase a = classify(d.first());
  const RiemannCase b = classify(d.second());
  if (a == RiemannCase::delta_shock && b == RiemannCase::delta_shock)
    throw InvalidData("classify_case: two delta shocks cannot occur in the state space");
  if (nearly_equal(d.left, d.middle) || nearly_equal(d.middle, d.right))
    return InteractionCase::degenerate;
  using R = RiemannCase;
  if (a == R::j_s && b == R::j_s) return InteractionCase::js_js;
  if (a == R::j_s && b == R::j_r) return InteractionCase::js_jr;
  if (a == R::j_r && b == R::j_r) return InteractionCase::jr_jr;
  if (a == R::j_r && b == R::j_s) return InteractionCase::jr_js;
  if (a == R::delta_shock && b == R::composite_jr) return InteractionCase::ds_jr;
  if (a == R::j_s && b == R::delta_shock) return InteractionCase::js_ds;
  if (a == R::j_r && b == R::delta_shock) return InteractionCase::jr_ds;
  return InteractionCase::other;
}

// ---------------------------------------------------------------------------
// Generic front tracking
// ---------------------------------------------------------------------------

struct TrackerOptions {
  int fan_fronts = 64;      ///< fronts per initial rarefaction
  int event_budget = 10000;
  double tie_tol = 1e-12;   ///< relative coincidence tolerance for simultaneous collisions
  bool force_generic = false;
};

/// Straight discontinuity of the front tracker, possibly carrying a delta mass.
struct Front {
  int id;
  double x0, t0, speed;
  State left, right;
  double beta0 = 0.0;
  double beta_rate = 0.0;
  double t_death = inf;
  std::string kind;

  double x(double t) const { return x0 + speed * (t - t0); }
  double beta(double t) const { return beta0 + beta_rate * (t - t0); }
  bool alive_at(double t) const { return t0 <= t && t < t_death; }
};

struct FrontTrackingResult {
  std::vector<Front> fronts;
  std::vector<Event> events;
};

namespace detail {

class FrontTracker {
public:
  FrontTracker(const Params &p, double h_tol, const TrackerOptions &opt)
      : p_(p), h_tol_(h_tol), opt_(opt) {}

  /// Reference w1 range that receives opt.fan_fronts fronts.
  void set_reference_range(double w) { w_ref_ = w; }

  std::vector<int> emit(const WaveFan &fan, Point at, double mass) {
    std::vector<int> ids;
    State cur = fan.data.left;
    for (const Wave &w : fan.waves) {
      if (const auto *c = std::get_if<Contact>(&w)) {
        ids.push_back(add(at, c->speed, c->left, c->right, "contact"));
        cur = c->right;
      } else if (const auto *s = std::get_if<Shock>(&w)) {
        ids.push_back(add(at, s->speed, s->left, s->right, "shock"));
        cur = s->right;
      } else if (const auto *r = std::get_if<Rarefaction>(&w)) {
        add_fan(at, cur, r->anchor, ids);
        cur = r->anchor;
      } else if (const auto *ds = std::get_if<DeltaShock>(&w)) {
        const int id = add(at, ds->speed, ds->left, ds->right, "delta");
        fronts_[id].beta_rate = ds->strength_rate;
        ids.push_back(id);
        cur = ds->right;
      } else if (const auto *cj = std::get_if<CompositeJR>(&w)) {
        const State vac{0.0, 0.0};
        ids.push_back(add(at, 0.0, cj->left, vac, "contact"));
        add_fan(at, vac, cj->right, ids);
        cur = cj->right;
      }
    }
    if (mass > 0.0) {
      int target = -1;
      for (int id : ids)
        if (fronts_[id].kind == "delta") { target = id; break; }
      if (target < 0)
        for (int id : ids)
          if (fronts_[id].kind == "contact") { target = id; break; }
      if (target < 0) {
        target = add(at, lambda1(fan.data.left, p_), fan.data.left, fan.data.left, "mass");
        ids.insert(ids.begin(), target);
      }
      fronts_[target].beta0 += mass;
    }
    return ids;
  }

  FrontTrackingResult run(std::vector<int> order, double t_max) {
    std::vector<Event> events;
    double t_now = 0.0;
    for (;;) {
      int best = -1;
      double tc = inf;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const Front &a = fronts_[order[i]], &b = fronts_[order[i + 1]];
        const double ds = a.speed - b.speed;
        if (!(ds > 1e-14 * (std::abs(a.speed) + std::abs(b.speed)))) continue;
        const auto pt = catch_up({a.x0, a.t0, a.speed}, {b.x0, b.t0, b.speed});
        const double t = std::max(pt->t, t_now);
        if (t < tc) { tc = t; best = int(i); }
      }
      if (best < 0 || tc > t_max) break;
      if (int(events.size()) >= opt_.event_budget)
        throw BudgetExceeded("front tracker: event budget of " + std::to_string(opt_.event_budget) + " exhausted");
      const double xc = fronts_[order[best]].x(tc);
      const double tol = opt_.tie_tol * (1.0 + std::abs(xc));
      std::size_t lo = best, hi = best + 1;
      while (lo > 0 && std::abs(fronts_[order[lo - 1]].x(tc) - xc) <= tol) --lo;
      while (hi + 1 < order.size() && std::abs(fronts_[order[hi + 1]].x(tc) - xc) <= tol) ++hi;
      Event ev{{xc, tc}, {}, {}, std::nullopt};
      double mass = 0.0;
      for (std::size_t k = lo; k <= hi; ++k) {
        Front &f = fronts_[order[k]];
        mass += f.beta(tc);
        f.t_death = tc;
        ev.incoming.push_back("F" + std::to_string(f.id));
      }
      const State L = fronts_[order[lo]].left, R = fronts_[order[hi]].right;
      const auto out = emit(solve({L, R, p_, h_tol_}), {xc, tc}, mass);
      for (int id : out) ev.outgoing.push_back("F" + std::to_string(id));
      if (mass > 0.0) ev.delta_strength = mass;
      order.erase(order.begin() + lo, order.begin() + hi + 1);
      order.insert(order.begin() + lo, out.begin(), out.end());
      events.push_back(std::move(ev));
      t_now = tc;
    }
    return {fronts_, std::move(events)};
  }

private:
  int add(Point at, double speed, State l, State r, const char *kind) {
    const int id = int(fronts_.size());
    fronts_.push_back({id, at.x, at.t, speed, l, r, 0.0, 0.0, inf, kind});
    return id;
  }

  /// Replace the fan from @p tail to @p head by fronts with equal w1 steps.
  void add_fan(Point at, State tail, State head, std::vector<int> &ids) {
    const double w0 = lambda1(tail, p_), w1 = lambda1(head, p_);
    const double span = w1 - w0;
    int n = opt_.fan_fronts;
    if (w_ref_ > 0.0) n = std::max(1, int(std::ceil(opt_.fan_fronts * span / w_ref_ - 1e-9)));
    const double w2 = head.b / head.h;
    State prev = tail;
    for (int i = 1; i <= n; ++i) {
      const State next = i == n ? head : state_from_invariants({w0 + span * i / n, w2}, p_);
      ids.push_back(add(at, shock_speed(prev, next, p_), prev, next, "fan"));
      prev = next;
    }
  }

  Params p_;
  double h_tol_;
  TrackerOptions opt_;
  double w_ref_ = 0.0;
  std::vector<Front> fronts_;
};

inline double fan_w1_span(const WaveFan &fan, const Params &p) {
  double span = 0.0;
  State cur = fan.data.left;
  for (const Wave &w : fan.waves) {
    if (const auto *r = std::get_if<Rarefaction>(&w))
      span = std::max(span, lambda1(r->anchor, p) - lambda1(cur, p));
    if (const auto *cj = std::get_if<CompositeJR>(&w))
      span = std::max(span, lambda1(cj->right, p));
    std::visit([&](const auto &x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, Rarefaction>) cur = x.anchor;
      else cur = x.right;
    }, w);
  }
  return span;
}

} // namespace detail

/// Track all fronts of the three-state problem up to @p t_max.
inline FrontTrackingResult track_fronts(const PerturbedData &d, double t_max,
                                        const TrackerOptions &opt = {}) {
  validate(d);
  const Params &p = d.params;
  detail::FrontTracker tr(p, d.h_tol, opt);
  const WaveFan a = solve(d.first()), b = solve(d.second());
  const double ref = std::max(detail::fan_w1_span(a, p), detail::fan_w1_span(b, p));
  std::vector<int> order = tr.emit(a, {-d.epsilon, 0.0}, 0.0);
  const auto ob = tr.emit(b, {d.epsilon, 0.0}, 0.0);
  order.insert(order.end(), ob.begin(), ob.end());
  tr.set_reference_range(ref);
  return tr.run(std::move(order), t_max);
}

/// Regular part and masses of a front-tracking solution at time t.
inline Profile profile_of_fronts(const std::vector<Front> &fronts, const State &left,
                                 const Params &p, double t) {
  std::vector<const Front *> alive;
  for (const Front &f : fronts)
    if (f.alive_at(t)) alive.push_back(&f);
  std::stable_sort(alive.begin(), alive.end(), [&](const Front *a, const Front *b) {
    const double xa = a->x(t), xb = b->x(t);
    return xa != xb ? xa < xb : a->speed < b->speed;
  });
  ProfileBuilder pb(p, t, left);
  for (const Front *f : alive) {
    pb.mass(f->x(t), f->beta(t));
    pb.jump(f->x(t), f->right);
  }
  return pb.finish();
}

// ---------------------------------------------------------------------------
// Timeline
// ---------------------------------------------------------------------------

enum class Engine { closed_form, front_tracking };

inline const char *to_string(Engine e) {
  return e == Engine::closed_form ? "closed_form" : "front_tracking";
}

struct InteractionTimeline {
  PerturbedData data;
  InteractionCase tag;
  Engine engine;
  std::vector<Event> events;
  WaveFan final_fan;               ///< solution of the outer Riemann problem
  std::vector<CurvedWave> curves;
  bool terminates;                 ///< interactions end in finite time
  std::function<Profile(double)> profile_at;
  std::vector<Front> fronts;       ///< populated by the front tracker only

  double max_event_time() const {
    double m = 0.0;
    for (const auto &e : events) m = std::max(m, e.point.t);
    return m;
  }
};

namespace detail {

/// Wave speeds and intermediate states of the two sub-problems.
struct SubWaves {
  State p1, p2;         // intermediate states of the two sub-problems
  double mu1, mu2;      // contact speeds
};

inline SubWaves sub_waves(const PerturbedData &d) {
  const Params &p = d.params;
  return {intermediate_state(d.first()), intermediate_state(d.second()),
          lambda1(d.left, p), lambda1(d.middle, p)};
}

inline InteractionTimeline timeline_js_js(const PerturbedData &d) {
  const Params p = d.params;
  const double eps = d.epsilon;
  const auto sw = sub_waves(d);
  const Shock s1{shock_speed(sw.p1, d.middle, p), sw.p1, d.middle};
  const Contact j2{sw.mu2, d.middle, sw.p2};
  const Shock s2{shock_speed(sw.p2, d.right, p), sw.p2, d.right};
  const auto e1 = interact_shock_contact(s1, -eps, j2, eps, p, d.h_tol);
  const State p3 = intermediate_state(d.outer());
  const Shock s3{shock_speed(p3, sw.p2, p), p3, sw.p2};
  const Point o1 = e1.event.point;
  const auto e2 = interact_shock_shock_chase(s3, o1, s2, {eps, 0.0}, p, d.h_tol);
  const Point o2 = e2.event.point;
  const double s4 = shock_speed(p3, d.right, p);
  const State L = d.left, M = d.middle, R = d.right;
  auto prof = [=](double t) {
    ProfileBuilder b(p, t, L);
    b.jump(-eps + sw.mu1 * t, sw.p1);
    if (t < o1.t) {
      b.jump(-eps + s1.speed * t, M).jump(eps + sw.mu2 * t, sw.p2).jump(eps + s2.speed * t, R);
    } else if (t < o2.t) {
      b.jump(o1.x + sw.mu1 * (t - o1.t), p3).jump(o1.x + s3.speed * (t - o1.t), sw.p2)
          .jump(eps + s2.speed * t, R);
    } else {
      b.jump(o1.x + sw.mu1 * (t - o1.t), p3).jump(o2.x + s4 * (t - o2.t), R);
    }
    return b.finish();
  };
  return {d, InteractionCase::js_js, Engine::closed_form, {e1.event, e2.event},
          solve(d.outer()), {}, true, prof, {}};
}

inline InteractionTimeline timeline_js_jr(const PerturbedData &d) {
  const Params p = d.params;
  const double eps = d.epsilon;
  const auto sw = sub_waves(d);
  const Shock s1{shock_speed(sw.p1, d.middle, p), sw.p1, d.middle};
  const Contact j2{sw.mu2, d.middle, sw.p2};
  const auto e1 = interact_shock_contact(s1, -eps, j2, eps, p, d.h_tol);
  const State p3 = intermediate_state(d.outer());
  const double s3 = shock_speed(p3, sw.p2, p);
  const double xi2 = lambda2(sw.p2, p);
  const Point o1 = e1.event.point;
  const auto pt2 = catch_up({o1.x, o1.t, s3}, {eps, 0.0, xi2});
  if (!pt2) throw GeometryError("JS-JR: shock does not reach the rarefaction tail");
  const Point o2 = *pt2;
  auto sif = std::make_shared<ShockInFan>(shock_through_fan(o2, p3, d.right, eps, p));
  std::vector<Event> events{e1.event, {o2, {"S3", "R2"}, {"S3*"}, std::nullopt}};
  const bool exits = sif->exit.has_value();
  Point o3{inf, inf};
  if (exits) {
    o3 = *sif->exit;
    events.push_back({o3, {"S3*", "R2"}, {"S4"}, std::nullopt});
  }
  const double s4 = exits ? shock_speed(p3, d.right, p) : 0.0;
  const State L = d.left, M = d.middle, R = d.right;
  const double xi_head = lambda2(R, p);
  auto prof = [=](double t) {
    ProfileBuilder b(p, t, L);
    b.jump(-eps + sw.mu1 * t, sw.p1);
    if (t < o1.t) {
      b.jump(-eps + s1.speed * t, M).jump(eps + sw.mu2 * t, sw.p2);
      b.fan(eps + xi2 * t, eps, t, R).jump(eps + xi_head * t, R);
    } else if (t < o2.t) {
      b.jump(o1.x + sw.mu1 * (t - o1.t), p3).jump(o1.x + s3 * (t - o1.t), sw.p2);
      b.fan(eps + xi2 * t, eps, t, R).jump(eps + xi_head * t, R);
    } else if (t < o3.t) {
      b.jump(o1.x + sw.mu1 * (t - o1.t), p3);
      b.fan(sif->curve.x_of_t(t), eps, t, R).jump(eps + xi_head * t, R);
    } else {
      b.jump(o1.x + sw.mu1 * (t - o1.t), p3).jump(o3.x + s4 * (t - o3.t), R);
    }
    return b.finish();
  };
  return {d, InteractionCase::js_jr, Engine::closed_form, std::move(events), solve(d.outer()),
          {sif->curve}, exits, prof, {}};
}

inline InteractionTimeline timeline_ds_jr(const PerturbedData &d) {
  const Params p = d.params;
  const double eps = d.epsilon;
  auto split = std::make_shared<DeltaContactSplit>(delta_contact_split(d));
  const double w1l = lambda1(d.left, p);
  const Point o1 = split->event.point;
  std::vector<Event> events{split->event};
  const bool exits = split->shock.exit.has_value();
  Point o3{inf, inf};
  if (exits) {
    o3 = *split->shock.exit;
    events.push_back({o3, {"S3*", "R2"}, {"S4"}, std::nullopt});
  }
  const State m = split->intermediate;
  const double s4 = exits ? shock_speed(m, d.right, p) : 0.0;
  const State L = d.left, M = d.middle, R = d.right;
  const double bm = d.middle.b;
  const double xi_head = lambda2(R, p);
  auto prof = [=](double t) {
    ProfileBuilder b(p, t, L);
    if (t < o1.t) {
      b.mass(-eps + w1l * t, bm * w1l * t).jump(-eps + w1l * t, M);
      b.fan(eps, eps, t, R).jump(eps + xi_head * t, R);
    } else if (t < o3.t) {
      const double xd = split->delta_contact.at(t);
      b.mass(xd, split->frozen_strength).jump(xd, m);
      b.fan(split->shock.curve.x_of_t(t), eps, t, R).jump(eps + xi_head * t, R);
    } else {
      const double xd = split->delta_contact.at(t);
      b.mass(xd, split->frozen_strength).jump(xd, m).jump(o3.x + s4 * (t - o3.t), R);
    }
    return b.finish();
  };
  CurvedWave c = split->shock.curve;
  return {d, InteractionCase::ds_jr, Engine::closed_form, std::move(events), solve(d.outer()),
          {c}, exits, prof, {}};
}

inline InteractionTimeline timeline_js_ds(const PerturbedData &d) {
  const Params p = d.params;
  const double eps = d.epsilon;
  const auto mg = shock_overtakes_delta(d);
  const State p1 = mg.left;
  const double mu1 = lambda1(d.left, p);
  const double s1 = shock_speed(p1, d.middle, p);
  const double sd2 = lambda1(d.middle, p);
  const State L = d.left, M = d.middle, R = d.right;
  auto prof = [=](double t) {
    ProfileBuilder b(p, t, L);
    b.jump(-eps + mu1 * t, p1);
    if (t < mg.event.point.t) {
      b.jump(-eps + s1 * t, M).mass(eps + sd2 * t, R.b * sd2 * t).jump(eps + sd2 * t, R);
    } else {
      const double x = mg.delta.at(t);
      b.mass(x, mg.strength_at_event + mg.strength_rate * (t - mg.event.point.t)).jump(x, R);
    }
    return b.finish();
  };
  return {d, InteractionCase::js_ds, Engine::closed_form, {mg.event}, solve(d.outer()), {}, true,
          prof, {}};
}

inline InteractionTimeline timeline_jr_ds(const PerturbedData &d) {
  const Params p = d.params;
  const double eps = d.epsilon;
  auto df = std::make_shared<DeltaInFan>(delta_through_fan(d));
  const double mu1 = lambda1(d.left, p);
  const State p1 = df->left_after;
  const double xi_tail = lambda2(p1, p), xi_head = lambda2(d.middle, p);
  const double sd2 = lambda1(d.middle, p);
  const double t1 = df->entry.point.t, t2 = df->exit.point.t;
  const double beta2 = *df->exit.delta_strength;
  const State L = d.left, M = d.middle, R = d.right;
  auto prof = [=](double t) {
    ProfileBuilder b(p, t, L);
    b.jump(-eps + mu1 * t, p1);
    if (t < t1) {
      b.fan(-eps + xi_tail * t, -eps, t, M).jump(-eps + xi_head * t, M);
      b.mass(eps + sd2 * t, R.b * sd2 * t).jump(eps + sd2 * t, R);
    } else if (t < t2) {
      const double x = df->curve.x_of_t(t);
      b.fan(-eps + xi_tail * t, -eps, t, M);
      b.mass(x, df->curve.strength_of_t(t)).jump(x, R);
    } else {
      const double x = df->delta_after.at(t);
      b.mass(x, beta2 + df->strength_rate_after * (t - t2)).jump(x, R);
    }
    return b.finish();
  };
  return {d, InteractionCase::jr_ds, Engine::closed_form, {df->entry, df->exit},
          solve(d.outer()), {df->curve}, true, prof, {}};
}

/// Closed forms assume every wave named in the resolver is present.
inline bool closed_form_applicable(const PerturbedData &d, InteractionCase c) {
  switch (c) {
  case InteractionCase::js_js:
  case InteractionCase::js_jr: {
    const State p2 = intermediate_state(d.second());
    return !nearly_equal(p2, d.middle, 1e-12);
  }
  case InteractionCase::ds_jr:
  case InteractionCase::js_ds:
  case InteractionCase::jr_ds:
    return true;
  default:
    return false;
  }
}

} // namespace detail

inline InteractionTimeline run_front_tracking(const PerturbedData &d, double t_max,
                                              const TrackerOptions &opt = {}) {
  auto res = track_fronts(d, t_max, opt);
  auto fronts = std::make_shared<std::vector<Front>>(res.fronts);
  const State L = d.left;
  const Params p = d.params;
  InteractionTimeline tl{d,
                         classify_case(d),
                         Engine::front_tracking,
                         std::move(res.events),
                         solve(d.outer()),
                         {},
                         true,
                         [fronts, L, p](double t) { return profile_of_fronts(*fronts, L, p, t); },
                         res.fronts};
  return tl;
}

/**
 * @brief Full interaction history up to @p t_max.
 *
 * Cases with closed-form resolvers return exact events and curves; the rest
 * (and any case when opt.force_generic is set) use the front tracker.
 */
inline InteractionTimeline run_timeline(const PerturbedData &d, double t_max,
                                        const TrackerOptions &opt = {}) {
  const InteractionCase c = classify_case(d);
  if (opt.force_generic || !detail::closed_form_applicable(d, c))
    return run_front_tracking(d, t_max, opt);
  switch (c) {
  case InteractionCase::js_js: return detail::timeline_js_js(d);
  case InteractionCase::js_jr: return detail::timeline_js_jr(d);
  case InteractionCase::ds_jr: return detail::timeline_ds_jr(d);
  case InteractionCase::js_ds: return detail::timeline_js_ds(d);
  case InteractionCase::jr_ds: return detail::timeline_jr_ds(d);
  default: return run_front_tracking(d, t_max, opt);
  }
}

// ---------------------------------------------------------------------------
// Vanishing perturbation
// ---------------------------------------------------------------------------

struct EpsilonRow {
  double epsilon;
  double max_event_time;
  double l1;                  ///< regular-part distance to the outer Riemann solution at t_eval
  double strength_error;      ///< |total delta mass - outer delta mass| at t_eval
  double strength_rate_error; ///< |late-time mass growth rate - outer rate|
};

struct EpsilonReport {
  double t_eval;
  std::vector<EpsilonRow> rows;
  bool l1_monotone;
  bool strength_monotone;
};

/// Domain containing every wave of the timeline and of the outer fan at time t.
inline std::pair<double, double> wave_domain(const PerturbedData &d, double t) {
  const Params &p = d.params;
  const double smax = std::max({lambda2(d.left, p), lambda2(d.middle, p), lambda2(d.right, p)});
  return {-d.epsilon - 1.0, d.epsilon + 2.0 * smax * t + 1.0};
}

inline EpsilonReport epsilon_limit_report(const PerturbedData &d, const std::vector<double> &epsilons,
                                          double t_eval, const TrackerOptions &opt = {}) {
  if (epsilons.size() < 2) throw InvalidData("epsilon_limit_report: need at least two epsilons");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw InvalidData("epsilon_limit_report: epsilon must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw InvalidData("epsilon_limit_report: epsilons must decrease");
  }
  EpsilonReport rep{t_eval, {}, true, true};
  const WaveFan outer = solve(d.outer());
  double outer_rate = 0.0;
  for (const auto &w : outer.waves)
    if (const auto *ds = std::get_if<DeltaShock>(&w)) outer_rate = ds->strength_rate;
  for (double eps : epsilons) {
    PerturbedData de = d;
    de.epsilon = eps;
    const double t_late = 2.0 * t_eval;
    const auto tl = run_timeline(de, t_late, opt);
    const auto [x_lo, x_hi] = wave_domain(de, t_late);
    const Profile a = tl.profile_at(t_eval);
    const Profile b = profile_of(outer, t_eval);
    const double m1 = a.total_mass(), m2 = tl.profile_at(t_late).total_mass();
    rep.rows.push_back({eps, tl.max_event_time(), l1_distance(a, b, x_lo, x_hi),
                        std::abs(m1 - b.total_mass()),
                        std::abs((m2 - m1) / (t_late - t_eval) - outer_rate)});
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    rep.l1_monotone = rep.l1_monotone && rep.rows[i].l1 <= rep.rows[i - 1].l1;
    rep.strength_monotone =
        rep.strength_monotone && rep.rows[i].strength_error <= rep.rows[i - 1].strength_error;
  }
  return rep;
}

} // namespace thinfilm
