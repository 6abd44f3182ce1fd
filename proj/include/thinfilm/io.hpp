/**
 * @file io.hpp
 * @brief JSON encoding/decoding of solver inputs and results, and CSV writers
 * with 17 significant digits.
 *
 * Non-finite numbers are written as the JSON strings "inf", "-inf" and "nan".
 */
#pragma once

#include "interactions.hpp"
#include "limits.hpp"
#include "numerics.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace thinfilm::io {

using json = nlohmann::json;

/// 17 significant digits, enough to parse back to the same double.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number(const json &j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return inf;
    if (s == "-inf") return -inf;
    if (s == "nan") return std::nan("");
  }
  throw InvalidData("expected a number, got " + j.dump());
}

/// Field @p key of @p j, or InvalidData naming the key.
inline const json &field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidData(std::string("missing field '") + key + "'");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

inline json encode(const State &u) { return json::array({number(u.h), number(u.b)}); }

inline State decode_state(const json &j) {
  if (!j.is_array() || j.size() != 2) throw InvalidData("state must be [h, b], got " + j.dump());
  return {number(j[0]), number(j[1])};
}

inline json encode(const Params &p) { return {{"alpha", p.alpha()}, {"kappa", p.kappa()}}; }

inline Params decode_params(const json &j) {
  return Params(number(field(j, "alpha")), number(field(j, "kappa")));
}

inline json encode(const RiemannData &d) {
  return {{"left", encode(d.left)}, {"right", encode(d.right)}, {"params", encode(d.params)},
          {"h_tol", d.h_tol}};
}

inline RiemannData decode_riemann(const json &j) {
  RiemannData d{decode_state(field(j, "left")), decode_state(field(j, "right")),
                decode_params(field(j, "params"))};
  if (j.contains("h_tol")) d.h_tol = number(j["h_tol"]);
  return d;
}

inline json encode(const PerturbedData &d) {
  return {{"epsilon", d.epsilon},         {"left", encode(d.left)},
          {"middle", encode(d.middle)},   {"right", encode(d.right)},
          {"params", encode(d.params)},   {"h_tol", d.h_tol}};
}

inline PerturbedData decode_perturbed(const json &j) {
  PerturbedData d{number(field(j, "epsilon")), decode_state(field(j, "left")),
                  decode_state(field(j, "middle")), decode_state(field(j, "right")),
                  decode_params(field(j, "params"))};
  if (j.contains("h_tol")) d.h_tol = number(j["h_tol"]);
  return d;
}

inline json encode(const SchemeConfig &c) {
  return {{"scheme", to_string(c.scheme)}, {"cfl", c.cfl},         {"t_end", c.t_end},
          {"h_tol", c.h_tol},              {"max_steps", c.max_steps}};
}

inline Scheme decode_scheme(const json &j) {
  const auto s = j.get<std::string>();
  if (s == "godunov") return Scheme::godunov;
  if (s == "llf") return Scheme::llf;
  throw InvalidData("unknown scheme '" + s + "'");
}

// ---------------------------------------------------------------------------
// Wave fans
// ---------------------------------------------------------------------------

inline json encode(const Wave &w) {
  json j{{"kind", wave_kind(w)}};
  std::visit(
      [&](const auto &v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Rarefaction>) {
          j["xi_lo"] = number(v.xi_lo);
          j["xi_hi"] = number(v.xi_hi);
          j["anchor"] = encode(v.anchor);
        } else if constexpr (std::is_same_v<T, CompositeJR>) {
          j["xi_hi"] = number(v.xi_hi);
          j["left"] = encode(v.left);
          j["right"] = encode(v.right);
        } else {
          j["speed"] = number(v.speed);
          if constexpr (std::is_same_v<T, DeltaShock>) j["strength_rate"] = number(v.strength_rate);
          j["left"] = encode(v.left);
          j["right"] = encode(v.right);
        }
      },
      w);
  return j;
}

inline Wave decode_wave(const json &j) {
  const auto kind = field(j, "kind").get<std::string>();
  auto st = [&](const char *k) { return decode_state(field(j, k)); };
  auto nb = [&](const char *k) { return number(field(j, k)); };
  if (kind == "contact") return Contact{nb("speed"), st("left"), st("right")};
  if (kind == "shock") return Shock{nb("speed"), st("left"), st("right")};
  if (kind == "rarefaction") return Rarefaction{nb("xi_lo"), nb("xi_hi"), st("anchor")};
  if (kind == "delta_shock")
    return DeltaShock{nb("speed"), nb("strength_rate"), st("left"), st("right")};
  if (kind == "composite_jr") return CompositeJR{nb("xi_hi"), st("left"), st("right")};
  throw InvalidData("unknown wave kind '" + kind + "'");
}

inline RiemannCase decode_riemann_case(const std::string &s) {
  for (auto c : {RiemannCase::j_r, RiemannCase::j_s, RiemannCase::pure_j, RiemannCase::composite_jr,
                 RiemannCase::delta_shock})
    if (s == to_string(c)) return c;
  throw InvalidData("unknown Riemann case '" + s + "'");
}

inline json encode(const WaveFan &f) {
  json w = json::array();
  for (const auto &x : f.waves) w.push_back(encode(x));
  json j{{"data", encode(f.data)}, {"case", to_string(f.tag)}, {"waves", w}};
  j["intermediate"] = f.intermediate ? encode(*f.intermediate) : json(nullptr);
  return j;
}

inline WaveFan decode_fan(const json &j) {
  WaveFan f{decode_riemann(field(j, "data")), decode_riemann_case(field(j, "case").get<std::string>()),
            {}, std::nullopt};
  for (const auto &w : field(j, "waves")) f.waves.push_back(decode_wave(w));
  if (j.contains("intermediate") && !j["intermediate"].is_null())
    f.intermediate = decode_state(j["intermediate"]);
  return f;
}

// ---------------------------------------------------------------------------
// Interaction timelines
// ---------------------------------------------------------------------------

inline json encode(const Event &e) {
  json j{{"x", number(e.point.x)}, {"t", number(e.point.t)}, {"incoming", e.incoming},
         {"outgoing", e.outgoing}};
  j["delta_strength"] = e.delta_strength ? number(*e.delta_strength) : json(nullptr);
  return j;
}

inline Event decode_event(const json &j) {
  Event e{{number(field(j, "x")), number(field(j, "t"))},
          field(j, "incoming").get<std::vector<std::string>>(),
          field(j, "outgoing").get<std::vector<std::string>>(),
          std::nullopt};
  if (j.contains("delta_strength") && !j["delta_strength"].is_null())
    e.delta_strength = number(j["delta_strength"]);
  return e;
}

/// Curved wave path sampled at fixed times.
struct CurveSamples {
  std::string kind;
  double t_begin, t_end;
  std::vector<double> t, x, strength;
  friend bool operator==(const CurveSamples &, const CurveSamples &) = default;
};

/// Serializable part of an interaction timeline.
struct TimelineRecord {
  PerturbedData data;
  std::string tag;
  std::string engine;
  bool terminates;
  std::vector<Event> events;
  WaveFan final_fan;
  std::vector<CurveSamples> curves;
};

/// Sample each curve at @p n times between its start and min(end, t_max).
inline TimelineRecord record_of(const InteractionTimeline &tl, double t_max, int n = 33) {
  TimelineRecord r{tl.data, to_string(tl.tag), to_string(tl.engine), tl.terminates,
                   tl.events, tl.final_fan, {}};
  for (const auto &c : tl.curves) {
    CurveSamples s{to_string(c.kind), c.t_begin, c.t_end, {}, {}, {}};
    const double hi = std::min(c.t_end, std::max(t_max, c.t_begin));
    for (int i = 0; i < n; ++i) {
      const double t = c.t_begin + (hi - c.t_begin) * i / (n - 1);
      s.t.push_back(t);
      s.x.push_back(c.x_of_t(t));
      s.strength.push_back(c.strength_of_t ? c.strength_of_t(t) : 0.0);
    }
    r.curves.push_back(std::move(s));
  }
  return r;
}

inline json encode_numbers(const std::vector<double> &v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline std::vector<double> decode_numbers(const json &j) {
  std::vector<double> v;
  for (const auto &x : j) v.push_back(number(x));
  return v;
}

inline json encode(const TimelineRecord &r) {
  json ev = json::array(), cv = json::array();
  for (const auto &e : r.events) ev.push_back(encode(e));
  for (const auto &c : r.curves)
    cv.push_back({{"kind", c.kind},
                  {"t_begin", number(c.t_begin)},
                  {"t_end", number(c.t_end)},
                  {"t", encode_numbers(c.t)},
                  {"x", encode_numbers(c.x)},
                  {"strength", encode_numbers(c.strength)}});
  return {{"data", encode(r.data)}, {"case", r.tag},       {"engine", r.engine},
          {"terminates", r.terminates}, {"events", ev},     {"final_fan", encode(r.final_fan)},
          {"curves", cv}};
}

inline TimelineRecord decode_timeline(const json &j) {
  TimelineRecord r{decode_perturbed(field(j, "data")), field(j, "case").get<std::string>(),
                   field(j, "engine").get<std::string>(), field(j, "terminates").get<bool>(),
                   {}, decode_fan(field(j, "final_fan")), {}};
  for (const auto &e : field(j, "events")) r.events.push_back(decode_event(e));
  for (const auto &c : field(j, "curves"))
    r.curves.push_back({field(c, "kind").get<std::string>(), number(field(c, "t_begin")),
                        number(field(c, "t_end")), decode_numbers(field(c, "t")),
                        decode_numbers(field(c, "x")), decode_numbers(field(c, "strength"))});
  return r;
}

// ---------------------------------------------------------------------------
// Diagnostics and tables
// ---------------------------------------------------------------------------

inline json encode(const Diagnostics &d) {
  return {{"steps", d.steps},
          {"times", encode_numbers(d.times)},
          {"mass_h", encode_numbers(d.mass_h)},
          {"mass_b", encode_numbers(d.mass_b)},
          {"delta_mass", encode_numbers(d.probe)},
          {"max_conservation_defect", number(d.max_conservation_defect)},
          {"stagnation_warning", d.stagnation_warning}};
}

inline Diagnostics decode_diagnostics(const json &j) {
  Diagnostics d;
  d.steps = field(j, "steps").get<long>();
  d.times = decode_numbers(field(j, "times"));
  d.mass_h = decode_numbers(field(j, "mass_h"));
  d.mass_b = decode_numbers(field(j, "mass_b"));
  d.probe = decode_numbers(field(j, "delta_mass"));
  d.max_conservation_defect = number(field(j, "max_conservation_defect"));
  d.stagnation_warning = field(j, "stagnation_warning").get<bool>();
  return d;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Row x, h, b, w1, w2; the invariants are blank where h < h_tol.
inline void write_state_row(std::ostream &os, double x, const State &u, const Params &p,
                            double h_tol) {
  os << num(x) << ',' << num(u.h) << ',' << num(u.b) << ',';
  if (u.h >= h_tol) {
    const auto w = riemann_invariants(u, p);
    os << num(w.w1) << ',' << num(w.w2);
  } else {
    os << ',';
  }
  os << '\n';
}

inline void write_field_csv(std::ostream &os, const FVField &f, const Params &p, double h_tol) {
  os << "x,h,b,w1,w2\n";
  for (int j = 0; j < f.grid.n_cells; ++j) write_state_row(os, f.grid.center(j), f.at(j), p, h_tol);
}

/// Exact solution at time t on n equally spaced points of [x_lo, x_hi], with
/// any delta position inserted; columns x, h, b, singular_weight.
inline void write_riemann_csv(std::ostream &os, const WaveFan &fan, double t, double x_lo,
                              double x_hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(n == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (n - 1));
  for (const auto &w : fan.waves)
    if (const auto *d = std::get_if<DeltaShock>(&w))
      if (d->speed * t >= x_lo && d->speed * t <= x_hi) xs.push_back(d->speed * t);
  std::sort(xs.begin(), xs.end());
  os << "x,h,b,singular_weight\n";
  for (double x : xs) {
    SampledValue v = t > 0.0 ? sample(fan, x / t) : SampledValue{x < 0.0 ? fan.data.left : fan.data.right};
    // The Dirac weight at time t is strength_rate * t.
    os << num(x) << ',' << num(v.regular.h) << ',' << num(v.regular.b) << ','
       << num(v.singular_weight * t) << '\n';
  }
}

inline void write_profile_csv(std::ostream &os, const Profile &prof, double x_lo, double x_hi, int n,
                              double h_tol) {
  os << "x,h,b,w1,w2\n";
  for (int i = 0; i < n; ++i) {
    const double x = n == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (n - 1);
    write_state_row(os, x, prof.state_at(x), prof.params, h_tol);
  }
}

inline void write_limits_csv(std::ostream &os, const LimitTable &t) {
  os << "value,case,L1,dsigma,dbeta_rate,weak_1,weak_2,weak_3\n";
  for (const auto &r : t.rows)
    os << num(r.value) << ',' << to_string(r.tag) << ',' << num(r.l1) << ',' << num(r.dsigma) << ','
       << num(r.dbeta_rate) << ',' << num(r.weak[0]) << ',' << num(r.weak[1]) << ','
       << num(r.weak[2]) << '\n';
}

} // namespace thinfilm::io
