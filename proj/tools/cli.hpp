/**
 * @file cli.hpp
 * @brief Command-line driver: subcommands riemann, godunov, llf, interact,
 * limits and entropy-check.
 *
 * Exit codes: 0 ok, 1 I/O, 2 invalid input, 3 scheme failure, 4 event budget
 * exhausted, 5 entropy check failed.
 */
#pragma once

#include <thinfilm/entropy.hpp>
#include <thinfilm/io.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace thinfilm::cli {

enum ExitCode { ok = 0, io_error = 1, invalid_input = 2, scheme_failure = 3, budget = 4, entropy_failure = 5 };

struct IoError : Error {
  using Error::Error;
};

/// Parse "h,b" into a state; any trailing text is an error.
inline State parse_state(const std::string &s) {
  const auto comma = s.find(',');
  auto parse = [&](std::string_view v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
      throw InvalidData("malformed state '" + s + "', expected h,b");
    return x;
  };
  if (comma == std::string::npos) throw InvalidData("malformed state '" + s + "', expected h,b");
  const std::string_view all(s);
  const State u{parse(all.substr(0, comma)), parse(all.substr(comma + 1))};
  require_valid(u, "state");
  return u;
}

/// Text sink: a file when @p path is non-empty, else @p fallback.
class Sink {
public:
  Sink(const std::string &path, std::ostream &fallback) : path_(path), os_(&fallback) {}
  std::ostream &stream() { return path_.empty() ? *os_ : buf_; }
  void commit() {
    if (path_.empty()) return;
    std::ofstream f(path_, std::ios::binary);
    f << buf_.str();
    if (!f) throw IoError("cannot write '" + path_ + "'");
  }

private:
  std::string path_;
  std::ostream *os_;
  std::ostringstream buf_;
};

inline void write_text(const std::string &path, const std::string &text, std::ostream &fallback) {
  Sink s(path, fallback);
  s.stream() << text;
  s.commit();
}

inline std::string suffixed(const std::string &prefix, const std::string &ext) {
  return prefix.empty() ? std::string() : prefix + ext;
}

inline io::json read_json(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read '" + path + "'");
  try {
    return io::json::parse(f);
  } catch (const io::json::exception &e) {
    throw InvalidData("config '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

struct RiemannArgs {
  double alpha = 0.5, kappa = 0.0, t = 1.0;
  std::string left, right, out;
  int samples = 1001;
  std::optional<double> x_min, x_max;
};

inline int cmd_riemann(const RiemannArgs &a, std::ostream &out) {
  const RiemannData d{parse_state(a.left), parse_state(a.right), Params(a.alpha, a.kappa)};
  if (!(a.t > 0.0)) throw InvalidData("--t must be positive");
  if (a.samples < 2) throw InvalidData("--samples must be at least 2");
  const WaveFan fan = solve(d);
  double smax = 0.0;
  for (const auto &w : fan.waves) smax = std::max(smax, wave_span(w).second);
  const double lo = a.x_min.value_or(-1.0), hi = a.x_max.value_or(1.25 * smax * a.t + 1.0);
  if (!(hi > lo)) throw InvalidData("--xmax must exceed --xmin");
  Sink csv(suffixed(a.out, ".csv"), out);
  io::write_riemann_csv(csv.stream(), fan, a.t, lo, hi, a.samples);
  csv.commit();
  if (!a.out.empty()) {
    io::json j = io::encode(fan);
    j["t"] = a.t;
    write_text(a.out + ".json", j.dump(2) + "\n", out);
  }
  return ok;
}

struct SchemeArgs {
  std::string config, out;
  int record_every = 0;
};

inline int cmd_scheme(Scheme scheme, const SchemeArgs &a, std::ostream &out) {
  const io::json cfg = read_json(a.config);
  try {
    SchemeConfig sc;
    sc.scheme = scheme;
    if (cfg.contains("scheme") && io::decode_scheme(cfg["scheme"]) != scheme)
      throw InvalidData("config scheme does not match the subcommand");
    if (cfg.contains("cfl")) sc.cfl = io::number(cfg["cfl"]);
    if (cfg.contains("t_end")) sc.t_end = io::number(cfg["t_end"]);
    if (cfg.contains("h_tol")) sc.h_tol = io::number(cfg["h_tol"]);
    if (cfg.contains("max_steps")) sc.max_steps = cfg["max_steps"].get<long>();
    sc.validate();
    const Params p(io::number(io::field(cfg, "alpha")), io::number(io::field(cfg, "kappa")));
    const auto &gj = io::field(cfg, "grid");
    const Grid g(io::number(io::field(gj, "xmin")), io::number(io::field(gj, "xmax")),
                 io::field(gj, "ncells").get<int>());
    const auto &init = io::field(cfg, "initial");
    const State L = io::decode_state(io::field(init, "left")), R = io::decode_state(io::field(init, "right"));
    require_valid(L, "initial.left");
    require_valid(R, "initial.right");
    std::optional<RiemannData> rd;
    std::optional<PerturbedData> pd;
    FVField f0 = [&] {
      if (init.contains("middle")) {
        pd = PerturbedData{io::number(io::field(init, "epsilon")), L, io::decode_state(init["middle"]), R, p,
                           sc.h_tol};
        require_valid(pd->middle, "initial.middle");
        if (!(pd->epsilon > 0.0)) throw InvalidData("initial.epsilon must be positive");
        return initial_field(*pd, g);
      }
      rd = RiemannData{L, R, p, sc.h_tol};
      return initial_field(*rd, g);
    }();
    RunOptions ro;
    ro.record_every = a.record_every;
    std::optional<std::pair<double, double>> window;
    if (cfg.contains("delta_window")) {
      const auto w = io::decode_numbers(cfg["delta_window"]);
      if (w.size() != 2) throw InvalidData("delta_window must be [x_lo, x_hi]");
      window = std::pair{w[0], w[1]};
    } else if (rd && classify(*rd) == RiemannCase::delta_shock) {
      window = std::pair{std::max(g.x_min, 0.0), g.x_max};
    }
    if (window) {
      delta_mass(f0, *window, {L, R}); // validates the window up front
      ro.probe = [&](const FVField &f) { return delta_mass(f, *window, {L, R}); };
    }
    const RunResult r = run(f0, sc, p, ro);
    Sink csv(suffixed(a.out, ".csv"), out);
    io::write_field_csv(csv.stream(), r.field, p, sc.h_tol);
    csv.commit();
    if (!a.out.empty()) {
      io::json j{{"config", cfg},
                 {"scheme", to_string(scheme)},
                 {"cfl", sc.cfl},
                 {"domain", {g.x_min, g.x_max}},
                 {"ncells", g.n_cells},
                 {"dx", g.dx()},
                 {"t_final", r.field.t},
                 {"diagnostics", io::encode(r.diagnostics)}};
      io::json errs = io::json::object();
      const WaveFan exact = solve(rd ? *rd : pd->outer());
      errs[rd ? "l1_exact" : "l1_outer_fan"] = io::number(l1_error(r.field, profile_of(exact, r.field.t)));
      j["errors"] = errs;
      write_text(a.out + ".json", j.dump(2) + "\n", out);
    }
    return ok;
  } catch (const io::json::exception &e) {
    throw InvalidData(std::string("config: ") + e.what());
  }
}

struct InteractArgs {
  double epsilon = 0.1, alpha = 0.5, kappa = 0.0, t_max = 1.0, h_tol = default_h_tol;
  std::string left, middle, right, out;
  std::vector<double> times;
  int fan_fronts = 64, budget = 10000, samples = 1001;
  bool generic = false;
};

inline int cmd_interact(const InteractArgs &a, std::ostream &out) {
  const PerturbedData d{a.epsilon, parse_state(a.left), parse_state(a.middle), parse_state(a.right),
                        Params(a.alpha, a.kappa), a.h_tol};
  if (!(a.t_max > 0.0)) throw InvalidData("--t-max must be positive");
  for (double t : a.times)
    if (!(t > 0.0 && t <= a.t_max)) throw InvalidData("--times must lie in (0, t-max]");
  TrackerOptions opt;
  opt.fan_fronts = a.fan_fronts;
  opt.event_budget = a.budget;
  opt.force_generic = a.generic;
  const auto tl = run_timeline(d, a.t_max, opt);
  io::json j = io::encode(io::record_of(tl, a.t_max));
  j["t_max"] = a.t_max;
  j["times"] = a.times;
  write_text(suffixed(a.out, ".json"), j.dump(2) + "\n", out);
  const double reach = wave_domain(d, a.t_max).second;
  for (std::size_t i = 0; i < a.times.size() && !a.out.empty(); ++i) {
    const double t = a.times[i];
    Sink csv(a.out + "_t" + std::to_string(i) + ".csv", out);
    io::write_profile_csv(csv.stream(), tl.profile_at(t), -a.epsilon - 1.0, reach, a.samples, a.h_tol);
    csv.commit();
  }
  return ok;
}

struct LimitsArgs {
  std::string vary = "kappa", left, right, out;
  std::vector<double> values{1.0, 0.5, 0.1, 0.01, 0.001};
  std::optional<double> fixed;
  double t = 1.0;
};

inline int cmd_limits(const LimitsArgs &a, std::ostream &out) {
  LimitKind k;
  if (a.vary == "kappa") k = LimitKind::vanishing_gravity;
  else if (a.vary == "alpha") k = LimitKind::vanishing_tension;
  else throw InvalidData("--vary must be kappa or alpha");
  LimitStudy s = default_study(k, {parse_state(a.left), parse_state(a.right), limit_params(k)}, a.values, a.t);
  if (a.fixed) s.fixed = *a.fixed;
  Sink csv(suffixed(a.out, ".csv"), out);
  io::write_limits_csv(csv.stream(), convergence_table(s));
  csv.commit();
  return ok;
}

struct EntropyArgs {
  double alpha = 0.5, kappa = 1.0, h_lo = 0.1, h_hi = 3.0;
  int grid = 50;
  std::string out;
};

inline int cmd_entropy_check(const EntropyArgs &a, std::ostream &out) {
  const Params p(a.alpha, a.kappa);
  if (a.grid < 2 || !(a.h_lo > 0.0) || !(a.h_hi > a.h_lo)) throw InvalidData("bad state grid");
  std::vector<State> states;
  std::vector<double> w1s, ps;
  for (int i = 0; i < a.grid; ++i)
    for (int j = 0; j < a.grid; ++j) {
      const State u{a.h_lo + (a.h_hi - a.h_lo) * i / (a.grid - 1), a.h_lo + (a.h_hi - a.h_lo) * j / (a.grid - 1)};
      states.push_back(u);
      const auto w = riemann_invariants(u, p);
      w1s.push_back(w.w1);
      ps.push_back(3.0 * p.alpha() * w.w2 + p.kappa());
    }
  std::vector<EntropyPair> pairs{canonical_pair()};
  for (auto &e : pair_catalog()) pairs.push_back(std::move(e));
  bool failed = false;
  io::json rows = io::json::array();
  for (const auto &e : pairs) {
    const FamilyVerdict v = check_sufficient_family(e, p, w1s, ps);
    double min_r1 = inf, min_r2 = inf, max_res = 0.0;
    for (const State &u : states) {
      const auto f = convexity_forms(u, e, p);
      min_r1 = std::min(min_r1, f.along_r1);
      min_r2 = std::min(min_r2, f.along_r2);
      const double scale = 1.0 + std::abs(entropy_flux(u, e, p));
      max_res = std::max(max_res, compatibility_residual(u, e, p) / scale);
    }
    const bool positive = min_r1 > 0.0 && min_r2 > 0.0;
    if (v == FamilyVerdict::convex && !positive) failed = true;
    rows.push_back({{"pair", e.name},
                    {"verdict", to_string(v)},
                    {"min_form_r1", io::number(min_r1)},
                    {"min_form_r2", io::number(min_r2)},
                    {"max_compatibility_residual", io::number(max_res)},
                    {"forms_positive", positive}});
  }
  io::json j{{"params", io::encode(p)},
             {"grid", {{"n", a.grid}, {"lo", a.h_lo}, {"hi", a.h_hi}}},
             {"pairs", rows},
             {"passed", !failed}};
  write_text(suffixed(a.out, ".json"), j.dump(2) + "\n", out);
  return failed ? entropy_failure : ok;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Parse @p args (without the program name) and run the selected subcommand.
inline int run_cli(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Thin-film flow solver: exact Riemann solutions, finite volumes, wave interactions"};
  app.require_subcommand(1);

  RiemannArgs ra;
  auto *riemann = app.add_subcommand("riemann", "Sample the exact Riemann solution");
  riemann->add_option("--alpha", ra.alpha, "Surface-tension coefficient");
  riemann->add_option("--kappa", ra.kappa, "Gravity coefficient");
  riemann->add_option("--left", ra.left, "Left state h,b")->required();
  riemann->add_option("--right", ra.right, "Right state h,b")->required();
  riemann->add_option("--t", ra.t, "Sampling time");
  riemann->add_option("--samples", ra.samples, "Number of sample points");
  riemann->add_option("--xmin", ra.x_min, "Left end of the sampling window");
  riemann->add_option("--xmax", ra.x_max, "Right end of the sampling window");
  riemann->add_option("--out", ra.out, "Output prefix (writes .csv and .json); stdout CSV if absent");

  SchemeArgs ga, la;
  auto *godunov = app.add_subcommand("godunov", "Run the Godunov scheme");
  auto *llf = app.add_subcommand("llf", "Run the local Lax-Friedrichs scheme");
  for (auto [sub, sa] : {std::pair{godunov, &ga}, std::pair{llf, &la}}) {
    sub->add_option("--config", sa->config, "JSON run configuration")->required();
    sub->add_option("--out", sa->out, "Output prefix (writes .csv and .json); stdout CSV if absent");
    sub->add_option("--record-every", sa->record_every, "Diagnostics cadence in steps (0: ends only)");
  }

  InteractArgs ia;
  auto *interact = app.add_subcommand("interact", "Resolve a perturbed Riemann problem");
  interact->add_option("--epsilon", ia.epsilon, "Half-width of the middle state");
  interact->add_option("--alpha", ia.alpha, "Surface-tension coefficient");
  interact->add_option("--kappa", ia.kappa, "Gravity coefficient");
  interact->add_option("--left", ia.left, "Left state h,b")->required();
  interact->add_option("--middle", ia.middle, "Middle state h,b")->required();
  interact->add_option("--right", ia.right, "Right state h,b")->required();
  interact->add_option("--t-max", ia.t_max, "Tracking horizon");
  interact->add_option("--times", ia.times, "Profile output times")->delimiter(',');
  interact->add_option("--h-tol", ia.h_tol, "Film heights below this count as zero");
  interact->add_option("--fan-fronts", ia.fan_fronts, "Fronts per rarefaction in the tracker");
  interact->add_option("--budget", ia.budget, "Event budget of the tracker");
  interact->add_option("--samples", ia.samples, "Points per profile CSV");
  interact->add_flag("--generic", ia.generic, "Force the front tracker");
  interact->add_option("--out", ia.out, "Output prefix; stdout JSON if absent");

  LimitsArgs lma;
  auto *limits = app.add_subcommand("limits", "Vanishing-parameter convergence table");
  limits->add_option("--vary", lma.vary, "kappa or alpha");
  limits->add_option("--values", lma.values, "Decreasing positive parameter values")->delimiter(',');
  limits->add_option("--fixed", lma.fixed, "Value of the other parameter");
  limits->add_option("--left", lma.left, "Left state h,b")->required();
  limits->add_option("--right", lma.right, "Right state h,b")->required();
  limits->add_option("--t", lma.t, "Evaluation time");
  limits->add_option("--out", lma.out, "Output prefix; stdout CSV if absent");

  EntropyArgs ea;
  auto *entropy = app.add_subcommand("entropy-check", "Entropy-pair compatibility and convexity report");
  entropy->add_option("--alpha", ea.alpha, "Surface-tension coefficient");
  entropy->add_option("--kappa", ea.kappa, "Gravity coefficient");
  entropy->add_option("--grid", ea.grid, "States per axis");
  entropy->add_option("--lo", ea.h_lo, "Smallest h and b");
  entropy->add_option("--hi", ea.h_hi, "Largest h and b");
  entropy->add_option("--out", ea.out, "Output prefix; stdout JSON if absent");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : invalid_input;
  }
  try {
    if (*riemann) return cmd_riemann(ra, out);
    if (*godunov) return cmd_scheme(Scheme::godunov, ga, out);
    if (*llf) return cmd_scheme(Scheme::llf, la, out);
    if (*interact) return cmd_interact(ia, out);
    if (*limits) return cmd_limits(lma, out);
    if (*entropy) return cmd_entropy_check(ea, out);
  } catch (const IoError &e) {
    err << "error: " << e.what() << '\n';
    return io_error;
  } catch (const SchemeFailure &e) {
    err << "scheme failure: " << e.what() << '\n';
    return scheme_failure;
  } catch (const BudgetExceeded &e) {
    err << "event budget exhausted: " << e.what() << '\n';
    return budget;
  } catch (const Error &e) {
    err << "invalid input: " << e.what() << '\n';
    return invalid_input;
  }
  return invalid_input;
}

} // namespace thinfilm::cli
