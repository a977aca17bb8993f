#include "fpt/cli_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "fpt/cumulant.hpp"
#include "fpt/error.hpp"
#include "fpt/martingale_fns.hpp"
#include "fpt/montecarlo.hpp"

namespace fpt {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::config, where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) bad(where + "." + key, "unknown key");
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) bad(where + "." + key, "required");
  const auto& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(where + "." + key, "must be finite");
  return d;
}

std::optional<double> maybe_number(const json& obj, const std::string& key,
                                   const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, key, where);
}

std::optional<std::uint64_t> maybe_count(const json& obj, const std::string& key,
                                         const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    bad(where + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) bad(where + "." + key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) bad(where + "." + key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// Re-labels module precondition failures as configuration errors at `where`.
template <class F>
auto as_config(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::precondition) bad(where, e.what());
    throw;
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json grid_json(const GridSpec& g) {
  return fmt(g.lo) + ":" + fmt(g.hi) + ":" + fmt(g.step);
}

double a_of(const RunConfig& cfg) {
  if (!cfg.a) bad("$.a", "required by this subcommand");
  return *cfg.a;
}

PassageProblem problem_of(const RunConfig& cfg) {
  return {cfg.lambda, cfg.x, a_of(cfg), cfg.spec};
}

TransformTolerance tol_of(const RunConfig& cfg) { return {cfg.rel_tol, cfg.abs_tol}; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::config, "cannot write " + path.string());
  out << text;
}

// One-sided 99% normal allowance for a binomial proportion.
constexpr double kZ99 = 2.3263478740408408;

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> out;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  std::stringstream ss(text);
  std::string part;
  std::vector<double> v;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      bad("u_grid", "expected LO:HI:STEP, got \"" + text + "\"");
    }
  }
  if (v.size() != 3) bad("u_grid", "expected LO:HI:STEP, got \"" + text + "\"");
  g.lo = v[0];
  g.hi = v[1];
  g.step = v[2];
  if (!(g.step > 0.0) || g.hi < g.lo || g.lo < 0.0)
    bad("u_grid", "need 0 <= LO <= HI and STEP > 0");
  return g;
}

InnovationSpec parse_family(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  if (!j.contains("name") || !j.at("name").is_string()) bad(where + ".name", "required string");
  const auto name = j.at("name").get<std::string>();
  auto build = [&](auto&& f) { return as_config(where, f); };
  if (name == "gaussian") {
    reject_unknown(j, where, {"name", "m", "var"});
    const double m = number(j, "m", where), var = number(j, "var", where);
    return build([&] { return InnovationSpec::gaussian(m, var); });
  }
  if (name == "deterministic") {
    reject_unknown(j, where, {"name", "c"});
    const double c = number(j, "c", where);
    return build([&] { return InnovationSpec::deterministic(c); });
  }
  if (name == "two_point") {
    reject_unknown(j, where, {"name", "h_up", "h_down", "p"});
    const double hu = number(j, "h_up", where), hd = number(j, "h_down", where),
                 p = number(j, "p", where);
    return build([&] { return InnovationSpec::two_point(hu, hd, p); });
  }
  if (name == "stable") {
    reject_unknown(j, where, {"name", "alpha", "c_scale", "m"});
    const double al = number(j, "alpha", where), c = number(j, "c_scale", where),
                 m = number(j, "m", where);
    return build([&] { return InnovationSpec::stable(al, c, m); });
  }
  if (name == "capped_above") {
    reject_unknown(j, where, {"name", "base", "h_cap"});
    if (!j.contains("base")) bad(where + ".base", "required");
    const auto base = parse_family(j.at("base"), where + ".base");
    const double h = number(j, "h_cap", where);
    return build([&] { return truncate_cap_above(base, h); });
  }
  if (name == "floored_positive") {
    reject_unknown(j, where, {"name", "base", "n_cap"});
    if (!j.contains("base")) bad(where + ".base", "required");
    const auto base = parse_family(j.at("base"), where + ".base");
    const double n = number(j, "n_cap", where);
    try {
      return build([&] { return truncate_floor_positive(base, n); });
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::infeasible_truncation) bad(where + ".n_cap", e.what());
      throw;
    }
  }
  bad(where + ".name", "unknown family \"" + name +
                           "\" (gaussian, deterministic, two_point, stable, capped_above, "
                           "floored_positive)");
}

RunConfig parse_config(const json& doc, const Overrides& flags) {
  const std::string root = "$";
  reject_unknown(doc, root,
                 {"family", "lambda", "x", "a", "seed", "paths", "max_steps", "rel_tol",
                  "abs_tol", "u_grid", "delta", "cap", "n_cap", "validate", "dump_paths"});
  RunConfig cfg;
  if (!doc.contains("family")) bad("$.family", "required");
  cfg.family = doc.at("family");
  cfg.spec = parse_family(cfg.family, "$.family");

  cfg.lambda = number(doc, "lambda", root);
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0)) bad("$.lambda", "violates 0 < λ < 1");
  cfg.x = maybe_number(doc, "x", root).value_or(0.0);
  cfg.a = maybe_number(doc, "a", root);
  if (cfg.a && *cfg.a < cfg.x) bad("$.a", "violates a ≥ x");

  if (auto s = maybe_count(doc, "seed", root)) cfg.seed = *s;
  if (auto s = maybe_count(doc, "paths", root)) cfg.paths = *s;
  if (auto s = maybe_count(doc, "max_steps", root)) cfg.max_steps = *s;
  if (auto s = maybe_number(doc, "rel_tol", root)) cfg.rel_tol = *s;
  if (auto s = maybe_number(doc, "abs_tol", root)) cfg.abs_tol = *s;
  if (doc.contains("u_grid")) {
    if (!doc.at("u_grid").is_string()) bad("$.u_grid", "expected \"LO:HI:STEP\"");
    cfg.u_grid = as_config("$.u_grid", [&] { return parse_grid(doc.at("u_grid").get<std::string>()); });
  }
  if (auto s = maybe_number(doc, "delta", root)) cfg.delta = *s;
  cfg.cap = maybe_number(doc, "cap", root);
  cfg.n_cap = maybe_number(doc, "n_cap", root);
  if (doc.contains("validate")) {
    const auto& v = doc.at("validate");
    reject_unknown(v, "$.validate", {"n_orders", "w_orders", "y_values"});
    if (v.contains("n_orders")) cfg.validate.n_orders = numbers(v, "n_orders", "$.validate");
    if (v.contains("w_orders")) cfg.validate.w_orders = numbers(v, "w_orders", "$.validate");
    if (v.contains("y_values")) cfg.validate.y_values = numbers(v, "y_values", "$.validate");
  } else {
    cfg.validate.y_values.clear();
  }
  if (doc.contains("dump_paths")) {
    if (!doc.at("dump_paths").is_boolean()) bad("$.dump_paths", "expected true or false");
    cfg.dump_paths = doc.at("dump_paths").get<bool>();
  }

  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.paths) cfg.paths = *flags.paths;
  if (flags.max_steps) cfg.max_steps = *flags.max_steps;
  if (flags.rel_tol) cfg.rel_tol = *flags.rel_tol;
  if (flags.u_grid) cfg.u_grid = parse_grid(*flags.u_grid);
  if (flags.delta) cfg.delta = *flags.delta;
  if (flags.cap) cfg.cap = *flags.cap;

  if (cfg.paths < 1) bad("$.paths", "must be at least 1");
  if (cfg.max_steps < 1) bad("$.max_steps", "must be at least 1");
  if (!(cfg.rel_tol > 0.0)) bad("$.rel_tol", "must be positive");
  if (!(cfg.abs_tol > 0.0)) bad("$.abs_tol", "must be positive");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) bad("$.delta", "violates 0 < δ < 1");
  if (cfg.n_cap && !(*cfg.n_cap > 0.0)) bad("$.n_cap", "must be positive");
  for (double v : cfg.validate.n_orders)
    if (!(v > 0.0)) bad("$.validate.n_orders", "orders must be positive");
  for (double v : cfg.validate.w_orders)
    if (!(v < 0.0 && v > -1.0)) bad("$.validate.w_orders", "orders must lie in (-1, 0)");
  return cfg;
}

RunConfig load_config(const std::string& path, const Overrides& flags) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config, path + ": invalid JSON: " + e.what());
  }
  return parse_config(doc, flags);
}

json config_echo(const RunConfig& cfg) {
  json j;
  j["family"] = cfg.family;
  j["lambda"] = cfg.lambda;
  j["x"] = cfg.x;
  j["a"] = cfg.a ? json(*cfg.a) : json(nullptr);
  j["seed"] = cfg.seed;
  j["paths"] = cfg.paths;
  j["max_steps"] = cfg.max_steps;
  j["rel_tol"] = cfg.rel_tol;
  j["abs_tol"] = cfg.abs_tol;
  j["u_grid"] = grid_json(cfg.u_grid);
  j["delta"] = cfg.delta;
  if (cfg.cap) j["cap"] = *cfg.cap;
  if (cfg.n_cap) j["n_cap"] = *cfg.n_cap;
  j["validate"] = {{"n_orders", cfg.validate.n_orders},
                   {"w_orders", cfg.validate.w_orders},
                   {"y_values", cfg.validate.y_values}};
  j["dump_paths"] = cfg.dump_paths;
  return j;
}

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  if (name == "phi") return Subcommand::phi;
  if (name == "simulate") return Subcommand::simulate;
  if (name == "bounds") return Subcommand::bounds;
  if (name == "identity-check") return Subcommand::identity_check;
  if (name == "certificate") return Subcommand::certificate;
  if (name == "validate") return Subcommand::validate;
  return std::nullopt;
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::phi: return "phi";
    case Subcommand::simulate: return "simulate";
    case Subcommand::bounds: return "bounds";
    case Subcommand::identity_check: return "identity-check";
    case Subcommand::certificate: return "certificate";
    case Subcommand::validate: return "validate";
  }
  return "?";
}

json to_json(const QuadratureResult& r) {
  return {{"value", r.value},
          {"abs_err", r.abs_err},
          {"converged", r.converged},
          {"tail", std::string(to_string(r.tail))}};
}

json to_json(const SimulationSummary& s) {
  json curve = json::array();
  for (const auto& p : s.survival_curve) curve.push_back({p.n, p.survival});
  json mgf = json::array();
  for (const auto& m : s.mgf_nodes) mgf.push_back({m.u, m.mean, m.std_err});
  auto num_or_null = [](double d) { return std::isfinite(d) ? json(d) : json(nullptr); };
  return {{"n_paths", s.n_paths},
          {"n_crossed", s.n_crossed},
          {"n_censored", s.n_censored},
          {"max_steps", s.max_steps},
          {"seed", s.seed},
          {"e_tau_hat", num_or_null(s.e_tau_hat)},
          {"e_tau_se", s.e_tau_se},
          {"max_tau", s.max_tau},
          {"overshoot_mean", num_or_null(s.overshoot_mean)},
          {"overshoot_se", s.overshoot_se},
          {"overshoot_min", num_or_null(s.overshoot_min)},
          {"survival_curve", curve},
          {"mgf_nodes", mgf}};
}

json to_json(const IdentityResult& r) {
  return {{"value", r.value},
          {"std_err", r.std_err},
          {"clip_err", r.clip_err},
          {"nodes", r.nodes},
          {"clipped", r.clipped}};
}

json to_json(const ExponentialCertificate& c) {
  return {{"v_star", c.v_star},     {"alpha", c.alpha},           {"c_bound", c.c_bound},
          {"n_cap_used", c.n_cap_used}, {"n_cap_mass", c.n_cap_mass}, {"c_x", c.c_x},
          {"c_top", c.c_top},       {"delta", c.delta}};
}

json to_json(const FeasibilityReport& f) {
  auto opt = [](const std::optional<double>& d) { return d ? json(*d) : json(nullptr); };
  return {{"upper_bound", opt(f.upper_bound)},
          {"theta", opt(f.theta)},
          {"certain_infinite", f.certain_infinite},
          {"crossing_possible", f.crossing_possible},
          {"crossing_mass", std::isfinite(f.crossing_mass) ? json(f.crossing_mass) : json(nullptr)},
          {"log_moment_finite", f.log_moment_finite},
          {"finite_mean", f.finite_mean}};
}

json to_json(const PassageReport& r) {
  json j = json::object();
  j["identity_value"] = r.identity ? to_json(*r.identity) : json(nullptr);
  j["lower_bound"] = r.lower_bound ? to_json(*r.lower_bound) : json(nullptr);
  j["upper_bound"] = r.upper_bound ? to_json(*r.upper_bound) : json(nullptr);
  j["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  j["mc_summary"] = r.mc_summary ? to_json(*r.mc_summary) : json(nullptr);
  return j;
}

namespace {

json run_phi(const RunConfig& cfg, const std::filesystem::path& out) {
  const LimitCumulant lc(cfg.spec, cfg.lambda);
  const auto grid = cfg.u_grid.points();
  std::string csv = "u,phi,abs_err\n";
  for (double u : grid) {
    const auto v = lc.phi(u);
    csv += fmt(u) + "," + fmt(v.value) + "," + fmt(v.abs_err) + "\n";
  }
  write_text(out / "table.csv", csv);
  const char* mode = lc.mode() == CumulantMode::series ? "series"
                     : lc.mode() == CumulantMode::closed_form_stable
                         ? "closed_form_stable"
                         : "closed_form_deterministic";
  return {{"mode", mode},
          {"rows", grid.size()},
          {"functional_equation_residual", check_functional_equation(lc, grid)},
          {"table", "table.csv"}};
}

json run_simulate(const RunConfig& cfg, const std::filesystem::path& out) {
  const auto p = problem_of(cfg);
  std::vector<PathRecord> paths;
  const auto s = simulate_passage(p, cfg.paths, cfg.max_steps, cfg.seed, cfg.u_grid.points(),
                                  cfg.dump_paths ? &paths : nullptr);
  json r = {{"feasibility", to_json(feasibility_report(p))}, {"summary", to_json(s)}};
  if (cfg.dump_paths) {
    std::string csv = "tau,overshoot\n";
    for (const auto& rec : paths)
      csv += rec.crossed ? std::to_string(rec.tau) + "," + fmt(rec.x_tau - p.a) + "\n"
                         : std::string("censored,\n");
    write_text(out / "paths.csv", csv);
    r["paths_table"] = "paths.csv";
  }
  return r;
}

void require_finite_passage(const FeasibilityReport& f) {
  if (f.certain_infinite || !f.crossing_possible)
    fail(ErrorKind::no_crossing, "the level cannot be crossed: tau_a is infinite");
}

json run_bounds(const RunConfig& cfg) {
  const auto p = problem_of(cfg);
  const auto f = feasibility_report(p);
  require_finite_passage(f);
  PassageReport rep;
  rep.lower_bound = lower_bound_e_tau(p, tol_of(cfg));
  std::optional<double> cap = cfg.cap ? cfg.cap : p.spec.upper_bound();
  if (cap) rep.upper_bound = upper_bound_e_tau(p, *cap, tol_of(cfg));
  json r = to_json(rep);
  r["feasibility"] = to_json(f);
  r["h_cap"] = cap ? json(*cap) : json(nullptr);
  return r;
}

json run_identity(const RunConfig& cfg) {
  const auto p = problem_of(cfg);
  const auto f = feasibility_report(p);
  require_finite_passage(f);
  const auto plan = plan_identity(p, tol_of(cfg));
  PassageReport rep;
  rep.mc_summary = simulate_passage(p, cfg.paths, cfg.max_steps, cfg.seed, plan.u);
  rep.identity = identity_e_tau(p, plan, rep.mc_summary->mgf_nodes);
  rep.lower_bound = lower_bound_e_tau(p, tol_of(cfg));
  const auto& s = *rep.mc_summary;
  const double diff = rep.identity->value - s.e_tau_hat;
  // The quadrature rule itself is only good to the configured tolerance.
  const double quad_err = cfg.rel_tol * std::abs(rep.identity->value) + cfg.abs_tol;
  const double id_err = rep.identity->std_err + rep.identity->clip_err + quad_err;
  const double combined = std::sqrt(id_err * id_err + s.e_tau_se * s.e_tau_se);
  json r = to_json(rep);
  r["feasibility"] = to_json(f);
  r["difference"] = diff;
  r["quadrature_err"] = quad_err;
  r["combined_std_err"] = combined;
  r["discrepancy_in_std_err"] = combined > 0.0 ? json(std::abs(diff) / combined) : json(nullptr);
  r["censoring_invalidates"] = s.n_censored > 0;
  return r;
}

json run_certificate(const RunConfig& cfg) {
  const auto p = problem_of(cfg);
  const auto f = feasibility_report(p);
  require_finite_passage(f);
  PassageReport rep;
  rep.certificate = exponential_certificate(p, cfg.delta, cfg.n_cap);
  rep.mc_summary = simulate_passage(p, cfg.paths, cfg.max_steps, cfg.seed);
  const auto& c = *rep.certificate;
  bool passed = true;
  double worst = -1.0;
  std::uint64_t worst_n = 0;
  const double n_paths = static_cast<double>(rep.mc_summary->n_paths);
  for (const auto& pt : rep.mc_summary->survival_curve) {
    const double b = std::min(1.0, c.c_bound * std::exp(-c.alpha * static_cast<double>(pt.n)));
    const double allowance = kZ99 * std::sqrt(b * (1.0 - b) / n_paths);
    const double excess = pt.survival - (b + allowance);
    if (excess > worst) {
      worst = excess;
      worst_n = pt.n;
    }
    if (excess > 0.0) passed = false;
  }
  json r = to_json(rep);
  r["feasibility"] = to_json(f);
  r["mc_check"] = {{"passed", passed}, {"worst_excess", worst}, {"worst_n", worst_n}};
  return r;
}

json run_validate(const RunConfig& cfg, const std::filesystem::path& out) {
  const LimitCumulant lc(cfg.spec, cfg.lambda);
  std::vector<double> ys = cfg.validate.y_values;
  if (ys.empty()) {
    const auto h = cfg.spec.upper_bound();
    const double a_dom = h ? *h / (1.0 - cfg.lambda) : 2.0;
    ys = {-2.0, 0.0, 0.5 * a_dom};
  }
  struct Job {
    TransformKind kind;
    double v;
  };
  std::vector<Job> jobs;
  for (double v : cfg.validate.n_orders) jobs.push_back({TransformKind::N, v});
  jobs.push_back({TransformKind::H, 0.0});
  for (double v : cfg.validate.w_orders) jobs.push_back({TransformKind::W, v});

  const TransformTolerance tol = tol_of(cfg);
  std::string csv = "kind,v,y,condition_19,value,abs_err,residual,relative,status\n";
  double worst = 0.0;
  std::size_t failures = 0;
  for (const auto& job : jobs) {
    for (double y : ys) {
      const double probe = job.kind == TransformKind::H ? std::max(y, 0.0) : y;
      const bool c19 = check_condition_19(lc, probe, job.v).holds;
      std::string row = std::string(to_string(job.kind)) + "," + fmt(job.v) + "," + fmt(y) + "," +
                        (c19 ? "true" : "false") + ",";
      try {
        const auto f = eval_transform(lc, job.kind, y, job.v, tol);
        const auto h = check_harmonic(lc, job.kind, y, job.v, tol);
        worst = std::max(worst, h.relative);
        row += fmt(f.value) + "," + fmt(f.abs_err) + "," + fmt(h.residual) + "," +
               fmt(h.relative) + ",ok";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::divergence) throw;
        ++failures;
        row += ",,,,diverged";
      }
      csv += row + "\n";
    }
  }
  write_text(out / "table.csv", csv);
  return {{"rows", jobs.size() * ys.size()},
          {"max_relative_residual", worst},
          {"diverged", failures},
          {"table", "table.csv"}};
}

}  // namespace

json run_subcommand(const RunConfig& cfg, Subcommand which, const std::string& out_dir) {
  const std::filesystem::path out(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) fail(ErrorKind::config, "cannot create output directory " + out_dir);

  const auto start = std::chrono::steady_clock::now();
  json result;
  switch (which) {
    case Subcommand::phi: result = run_phi(cfg, out); break;
    case Subcommand::simulate: result = run_simulate(cfg, out); break;
    case Subcommand::bounds: result = run_bounds(cfg); break;
    case Subcommand::identity_check: result = run_identity(cfg); break;
    case Subcommand::certificate: result = run_certificate(cfg); break;
    case Subcommand::validate: result = run_validate(cfg, out); break;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json report = {{"tool", "fpt"},
                 {"version", FPT_VERSION},
                 {"command", to_string(which)},
                 {"config", config_echo(cfg)},
                 {"seed", cfg.seed},
                 {"result", result},
                 {"run_info", {{"wall_clock_seconds", secs}, {"threads", worker_count()}}}};
  write_text(out / "report.json", report.dump(2) + "\n");
  return result;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"First passage times of AR(1) sequences"};
  app.set_version_flag("--version", std::string("fpt ") + FPT_VERSION);
  std::string command, config_path, out_dir = ".";
  Overrides flags;
  app.add_option("subcommand", command,
                 "phi | simulate | bounds | identity-check | certificate | validate")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory for report.json and table.csv");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--paths", flags.paths, "number of simulated paths");
  app.add_option("--max-steps", flags.max_steps, "censoring horizon per path");
  app.add_option("--rel-tol", flags.rel_tol, "relative quadrature tolerance");
  app.add_option("--u-grid", flags.u_grid, "grid LO:HI:STEP");
  app.add_option("--delta", flags.delta, "moment order delta in (0, 1)");
  app.add_option("--cap", flags.cap, "cap H for the upper bound");

  auto report_error = [](const std::string& category, const std::string& message, int code) {
    json e = {{"error", category}, {"message", message}, {"exit_code", code}};
    std::cerr << e.dump() << "\n";
    return code;
  };
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("config", e.what(), exit_code(ErrorKind::config));
  }
  const auto which = parse_subcommand(command);
  if (!which)
    return report_error("config", "unknown subcommand \"" + command + "\"",
                        exit_code(ErrorKind::config));
  try {
    const auto cfg = load_config(config_path, flags);
    const auto result = run_subcommand(cfg, *which, out_dir);
    std::cout << result.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.kind())), e.what(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
}

}  // namespace fpt
