#include "mobsense/cli.hpp"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mobsense/control.hpp"
#include "mobsense/errors.hpp"
#include "mobsense/json_io.hpp"
#include "mobsense/mcsim.hpp"
#include "mobsense/network.hpp"
#include "mobsense/qfi.hpp"

namespace mobsense::cli {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_panels;
  std::optional<int> grid_points;
};

Json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read '" + file.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + file.string() + "' is not valid JSON: " + e.what());
  }
}

const Json& require(const Json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError("missing config key '" + key + "'");
  return obj.at(key);
}

double number(const Json& obj, const std::string& key) {
  const Json& v = require(obj, key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const Json& obj, const std::string& key, double fallback) {
  return obj.is_object() && obj.contains(key) ? number(obj, key) : fallback;
}

int integer(const Json& obj, const std::string& key) {
  const Json& v = require(obj, key);
  if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return v.get<int>();
}

int integer_or(const Json& obj, const std::string& key, int fallback) {
  return obj.is_object() && obj.contains(key) ? integer(obj, key) : fallback;
}

std::string text_or(const Json& obj, const std::string& key, const std::string& fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

std::vector<double> numbers(const Json& obj, const std::string& key) {
  const Json& v = require(obj, key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Matrix matrix(const Json& obj, const std::string& key) {
  const Json& v = require(obj, key);
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array of rows");
  Matrix m;
  for (const auto& row : v) {
    if (!row.is_array()) throw ConfigError("config key '" + key + "' must be an array of rows");
    std::vector<double> r;
    for (const auto& e : row) {
      if (!e.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
      r.push_back(e.get<double>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

Json array_of(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json array_of(const std::vector<int>& v) {
  Json a = Json::array();
  for (int x : v) a.push_back(x);
  return a;
}

// Shared pieces of a scenario config.
struct Scenario {
  Json raw;
  fs::path dir;
  ParamMap params;
  std::optional<FieldExpr> signal;
  std::vector<FieldExpr> noise;
  std::optional<Path> path;
  Flags flags;

  const FieldExpr& need_signal() const {
    if (!signal) throw ConfigError("missing config key 'signal'");
    return *signal;
  }
  const Path& need_path() const {
    if (!path) throw ConfigError("missing config key 'path'");
    return *path;
  }
  const Json& block(const std::string& name) const {
    static const Json empty = Json::object();
    return raw.contains(name) ? raw.at(name) : empty;
  }

  QuadratureGrid grid_for(double horizon) const {
    const Json& g = block("grid");
    const QuadratureRule rule = quadrature_rule_from_string(text_or(g, "rule", "gauss-legendre"));
    const int default_panels = std::max(1, static_cast<int>(std::lround(64.0 * horizon)));
    const int panels = flags.grid_panels.value_or(integer_or(g, "panels", default_panels));
    const int points = flags.grid_points.value_or(integer_or(g, "points", 8));
    return make_quadrature(horizon, panels, points, rule);
  }
};

FieldExpr parse_expr(const Json& v, const std::string& what) {
  if (!v.is_string()) throw ConfigError(what + " must be an expression string");
  return parse_field(v.get<std::string>());
}

Path parse_path(const Json& p, const ParamMap& params) {
  if (p.contains("coords")) {
    const double T = number(p, "T");
    std::vector<FieldExpr> coords;
    for (const auto& c : require(p, "coords")) coords.push_back(parse_expr(c, "path coordinate"));
    if (coords.empty()) throw ConfigError("path needs at least one coordinate");
    Path base = Path::parametric(std::move(coords), T, params);
    if (p.contains("reparametrization")) {
      const Json& h = p.at("reparametrization");
      return Path::retimed(std::move(base), Reparametrization(numbers(h, "times"), numbers(h, "values")));
    }
    return base;
  }
  if (p.contains("waypoints")) {
    const Json& w = p.at("waypoints");
    std::vector<double> times = numbers(w, "times");
    Matrix pos = matrix(w, "positions");
    return Path::waypoints(std::move(times), std::vector<Point>(pos.begin(), pos.end()));
  }
  throw ConfigError("path needs either 'coords' (with 'T') or 'waypoints'");
}

Scenario load(const Flags& flags) {
  if (flags.config.empty()) throw ConfigError("--config is required");
  Scenario s;
  s.flags = flags;
  s.raw = read_json_file(flags.config);
  if (!s.raw.is_object()) throw ConfigError("config root must be an object");
  s.dir = fs::path(flags.config).parent_path();
  if (s.raw.contains("params")) {
    for (const auto& [k, v] : s.raw.at("params").items()) {
      if (!v.is_number()) throw ConfigError("parameter '" + k + "' must be a number");
      s.params[k] = v.get<double>();
    }
  }
  if (s.raw.contains("signal")) s.signal = parse_expr(s.raw.at("signal"), "signal");
  if (s.raw.contains("noise")) {
    if (!s.raw.at("noise").is_array()) throw ConfigError("noise must be an array of expressions");
    for (const auto& g : s.raw.at("noise")) s.noise.push_back(parse_expr(g, "noise field"));
  }
  if (s.raw.contains("path")) s.path = parse_path(s.raw.at("path"), s.params);
  return s;
}

// ---------------------------------------------------------------------------

Json cancellation_json(const CancellationReport& r) {
  Json j;
  j["residues"] = array_of(r.residues);
  j["norms"] = array_of(r.norms);
  j["max_residue"] = r.max_residue;
  j["threshold"] = r.threshold;
  j["passed"] = r.passed;
  return j;
}

SignDesign design_of(const Scenario& s, const QuadratureGrid& grid) {
  SignDesignOptions o;
  o.params = s.params;
  return optimal_sign_control(s.need_signal(), s.noise, s.need_path(), grid, o);
}

int cmd_design(const Scenario& s, std::string& text) {
  const Path& path = s.need_path();
  const auto grid = s.grid_for(path.horizon());
  const SignDesign d = design_of(s, grid);
  const auto& sw = *d.schedule.sign_switch();
  const auto hr = hobby_rice_partition(sw, path.horizon(), static_cast<int>(s.noise.size()));
  std::vector<std::vector<double>> basis;
  for (const auto& g : s.noise) basis.push_back(sample_composite(g, path, grid, s.params));

  Json j;
  j["command"] = "design";
  j["sensitivity"] = d.sensitivity;
  j["residual_l1"] = d.l1.residual_l1;
  j["switch_count"] = hr.switch_count;
  j["noise_terms"] = s.noise.size();
  j["within_switch_bound"] = hr.within_bound;
  j["signal_in_noise_span"] = d.signal_in_noise_span;
  j["alpha"] = array_of(d.l1.alpha);
  j["certificate_violation"] = certificate_violation(d.l1, basis, grid);
  j["cancellation"] = cancellation_json(verify_cancellation(d.schedule, s.noise, path, grid, s.params));
  j["partition"] = {{"points", array_of(hr.points)}, {"signs", array_of(hr.signs)}};
  j["horizon"] = path.horizon();
  j["schedule"] = schedule_to_json(d.schedule);
  text = dump_json(j);
  return kExitOk;
}

int cmd_verify(const Scenario& s, std::string& text, std::ostream& err) {
  const Path& path = s.need_path();
  const Json& v = s.block("verify");
  Json sched;
  if (v.contains("schedule_file")) {
    fs::path file = text_or(v, "schedule_file", "");
    if (file.is_relative()) file = s.dir / file;
    sched = read_json_file(file);
  } else {
    sched = require(v, "schedule");
  }
  if (sched.contains("schedule")) sched = Json(sched.at("schedule"));
  const ControlSchedule control = schedule_from_json(sched, path.horizon());
  const auto grid = s.grid_for(path.horizon());
  const auto report = verify_cancellation(control, s.noise, path, grid, s.params);
  Json j = cancellation_json(report);
  j["command"] = "verify";
  text = dump_json(j);
  if (!report.passed) {
    err << "verify: largest residue " << format_number(report.max_residue) << " exceeds threshold "
        << format_number(report.threshold) << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_basis(const Scenario& s, std::string& text) {
  const Json& b = require(s.raw, "basis");
  const std::string kind = text_or(b, "kind", "");
  Json j;
  j["command"] = "basis";
  j["kind"] = kind;
  std::optional<BasisControl> bc;
  if (kind == "chebyshev") {
    bc = chebyshev_control(integer(b, "m"), number_or(b, "v", 1.0), number(b, "T"));
  } else if (kind == "legendre") {
    const double T = number(b, "T");
    bc = legendre_control(integer(b, "m"), T, s.grid_for(T));
  } else if (kind == "fourier") {
    const double T = number(b, "T");
    const std::string match = text_or(b, "match", "cosine");
    if (match != "cosine" && match != "sine") throw ConfigError("basis.match must be 'cosine' or 'sine'");
    bc = fourier_control(integer(b, "m"), number(b, "P"), number_or(b, "phase", 0.0), T, s.grid_for(T),
                         match == "cosine" ? HarmonicKind::Cosine : HarmonicKind::Sine);
  } else {
    throw ConfigError("basis.kind must be chebyshev, legendre or fourier");
  }
  j["gain"] = bc->gain;
  if (kind == "chebyshev") j["sensitivity"] = bc->gain;
  j["schedule"] = schedule_to_json(bc->schedule);
  text = dump_json(j);
  return kExitOk;
}

int cmd_qfi(const Scenario& s, std::string& text) {
  const Json& q = require(s.raw, "qfi");
  const std::string kind = text_or(q, "kind", "");
  Json j;
  j["command"] = "qfi";
  j["kind"] = kind;
  if (kind == "spatial_frequency") {
    const double B = number(q, "B"), v = number(q, "v"), T = number(q, "T");
    j["bound"] = qfi_spatial_frequency(B, v, T);
    j["method"] = "closed-form";
    // Same bound from the spectral gap of d/dk B[cos(k x) X + sin(k x) Y] along x = v t.
    const auto grid = s.grid_for(T);
    const ParamMap p{{"B", B}, {"k", number_or(q, "k", 1.0)}, {"v", v}};
    const ExprOperator dH = ExprOperator::pauli(FieldExpr::constant(0.0), parse_field("B*cos(k*x1)"),
                                                parse_field("B*sin(k*x1)"), FieldExpr::constant(0.0))
                                .diff("k");
    const Path path = Path::parametric({parse_field("v*t")}, T, p);
    const auto report = qfi_bound(sample_operator(dH, path, grid, p), grid);
    j["numeric_bound"] = report.bound;
  } else if (kind == "velocity_schedule") {
    const double B = number(q, "B"), T = number(q, "T");
    const auto grid = s.grid_for(T);
    std::vector<double> vel;
    if (q.contains("velocity")) {
      const FieldExpr v = parse_expr(q.at("velocity"), "qfi.velocity");
      for (double t : grid.nodes) vel.push_back(v.eval({}, t, s.params));
    } else {
      const double v0 = number(q, "v0"), a = number_or(q, "a", 0.0);
      for (double t : grid.nodes) vel.push_back(v0 + a * t);
      j["closed_form"] = qfi_uniform_acceleration(B, v0, a, T);
    }
    j["bound"] = qfi_velocity_schedule(vel, B, grid);
    j["method"] = "quadrature";
  } else if (kind == "fast_relocation") {
    j["bound"] = qfi_fast_relocation(number(q, "B"), number(q, "T"), number(q, "L"));
    j["method"] = "closed-form";
  } else if (kind == "moving_general") {
    const Path& path = s.need_path();
    std::optional<std::string> param;
    if (q.contains("param")) param = text_or(q, "param", "");
    j["bound"] = qfi_moving_general(s.need_signal(), path, number(q, "range"), s.grid_for(path.horizon()), s.params,
                                    param);
    j["method"] = "closed-form";
  } else if (kind == "operator") {
    const Path& path = s.need_path();
    const Json& pa = require(q, "pauli");
    if (!pa.is_array() || pa.size() != 4) throw ConfigError("qfi.pauli must list 4 expressions (I, X, Y, Z)");
    ExprOperator op = ExprOperator::pauli(parse_expr(pa[0], "pauli"), parse_expr(pa[1], "pauli"),
                                          parse_expr(pa[2], "pauli"), parse_expr(pa[3], "pauli"));
    if (q.contains("param")) op = op.diff(text_or(q, "param", ""));
    const auto grid = s.grid_for(path.horizon());
    const auto report = qfi_bound(sample_operator(op, path, grid, s.params), grid);
    j["bound"] = report.bound;
    j["method"] = report.method;
    j["gap_samples"] = array_of(report.gap_samples);
  } else {
    throw ConfigError(
        "qfi.kind must be spatial_frequency, velocity_schedule, fast_relocation, moving_general or operator");
  }
  text = dump_json(j);
  return kExitOk;
}

int cmd_network(const Scenario& s, std::string& text) {
  const Json& n = require(s.raw, "network");
  std::vector<double> sig;
  Matrix g;
  if (n.contains("positions")) {
    const Matrix pos = matrix(n, "positions");
    network_from_fields(std::vector<Point>(pos.begin(), pos.end()), s.need_signal(), s.noise, s.params, sig, g);
  } else {
    sig = numbers(n, "s");
    if (n.contains("G")) g = matrix(n, "G");
  }
  const auto c = compare_network(sig, g, number_or(n, "T", 1.0));
  Json j;
  j["command"] = "network";
  j["dfs_qfi"] = c.dfs_qfi;
  j["moving_qfi"] = c.moving_qfi;
  j["enhancement"] = c.enhancement;
  j["overlap"] = c.dfs.overlap;
  j["s_star"] = array_of(c.dfs.s_star);
  j["r"] = array_of(c.time_fractions);
  j["signs"] = array_of(c.signs);
  j["rank_deficient"] = c.dfs.rank_deficient;
  text = dump_json(j);
  return kExitOk;
}

int cmd_simulate(const Scenario& s, std::string& text) {
  const Json& m = require(s.raw, "simulate");
  const Path& path = s.need_path();
  const auto grid = s.grid_for(path.horizon());
  std::optional<ControlSchedule> control;
  const Json& c = m.contains("control") ? m.at("control") : Json("optimal");
  if (c.is_string() && c.get<std::string>() == "optimal") {
    control = design_of(s, grid).schedule;
  } else if (c.is_string() && c.get<std::string>() == "constant") {
    control = ControlSchedule::constant(path.horizon());
  } else if (c.is_object()) {
    control = schedule_from_json(c, path.horizon());
  } else {
    throw ConfigError("simulate.control must be \"optimal\", \"constant\" or a schedule object");
  }
  const double delta = number_or(m, "delta", 2.0);
  const double bias = number_or(m, "bias", std::numbers::pi / 2);
  const PhaseModel model = make_phase_model(s.need_signal(), s.noise, *control, path, grid, delta, bias, s.params);
  NoiseModel noise;
  noise.sigma = m.contains("sigma") ? numbers(m, "sigma") : std::vector<double>(s.noise.size(), 0.0);
  const double omega = number(m, "omega");
  const int bootstrap = integer_or(m, "bootstrap", 200);
  const std::uint64_t seed = s.flags.seed.value_or(static_cast<std::uint64_t>(integer_or(m, "seed", 1)));
  const std::vector<double> shots = m.contains("shots") ? numbers(m, "shots") : std::vector<double>{1e3, 1e4, 1e5};

  std::string csv = "m,variance,crb,ratio\n";
  for (std::size_t k = 0; k < shots.size(); ++k) {
    if (!(shots[k] >= 1.0) || shots[k] != std::floor(shots[k])) throw ConfigError("simulate.shots must be positive integers");
    const auto count = static_cast<std::uint64_t>(shots[k]);
    const auto rec = simulate_shots(model, omega, noise, count, seed + k);
    const auto r = estimate_omega(rec.outcomes, model, bootstrap, seed + k);
    csv += std::to_string(count) + "," + format_number(r.variance) + "," + format_number(r.crb) + "," +
           format_number(r.ratio) + "\n";
  }
  text = csv;
  return kExitOk;
}

int cmd_plotdata(const Scenario& s, std::string& text) {
  const Path& path = s.need_path();
  const auto grid = s.grid_for(path.horizon());
  const SignDesign d = design_of(s, grid);
  const int samples = integer_or(s.block("plotdata"), "samples", 201);
  if (samples < 2) throw ConfigError("plotdata.samples must be at least 2");
  std::vector<double> ts(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) ts[static_cast<std::size_t>(i)] = path.horizon() * i / (samples - 1);
  ts.back() = path.horizon();
  const auto f = sample_at(s.need_signal(), path, ts, s.params);
  std::vector<double> l(ts.size(), 0.0);
  for (std::size_t j = 0; j < s.noise.size(); ++j) {
    const auto g = sample_at(s.noise[j], path, ts, s.params);
    for (std::size_t i = 0; i < ts.size(); ++i) l[i] += d.l1.alpha[j] * g[i];
  }
  std::string csv = "t,f_gamma,l_star,control\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    csv += format_number(ts[i]) + "," + format_number(f[i]) + "," + format_number(l[i]) + "," +
           format_number(d.schedule.value_at(ts[i])) + "\n";
  }
  text = csv;
  return kExitOk;
}

int dispatch(const std::string& command, const Flags& flags, std::ostream& out, std::ostream& err) {
  const Scenario s = load(flags);
  std::string text;
  int code = kExitOk;
  if (command == "design") {
    code = cmd_design(s, text);
  } else if (command == "verify") {
    code = cmd_verify(s, text, err);
  } else if (command == "basis") {
    code = cmd_basis(s, text);
  } else if (command == "qfi") {
    code = cmd_qfi(s, text);
  } else if (command == "network") {
    code = cmd_network(s, text);
  } else if (command == "simulate") {
    code = cmd_simulate(s, text);
  } else {
    code = cmd_plotdata(s, text);
  }
  if (flags.out.empty()) {
    out << text;
  } else {
    std::ofstream file(flags.out, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + flags.out + "'");
    file << text;
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Control design and metrology analysis for mobile quantum sensors", "mobsense"};
  app.require_subcommand(1);
  Flags flags;
  std::uint64_t seed = 0;
  int panels = 0, points = 0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"design", "optimal noise-cancelling sign control"},
      {"verify", "check a schedule against the noise fields"},
      {"basis", "Chebyshev, Legendre or Fourier basis controls"},
      {"qfi", "quantum Fisher information bounds"},
      {"network", "static DFS network versus moving sensor"},
      {"simulate", "Monte Carlo phase estimation sweep (CSV)"},
      {"plotdata", "t, f(gamma(t)), L(alpha*, t), c(t) as CSV"},
  };
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> seed_opts, panel_opts, point_opts;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "scenario JSON")->required();
    sub->add_option("--out", flags.out, "write the result here instead of stdout");
    seed_opts.push_back(sub->add_option("--seed", seed, "RNG seed"));
    panel_opts.push_back(sub->add_option("--grid-panels", panels, "quadrature panels")->check(CLI::PositiveNumber));
    point_opts.push_back(sub->add_option("--grid-points", points, "points per panel")->check(CLI::PositiveNumber));
    subs.push_back(sub);
  }

  std::vector<const char*> argv{"mobsense"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::string command;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) {
      command = commands[i].first;
      if (seed_opts[i]->count() > 0) flags.seed = seed;
      if (panel_opts[i]->count() > 0) flags.grid_panels = panels;
      if (point_opts[i]->count() > 0) flags.grid_points = points;
    }
  }

  try {
    return dispatch(command, flags, out, err);
  } catch (const NumericalError& e) {
    err << "mobsense " << command << ": numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const EvalError& e) {
    err << "mobsense " << command << ": evaluation failed: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "mobsense " << command << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "mobsense " << command << ": bad config: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace mobsense::cli
