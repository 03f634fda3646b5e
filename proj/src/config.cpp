#include "chopt/config.hpp"

#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "chopt/io.hpp"

namespace chopt {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Simulate: return "simulate";
    case Pipeline::Optimize: return "optimize";
    case Pipeline::Verify: return "verify";
    case Pipeline::All: return "all";
  }
  return "unknown";
}

namespace {

[[noreturn]] void config_fail(const std::string& ptr, const std::string& msg) {
  fail(ErrorKind::Config, (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

// A JSON object together with its pointer; tracks which keys were read so
// that misspelled keys are reported instead of silently ignored.
class Node {
 public:
  Node(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) config_fail(ptr_, "expected an object");
  }

  const std::string& ptr() const { return ptr_; }
  std::string at(const std::string& key) const { return ptr_ + "/" + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) config_fail(at(key), "missing required key");
    return j_.at(key);
  }

  Node object(const std::string& key) { return Node(raw(key), at(key)); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) config_fail(at(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_fail(at(key), "expected a finite number");
    return d;
  }

  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) config_fail(at(key), "expected an integer");
    return v.get<long long>();
  }

  int integer_or(const std::string& key, int fallback) {
    return has(key) ? static_cast<int>(integer(key)) : fallback;
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) config_fail(at(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) config_fail(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) config_fail(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) config_fail(at(key) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) config_fail(at(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

FieldSource parse_source(Node& parent, const std::string& key, bool allow_manifest) {
  const json& v = parent.raw(key);
  const std::string ptr = parent.at(key);
  if (v.is_number()) return FieldSource::constant(v.get<double>());
  Node n(v, ptr);
  FieldSource s;
  if (n.has("snapshot")) {
    s.kind = FieldSource::Kind::Snapshot;
    s.path = n.string("snapshot");
  } else if (n.has("manifest")) {
    if (!allow_manifest) config_fail(ptr, "a time-dependent manifest is not allowed here");
    s.kind = FieldSource::Kind::Manifest;
    s.path = n.string("manifest");
    s.component = n.string("component");
  } else if (n.has("constant")) {
    s = FieldSource::constant(n.number("constant"));
  } else {
    config_fail(ptr, "expected a number, {\"constant\": x}, {\"snapshot\": path} or {\"manifest\": path}");
  }
  n.finish();
  return s;
}

json source_json(const FieldSource& s) {
  switch (s.kind) {
    case FieldSource::Kind::Constant: return s.value;
    case FieldSource::Kind::Snapshot: return {{"snapshot", s.path}};
    case FieldSource::Kind::Manifest: return {{"manifest", s.path}, {"component", s.component}};
  }
  return nullptr;
}

Pipeline parse_pipeline(const std::string& name, const std::string& ptr) {
  if (name == "simulate") return Pipeline::Simulate;
  if (name == "optimize") return Pipeline::Optimize;
  if (name == "verify") return Pipeline::Verify;
  if (name == "all") return Pipeline::All;
  config_fail(ptr, "pipeline must be one of simulate, optimize, verify, all");
}

void parse_model(Node m, ExperimentConfig& c) {
  c.alpha = m.number("alpha");
  c.beta = m.number("beta");
  if (!(c.alpha > 0.0)) config_fail(m.at("alpha"), "alpha, beta are positive constants (got alpha = " + format_double(c.alpha) + ")");
  if (!(c.beta > 0.0)) config_fail(m.at("beta"), "alpha, beta are positive constants (got beta = " + format_double(c.beta) + ")");

  Node pot = m.object("potential");
  const std::string kind = pot.string("kind");
  if (kind == "quartic") {
    c.potential = Potential::quartic();
  } else if (kind == "logarithmic") {
    c.potential = Potential::logarithmic(pot.number("lambda"));
    if (!(c.potential.lambda > 0.0)) config_fail(pot.at("lambda"), "lambda must be positive");
  } else {
    config_fail(pot.at("kind"), "potential kind must be quartic or logarithmic");
  }
  pot.finish();

  Node pr = m.object("proliferation");
  const std::string pk = pr.string("kind");
  if (pk == "constant") {
    c.proliferation = Proliferation::constant(pr.number("p0"));
  } else if (pk == "smooth_ramp") {
    c.proliferation = Proliferation::smooth_ramp(pr.number("p0"), pr.number("width"));
    if (!(c.proliferation.width > 0.0)) config_fail(pr.at("width"), "ramp width must be positive");
  } else {
    config_fail(pr.at("kind"), "proliferation kind must be constant or smooth_ramp");
  }
  if (!(c.proliferation.p0 >= 0.0)) config_fail(pr.at("p0"), "P0 must be non-negative");
  pr.finish();

  if (m.has("newton")) {
    Node nw = m.object("newton");
    c.newton.max_iter = nw.integer_or("max_iter", c.newton.max_iter);
    c.newton.tol = nw.number_or("tol", c.newton.tol);
    c.newton.clamp_fraction = nw.number_or("clamp_fraction", c.newton.clamp_fraction);
    c.newton.max_damping_halvings = nw.integer_or("max_damping_halvings", c.newton.max_damping_halvings);
    if (c.newton.max_iter < 1) config_fail(nw.at("max_iter"), "must be >= 1");
    if (!(c.newton.tol > 0.0)) config_fail(nw.at("tol"), "must be positive");
    if (!(c.newton.clamp_fraction > 0.0 && c.newton.clamp_fraction < 0.5))
      config_fail(nw.at("clamp_fraction"), "must lie in (0, 0.5)");
    if (c.newton.max_damping_halvings < 0) config_fail(nw.at("max_damping_halvings"), "must be >= 0");
    nw.finish();
  }
  m.finish();
}

void parse_grid(Node g, ExperimentConfig& c) {
  const long long dim = g.integer("dim");
  if (dim != 1 && dim != 2) config_fail(g.at("dim"), "dim must be 1 or 2");
  const auto n = g.numbers("n");
  const auto e = g.numbers("extents");
  if (static_cast<long long>(n.size()) != dim) config_fail(g.at("n"), "needs one cell count per axis");
  if (static_cast<long long>(e.size()) != dim) config_fail(g.at("extents"), "needs one length per axis");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] != std::floor(n[i]) || n[i] < 3 || n[i] > 1e7)
      config_fail(g.at("n") + "/" + std::to_string(i), "cell counts must be integers >= 3");
    if (!(e[i] > 0.0) || !std::isfinite(e[i]))
      config_fail(g.at("extents") + "/" + std::to_string(i), "lengths must be positive");
  }
  c.grid = dim == 1 ? Grid::line(static_cast<int>(n[0]), e[0])
                    : Grid::rectangle(static_cast<int>(n[0]), static_cast<int>(n[1]), e[0], e[1]);
  g.finish();
}

void parse_time(Node t, ExperimentConfig& c) {
  c.time.T = t.number("T");
  const long long nt = t.integer("nt");
  if (!(c.time.T > 0.0)) config_fail(t.at("T"), "T must be positive");
  if (nt < 1 || nt > 10000000) config_fail(t.at("nt"), "nt must be >= 1");
  c.time.nt = static_cast<int>(nt);
  t.finish();
}

void parse_initial(Node n, ExperimentConfig& c) {
  InitialSpec& s = c.initial;
  if (n.has("snapshots")) {
    s.kind = InitialSpec::Kind::Snapshots;
    Node snaps = n.object("snapshots");
    s.mu_path = snaps.string("mu");
    s.phi_path = snaps.string("phi");
    s.sigma_path = snaps.string("sigma");
    snaps.finish();
    n.finish();
    return;
  }
  const std::string preset = n.string("preset");
  if (preset == "equilibrium") {
    s.kind = InitialSpec::Kind::Equilibrium;
    s.c = n.number("c");
    if (!c.potential.contains(s.c)) config_fail(n.at("c"), "c lies outside the potential's domain");
  } else if (preset == "tanh_front") {
    s.kind = InitialSpec::Kind::TanhFront;
    s.width = n.number("width");
    s.position = n.number("position");
    s.amplitude = n.number("amplitude");
    if (!(s.width > 0.0)) config_fail(n.at("width"), "width must be positive");
    if (!(s.amplitude >= 0.0)) config_fail(n.at("amplitude"), "amplitude must be non-negative");
    if (c.potential.is_singular() && !(s.amplitude < 1.0))
      config_fail(n.at("amplitude"), "amplitude must stay inside the potential's domain");
  } else if (preset == "random_interior") {
    s.kind = InitialSpec::Kind::RandomInterior;
    s.amplitude = n.number("amplitude");
    s.seed = static_cast<std::uint64_t>(n.integer("seed"));
    if (!(s.amplitude >= 0.0)) config_fail(n.at("amplitude"), "amplitude must be non-negative");
    if (c.potential.is_singular() && !(s.amplitude < 1.0))
      config_fail(n.at("amplitude"), "amplitude must stay inside the potential's domain");
  } else {
    config_fail(n.at("preset"), "preset must be equilibrium, tanh_front or random_interior");
  }
  n.finish();
}

void parse_cost(Node n, ExperimentConfig& c) {
  const auto b = n.numbers("b");
  if (b.size() != 7) config_fail(n.at("b"), "needs the seven weights b0..b6");
  bool any = false;
  for (std::size_t i = 0; i < 7; ++i) {
    if (!(b[i] >= 0.0) || !std::isfinite(b[i]))
      config_fail(n.at("b") + "/" + std::to_string(i), "weights must be non-negative");
    c.b[i] = b[i];
    any = any || b[i] > 0.0;
  }
  if (!any) config_fail(n.at("b"), "weights must not all be zero");
  c.tau_star = n.number("tau_star");
  if (!(c.tau_star >= 0.0 && c.tau_star <= c.time.T)) config_fail(n.at("tau_star"), "tau* must lie in [0, T]");

  Node t = n.object("targets");
  if (t.has("equilibrium")) {
    c.targets.equilibrium = t.number("equilibrium");
    if (!c.potential.contains(*c.targets.equilibrium))
      config_fail(t.at("equilibrium"), "value lies outside the potential's domain");
  } else {
    c.targets.phi_Q = parse_source(t, "phi_Q", true);
    c.targets.sigma_Q = parse_source(t, "sigma_Q", true);
    c.targets.phi_Omega = parse_source(t, "phi_Omega", false);
  }
  t.finish();

  if (n.has("relaxation")) {
    Node r = n.object("relaxation");
    RelaxationSpec rs;
    rs.gamma = r.number("gamma");
    rs.eps = r.number("eps");
    if (!(rs.gamma >= 0.0)) config_fail(r.at("gamma"), "gamma must be non-negative");
    if (!(rs.eps > 0.0)) config_fail(r.at("eps"), "eps must be positive");
    rs.sigma_Omega = parse_source(r, "sigma_Omega", false);
    r.finish();
    c.relaxation = rs;
  }
  n.finish();
}

void parse_optimizer(Node n, OptimizerConfig& o) {
  o.max_outer_iters = n.integer_or("max_outer_iters", o.max_outer_iters);
  o.grad_tol = n.number_or("grad_tol", o.grad_tol);
  o.tau_step_scale = n.number_or("tau_step_scale", o.tau_step_scale);
  o.max_tau_steps = n.integer_or("max_tau_steps", o.max_tau_steps);
  if (n.has("armijo")) {
    Node a = n.object("armijo");
    o.armijo.c1 = a.number_or("c1", o.armijo.c1);
    o.armijo.backtrack = a.number_or("backtrack", o.armijo.backtrack);
    o.armijo.s0 = a.number_or("s0", o.armijo.s0);
    o.armijo.max_backtracks = a.integer_or("max_backtracks", o.armijo.max_backtracks);
    a.finish();
  }
  try {
    o.validate();
  } catch (const Error& e) {
    config_fail(n.ptr(), e.what());
  }
  n.finish();
}

void parse_verification(Node n, VerificationSettings& v, double T) {
  v.fd_gradient = n.boolean_or("fd_gradient", v.fd_gradient);
  v.duality = n.boolean_or("duality", v.duality);
  v.lipschitz = n.boolean_or("lipschitz", v.lipschitz);
  v.mass_balance = n.boolean_or("mass_balance", v.mass_balance);
  if (n.has("tau")) {
    v.tau = n.number("tau");
    if (!(*v.tau >= 0.0 && *v.tau <= T)) config_fail(n.at("tau"), "must lie in [0, T]");
  }
  v.fd.directions = n.integer_or("fd_directions", v.fd.directions);
  if (n.has("fd_deltas")) v.fd.deltas = n.numbers("fd_deltas");
  v.fd.accuracy_delta = n.number_or("fd_accuracy_delta", v.fd.accuracy_delta);
  v.fd.accuracy_tol = n.number_or("fd_accuracy_tol", v.fd.accuracy_tol);
  v.fd.slope_min = n.number_or("fd_slope_min", v.fd.slope_min);
  v.fd.slope_max = n.number_or("fd_slope_max", v.fd.slope_max);
  v.duality_directions = n.integer_or("duality_directions", v.duality_directions);
  v.duality_tol = n.number_or("duality_tol", v.duality_tol);
  v.lipschitz_pairs = n.integer_or("lipschitz_pairs", v.lipschitz_pairs);
  if (n.has("lipschitz_magnitudes")) v.lipschitz_magnitudes = n.numbers("lipschitz_magnitudes");
  v.mass_tol = n.number_or("mass_tol", v.mass_tol);
  if (v.fd.directions < 1) config_fail(n.at("fd_directions"), "must be >= 1");
  if (v.fd.deltas.size() < 2) config_fail(n.at("fd_deltas"), "needs at least two step sizes");
  for (double d : v.fd.deltas)
    if (!(d > 0.0)) config_fail(n.at("fd_deltas"), "step sizes must be positive");
  if (!(v.fd.accuracy_delta > 0.0)) config_fail(n.at("fd_accuracy_delta"), "must be positive");
  if (v.duality_directions < 1) config_fail(n.at("duality_directions"), "must be >= 1");
  if (v.lipschitz_pairs < 1) config_fail(n.at("lipschitz_pairs"), "must be >= 1");
  if (v.lipschitz_magnitudes.empty()) config_fail(n.at("lipschitz_magnitudes"), "needs at least one magnitude");
  for (double m : v.lipschitz_magnitudes)
    if (!(m > 0.0)) config_fail(n.at("lipschitz_magnitudes"), "magnitudes must be positive");
  n.finish();
}

json grid_echo(const Grid& g) {
  if (g.dim == 1) return {{"dim", 1}, {"n", {g.n[0]}}, {"extents", {g.extents[0]}}};
  return {{"dim", 2}, {"n", {g.n[0], g.n[1]}}, {"extents", {g.extents[0], g.extents[1]}}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::Config, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                                ": malformed JSON (" + e.what() + ")");
  }

  ExperimentConfig c;
  c.base_dir = base_dir;
  Node n(root, "");
  if (n.has("pipeline")) c.pipeline = parse_pipeline(n.string("pipeline"), n.at("pipeline"));
  if (n.has("seed")) {
    const long long s = n.integer("seed");
    if (s < 0) config_fail(n.at("seed"), "seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  c.threads = n.integer_or("threads", 1);
  if (c.threads < 1) config_fail(n.at("threads"), "threads must be >= 1");
  if (n.has("output_dir")) c.output_dir = n.string("output_dir");

  parse_model(n.object("model"), c);
  parse_grid(n.object("grid"), c);
  parse_time(n.object("time"), c);
  parse_initial(n.object("initial_data"), c);
  parse_cost(n.object("cost"), c);

  Node bounds = n.object("bounds");
  c.lower = parse_source(bounds, "lower", false);
  c.upper = parse_source(bounds, "upper", false);
  if (c.lower.kind == FieldSource::Kind::Constant && c.upper.kind == FieldSource::Kind::Constant &&
      !(c.lower.value <= c.upper.value))
    config_fail(bounds.ptr(), "bounds violate u_* <= u^*");
  bounds.finish();

  if (n.has("control")) {
    Node ctl = n.object("control");
    if (ctl.has("initial")) c.control0 = parse_source(ctl, "initial", true);
    if (ctl.has("tau0")) {
      c.tau0 = ctl.number("tau0");
      if (!(*c.tau0 >= 0.0 && *c.tau0 <= c.time.T)) config_fail(ctl.at("tau0"), "tau0 must lie in [0, T]");
    }
    ctl.finish();
  }
  if (n.has("optimizer")) parse_optimizer(n.object("optimizer"), c.optimizer);
  if (n.has("verification")) parse_verification(n.object("verification"), c.verification, c.time.T);
  n.finish();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  return parse_config(text, path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["pipeline"] = to_string(c.pipeline);
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;

  json model;
  model["alpha"] = c.alpha;
  model["beta"] = c.beta;
  if (c.potential.kind == PotentialKind::Quartic)
    model["potential"] = {{"kind", "quartic"}};
  else
    model["potential"] = {{"kind", "logarithmic"}, {"lambda", c.potential.lambda}};
  if (c.proliferation.kind == ProliferationKind::Constant)
    model["proliferation"] = {{"kind", "constant"}, {"p0", c.proliferation.p0}};
  else
    model["proliferation"] = {{"kind", "smooth_ramp"}, {"p0", c.proliferation.p0}, {"width", c.proliferation.width}};
  model["newton"] = {{"max_iter", c.newton.max_iter},
                     {"tol", c.newton.tol},
                     {"clamp_fraction", c.newton.clamp_fraction},
                     {"max_damping_halvings", c.newton.max_damping_halvings}};
  j["model"] = model;
  j["grid"] = grid_echo(c.grid);
  j["time"] = {{"T", c.time.T}, {"nt", c.time.nt}};

  const InitialSpec& s = c.initial;
  switch (s.kind) {
    case InitialSpec::Kind::Equilibrium: j["initial_data"] = {{"preset", "equilibrium"}, {"c", s.c}}; break;
    case InitialSpec::Kind::TanhFront:
      j["initial_data"] = {
          {"preset", "tanh_front"}, {"width", s.width}, {"position", s.position}, {"amplitude", s.amplitude}};
      break;
    case InitialSpec::Kind::RandomInterior:
      j["initial_data"] = {{"preset", "random_interior"}, {"amplitude", s.amplitude}, {"seed", s.seed}};
      break;
    case InitialSpec::Kind::Snapshots:
      j["initial_data"] = {{"snapshots", {{"mu", s.mu_path}, {"phi", s.phi_path}, {"sigma", s.sigma_path}}}};
      break;
  }

  json cost;
  cost["b"] = c.b;
  cost["tau_star"] = c.tau_star;
  if (c.targets.equilibrium)
    cost["targets"] = {{"equilibrium", *c.targets.equilibrium}};
  else
    cost["targets"] = {{"phi_Q", source_json(c.targets.phi_Q)},
                       {"sigma_Q", source_json(c.targets.sigma_Q)},
                       {"phi_Omega", source_json(c.targets.phi_Omega)}};
  if (c.relaxation)
    cost["relaxation"] = {{"gamma", c.relaxation->gamma},
                          {"eps", c.relaxation->eps},
                          {"sigma_Omega", source_json(c.relaxation->sigma_Omega)}};
  j["cost"] = cost;
  j["bounds"] = {{"lower", source_json(c.lower)}, {"upper", source_json(c.upper)}};
  json control = json::object();
  if (c.control0) control["initial"] = source_json(*c.control0);
  if (c.tau0) control["tau0"] = *c.tau0;
  if (!control.empty()) j["control"] = control;

  const OptimizerConfig& o = c.optimizer;
  j["optimizer"] = {{"max_outer_iters", o.max_outer_iters},
                    {"grad_tol", o.grad_tol},
                    {"tau_step_scale", o.tau_step_scale},
                    {"max_tau_steps", o.max_tau_steps},
                    {"armijo",
                     {{"c1", o.armijo.c1},
                      {"backtrack", o.armijo.backtrack},
                      {"s0", o.armijo.s0},
                      {"max_backtracks", o.armijo.max_backtracks}}}};

  const VerificationSettings& v = c.verification;
  json ver = {{"fd_gradient", v.fd_gradient},
              {"duality", v.duality},
              {"lipschitz", v.lipschitz},
              {"mass_balance", v.mass_balance},
              {"fd_directions", v.fd.directions},
              {"fd_deltas", v.fd.deltas},
              {"fd_accuracy_delta", v.fd.accuracy_delta},
              {"fd_accuracy_tol", v.fd.accuracy_tol},
              {"fd_slope_min", v.fd.slope_min},
              {"fd_slope_max", v.fd.slope_max},
              {"duality_directions", v.duality_directions},
              {"duality_tol", v.duality_tol},
              {"lipschitz_pairs", v.lipschitz_pairs},
              {"lipschitz_magnitudes", v.lipschitz_magnitudes},
              {"mass_tol", v.mass_tol}};
  if (v.tau) ver["tau"] = *v.tau;
  j["verification"] = ver;
  return j.dump(2) + "\n";
}

InitialData preset_initial_data(const InitialSpec& preset, const Grid& grid, const Potential& potential) {
  InitialData d{Field(grid), Field(grid), Field(grid)};
  auto fill_from_phase = [&] {
    for (std::size_t i = 0; i < d.phi0.size(); ++i) {
      d.mu0[i] = potential_eval(potential, d.phi0[i], 1);
      d.sigma0[i] = d.mu0[i];
    }
  };
  switch (preset.kind) {
    case InitialSpec::Kind::Equilibrium: {
      const double fp = potential_eval(potential, preset.c, 1);
      d = {Field(grid, fp), Field(grid, preset.c), Field(grid, fp)};
      break;
    }
    case InitialSpec::Kind::TanhFront: {
      require(preset.width > 0.0, ErrorKind::InvalidArgument, "tanh_front width must be positive");
      for (int i0 = 0; i0 < grid.n[0]; ++i0) {
        const double v = -preset.amplitude * std::tanh((grid.center(0, i0) - preset.position) / preset.width);
        for (int i1 = 0; i1 < grid.n[1]; ++i1) d.phi0[static_cast<std::size_t>(i0) * grid.n[1] + i1] = v;
      }
      fill_from_phase();
      break;
    }
    case InitialSpec::Kind::RandomInterior: {
      std::mt19937_64 rng(preset.seed);
      std::uniform_real_distribution<double> uniform(-preset.amplitude, preset.amplitude);
      for (std::size_t i = 0; i < d.phi0.size(); ++i) d.phi0[i] = uniform(rng);
      fill_from_phase();
      break;
    }
    case InitialSpec::Kind::Snapshots:
      fail(ErrorKind::InvalidArgument, "snapshot initial data is read by build_problem, not a preset");
  }
  d.validate(grid, potential);
  return d;
}

namespace {

fs::path resolve(const ExperimentConfig& c, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || c.base_dir.empty() ? path : c.base_dir / path;
}

Field field_from(const ExperimentConfig& c, const FieldSource& s, const std::string& ptr) {
  try {
    switch (s.kind) {
      case FieldSource::Kind::Constant: return Field(c.grid, s.value);
      case FieldSource::Kind::Snapshot: return read_snapshot(resolve(c, s.path), c.grid);
      case FieldSource::Kind::Manifest: break;
    }
  } catch (const Error& e) {
    config_fail(ptr, e.what());
  }
  config_fail(ptr, "a manifest cannot be used here");
}

std::vector<Field> nodes_from(const ExperimentConfig& c, const FieldSource& s, const std::string& ptr) {
  if (s.kind != FieldSource::Kind::Manifest)
    return std::vector<Field>(c.time.node_count(), field_from(c, s, ptr));
  try {
    return read_component(resolve(c, s.path), s.component, c.grid, c.time);
  } catch (const Error& e) {
    config_fail(ptr, e.what());
  }
}

}  // namespace

Problem build_problem(const ExperimentConfig& c) {
  Problem p;
  ModelParams& m = p.params;
  m.alpha = c.alpha;
  m.beta = c.beta;
  m.potential = c.potential;
  m.proliferation = c.proliferation;
  m.grid = c.grid;
  m.time = c.time;
  m.newton = c.newton;
  try {
    m.validate();
  } catch (const Error& e) {
    config_fail("/model", e.what());
  }

  try {
    if (c.initial.kind == InitialSpec::Kind::Snapshots) {
      p.init = {read_snapshot(resolve(c, c.initial.mu_path), c.grid),
                read_snapshot(resolve(c, c.initial.phi_path), c.grid),
                read_snapshot(resolve(c, c.initial.sigma_path), c.grid)};
      p.init.validate(c.grid, c.potential);
    } else {
      p.init = preset_initial_data(c.initial, c.grid, c.potential);
    }
  } catch (const Error& e) {
    config_fail("/initial_data", e.what());
  }

  CostSpec& cost = p.cost;
  cost.b = c.b;
  cost.tau_star = c.tau_star;
  if (c.targets.equilibrium) {
    const double v = *c.targets.equilibrium;
    const Field phi(c.grid, v);
    const Field sigma(c.grid, potential_eval(c.potential, v, 1));
    cost.phi_Q.assign(c.time.node_count(), phi);
    cost.sigma_Q.assign(c.time.node_count(), sigma);
    cost.phi_Omega = phi;
  } else {
    cost.phi_Q = nodes_from(c, c.targets.phi_Q, "/cost/targets/phi_Q");
    cost.sigma_Q = nodes_from(c, c.targets.sigma_Q, "/cost/targets/sigma_Q");
    cost.phi_Omega = field_from(c, c.targets.phi_Omega, "/cost/targets/phi_Omega");
  }
  if (c.relaxation)
    cost.relaxation = Relaxation{c.relaxation->gamma, c.relaxation->eps,
                                 field_from(c, c.relaxation->sigma_Omega, "/cost/relaxation/sigma_Omega")};
  try {
    cost.validate(c.grid, c.time);
  } catch (const Error& e) {
    config_fail("/cost", e.what());
  }

  p.bounds = {field_from(c, c.lower, "/bounds/lower"), field_from(c, c.upper, "/bounds/upper")};
  try {
    p.bounds.validate();
  } catch (const Error& e) {
    config_fail("/bounds", e.what());
  }

  if (c.control0) {
    ControlField u;
    u.time = c.time;
    u.nodes = nodes_from(c, *c.control0, "/control/initial");
    p.u0 = std::move(u);
  } else {
    p.u0 = p.bounds.midpoint(c.time);
  }
  p.tau0 = c.tau0 ? *c.tau0 : 0.5 * c.time.T;
  return p;
}

}  // namespace chopt
