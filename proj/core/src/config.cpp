#include "nchs/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>
#include <yaml-cpp/yaml.h>

#include "nchs/io.hpp"

namespace nchs {

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += (s.empty() ? "" : "\n") + l;
  return s;
}

// Walks the document, recording every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors, warnings;

  void keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!node) return;
    if (!node.IsMap()) {
      errors.push_back(path + ": expected a mapping");
      return;
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) warnings.push_back(fmt::format("unknown key '{}{}' ignored", path.empty() ? "" : path + ".", key));
    }
  }

  template <class T>
  void get(const YAML::Node& node, const std::string& path, const char* key, T& out) {
    if (!node || !node.IsMap() || !node[key]) return;
    try {
      out = node[key].as<T>();
    } catch (const YAML::Exception&) {
      errors.push_back(fmt::format("{}.{}: cannot parse value '{}'", path, key, scalar(node[key])));
    }
  }

  void require(bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  }

 private:
  static std::string scalar(const YAML::Node& n) { return n.IsScalar() ? n.Scalar() : std::string("<non-scalar>"); }
};

std::string resolve(const std::string& base, const std::string& file) {
  if (file.empty()) return file;
  std::filesystem::path p(file);
  return p.is_absolute() ? file : (std::filesystem::path(base) / p).lexically_normal().string();
}

void read_control(Reader& r, const YAML::Node& n, const std::string& path, ControlSpec& c, const std::string& base) {
  r.keys(n, path, {"mode", "file", "amplitude", "seed"});
  r.get(n, path, "mode", c.mode);
  r.get(n, path, "file", c.file);
  r.get(n, path, "amplitude", c.amplitude);
  r.get(n, path, "seed", c.seed);
  c.file = resolve(base, c.file);
  static const std::set<std::string> modes{"zero", "file", "vortex", "random"};
  r.require(modes.count(c.mode) > 0, fmt::format("{}.mode: unknown mode '{}' (valid: zero, file, vortex, random)", path, c.mode));
  if (c.mode == "file") {
    r.require(!c.file.empty(), path + ".file: required when mode is 'file'");
    r.require(c.file.empty() || std::filesystem::exists(c.file), fmt::format("{}.file: '{}' does not exist", path, c.file));
  }
  r.require(c.amplitude >= 0.0, path + ".amplitude must be >= 0");
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> errors) : ConfigError(join(errors)), errors_(std::move(errors)) {}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigErrors({fmt::format("syntax error: {}", e.what())});
  }
  RunConfig cfg;
  cfg.hash = fnv1a(text);
  if (!root || root.IsNull()) return cfg;
  Reader r;
  if (!root.IsMap()) throw ConfigErrors({"config root must be a mapping"});
  r.keys(root, "", {"grid", "time", "kernel", "material", "initial", "control", "optimize", "tolerances", "checks",
                    "output"});

  const YAML::Node grid = root["grid"];
  r.keys(grid, "grid", {"nx", "ny", "lx", "ly"});
  r.get(grid, "grid", "nx", cfg.grid.nx);
  r.get(grid, "grid", "ny", cfg.grid.ny);
  r.get(grid, "grid", "lx", cfg.grid.lx);
  r.get(grid, "grid", "ly", cfg.grid.ly);
  r.require(cfg.grid.nx >= 4, "grid.nx must be >= 4");
  r.require(cfg.grid.ny >= 4, "grid.ny must be >= 4");
  r.require(cfg.grid.lx > 0.0, "grid.lx must be positive");
  r.require(cfg.grid.ly > 0.0, "grid.ly must be positive");

  const YAML::Node time = root["time"];
  r.keys(time, "time", {"dt", "T"});
  r.get(time, "time", "dt", cfg.solver.dt);
  r.get(time, "time", "T", cfg.solver.T);
  r.require(cfg.solver.dt > 0.0, "time.dt must be positive");
  if (cfg.solver.dt > 0.0) {
    try {
      cfg.solver.steps();
    } catch (const ConfigError& e) {
      r.errors.push_back(e.what());
    }
  }

  const YAML::Node kernel = root["kernel"];
  r.keys(kernel, "kernel", {"family", "length", "amplitude", "r_reg"});
  std::string family = "gaussian";
  r.get(kernel, "kernel", "family", family);
  try {
    cfg.kernel.family = kernel_family_from_string(family);
  } catch (const ConfigError& e) {
    r.errors.push_back(std::string("kernel.family: ") + e.what());
  }
  r.get(kernel, "kernel", "length", cfg.kernel.length);
  r.get(kernel, "kernel", "amplitude", cfg.kernel.amplitude);
  if (kernel && kernel.IsMap() && kernel["r_reg"]) {
    double rr = 0.0;
    r.get(kernel, "kernel", "r_reg", rr);
    cfg.kernel.r_reg = rr;
    r.require(rr >= 0.0, "kernel.r_reg must be >= 0");
  }
  r.require(cfg.kernel.length > 0.0, "kernel.length must be positive");

  const YAML::Node material = root["material"];
  r.keys(material, "material", {"law", "viscosity", "delta_eval", "quartic_c", "validate"});
  r.get(material, "material", "law", cfg.law);
  r.get(material, "material", "delta_eval", cfg.delta_eval);
  r.get(material, "material", "quartic_c", cfg.quartic_c);
  r.get(material, "material", "validate", cfg.validate_laws);
  if (material && material.IsMap()) {
    const YAML::Node visc = material["viscosity"];
    r.keys(visc, "material.viscosity", {"minus", "plus"});
    r.get(visc, "material.viscosity", "minus", cfg.viscosity.minus);
    r.get(visc, "material.viscosity", "plus", cfg.viscosity.plus);
  }
  {
    const auto names = builtin_law_names();
    if (std::find(names.begin(), names.end(), cfg.law) == names.end()) {
      std::string valid;
      for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
      r.errors.push_back(fmt::format("material.law: unknown law '{}' (valid: {})", cfg.law, valid));
    }
  }
  r.require(cfg.viscosity.minus > 0.0 && cfg.viscosity.plus > 0.0, "material.viscosity values must be positive");
  r.require(cfg.delta_eval > 0.0 && cfg.delta_eval <= 1e-6, "material.delta_eval must lie in (0, 1e-6]");

  const YAML::Node initial = root["initial"];
  r.keys(initial, "initial", {"phase", "velocity"});
  if (initial && initial.IsMap()) {
    const YAML::Node ph = initial["phase"];
    r.keys(ph, "initial.phase", {"preset", "amplitude", "half_width", "interface", "perturbation", "wavenumber",
                                 "sign", "seed", "mean", "noise", "file"});
    auto& p = cfg.phase;
    r.get(ph, "initial.phase", "preset", p.preset);
    r.get(ph, "initial.phase", "amplitude", p.stripe.amplitude);
    r.get(ph, "initial.phase", "half_width", p.stripe.half_width);
    r.get(ph, "initial.phase", "interface", p.stripe.interface);
    r.get(ph, "initial.phase", "perturbation", p.stripe.perturbation);
    r.get(ph, "initial.phase", "wavenumber", p.stripe.wavenumber);
    r.get(ph, "initial.phase", "sign", p.sign);
    r.get(ph, "initial.phase", "seed", p.seed);
    r.get(ph, "initial.phase", "mean", p.mean);
    r.get(ph, "initial.phase", "noise", p.amplitude);
    r.get(ph, "initial.phase", "file", p.file);
    p.file = resolve(base_dir, p.file);

    const YAML::Node vel = initial["velocity"];
    r.keys(vel, "initial.velocity", {"preset", "amplitude"});
    r.get(vel, "initial.velocity", "preset", cfg.velocity.preset);
    r.get(vel, "initial.velocity", "amplitude", cfg.velocity.amplitude);
  }
  {
    const auto& p = cfg.phase;
    static const std::set<std::string> presets{"stripe", "pure-phase", "random-seeded", "file"};
    r.require(presets.count(p.preset) > 0,
              fmt::format("initial.phase.preset: unknown preset '{}' (valid: stripe, pure-phase, random-seeded, file)", p.preset));
    if (p.preset == "stripe") {
      r.require(p.stripe.amplitude >= 0.0 && p.stripe.amplitude <= 1.0, "initial.phase.amplitude must lie in [0,1]");
      r.require(p.stripe.interface > 0.0, "initial.phase.interface must be positive");
    }
    if (p.preset == "random-seeded")
      r.require(std::abs(p.mean) + std::abs(p.amplitude) <= 1.0, "initial.phase: |mean| + noise must be <= 1");
    if (p.preset == "file") {
      r.require(!p.file.empty(), "initial.phase.file: required for preset 'file'");
      r.require(p.file.empty() || std::filesystem::exists(p.file), fmt::format("initial.phase.file: '{}' does not exist", p.file));
    }
    r.require(cfg.velocity.preset == "rest" || cfg.velocity.preset == "vortex",
              fmt::format("initial.velocity.preset: unknown preset '{}' (valid: rest, vortex)", cfg.velocity.preset));
  }

  if (root["control"]) read_control(r, root["control"], "control", cfg.control, base_dir);

  const YAML::Node opt = root["optimize"];
  r.keys(opt, "optimize", {"bounds", "weights", "targets", "optimizer"});
  if (opt && opt.IsMap()) {
    auto& o = cfg.optimize;
    const YAML::Node b = opt["bounds"];
    r.keys(b, "optimize.bounds", {"lower", "upper"});
    r.get(b, "optimize.bounds", "lower", o.lower);
    r.get(b, "optimize.bounds", "upper", o.upper);
    const YAML::Node w = opt["weights"];
    r.keys(w, "optimize.weights", {"beta1", "beta2", "beta3", "beta4", "gamma"});
    r.get(w, "optimize.weights", "beta1", o.beta1);
    r.get(w, "optimize.weights", "beta2", o.beta2);
    r.get(w, "optimize.weights", "beta3", o.beta3);
    r.get(w, "optimize.weights", "beta4", o.beta4);
    r.get(w, "optimize.weights", "gamma", o.gamma);
    const YAML::Node t = opt["targets"];
    r.keys(t, "optimize.targets", {"source", "control", "file"});
    r.get(t, "optimize.targets", "source", o.targets.source);
    r.get(t, "optimize.targets", "file", o.targets.file);
    o.targets.file = resolve(base_dir, o.targets.file);
    if (t && t.IsMap() && t["control"]) read_control(r, t["control"], "optimize.targets.control", o.targets.control, base_dir);
    const YAML::Node oc = opt["optimizer"];
    r.keys(oc, "optimize.optimizer", {"max_iterations", "initial_step", "armijo", "backtrack", "kkt_tolerance",
                                      "kkt_step", "max_trials", "barzilai_borwein"});
    r.get(oc, "optimize.optimizer", "max_iterations", o.optimizer.max_iterations);
    r.get(oc, "optimize.optimizer", "initial_step", o.optimizer.initial_step);
    r.get(oc, "optimize.optimizer", "armijo", o.optimizer.armijo);
    r.get(oc, "optimize.optimizer", "backtrack", o.optimizer.backtrack);
    r.get(oc, "optimize.optimizer", "kkt_tolerance", o.optimizer.kkt_tolerance);
    r.get(oc, "optimize.optimizer", "kkt_step", o.optimizer.kkt_step);
    r.get(oc, "optimize.optimizer", "max_trials", o.optimizer.max_trials);
    r.get(oc, "optimize.optimizer", "barzilai_borwein", o.optimizer.barzilai_borwein);
  }
  {
    const auto& o = cfg.optimize;
    r.require(o.lower <= o.upper, "optimize.bounds: lower must not exceed upper");
    if (o.lower > 0.0 || o.upper < 0.0)
      r.warnings.push_back("optimize.bounds: the box excludes v = 0, so its intersection with divergence-free fields may be empty");
    for (auto [name, val] : {std::pair{"beta1", o.beta1}, {"beta2", o.beta2}, {"beta3", o.beta3}, {"beta4", o.beta4},
                             {"gamma", o.gamma}})
      r.require(val >= 0.0, fmt::format("optimize.weights.{} must be >= 0", name));
    r.require(o.beta1 > 0.0 || o.beta2 > 0.0 || o.beta3 > 0.0 || o.beta4 > 0.0 || o.gamma > 0.0,
              "optimize.weights: beta1..beta4 and gamma must not all vanish");
    static const std::set<std::string> sources{"reference", "file", "zero"};
    r.require(sources.count(o.targets.source) > 0,
              fmt::format("optimize.targets.source: unknown source '{}' (valid: reference, file, zero)", o.targets.source));
    if (o.targets.source == "file")
      r.require(!o.targets.file.empty() && std::filesystem::exists(o.targets.file),
                "optimize.targets.file: missing or nonexistent file");
    try {
      o.optimizer.validate();
    } catch (const ConfigError& e) {
      r.errors.push_back(e.what());
    }
  }

  const YAML::Node tol = root["tolerances"];
  r.keys(tol, "tolerances", {"div", "bound", "poisson", "cfl_safety", "max_linear_iterations"});
  r.get(tol, "tolerances", "div", cfg.solver.tol_div);
  r.get(tol, "tolerances", "bound", cfg.solver.tol_bound);
  r.get(tol, "tolerances", "poisson", cfg.solver.tol_poisson);
  r.get(tol, "tolerances", "cfl_safety", cfg.solver.cfl_safety);
  r.get(tol, "tolerances", "max_linear_iterations", cfg.solver.max_linear_iterations);
  r.require(cfg.solver.tol_div > 0.0, "tolerances.div must be positive");
  r.require(cfg.solver.tol_bound > 0.0, "tolerances.bound must be positive");
  r.require(cfg.solver.tol_poisson > 0.0, "tolerances.poisson must be positive");
  r.require(cfg.solver.cfl_safety > 0.0, "tolerances.cfl_safety must be positive");
  r.require(cfg.solver.max_linear_iterations >= 0, "tolerances.max_linear_iterations must be >= 0");

  const YAML::Node checks = root["checks"];
  r.keys(checks, "checks", {"directions", "eps", "tolerance", "eps_list", "taylor_ratio", "seed"});
  r.get(checks, "checks", "directions", cfg.checks.directions);
  r.get(checks, "checks", "eps", cfg.checks.eps);
  r.get(checks, "checks", "tolerance", cfg.checks.tolerance);
  r.get(checks, "checks", "eps_list", cfg.checks.eps_list);
  r.get(checks, "checks", "taylor_ratio", cfg.checks.taylor_ratio);
  r.get(checks, "checks", "seed", cfg.checks.seed);
  r.require(cfg.checks.directions >= 1, "checks.directions must be >= 1");
  r.require(cfg.checks.eps > 0.0, "checks.eps must be positive");
  r.require(cfg.checks.tolerance > 0.0, "checks.tolerance must be positive");
  r.require(!cfg.checks.eps_list.empty(), "checks.eps_list must not be empty");
  for (std::size_t k = 1; k < cfg.checks.eps_list.size(); ++k)
    r.require(cfg.checks.eps_list[k] < cfg.checks.eps_list[k - 1], "checks.eps_list must be decreasing");

  const YAML::Node out = root["output"];
  r.keys(out, "output", {"directory", "trajectory", "diagnostics", "history", "control", "snapshot_times"});
  r.get(out, "output", "directory", cfg.output.directory);
  r.get(out, "output", "trajectory", cfg.output.trajectory);
  r.get(out, "output", "diagnostics", cfg.output.diagnostics);
  r.get(out, "output", "history", cfg.output.history);
  r.get(out, "output", "control", cfg.output.control);
  r.get(out, "output", "snapshot_times", cfg.output.snapshot_times);
  cfg.output.directory = resolve(base_dir, cfg.output.directory);

  if (cfg.law == "constant-mobility-quartic" && cfg.validate_laws)
    r.errors.push_back("material.law: 'constant-mobility-quartic' violates H1; set material.validate: false to use it");

  cfg.warnings = std::move(r.warnings);
  if (!r.errors.empty()) throw ConfigErrors(std::move(r.errors));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), base.empty() ? "." : base.string());
}

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.grid.nx, cfg.grid.ny, cfg.grid.lx, cfg.grid.ly); }

MaterialLaws make_laws(const RunConfig& cfg) {
  MaterialLaws laws = cfg.law == "constant-mobility-quartic" ? constant_mobility_quartic(cfg.quartic_c, cfg.viscosity)
                                                              : laws_by_name(cfg.law, cfg.viscosity);
  laws.delta_eval = cfg.delta_eval;
  if (cfg.validate_laws) {
    const ValidationReport rep = validate(laws);
    if (!rep.all_passed()) {
      std::vector<std::string> errs;
      for (const auto& c : rep.checks)
        if (!c.passed) errs.push_back(fmt::format("material law '{}' fails {}: {}", laws.name, c.name, c.message));
      throw ConfigErrors(errs);
    }
  }
  return laws;
}

namespace {

ScalarField make_phase(const RunConfig& cfg, const Grid& g) {
  const auto& p = cfg.phase;
  if (p.preset == "stripe") return stripe(g, p.stripe);
  if (p.preset == "pure-phase") return pure_phase(g, p.sign);
  if (p.preset == "random-seeded") return random_seeded(g, p.seed, p.mean, p.amplitude);
  const Trajectory t = load_trajectory(p.file);
  if (!(t.grid == g)) throw ConfigError("initial.phase.file: grid differs from the run grid");
  return t.snapshots.front().phi;
}

}  // namespace

Problem make_problem(const RunConfig& cfg) {
  const Grid g = make_grid(cfg);
  Model model(g, make_laws(cfg), DiscreteKernel::build(cfg.kernel, g));
  VectorField u0 = cfg.velocity.preset == "vortex" ? vortex(g, cfg.velocity.amplitude) : VectorField(g);
  return Problem{std::move(model), std::move(u0), make_phase(cfg, g), cfg.solver};
}

ControlField make_control(const ControlSpec& spec, const Problem& problem) {
  const Grid& g = problem.model.grid();
  const int steps = problem.steps();
  if (spec.mode == "zero") return ControlField::zeros(g, steps);
  if (spec.mode == "vortex") {
    ControlField c;
    c.values.assign(std::size_t(steps), vortex(g, spec.amplitude));
    return c;
  }
  if (spec.mode == "random") {
    ControlField c = random_control(g, steps, problem.cfg.dt, 1.0, spec.seed);
    double mx = 0.0;
    for (const auto& v : c.values) mx = std::max(mx, max_abs(v));
    if (mx > 0.0) c *= spec.amplitude / mx;
    return c;
  }
  ControlField c = load_control(spec.file, g);
  if (c.steps() != steps)
    throw ConfigError(fmt::format("control file '{}' has {} steps, the run needs {}", spec.file, c.steps(), steps));
  return c;
}

void attach_bounds(ControlField& v, const OptimizeSpec& spec) { v.set_box(spec.lower, spec.upper); }

CostWeights make_weights(const OptimizeSpec& spec, const Problem& problem) {
  const Grid& g = problem.model.grid();
  CostWeights w;
  w.beta1 = spec.beta1;
  w.beta2 = spec.beta2;
  w.beta3 = spec.beta3;
  w.beta4 = spec.beta4;
  w.gamma = spec.gamma;
  Trajectory target;
  if (spec.targets.source == "reference") {
    target = problem.solve(make_control(spec.targets.control, problem));
  } else if (spec.targets.source == "file") {
    target = load_trajectory(spec.targets.file);
    if (!(target.grid == g)) throw ConfigError("optimize.targets.file: grid differs from the run grid");
    if (target.steps() != problem.steps()) throw ConfigError("optimize.targets.file: step count differs from the run");
  } else {
    target.grid = g;
    target.snapshots.assign(std::size_t(problem.steps()) + 1, {0.0, VectorField(g), ScalarField(g), ScalarField(g)});
  }
  for (const auto& s : target.snapshots) {
    w.u_Q.push_back(s.u);
    w.phi_Q.push_back(s.phi);
  }
  w.u_Omega = target.snapshots.back().u;
  w.phi_Omega = target.snapshots.back().phi;
  w.validate(g, problem.steps());
  return w;
}

}  // namespace nchs
