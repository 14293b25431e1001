#include "wfr/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wfr/cone_geometry.hpp"
#include "wfr/errors.hpp"
#include "wfr/measure_io.hpp"
#include "wfr/presets.hpp"
#include "wfr/uot_solver.hpp"
#include "wfr/verification.hpp"

namespace wfr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* mass_rule_name(MassRule rule) {
  return rule == MassRule::kSigma ? "sigma" : "sqrt-mu";
}

MassRule parse_mass_rule(const std::string& s) {
  if (s == "sigma") {
    return MassRule::kSigma;
  }
  if (s == "sqrt-mu") {
    return MassRule::kSqrtMu;
  }
  throw std::invalid_argument("mass_rule must be 'sigma' or 'sqrt-mu', got '" + s + "'");
}

const char* marginal_rule_name(MarginalRule rule) {
  switch (rule) {
    case MarginalRule::kForward:
      return "forward";
    case MarginalRule::kBackward:
      return "backward";
    case MarginalRule::kAverage:
      return "average";
  }
  return "forward";
}

MarginalRule parse_marginal_rule(const std::string& s) {
  if (s == "forward") {
    return MarginalRule::kForward;
  }
  if (s == "backward") {
    return MarginalRule::kBackward;
  }
  if (s == "average") {
    return MarginalRule::kAverage;
  }
  throw std::invalid_argument("marginal_rule must be forward, backward or average, got '" + s +
                              "'");
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

void validate(const RunConfig& c) {
  for (std::size_t k = 0; k + 1 < c.times.size(); ++k) {
    if (!(c.times[k + 1] > c.times[k])) {
      throw NonMonotoneTimesError("config: times must increase strictly");
    }
  }
  if (c.epsilon && !(*c.epsilon > 0.0)) {
    throw std::invalid_argument("config: epsilon must be positive");
  }
  if (c.max_iters < 1 || !(c.tol > 0.0)) {
    throw std::invalid_argument("config: max_iters and tol must be positive");
  }
  if (c.samples_per_segment < 1 || c.curvature_steps < 2) {
    throw std::invalid_argument("config: samples_per_segment >= 1 and curvature_steps >= 2");
  }
  if ((c.space_scale && !(*c.space_scale > 0.0)) || (c.time_scale && !(*c.time_scale > 0.0))) {
    throw InvalidScaleError("config: scale overrides must be positive");
  }
  if (!(c.margin >= 0.0 && c.margin < 1.0)) {
    throw std::invalid_argument("config: margin must lie in [0, 1)");
  }
  if (!(c.support_threshold >= 0.0 && c.support_threshold < 1.0)) {
    throw std::invalid_argument("config: support_threshold must lie in [0, 1)");
  }
  if (c.sigma && !(*c.sigma > 0.0)) {
    throw InvalidScaleError("config: sigma must be positive");
  }
  if (c.grid_resolution && *c.grid_resolution < 2) {
    throw std::invalid_argument("config: grid resolution must be at least 2");
  }
  if (c.grid_lo && c.grid_hi && !(*c.grid_hi > *c.grid_lo)) {
    throw std::invalid_argument("config: grid hi must exceed grid lo");
  }
  if (c.subsample && *c.subsample < 1) {
    throw std::invalid_argument("config: subsample must be at least 1");
  }
}

PipelineConfig pipeline_config(const RunConfig& c) {
  PipelineConfig p;
  p.solver.epsilon = c.epsilon.value_or(0.0);
  p.solver.max_iters = c.max_iters;
  p.solver.tol = c.tol;
  p.mass_rule = c.mass_rule;
  p.marginal_rule = c.marginal_rule;
  p.support_threshold = c.support_threshold;
  p.rescale.margin = c.margin;
  p.rescale.space_scale = c.space_scale;
  p.rescale.time_scale = c.time_scale;
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
}

std::string trajectories_csv(const TrajectorySet& set) {
  std::ostringstream out;
  out << "particle,knot";
  for (Index k = 0; k < set.dim; ++k) {
    out << ",x" << (k + 1);
  }
  out << ",r";
  for (Index k = 0; k < set.dim; ++k) {
    out << ",v" << (k + 1);
  }
  out << ",s\n";
  for (std::size_t p = 0; p < set.particles.size(); ++p) {
    const auto& traj = set.particles[p];
    for (std::size_t k = 0; k < traj.positions.size(); ++k) {
      out << p << ',' << k;
      for (Index i = 0; i < set.dim; ++i) {
        out << ',' << format_double(traj.positions[k][i]);
      }
      out << ',' << format_double(traj.masses[k]);
      for (Index i = 0; i < set.dim; ++i) {
        out << ',' << format_double(traj.velocities[k].v[i]);
      }
      out << ',' << format_double(traj.velocities[k].s) << '\n';
    }
  }
  return out.str();
}

std::vector<DiscreteMeasure> load_measures(const RunConfig& config) {
  std::vector<DiscreteMeasure> out;
  for (const auto& path : config.measures) {
    out.push_back(read_measure_csv(fs::path(path)));
  }
  return out;
}

std::vector<DiscreteMeasure> maybe_subsample(std::vector<DiscreteMeasure> measures,
                                             const RunConfig& config, std::uint64_t seed) {
  if (!config.subsample) {
    return measures;
  }
  for (std::size_t k = 0; k < measures.size(); ++k) {
    measures[k] = subsample_support(measures[k], *config.subsample, seed + k);
  }
  return measures;
}

void report_error(const char* kind, const std::exception& e) {
  std::cerr << "error (" << kind << "): " << e.what() << '\n';
}

// Option bundle shared by `spline` and `experiment`.
struct Overrides {
  std::string config_path;
  std::string output;
  std::uint64_t seed = 0;
  std::vector<std::string> measures;
  std::vector<double> times;
  double epsilon = 0.0;
  int max_iters = 0;
  double tol = 0.0;
  int samples = 0;
  double space_scale = 0.0;
  double time_scale = 0.0;
  double margin = 0.0;
  std::string mass_rule;
  std::string marginal_rule;
  double support_threshold = 0.0;
  double sigma = 0.0;
  Index resolution = 0;
  Index subsample = 0;
  std::map<std::string, CLI::Option*> given;

  void attach(CLI::App* app) {
    given["config"] = app->add_option("--config", config_path, "JSON run configuration");
    given["output"] = app->add_option("--output", output, "output directory");
    given["seed"] = app->add_option("--seed", seed, "seed for subsampling");
    given["measures"] = app->add_option("--measure", measures, "measure CSV (repeatable)");
    given["times"] = app->add_option("--times", times, "knot times, comma separated")
                         ->delimiter(',');
    given["epsilon"] = app->add_option("--epsilon", epsilon, "entropic regularization");
    given["max_iters"] = app->add_option("--max-iters", max_iters, "solver iteration cap");
    given["tol"] = app->add_option("--tol", tol, "solver tolerance on log scalings");
    given["samples"] = app->add_option("--samples", samples, "samples per segment");
    given["space_scale"] = app->add_option("--space-scale", space_scale, "space scale override");
    given["time_scale"] = app->add_option("--time-scale", time_scale, "time scale override");
    given["margin"] = app->add_option("--margin", margin, "feasibility margin");
    given["mass_rule"] = app->add_option("--mass-rule", mass_rule, "sigma or sqrt-mu");
    given["marginal_rule"] =
        app->add_option("--marginal-rule", marginal_rule, "forward, backward or average");
    given["support_threshold"] =
        app->add_option("--support-threshold", support_threshold, "relative weight cutoff");
    given["sigma"] = app->add_option("--sigma", sigma, "preset kernel width");
    given["resolution"] = app->add_option("--resolution", resolution, "preset grid resolution");
    given["subsample"] = app->add_option("--subsample", subsample, "points drawn per measure");
  }

  bool has(const std::string& key) const { return given.at(key)->count() > 0; }

  RunConfig apply(RunConfig c) const {
    if (has("output")) c.output = output;
    if (has("measures")) c.measures = measures;
    if (has("times")) c.times = times;
    if (has("epsilon")) c.epsilon = epsilon;
    if (has("max_iters")) c.max_iters = max_iters;
    if (has("tol")) c.tol = tol;
    if (has("samples")) c.samples_per_segment = samples;
    if (has("space_scale")) c.space_scale = space_scale;
    if (has("time_scale")) c.time_scale = time_scale;
    if (has("margin")) c.margin = margin;
    if (has("mass_rule")) c.mass_rule = parse_mass_rule(mass_rule);
    if (has("marginal_rule")) c.marginal_rule = parse_marginal_rule(marginal_rule);
    if (has("support_threshold")) c.support_threshold = support_threshold;
    if (has("sigma")) c.sigma = sigma;
    if (has("resolution")) c.grid_resolution = resolution;
    if (has("subsample")) c.subsample = subsample;
    validate(c);
    return c;
  }

  RunConfig load(RunConfig base) const {
    if (has("config")) {
      std::ifstream in(config_path);
      if (!in) {
        throw std::invalid_argument("cannot open config " + config_path);
      }
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw std::invalid_argument("config " + config_path + ": " + e.what());
      }
      base = parse_run_config(j);
    }
    return apply(std::move(base));
  }
};

int cmd_distance(const std::string& source, const std::string& target, const SolverConfig& cfg) {
  const DiscreteMeasure mu0 = read_measure_csv(fs::path(source));
  const DiscreteMeasure mu1 = read_measure_csv(fs::path(target));
  const TransportPlan plan = solve_entropic(mu0, mu1, cfg);
  const json out = {{"distance", wfr_distance(plan, mu0, mu1)},
                    {"objective", plan.objective},
                    {"regularized_objective", plan.regularized_objective},
                    {"epsilon", plan.epsilon},
                    {"plan_mass", plan.mass()},
                    {"iterations", plan.iterations},
                    {"residual", plan.residual},
                    {"converged", plan.converged}};
  std::cout << out.dump(2) << '\n';
  return plan.converged ? kExitOk : kExitNonconvergence;
}

int cmd_geodesic(const std::vector<double>& x0, double r0, const std::vector<double>& x1,
                 double r1, int samples, const std::string& output) {
  if (x0.size() != x1.size() || x0.empty()) {
    throw DimensionMismatchError("geodesic: --x0 and --x1 need the same nonzero length");
  }
  if (samples < 2) {
    throw std::invalid_argument("geodesic: need at least two samples");
  }
  const ConePoint z0(Eigen::Map<const Vector>(x0.data(), static_cast<Index>(x0.size())), r0);
  const ConePoint z1(Eigen::Map<const Vector>(x1.data(), static_cast<Index>(x1.size())), r1);
  std::ostringstream out;
  out << 't';
  for (std::size_t k = 0; k < x0.size(); ++k) {
    out << ",x" << (k + 1);
  }
  out << ",r\n";
  for (int k = 0; k < samples; ++k) {
    const double t = k + 1 == samples ? 1.0 : static_cast<double>(k) / (samples - 1);
    const ConePoint z = geodesic_eval(z0, z1, t);
    out << format_double(t);
    for (Index i = 0; i < z.dim(); ++i) {
      out << ',' << format_double(z.x()[i]);
    }
    out << ',' << format_double(z.r()) << '\n';
  }
  if (output.empty()) {
    std::cout << out.str();
  } else {
    write_file(output, out.str());
  }
  return kExitOk;
}

int cmd_spline(const RunConfig& config, std::uint64_t seed) {
  if (config.measures.size() < 2) {
    throw std::invalid_argument("spline: need at least two measure files");
  }
  if (config.times.size() != config.measures.size()) {
    throw std::invalid_argument("spline: need one knot time per measure");
  }
  const auto measures = maybe_subsample(load_measures(config), config, seed);
  const json summary = run_spline(measures, config, seed, config.output);
  std::cout << json{{"output", config.output},
                    {"all_converged", summary["all_converged"]},
                    {"particles", summary["mass"]["particles"]}}
                   .dump()
            << '\n';
  return kExitOk;
}

std::string times_label(const std::vector<double>& times) {
  std::ostringstream out;
  out << "times";
  for (double t : times) {
    std::ostringstream num;
    num.precision(3);
    num << t;
    out << '-' << num.str();
  }
  return out.str();
}

int cmd_experiment(const std::string& name, const Overrides& overrides) {
  static const std::set<std::string> known = {"one-dim", "two-dim-grid", "two-dim-subsample"};
  if (known.count(name) == 0) {
    throw std::invalid_argument("unknown experiment '" + name +
                                "'; expected one-dim, two-dim-grid or two-dim-subsample");
  }
  RunConfig base;
  std::vector<std::vector<double>> time_sets;
  std::vector<DiscreteMeasure> measures;
  if (name == "one-dim") {
    base.grid_lo = -0.2;
    base.grid_hi = 1.2;
    base.grid_resolution = 512;
    base.sigma = 0.06;
  } else {
    base.grid_lo = -0.35;
    base.grid_hi = 0.35;
    base.grid_resolution = 96;
    base.sigma = 0.01;
    base.support_threshold = 1e-8;
    if (name == "two-dim-subsample") {
      base.subsample = 400;
    }
  }
  const RunConfig config = overrides.load(base);
  if (name == "one-dim") {
    OneDimPreset preset;
    preset.lo = config.grid_lo.value_or(preset.lo);
    preset.hi = config.grid_hi.value_or(preset.hi);
    preset.resolution = config.grid_resolution.value_or(preset.resolution);
    preset.sigma = config.sigma.value_or(preset.sigma);
    measures = one_dim_measures(preset);
    time_sets = config.times.empty() ? one_dim_time_sets()
                                     : std::vector<std::vector<double>>{config.times};
  } else {
    TwoDimPreset preset;
    preset.half_width = config.grid_hi.value_or(preset.half_width);
    preset.resolution = config.grid_resolution.value_or(preset.resolution);
    preset.sigma = config.sigma.value_or(preset.sigma);
    measures = two_dim_measures(preset);
    time_sets = {config.times.empty() ? two_dim_times() : config.times};
  }
  for (const auto& times : time_sets) {
    if (times.size() != measures.size()) {
      throw std::invalid_argument("experiment: need " + std::to_string(measures.size()) +
                                  " knot times");
    }
  }
  const std::uint64_t seed = overrides.seed;
  const fs::path root = fs::path(config.output) / name;
  fs::create_directories(root / "measures");
  const auto used = maybe_subsample(measures, config, seed);
  for (std::size_t k = 0; k < used.size(); ++k) {
    write_measure_csv(root / "measures" / ("mu_" + std::to_string(k) + ".csv"), used[k]);
  }
  json index = json::array();
  for (const auto& times : time_sets) {
    RunConfig run = config;
    run.times = times;
    const fs::path dir = root / times_label(times);
    const json summary = run_spline(used, run, seed, dir);
    index.push_back({{"times", times},
                     {"directory", dir.filename().string()},
                     {"all_converged", summary["all_converged"]}});
  }
  write_file(root / "runs.json", index.dump(2) + "\n");
  std::cout << index.dump() << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& filter, std::uint64_t seed, double tolerance) {
  const auto results = run_verification_suite(filter, seed, tolerance);
  if (results.empty()) {
    throw std::invalid_argument("verify: filter '" + filter + "' matches no check");
  }
  json report = json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    report.push_back({{"check", r.name},
                      {"threshold", r.threshold},
                      {"observed", r.observed},
                      {"comparison", r.lower_bound ? ">=" : "<="},
                      {"status", r.pass ? "PASS" : "FAIL"}});
    all_pass = all_pass && r.pass;
  }
  std::cout << report.dump(2) << '\n';
  return all_pass ? kExitOk : kExitVerification;
}

// Null stands for "unset" so a written config reads back unchanged.
bool present(const json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

}  // namespace

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  static const std::set<std::string> keys = {
      "measures",      "times",         "epsilon",         "max_iters",   "tol",
      "samples_per_segment", "space_scale", "time_scale",  "margin",      "mass_rule",
      "marginal_rule", "support_threshold", "curvature_steps", "sigma",   "grid",
      "subsample",     "output"};
  for (const auto& [key, value] : j.items()) {
    if (keys.count(key) == 0) {
      throw std::invalid_argument("config: unknown field '" + key + "'");
    }
  }
  RunConfig c;
  try {
    if (present(j, "measures")) c.measures = j.at("measures").get<std::vector<std::string>>();
    if (present(j, "times")) c.times = j.at("times").get<std::vector<double>>();
    if (present(j, "epsilon")) c.epsilon = j.at("epsilon").get<double>();
    if (present(j, "max_iters")) c.max_iters = j.at("max_iters").get<int>();
    if (present(j, "tol")) c.tol = j.at("tol").get<double>();
    if (present(j, "samples_per_segment")) c.samples_per_segment = j.at("samples_per_segment").get<int>();
    if (present(j, "space_scale")) c.space_scale = j.at("space_scale").get<double>();
    if (present(j, "time_scale")) c.time_scale = j.at("time_scale").get<double>();
    if (present(j, "margin")) c.margin = j.at("margin").get<double>();
    if (present(j, "mass_rule")) c.mass_rule = parse_mass_rule(j.at("mass_rule").get<std::string>());
    if (present(j, "marginal_rule")) c.marginal_rule = parse_marginal_rule(j.at("marginal_rule").get<std::string>());
    if (present(j, "support_threshold")) c.support_threshold = j.at("support_threshold").get<double>();
    if (present(j, "curvature_steps")) c.curvature_steps = j.at("curvature_steps").get<int>();
    if (present(j, "sigma")) c.sigma = j.at("sigma").get<double>();
    if (present(j, "grid")) {
      const json& g = j.at("grid");
      if (present(g, "lo")) c.grid_lo = g.at("lo").get<double>();
      if (present(g, "hi")) c.grid_hi = g.at("hi").get<double>();
      if (present(g, "resolution")) c.grid_resolution = g.at("resolution").get<Index>();
    }
    if (present(j, "subsample")) c.subsample = j.at("subsample").get<Index>();
    if (present(j, "output")) c.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

json run_config_to_json(const RunConfig& c) {
  return {{"measures", c.measures},
          {"times", c.times},
          {"epsilon", optional_json(c.epsilon)},
          {"max_iters", c.max_iters},
          {"tol", c.tol},
          {"samples_per_segment", c.samples_per_segment},
          {"space_scale", optional_json(c.space_scale)},
          {"time_scale", optional_json(c.time_scale)},
          {"margin", c.margin},
          {"mass_rule", mass_rule_name(c.mass_rule)},
          {"marginal_rule", marginal_rule_name(c.marginal_rule)},
          {"support_threshold", c.support_threshold},
          {"curvature_steps", c.curvature_steps},
          {"sigma", optional_json(c.sigma)},
          {"grid",
           {{"lo", optional_json(c.grid_lo)},
            {"hi", optional_json(c.grid_hi)},
            {"resolution", optional_json(c.grid_resolution)}}},
          {"subsample", optional_json(c.subsample)},
          {"output", c.output}};
}

json run_spline(const std::vector<DiscreteMeasure>& measures, const RunConfig& config,
                std::uint64_t seed, const fs::path& out_dir) {
  validate(config);
  const TrajectorySet set = transport_spline(measures, config.times, pipeline_config(config));
  const MeasureCurve curve = sample_curve(set, config.samples_per_segment);
  const CurvatureReport curvature = curve_curvature_report(set, config.curvature_steps);

  fs::create_directories(out_dir / "curve");
  std::ostringstream times_csv;
  times_csv << "k,t\n";
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    std::ostringstream csv;
    write_measure_csv(csv, curve.measures[k]);
    write_file(out_dir / "curve" / ("t_" + std::to_string(k) + ".csv"), csv.str());
    times_csv << k << ',' << format_double(curve.times[k]) << '\n';
  }
  write_file(out_dir / "times.csv", times_csv.str());
  write_file(out_dir / "trajectories.csv", trajectories_csv(set));

  json segments = json::array();
  for (std::size_t k = 0; k < set.segments.size(); ++k) {
    const auto& s = set.segments[k];
    segments.push_back({{"index", k},
                        {"t_start", set.times[k]},
                        {"t_end", set.times[k + 1]},
                        {"wfr_distance", s.distance},
                        {"objective", s.objective},
                        {"epsilon", s.epsilon},
                        {"plan_mass", s.plan_mass},
                        {"iterations", s.iterations},
                        {"residual", s.residual},
                        {"converged", s.converged}});
  }
  std::vector<double> knot_masses;
  for (std::size_t k = 0; k < set.times.size(); ++k) {
    knot_masses.push_back(total_mass(knot_measure(set, k)));
  }
  const json summary = {
      {"schema_version", 1},
      {"seed", seed},
      {"config", run_config_to_json(config)},
      {"segments", segments},
      {"scales",
       {{"space_scale", set.space_scale},
        {"time_scale", set.time_scale},
        {"clamped_mass_rates", set.clamped_rates}}},
      {"mass",
       {{"input", set.input_masses},
        {"knot", knot_masses},
        {"vanished_mass", set.vanished_mass},
        {"vanished_particles", set.vanished_count},
        {"particles", set.particles.size()}}},
      {"curvature", {{"total", curvature.total}, {"steps", config.curvature_steps}}},
      {"samples", curve.times.size()},
      {"all_converged", set.all_converged()}};
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Wasserstein-Fisher-Rao distances, geodesics and transport splines"};
  app.require_subcommand(1);

  auto* distance = app.add_subcommand("distance", "WFR distance between two measure CSVs");
  std::string source;
  std::string target;
  SolverConfig solver;
  distance->add_option("source", source, "first measure CSV")->required();
  distance->add_option("target", target, "second measure CSV")->required();
  distance->add_option("--epsilon", solver.epsilon, "entropic regularization (0 = automatic)");
  distance->add_option("--max-iters", solver.max_iters, "iteration cap");
  distance->add_option("--tol", solver.tol, "tolerance on log scalings");

  auto* geodesic = app.add_subcommand("geodesic", "sample the cone geodesic between two points");
  std::vector<double> x0;
  std::vector<double> x1;
  double r0 = 1.0;
  double r1 = 1.0;
  int samples = 11;
  std::string geodesic_out;
  geodesic->add_option("--x0", x0, "start position")->required()->delimiter(',');
  geodesic->add_option("--r0", r0, "start mass");
  geodesic->add_option("--x1", x1, "end position")->required()->delimiter(',');
  geodesic->add_option("--r1", r1, "end mass");
  geodesic->add_option("--samples", samples, "number of samples including both ends");
  geodesic->add_option("--output", geodesic_out, "CSV file (stdout when omitted)");

  auto* spline = app.add_subcommand("spline", "transport spline through measure CSVs");
  Overrides spline_opts;
  spline_opts.attach(spline);

  auto* experiment = app.add_subcommand("experiment", "run a preset experiment");
  std::string experiment_name;
  experiment->add_option("name", experiment_name, "one-dim, two-dim-grid or two-dim-subsample")
      ->required();
  Overrides experiment_opts;
  experiment_opts.attach(experiment);

  auto* verify = app.add_subcommand("verify", "numerical verification suite");
  std::string filter;
  std::uint64_t verify_seed = 0;
  double tolerance = 0.0;
  verify->add_option("--filter", filter, "run checks whose name contains this");
  verify->add_option("--seed", verify_seed, "seed of the random samples");
  verify->add_option("--tolerance", tolerance, "replace every upper-bound threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*distance) {
      return cmd_distance(source, target, solver);
    }
    if (*geodesic) {
      return cmd_geodesic(x0, r0, x1, r1, samples, geodesic_out);
    }
    if (*spline) {
      return cmd_spline(spline_opts.load(RunConfig{}), spline_opts.seed);
    }
    if (*experiment) {
      return cmd_experiment(experiment_name, experiment_opts);
    }
    if (*verify) {
      return cmd_verify(filter, verify_seed, tolerance);
    }
  } catch (const BlowUpError& e) {
    report_error("geometry", e);
    return kExitGeometry;
  } catch (const std::domain_error& e) {
    report_error("geometry", e);
    return kExitGeometry;
  } catch (const std::exception& e) {
    report_error("input", e);
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace wfr
