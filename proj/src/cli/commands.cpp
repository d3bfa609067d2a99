#include "gcnet/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "gcnet/cli/config.hpp"
#include "gcnet/cli/manifest.hpp"
#include "gcnet/cli/profiles.hpp"
#include "gcnet/common/error.hpp"
#include "gcnet/common/rng.hpp"
#include "gcnet/common/stats.hpp"
#include "gcnet/data/csv.hpp"
#include "gcnet/data/dataset.hpp"
#include "gcnet/data/split.hpp"
#include "gcnet/eval/evaluation.hpp"
#include "gcnet/nn/checkpoint.hpp"
#include "gcnet/ocp/bundle.hpp"
#include "gcnet/train/training.hpp"

namespace gcnet::cli {

namespace fs = std::filesystem;

namespace {

struct Invocation {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::string output;
  std::string profile;
  int threads = 0;
  int log_every = 1;
};

struct RunSettings {
  Problem problem = Problem::Transfer;
  std::string profile;
  std::uint64_t seed = 1;
};

int thread_cap(const Invocation& inv) {
  if (inv.threads > 0) return inv.threads;
  if (const char* env = std::getenv("GCNET_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError(fmt::format("GCNET_THREADS='{}' is not a positive integer", env));
    return static_cast<int>(v);
  }
  return 0;
}

void apply_thread_cap(int cap) {
  if (cap > 0) omp_set_num_threads(cap);
}

void apply_override(Config& cfg, const std::string& item) {
  const auto eq = item.find('=');
  const auto dot = item.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError(fmt::format("--set expects section.key=value, got '{}'", item));
  cfg.set(item.substr(0, dot), item.substr(dot + 1, eq - dot - 1), item.substr(eq + 1));
}

/// Loads the config (INI or manifest), applies command-line overrides and checks that a
/// manifest belongs to this subcommand and that its inputs are unchanged.
Config load_config(const Invocation& inv, const std::string& subcommand, const std::string& output_section,
                   const std::string& output_key) {
  Config cfg;
  if (!inv.config_path.empty()) cfg = Config::load(inv.config_path);
  if (cfg.manifest()) {
    const RunManifest m = RunManifest::from_json(*cfg.manifest());
    if (m.subcommand != subcommand)
      throw ConfigError(fmt::format("{} is a '{}' manifest, not '{}'", inv.config_path, m.subcommand, subcommand));
    verify_inputs(m);
  }
  for (const auto& item : inv.overrides) apply_override(cfg, item);
  if (!inv.profile.empty()) cfg.set("run", "profile", inv.profile);
  if (!inv.output.empty()) cfg.set(output_section, output_key, fs::absolute(inv.output).lexically_normal().string());
  return cfg;
}

RunSettings read_run(Config& cfg, bool with_profile = true) {
  RunSettings run;
  run.problem = parse_problem(cfg.get_string("run", "problem"));
  run.seed = cfg.get_uint("run", "seed", 1);
  if (with_profile) {
    run.profile = cfg.get_string("run", "profile", "desk");
    cfg.set_defaults(profile_defaults(run.problem, run.profile));
  }
  return run;
}

std::size_t get_size(Config& cfg, const std::string& section, const std::string& key) {
  const std::int64_t v = cfg.get_int(section, key);
  if (v < 0) throw ConfigError(fmt::format("[{}] {} must be >= 0", section, key));
  return static_cast<std::size_t>(v);
}

std::vector<double> get_vector(Config& cfg, const std::string& section, const std::string& key, std::size_t n) {
  const auto v = cfg.get_doubles(section, key);
  if (v.size() != n)
    throw ConfigError(fmt::format("[{}] {} needs {} values, got {}", section, key, n, v.size()));
  return v;
}

Eigen::Vector3d get_vec3(Config& cfg, const std::string& section, const std::string& key) {
  const auto v = get_vector(cfg, section, key, 3);
  return {v[0], v[1], v[2]};
}

dyn::TransferParams read_transfer(Config& cfg) {
  dyn::TransferParams p;
  p.mu = cfg.get_double("transfer", "mu");
  p.radius = cfg.get_double("transfer", "radius");
  p.gamma = cfg.get_double("transfer", "gamma");
  p.validate();
  return p;
}

ocp::LandingProblem read_landing(Config& cfg) {
  ocp::LandingProblem lp;
  lp.params.mu = cfg.get_double("landing", "mu");
  lp.params.omega = cfg.get_double("landing", "omega");
  lp.params.c1 = cfg.get_double("landing", "c1");
  lp.params.isp = cfg.get_double("landing", "isp");
  lp.params.g0 = cfg.get_double("landing", "g0");
  lp.params.validate();
  lp.target_position = get_vec3(cfg, "landing", "target");
  lp.target_velocity = get_vec3(cfg, "landing", "target_velocity");
  return lp;
}

dyn::DroneParams read_drone(Config& cfg) {
  dyn::DroneParams p;
  p.mass = cfg.get_double("drone", "mass");
  p.inertia = get_vec3(cfg, "drone", "inertia");
  p.g = cfg.get_double("drone", "g");
  p.k_x = cfg.get_double("drone", "k_x");
  p.k_y = cfg.get_double("drone", "k_y");
  p.k_omega = cfg.get_double("drone", "k_omega");
  p.k_z = cfg.get_double("drone", "k_z");
  p.k_h = cfg.get_double("drone", "k_h");
  p.k_p = cfg.get_double("drone", "k_p");
  p.k_pv = cfg.get_double("drone", "k_pv");
  p.k_q = cfg.get_double("drone", "k_q");
  p.k_qv = cfg.get_double("drone", "k_qv");
  p.k_r1 = cfg.get_double("drone", "k_r1");
  p.k_r2 = cfg.get_double("drone", "k_r2");
  p.k_rr = cfg.get_double("drone", "k_rr");
  p.tau = cfg.get_double("drone", "tau");
  p.omega_min = cfg.get_double("drone", "omega_min");
  p.omega_max = cfg.get_double("drone", "omega_max");
  cfg.get_doubles("drone", "moment_ext", {0.0, 0.0, 0.0});
  p.moment_ext = get_vec3(cfg, "drone", "moment_ext");
  p.validate();
  return p;
}

/// Plant parameters section consumed for a problem.
std::string plant_section(Problem p) {
  switch (p) {
    case Problem::Transfer: return "transfer";
    case Problem::Landing: return "landing";
    case Problem::Drone: return "drone";
  }
  return "";
}

dyn::ControlledSystem read_system(Config& cfg, Problem problem, Eigen::Vector3d* landing_target = nullptr) {
  dyn::ControlledSystem sys;
  sys.kind = problem;
  if (problem == Problem::Transfer) sys.transfer = read_transfer(cfg);
  if (problem == Problem::Landing) {
    const ocp::LandingProblem lp = read_landing(cfg);
    sys.landing = lp.params;
    if (landing_target) *landing_target = lp.target_position;
  }
  if (problem == Problem::Drone) sys.drone = read_drone(cfg);
  return sys;
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

RunManifest make_manifest(const std::string& subcommand, const RunSettings& run, const Config& cfg,
                          const std::vector<std::string>& sections) {
  RunManifest m;
  m.version = tool_version();
  m.subcommand = subcommand;
  m.seed = run.seed;
  m.config = cfg.to_json(sections);
  return m;
}

data::TrajectoryDataset load_dataset_for(const fs::path& path, Problem problem) {
  try {
    return data::read_dataset(path, problem);
  } catch (const data::ProblemMismatchError& e) {
    // A dataset of the wrong problem is a configuration mistake, caught before any compute.
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------- generate

int cmd_generate(const Invocation& inv, std::ostream& out) {
  Config cfg = load_config(inv, "generate", "generate", "output");
  const RunSettings run = read_run(cfg);
  if (run.problem == Problem::Drone)
    throw ConfigError("drone data is ingest-only: optimal drone trajectories come from an external solver, "
                      "convert them with 'gcnet ingest'");
  const int cap = thread_cap(inv);
  apply_thread_cap(cap);

  ocp::SpaceProblem sp;
  sp.kind = run.problem;
  const std::size_t n = state_dim(run.problem);
  if (run.problem == Problem::Transfer) sp.transfer.params = read_transfer(cfg);
  else sp.landing = read_landing(cfg);

  const fs::path output = cfg.get_path("generate", "output");
  ocp::BundleConfig bc;
  bc.trajectories = get_size(cfg, "generate", "trajectories");
  bc.samples = get_size(cfg, "generate", "samples");
  const auto nominal = get_vector(cfg, "generate", "nominal", n);
  bc.perturbation.absolute = get_vector(cfg, "generate", "perturb_absolute", n);
  bc.perturbation.relative = get_vector(cfg, "generate", "perturb_relative", n);
  bc.seed = run.seed;
  bc.max_retries = static_cast<int>(cfg.get_int("generate", "max_retries"));
  bc.continuation_substeps = static_cast<int>(cfg.get_int("generate", "continuation_substeps"));
  bc.hamiltonian_tolerance = cfg.get_double("generate", "hamiltonian_tolerance");
  bc.max_refinements = static_cast<int>(cfg.get_int("generate", "max_refinements"));
  bc.threads = cap;

  ocp::ShootingOptions opt;
  opt.steps = static_cast<int>(cfg.get_int("generate", "steps"));
  opt.restarts = static_cast<int>(cfg.get_int("generate", "restarts"));
  opt.newton.tolerance = cfg.get_double("generate", "newton_tolerance");
  opt.seed = derive_seed(run.seed, 0x6e6f6d);
  if (run.problem == Problem::Landing) opt.homotopy = cfg.get_doubles("generate", "homotopy");

  if (bc.trajectories == 0) throw ConfigError("[generate] trajectories must be >= 1");
  if (bc.samples < 2) throw ConfigError("[generate] samples must be >= 2");
  if (opt.steps < 1) throw ConfigError("[generate] steps must be >= 1");
  if (run.problem == Problem::Landing && opt.homotopy.empty()) throw ConfigError("[generate] homotopy is empty");
  for (const char* s : {"run", "generate"}) cfg.reject_unknown(s);
  cfg.reject_unknown(plant_section(run.problem));

  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(nominal.data(), static_cast<Eigen::Index>(n));
  out << fmt::format("solving nominal {} trajectory\n", to_string(run.problem));
  const ocp::ShootingSolution nom = ocp::solve_nominal(sp, x0, opt);
  if (!nom.converged)
    throw NumericalError(fmt::format("nominal solve did not converge: {} (residual {:.3e})", nom.message,
                                     nom.residual_norm));
  out << fmt::format("nominal t_f = {:.10g}, residual {:.3e}\n", nom.tf, nom.residual_norm);

  const ocp::Bundle bundle = ocp::generate_bundle(sp, nom, bc, opt);
  ensure_parent(output);
  data::write_dataset(output, bundle.dataset);
  const fs::path report_path = output.string() + ".report.txt";
  write_text(report_path, bundle.report.to_text());
  out << bundle.report.to_text();

  RunManifest m = make_manifest("generate", run, cfg, {"run", plant_section(run.problem), "generate"});
  m.add_output("dataset", output);
  m.write(output.string() + ".manifest.json");
  out << fmt::format("wrote {} ({} records)\n", output.string(), bundle.dataset.record_count());
  return kExitOk;
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const Invocation& inv, const std::string& input, const std::string& problem, std::ostream& out) {
  Invocation copy = inv;
  if (!input.empty()) copy.overrides.push_back("ingest.input=" + fs::absolute(input).lexically_normal().string());
  if (!problem.empty()) copy.overrides.push_back("run.problem=" + problem);
  Config cfg = load_config(copy, "ingest", "ingest", "output");
  const RunSettings run = read_run(cfg, false);
  const fs::path csv = cfg.get_path("ingest", "input");
  const fs::path output = cfg.get_path("ingest", "output");
  cfg.reject_unknown("run", {"profile"});
  cfg.reject_unknown("ingest");

  const data::TrajectoryDataset ds = data::read_csv(csv, run.problem);
  ensure_parent(output);
  data::write_dataset(output, ds);
  RunManifest m = make_manifest("ingest", run, cfg, {"run", "ingest"});
  m.add_input("csv", csv);
  m.add_output("dataset", output);
  m.write(output.string() + ".manifest.json");
  out << fmt::format("wrote {}: {} trajectories x {} samples, state_dim {}, control_dim {}\n", output.string(),
                     ds.trajectory_count(), ds.samples_per_trajectory, ds.state_dim, ds.control_dim);
  return kExitOk;
}

// ---------------------------------------------------------------- train / compare

struct TrainSetup {
  train::ExperimentConfig experiment;
  fs::path dataset_path;
  data::Split split;
};

std::vector<std::size_t> read_widths(Config& cfg) {
  std::vector<std::size_t> widths;
  for (double w : cfg.get_doubles("train", "hidden")) {
    if (!(w >= 1.0) || w != static_cast<double>(static_cast<std::size_t>(w)))
      throw ConfigError(fmt::format("[train] hidden: '{}' is not a positive integer width", w));
    widths.push_back(static_cast<std::size_t>(w));
  }
  if (widths.empty()) throw ConfigError("[train] hidden is empty");
  return widths;
}

nn::Activation make_activation(nn::ActivationKind kind, double omega0) {
  if (!nn::is_hidden_kind(kind)) throw ConfigError(fmt::format("'{}' is not a hidden activation", nn::to_string(kind)));
  return kind == nn::ActivationKind::Sine ? nn::Activation::sine(omega0) : nn::Activation{kind, 1.0};
}

TrainSetup read_train_setup(Config& cfg, const RunSettings& run) {
  TrainSetup s;
  auto& ex = s.experiment;
  ex.problem = run.problem;
  s.dataset_path = cfg.get_path("train", "dataset");
  const auto widths = read_widths(cfg);
  const auto kind = nn::parse_activation_kind(cfg.get_string("train", "activation"));
  const double omega0 = cfg.get_double("train", "omega0");
  ex.network = train::network_spec_for(run.problem, widths, make_activation(kind, omega0));
  ex.loss = nn::parse_loss_kind(cfg.get_string("train", "loss"));
  ex.train.epochs = get_size(cfg, "train", "epochs");
  ex.train.batch_size = get_size(cfg, "train", "batch_size");
  ex.train.learning_rate = cfg.get_double("train", "learning_rate");
  ex.train.scheduler_factor = cfg.get_double("train", "scheduler_factor");
  ex.train.scheduler_patience = static_cast<int>(cfg.get_int("train", "scheduler_patience"));
  ex.train.scheduler_threshold = cfg.get_double("train", "scheduler_threshold");
  const std::string monitor = cfg.get_string("train", "scheduler_monitor");
  if (monitor == "training") ex.train.scheduler_monitor = train::MonitoredLoss::Training;
  else if (monitor == "validation") ex.train.scheduler_monitor = train::MonitoredLoss::Validation;
  else throw ConfigError(fmt::format("[train] scheduler_monitor must be training or validation, got '{}'", monitor));
  ex.train.weight_decay = cfg.get_double("train", "weight_decay");
  ex.train.seed = run.seed;
  ex.split.train_fraction = cfg.get_double("train", "train_fraction");
  ex.split.seed = cfg.get_uint("train", "split_seed", run.seed);
  ex.label = cfg.get_string("train", "label", std::string(nn::to_string(kind)));
  ex.validate();
  return s;
}

void load_split(TrainSetup& s, Problem problem) {
  const data::TrajectoryDataset ds = load_dataset_for(s.dataset_path, problem);
  s.split = data::split(ds, s.experiment.split);
  if (s.split.train.trajectory_count() == 0 || s.split.validation.trajectory_count() == 0)
    throw ConfigError(fmt::format("split of {} trajectories at train_fraction {} leaves an empty side",
                                  ds.trajectory_count(), s.experiment.split.train_fraction));
}

std::string describe_widths(const std::vector<std::size_t>& widths) {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) s += (i ? "x" : "") + std::to_string(widths[i]);
  return s;
}

std::string train_summary(const train::ExperimentConfig& ex, const RunSettings& run,
                          const train::TrainResult& r) {
  std::string s;
  s += fmt::format("label: {}\n", ex.label);
  s += fmt::format("problem: {}\n", to_string(run.problem));
  s += fmt::format("profile: {}\n", run.profile);
  s += fmt::format("network: {} -> {} -> {}, hidden {}, {} parameters\n", ex.network.input_dim,
                   describe_widths(ex.network.hidden_widths), ex.network.output_dim,
                   nn::to_string(ex.network.hidden_activation.kind), nn::count_params(ex.network));
  s += fmt::format("loss: {}\n", nn::to_string(ex.loss));
  s += fmt::format("epochs: {}, batch size {}, initial learning rate {:.6g}\n", ex.train.epochs, ex.train.batch_size,
                   ex.train.learning_rate);
  s += fmt::format("seed: {}\n", run.seed);
  if (r.curve.epochs() > 0) {
    s += fmt::format("final train loss: {:.10e}\n", r.curve.train_loss.back());
    s += fmt::format("final validation loss: {:.10e}\n", r.curve.val_loss.back());
    s += fmt::format("final learning rate: {:.6g}\n", r.curve.learning_rate.back());
  }
  s += fmt::format("best validation loss: {:.10e} at epoch {}\n", r.best_val_loss, r.best_epoch);
  return s;
}

void write_train_dir(const fs::path& dir, const train::ExperimentConfig& ex, const RunSettings& run,
                     const train::TrainResult& result, const Config& cfg, const fs::path& dataset) {
  fs::create_directories(dir);
  train::write_training_outputs(dir, result);
  write_text(dir / "summary.txt", train_summary(ex, run, result));
  RunManifest m = make_manifest("train", run, cfg, {"run", "train"});
  m.add_input("dataset", dataset);
  for (const char* f : {"loss_curve.csv", "checkpoint_final.gcnet", "checkpoint_best.gcnet", "scaler.txt"})
    m.add_output(fs::path(f).stem().string(), dir / f);
  m.write(dir / "manifest.json");
}

train::EpochCallback epoch_logger(std::ostream& out, const std::string& label, std::size_t epochs, int every) {
  return [&out, label, epochs, every](std::size_t e, double tl, double vl, double lr) {
    if (every > 0 && (e % static_cast<std::size_t>(every) == 0 || e == epochs))
      out << fmt::format("[{}] epoch {:>4} train {:.6e} val {:.6e} lr {:.3e}\n", label, e, tl, vl, lr) << std::flush;
  };
}

int cmd_train(const Invocation& inv, std::ostream& out) {
  Config cfg = load_config(inv, "train", "train", "output");
  const RunSettings run = read_run(cfg);
  apply_thread_cap(thread_cap(inv));
  TrainSetup s = read_train_setup(cfg, run);
  const fs::path dir = cfg.get_path("train", "output");
  cfg.reject_unknown("run");
  cfg.reject_unknown("train");
  load_split(s, run.problem);

  out << fmt::format("training {} ({} profile): {} train / {} validation trajectories\n", s.experiment.label,
                     run.profile, s.split.train.trajectory_count(), s.split.validation.trajectory_count());
  const auto result = train::train(s.experiment, s.split,
                                   epoch_logger(out, s.experiment.label, s.experiment.train.epochs, inv.log_every));
  write_train_dir(dir, s.experiment, run, result, cfg, s.dataset_path);
  out << fmt::format("wrote {}\n", dir.string());
  return kExitOk;
}

int cmd_compare(const Invocation& inv, std::ostream& out) {
  Config cfg = load_config(inv, "compare", "compare", "output");
  const RunSettings run = read_run(cfg);
  apply_thread_cap(thread_cap(inv));
  TrainSetup s = read_train_setup(cfg, run);
  const double omega0 = cfg.get_double("train", "omega0");
  std::vector<nn::Activation> acts;
  std::set<nn::ActivationKind> seen;
  for (const auto& name : cfg.get_list("compare", "activations")) {
    const auto kind = nn::parse_activation_kind(name);
    if (!seen.insert(kind).second) throw ConfigError(fmt::format("[compare] activations lists '{}' twice", name));
    acts.push_back(make_activation(kind, omega0));
  }
  if (acts.empty()) throw ConfigError("[compare] activations is empty");
  const fs::path dir = cfg.get_path("compare", "output");
  cfg.reject_unknown("run");
  cfg.reject_unknown("train", {"output"});
  cfg.reject_unknown("compare");
  load_split(s, run.problem);

  out << fmt::format("comparing {} activations ({} profile)\n", acts.size(), run.profile);
  const std::size_t epochs = s.experiment.train.epochs;
  const int every = inv.log_every;
  const auto report = train::compare_activations(
      s.experiment, acts, s.split, [&out, epochs, every](const std::string& label, std::size_t e, double tl, double vl,
                                                         double lr) { epoch_logger(out, label, epochs, every)(e, tl, vl, lr); });

  fs::create_directories(dir);
  const std::string title = fmt::format("{} training loss ({} profile)", to_string(run.problem), run.profile);
  write_text(dir / "comparison.csv", report.to_csv());
  write_text(dir / "comparison.svg", report.to_svg(title));
  write_text(dir / "summary.txt", fmt::format("problem: {}\nprofile: {}\n", to_string(run.problem), run.profile) +
                                      report.summary());
  out << report.summary();

  RunManifest m = make_manifest("compare", run, cfg, {"run", "train", "compare"});
  m.add_input("dataset", s.dataset_path);
  m.add_output("comparison", dir / "comparison.csv");
  for (const auto& entry : report.entries) {
    // Each member directory is a self-contained training run with its own manifest.
    Config member = cfg;
    member.set("train", "activation", entry.label);
    member.set("train", "label", entry.label);
    member.set("train", "output", (dir / entry.label).string());
    train::ExperimentConfig ex = s.experiment;
    ex.label = entry.label;
    ex.network.hidden_activation = entry.result.final_network.spec().hidden_activation;
    write_train_dir(dir / entry.label, ex, run, entry.result, member, s.dataset_path);
    m.add_output(entry.label + "_loss_curve", dir / entry.label / "loss_curve.csv");
  }
  m.write(dir / "manifest.json");
  out << fmt::format("wrote {}\n", dir.string());
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct NetworkEntry {
  std::string label;
  fs::path dir;
  std::optional<nn::Network> network;
  data::ScalingTransform scaler;
  double train_fraction = 0.0;
  std::uint64_t split_seed = 0;
};

std::string config_value(const nlohmann::json& config, const std::string& section, const std::string& key,
                         const fs::path& where) {
  if (!config.contains(section) || !config[section].contains(key))
    throw ConfigError(fmt::format("{}: manifest has no [{}] {}", where.string(), section, key));
  return config[section][key].get<std::string>();
}

/// Plant settings recorded with the dataset must agree with the evaluation config.
void check_dataset_plant(const fs::path& dataset, Config& cfg, Problem problem) {
  const fs::path manifest_path = dataset.string() + ".manifest.json";
  if (!fs::exists(manifest_path)) return;
  const RunManifest m = RunManifest::read(manifest_path);
  const std::string section = plant_section(problem);
  if (!m.config.contains(section)) return;
  for (const auto& [key, value] : m.config[section].items()) {
    const std::string mine = cfg.get_string(section, key);
    const auto a = split_list(mine), b = split_list(value.get<std::string>());
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = std::stod(a[i]) == std::stod(b[i]);
    if (!same)
      throw ConfigError(fmt::format("[{}] {} = {} differs from the value {} used to generate {}", section, key, mine,
                                    value.get<std::string>(), dataset.string()));
  }
}

int cmd_eval(const Invocation& inv, std::ostream& out) {
  Config cfg = load_config(inv, "eval", "eval", "output");
  const RunSettings run = read_run(cfg);
  apply_thread_cap(thread_cap(inv));

  Eigen::Vector3d landing_target{1.0, 0.0, 0.0};
  const dyn::ControlledSystem system = read_system(cfg, run.problem, &landing_target);
  const fs::path dataset_path = cfg.get_path("eval", "dataset");
  const std::string checkpoint = cfg.get_string("eval", "checkpoint");
  if (checkpoint != "best" && checkpoint != "final")
    throw ConfigError(fmt::format("[eval] checkpoint must be best or final, got '{}'", checkpoint));
  const std::size_t n_cases = get_size(cfg, "eval", "cases");
  const std::uint64_t case_seed = cfg.get_uint("eval", "case_seed", run.seed);
  dyn::ClosedLoopOptions cl;
  cl.steps = static_cast<int>(cfg.get_int("eval", "steps"));
  const std::string feedback = cfg.get_string("eval", "feedback");
  if (feedback == "continuous") cl.mode = dyn::FeedbackMode::Continuous;
  else if (feedback == "zoh") cl.mode = dyn::FeedbackMode::ZeroOrderHold;
  else throw ConfigError(fmt::format("[eval] feedback must be continuous or zoh, got '{}'", feedback));
  cl.update_rate = cfg.get_double("eval", "update_rate");
  if (cl.steps < 1) throw ConfigError("[eval] steps must be >= 1");
  if (n_cases == 0) throw ConfigError("[eval] cases must be >= 1");

  std::vector<NetworkEntry> nets;
  std::set<std::string> labels;
  for (const auto& item : cfg.get_list("eval", "networks")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size())
      throw ConfigError(fmt::format("[eval] networks entries are label:directory, got '{}'", item));
    NetworkEntry e;
    e.label = item.substr(0, colon);
    if (!labels.insert(e.label).second) throw ConfigError(fmt::format("[eval] network label '{}' is repeated", e.label));
    e.dir = fs::absolute(cfg.resolve_path(item.substr(colon + 1))).lexically_normal();
    nets.push_back(std::move(e));
  }
  if (nets.empty()) throw ConfigError("[eval] networks is empty");
  {
    // Write resolved directories back so the snapshot does not depend on the working directory.
    std::string resolved;
    for (const auto& e : nets) resolved += (resolved.empty() ? "" : ", ") + e.label + ":" + e.dir.string();
    cfg.set("eval", "networks", resolved);
  }
  const fs::path dir = cfg.get_path("eval", "output");
  check_dataset_plant(dataset_path, cfg, run.problem);
  for (const char* sec : {"run", "eval"}) cfg.reject_unknown(sec);
  cfg.reject_unknown(plant_section(run.problem));

  // Every network must come from this dataset and share one train/validation split.
  const std::string dataset_digest = sha256_file(dataset_path);
  for (auto& e : nets) {
    const fs::path mpath = e.dir / "manifest.json";
    if (!fs::exists(mpath)) throw ConfigError(fmt::format("network '{}': no manifest.json in {}", e.label, e.dir.string()));
    const RunManifest m = RunManifest::read(mpath);
    const auto ds = m.inputs.find("dataset");
    if (ds == m.inputs.end() || ds->second.second != dataset_digest)
      throw ConfigError(fmt::format("network '{}' was not trained on {}", e.label, dataset_path.string()));
    if (config_value(m.config, "run", "problem", mpath) != std::string(to_string(run.problem)))
      throw ConfigError(fmt::format("network '{}' was trained for another problem", e.label));
    e.train_fraction = std::stod(config_value(m.config, "train", "train_fraction", mpath));
    e.split_seed = std::stoull(config_value(m.config, "train", "split_seed", mpath));
    if (e.train_fraction != nets.front().train_fraction || e.split_seed != nets.front().split_seed)
      throw ConfigError(fmt::format("network '{}' used a different train/validation split", e.label));
    e.network = nn::load_checkpoint(e.dir / fmt::format("checkpoint_{}.gcnet", checkpoint));
    e.scaler = data::load_scaler(e.dir / "scaler.txt");
    if (e.network->spec().input_dim != state_dim(run.problem) || e.network->spec().output_dim != control_dim(run.problem))
      throw ConfigError(fmt::format("network '{}' does not match the {} problem dimensions", e.label,
                                    to_string(run.problem)));
    if (e.scaler.dim() != state_dim(run.problem))
      throw ConfigError(fmt::format("network '{}': scaler dimension mismatch", e.label));
  }

  const data::TrajectoryDataset ds = load_dataset_for(dataset_path, run.problem);
  const data::Split split = data::split(ds, {nets.front().train_fraction, nets.front().split_seed});
  if (split.validation.trajectory_count() < n_cases)
    throw ConfigError(fmt::format("[eval] cases = {} but the validation split has {} trajectories", n_cases,
                                  split.validation.trajectory_count()));
  std::optional<Eigen::Matrix<double, 6, 1>> target;
  if (run.problem != Problem::Drone) target = eval::problem_target(system, landing_target);
  const auto cases = eval::build_eval_cases(split.validation, n_cases, case_seed, target);

  std::vector<eval::EvalReport> reports;
  for (const auto& e : nets) {
    out << fmt::format("evaluating {} on {} cases\n", e.label, cases.size()) << std::flush;
    eval::EvalReport r = eval::evaluate(*e.network, e.scaler, system, cases, cl);
    r.label = e.label;
    const auto& spec = e.network->spec();
    r.metadata = {
        {"activation", std::string(nn::to_string(spec.hidden_activation.kind))},
        {"network", fmt::format("{} -> {} -> {}", spec.input_dim, describe_widths(spec.hidden_widths), spec.output_dim)},
        {"parameters", std::to_string(nn::count_params(spec))},
        {"checkpoint", (e.dir / fmt::format("checkpoint_{}.gcnet", checkpoint)).string()},
        {"dataset", dataset_path.string()},
        {"profile", run.profile},
        {"seed", std::to_string(case_seed)},
        {"units", "normalized"},
    };
    reports.push_back(std::move(r));
  }
  eval::emit_report(reports, dir);
  out << eval::summary_text(reports);

  RunManifest m = make_manifest("eval", run, cfg, {"run", plant_section(run.problem), "eval"});
  m.add_input("dataset", dataset_path);
  for (const auto& e : nets) {
    m.add_input(e.label + "_checkpoint", e.dir / fmt::format("checkpoint_{}.gcnet", checkpoint));
    m.add_input(e.label + "_scaler", e.dir / "scaler.txt");
    m.add_input(e.label + "_manifest", e.dir / "manifest.json");
  }
  m.add_output("errors", dir / "errors.csv");
  m.add_output("summary", dir / "summary.txt");
  m.write(dir / "manifest.json");
  out << fmt::format("wrote {}\n", dir.string());
  return kExitOk;
}

// ---------------------------------------------------------------- inspect

std::string describe_dataset(const data::TrajectoryDataset& ds) {
  std::string s;
  s += fmt::format("problem: {}\n", to_string(ds.problem));
  s += fmt::format("state_dim: {}\ncontrol_dim: {}\n", ds.state_dim, ds.control_dim);
  s += fmt::format("trajectories: {}\nsamples_per_trajectory: {}\nrecords: {}\naux_dim: {}\n", ds.trajectory_count(),
                   ds.samples_per_trajectory, ds.record_count(), ds.aux_dim);
  if (ds.record_count() == 0) return s;
  const auto tf = summarize(ds.final_times);
  s += fmt::format("t_f: min {:.6g} mean {:.6g} max {:.6g}\n", tf.min, tf.mean, tf.max);
  auto columns = [&](const std::vector<double>& values, std::size_t dim, const char* name) {
    for (std::size_t j = 0; j < dim; ++j) {
      double lo = values[j], hi = values[j];
      for (std::size_t r = 0; r < ds.record_count(); ++r) {
        lo = std::min(lo, values[r * dim + j]);
        hi = std::max(hi, values[r * dim + j]);
      }
      s += fmt::format("{}[{}]: [{:.6g}, {:.6g}]\n", name, j, lo, hi);
    }
  };
  columns(ds.states, ds.state_dim, "state");
  columns(ds.controls, ds.control_dim, "control");
  return s;
}

std::string describe_checkpoint(const nn::Network& net) {
  const auto& spec = net.spec();
  std::string heads;
  for (auto h : spec.output_heads) heads += (heads.empty() ? "" : ", ") + std::string(nn::to_string(h));
  std::string s;
  s += fmt::format("input_dim: {}\noutput_dim: {}\n", spec.input_dim, spec.output_dim);
  s += fmt::format("hidden: {}\n", describe_widths(spec.hidden_widths));
  s += fmt::format("activation: {}\n", nn::to_string(spec.hidden_activation.kind));
  if (spec.hidden_activation.kind == nn::ActivationKind::Sine)
    s += fmt::format("omega0: {}\n", spec.hidden_activation.omega0);
  s += fmt::format("heads: {}\nparameters: {}\nweight_hash: {:016x}\n", heads, net.parameter_count(), net.weight_hash());
  return s;
}

std::string describe_manifest(const fs::path& path) {
  const RunManifest m = RunManifest::read(path);
  std::string s = m.to_json().dump(2) + "\n";
  auto check = [&s](const char* what, const auto& files) {
    for (const auto& [role, entry] : files) {
      std::string status = "missing";
      if (fs::exists(entry.first)) status = sha256_file(entry.first) == entry.second ? "ok" : "changed";
      s += fmt::format("{} {}: {} ({})\n", what, role, status, entry.first);
    }
  };
  check("input", m.inputs);
  check("output", m.outputs);
  return s;
}

int cmd_inspect(const std::string& kind, const std::vector<std::string>& targets, const std::string& csv_out,
                const std::string& text_out, std::ostream& out) {
  auto need = [&](std::size_t n, const char* usage) {
    if (targets.size() != n) throw ConfigError(fmt::format("usage: gcnet inspect {}", usage));
  };
  if (kind == "dataset") {
    need(1, "dataset FILE [--csv OUT]");
    const auto ds = data::read_dataset(fs::path(targets[0]));
    out << describe_dataset(ds);
    if (!csv_out.empty()) {
      ensure_parent(csv_out);
      data::write_csv(fs::path(csv_out), ds);
      out << fmt::format("wrote {}\n", csv_out);
    }
  } else if (kind == "checkpoint") {
    need(1, "checkpoint FILE [--text OUT]");
    const auto net = nn::load_checkpoint(targets[0]);
    out << describe_checkpoint(net);
    if (!text_out.empty()) {
      write_text(text_out, nn::export_text(net));
      out << fmt::format("wrote {}\n", text_out);
    }
  } else if (kind == "manifest") {
    need(1, "manifest FILE");
    out << describe_manifest(targets[0]);
  } else if (kind == "profile") {
    need(2, "profile PROBLEM desk|paper");
    out << profile_ini(parse_problem(targets[0]), targets[1]);
  } else {
    throw ConfigError(fmt::format("inspect: unknown kind '{}' (dataset, checkpoint, manifest, profile)", kind));
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Guidance and control network lab: optimal-trajectory data, behavioural cloning, closed-loop evaluation",
               "gcnet"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));
  Invocation inv;
  app.add_option("--threads", inv.threads, "Upper bound on worker threads (also GCNET_THREADS)")
      ->check(CLI::PositiveNumber);

  auto add_common = [&inv](CLI::App* sub, bool with_profile) {
    sub->add_option("-c,--config", inv.config_path, "INI config or run manifest")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", inv.output, "Output path (overrides the config)");
    sub->add_option("--set", inv.overrides, "Override one setting: section.key=value")->take_all();
    if (with_profile) sub->add_option("--profile", inv.profile, "Built-in defaults: desk or paper");
    sub->add_option("--log-every", inv.log_every, "Print every N-th epoch (0 silences)");
  };

  auto* gen = app.add_subcommand("generate", "Solve optimal trajectories and write a dataset");
  add_common(gen, true);

  std::string ingest_input, ingest_problem;
  auto* ing = app.add_subcommand("ingest", "Convert an external trajectory CSV into a dataset");
  ing->add_option("-i,--input", ingest_input, "CSV file")->check(CLI::ExistingFile);
  ing->add_option("-p,--problem", ingest_problem, "drone, landing or transfer");
  ing->add_option("-o,--output", inv.output, "Dataset file to write");
  ing->add_option("-c,--config", inv.config_path, "INI config or run manifest")->check(CLI::ExistingFile);

  auto* trn = app.add_subcommand("train", "Train one network");
  add_common(trn, true);
  auto* cmp = app.add_subcommand("compare", "Train one network per hidden activation and compare the curves");
  add_common(cmp, true);
  auto* evl = app.add_subcommand("eval", "Closed-loop evaluation of trained networks");
  add_common(evl, true);

  std::string inspect_kind, csv_out, text_out;
  std::vector<std::string> inspect_targets;
  auto* ins = app.add_subcommand("inspect", "Describe a dataset, checkpoint, manifest or built-in profile");
  ins->add_option("kind", inspect_kind, "dataset | checkpoint | manifest | profile")->required();
  ins->add_option("targets", inspect_targets, "File, or PROBLEM PROFILE for profiles")->required();
  ins->add_option("--csv", csv_out, "Export a dataset as CSV");
  ins->add_option("--text", text_out, "Export a checkpoint as text");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "gcnet: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate(inv, out);
    if (ing->parsed()) return cmd_ingest(inv, ingest_input, ingest_problem, out);
    if (trn->parsed()) return cmd_train(inv, out);
    if (cmp->parsed()) return cmd_compare(inv, out);
    if (evl->parsed()) return cmd_eval(inv, out);
    if (ins->parsed()) return cmd_inspect(inspect_kind, inspect_targets, csv_out, text_out, out);
  } catch (const ConfigError& e) {
    err << "gcnet: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const data::EmptyInputError& e) {
    err << "gcnet: empty input: " << e.what() << '\n';
    return kExitIo;
  } catch (const data::CsvRowError& e) {
    err << "gcnet: input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "gcnet: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "gcnet: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "gcnet: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "gcnet: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "gcnet: error: " << e.what() << '\n';
    return kExitOther;
  }
  err << "gcnet: no subcommand\n";
  return kExitConfig;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gcnet::cli
