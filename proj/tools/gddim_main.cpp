// gddim: train, sample, evaluate and compare location-scale diffusion models.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 partial grid failure (experiment only).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gddim/config.hpp"
#include "gddim/dataset.hpp"
#include "gddim/error.hpp"
#include "gddim/experiment.hpp"
#include "gddim/io.hpp"
#include "gddim/metrics.hpp"
#include "gddim/oracle.hpp"
#include "gddim/sampler.hpp"
#include "gddim/selftest.hpp"
#include "gddim/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPartialGrid = 3;

template <typename T>
void override_key(gddim::KeyValueConfig& cfg, const std::string& key, const std::optional<T>& value) {
  if (!value) return;
  if constexpr (std::is_same_v<T, std::string>) {
    cfg.set(key, *value);
  } else {
    std::ostringstream out;
    out << *value;
    cfg.set(key, out.str());
  }
}

gddim::KeyValueConfig load_config(const std::string& path) {
  return path.empty() ? gddim::KeyValueConfig{} : gddim::KeyValueConfig::from_file(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gddim::FormatError("cannot open '" + path + "' for writing");
  out << text;
}

struct TrainArgs {
  std::string config;
  std::string out;
  std::string loss_log;
  std::optional<std::string> family, schedule, dataset;
  std::optional<int> T, iterations, batch_size, log_every;
  std::optional<double> learning_rate;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_data;
  bool quiet = false;
};

int run_train(const TrainArgs& args) {
  gddim::KeyValueConfig cfg = load_config(args.config);
  cfg.require_known(gddim::train_config_keys());
  override_key(cfg, "family", args.family);
  override_key(cfg, "schedule", args.schedule);
  override_key(cfg, "dataset", args.dataset);
  override_key(cfg, "T", args.T);
  override_key(cfg, "iterations", args.iterations);
  override_key(cfg, "batch_size", args.batch_size);
  override_key(cfg, "log_every", args.log_every);
  override_key(cfg, "learning_rate", args.learning_rate);
  override_key(cfg, "seed", args.seed);
  override_key(cfg, "n_data", args.n_data);
  const gddim::TrainConfig tc = gddim::make_train_config(cfg);

  const auto result = gddim::train(tc, [&](const gddim::LossLogRow& row) {
    if (!args.quiet) {
      std::cerr << "iter " << row.iteration << " loss_mu " << row.loss_mu << " loss_var " << row.loss_var << '\n';
    }
  });
  gddim::save_checkpoint(args.out, result.checkpoint);
  if (!args.loss_log.empty()) gddim::write_loss_log_csv(args.loss_log, result.log);
  return kExitOk;
}

struct SampleArgs {
  std::string checkpoint;
  std::string oracle_atoms;
  std::string family = "gaussian";
  std::string schedule = "linear";
  int T = 1000;
  int n = 1000;
  int steps = 100;
  std::string mode = "mean_var";
  std::uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleArgs& args) {
  const gddim::SampleMode mode = gddim::parse_sample_mode(args.mode);
  gddim::SampleBatch batch;
  if (!args.checkpoint.empty()) {
    const gddim::Checkpoint ckpt = gddim::load_checkpoint(args.checkpoint);
    const gddim::Schedule sched = gddim::Schedule::build(ckpt.schedule, ckpt.T);
    const gddim::NoiseFamily family(ckpt.family);
    const gddim::NetMomentSource source(ckpt.net, sched);
    batch = gddim::sample(args.n, sched, family, source, mode, args.steps, args.seed);
  } else {
    const gddim::AtomicDistribution atoms = gddim::read_atoms_csv(args.oracle_atoms);
    const gddim::Schedule sched = gddim::Schedule::build(gddim::parse_schedule_kind(args.schedule), args.T);
    const gddim::NoiseFamily family(gddim::parse_family(args.family));
    const gddim::OracleMomentSource source(atoms, sched, family);
    batch = gddim::sample(args.n, sched, family, source, mode, args.steps, args.seed);
  }
  gddim::write_points_csv(args.out, batch.points, batch.metadata.comment_lines());
  return kExitOk;
}

struct EvalArgs {
  std::string generated;
  std::string reference;
  std::string centers;
  std::string out;
  double radius = 0.2;
  int projections = gddim::kDefaultProjections;
  std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& args) {
  const gddim::Points gen = gddim::read_points_csv(args.generated);
  const gddim::Points ref = gddim::read_points_csv(args.reference);
  const gddim::Points centers = args.centers.empty() ? gddim::Points{} : gddim::read_points_csv(args.centers);
  const gddim::MetricReport report = gddim::evaluate(gen, ref, centers, args.radius, args.projections, args.seed);
  const std::string json = report.to_json();
  if (args.out.empty()) {
    std::cout << json;
  } else {
    write_text(args.out, json);
  }
  return kExitOk;
}

struct ExperimentArgs {
  std::string config;
  std::optional<std::string> out_dir, families, schedules;
  std::optional<int> iterations;
};

int run_experiment_cmd(const ExperimentArgs& args) {
  gddim::KeyValueConfig cfg = load_config(args.config);
  cfg.require_known(gddim::experiment_config_keys());
  override_key(cfg, "out_dir", args.out_dir);
  override_key(cfg, "families", args.families);
  override_key(cfg, "schedules", args.schedules);
  override_key(cfg, "iterations", args.iterations);
  gddim::ExperimentSpec spec;
  spec.cells = gddim::default_grid();
  spec = gddim::make_experiment_spec(cfg, spec);
  const auto result = gddim::run_experiment(spec, [](const std::string& msg) { std::cerr << msg << '\n'; });
  std::cout << gddim::results_csv(result);
  return result.all_succeeded() ? kExitOk : kExitPartialGrid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location-scale diffusion toolkit: forward corruption, moment-matching training, "
               "deterministic reverse sampling, exact posterior oracle and evaluation metrics"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a mean/variance approximator");
  train->add_option("--config", train_args.config, "key = value config file");
  train->add_option("--out", train_args.out, "Checkpoint output path")->required();
  train->add_option("--loss-log", train_args.loss_log, "Loss log CSV (iteration,loss_mu,loss_var)");
  train->add_option("--family", train_args.family, "gaussian | laplace | student_t:<df> | gg:<beta> | uniform");
  train->add_option("--schedule", train_args.schedule, "linear | cosine");
  train->add_option("--dataset", train_args.dataset, "ring8 | two_moons | checkerboard | from_csv:<path>");
  train->add_option("--T", train_args.T, "Diffusion length");
  train->add_option("--iterations", train_args.iterations, "Adam steps");
  train->add_option("--batch-size", train_args.batch_size, "Examples per step");
  train->add_option("--log-every", train_args.log_every, "Loss log interval in steps");
  train->add_option("--learning-rate", train_args.learning_rate, "Adam step size");
  train->add_option("--seed", train_args.seed, "Training seed");
  train->add_option("--n-data", train_args.n_data, "Dataset size");
  train->add_flag("--quiet", train_args.quiet, "Suppress progress on stderr");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Generate samples with a checkpoint or the exact oracle");
  auto* ckpt_opt = sample->add_option("--checkpoint", sample_args.checkpoint, "Trained checkpoint");
  auto* atoms_opt = sample->add_option("--oracle-atoms", sample_args.oracle_atoms, "Atoms CSV for the exact oracle");
  ckpt_opt->excludes(atoms_opt);
  sample->add_option("--family", sample_args.family, "Noise family (oracle only)");
  sample->add_option("--schedule", sample_args.schedule, "Schedule (oracle only)");
  sample->add_option("--T", sample_args.T, "Diffusion length (oracle only)");
  sample->add_option("--n", sample_args.n, "Number of samples");
  sample->add_option("--steps", sample_args.steps, "Reverse steps");
  sample->add_option("--mode", sample_args.mode, "mean | mean_var");
  sample->add_option("--seed", sample_args.seed, "Sampling seed");
  sample->add_option("--out", sample_args.out, "Output CSV")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Compare generated points with reference points");
  eval->add_option("--generated", eval_args.generated, "Generated points CSV")->required();
  eval->add_option("--reference", eval_args.reference, "Reference points CSV")->required();
  eval->add_option("--centers", eval_args.centers, "Mode centers CSV for mode coverage");
  eval->add_option("--radius", eval_args.radius, "Mode coverage radius");
  eval->add_option("--projections", eval_args.projections, "Sliced-Wasserstein directions");
  eval->add_option("--seed", eval_args.seed, "Metric seed");
  eval->add_option("--out", eval_args.out, "JSON report path (stdout if omitted)");

  SampleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Sample with exact posterior moments of an atomic dataset");
  oracle->add_option("--atoms", oracle_args.oracle_atoms, "Atoms CSV (optional 'weight' column)")->required();
  oracle->add_option("--family", oracle_args.family, "Noise family");
  oracle->add_option("--schedule", oracle_args.schedule, "linear | cosine");
  oracle->add_option("--T", oracle_args.T, "Diffusion length");
  oracle->add_option("--steps", oracle_args.steps, "Reverse steps");
  oracle->add_option("--n-samples", oracle_args.n, "Number of chains");
  oracle->add_option("--mode", oracle_args.mode, "mean | mean_var");
  oracle->add_option("--seed", oracle_args.seed, "Sampling seed");
  oracle->add_option("--out", oracle_args.out, "Samples CSV output path")->required();

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Run the noise-family x schedule comparison grid");
  experiment->add_option("--config", exp_args.config, "key = value config file");
  experiment->add_option("--out-dir", exp_args.out_dir, "Output directory");
  experiment->add_option("--families", exp_args.families, "Comma-separated families");
  experiment->add_option("--schedules", exp_args.schedules, "Comma-separated schedules");
  experiment->add_option("--iterations", exp_args.iterations, "Training steps per cell");

  auto* selftest = app.add_subcommand("selftest", "Run the fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*train) return run_train(train_args);
    if (*sample) {
      if (sample_args.checkpoint.empty() && sample_args.oracle_atoms.empty()) {
        std::cerr << "sample: one of --checkpoint or --oracle-atoms is required\n";
        return kExitValidation;
      }
      return run_sample(sample_args);
    }
    if (*eval) return run_eval(eval_args);
    if (*oracle) return run_sample(oracle_args);
    if (*experiment) return run_experiment_cmd(exp_args);
    if (*selftest) return gddim::print_selftest(std::cout, gddim::run_selftest()) ? kExitOk : kExitValidation;
  } catch (const gddim::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
