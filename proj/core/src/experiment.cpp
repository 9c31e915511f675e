#include "gddim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gddim/dataset.hpp"
#include "gddim/error.hpp"
#include "gddim/io.hpp"
#include "gddim/trainer.hpp"

namespace gddim {
namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first != std::string::npos) out.push_back(item.substr(first, last - first + 1));
  }
  return out;
}

std::string cell_dir_name(const ExperimentCell& cell) {
  std::string name = cell.family.name() + "_" + to_string(cell.schedule);
  for (char& c : name) {
    if (c == ':' || c == '.') c = '-';
  }
  return name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << text;
}

TrainConfig cell_train_config(const ExperimentSpec& spec, const ExperimentCell& cell) {
  TrainConfig cfg;
  cfg.family = cell.family;
  cfg.schedule = cell.schedule;
  cfg.T = spec.T;
  cfg.batch_size = spec.batch_size;
  cfg.iterations = spec.iterations;
  cfg.learning_rate = spec.learning_rate;
  cfg.seed = spec.train_seed;
  cfg.dataset = spec.dataset;
  cfg.n_data = spec.n_train;
  cfg.arch = spec.arch;
  return cfg;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (cells.empty()) throw ConfigError("experiment: the grid has no cells");
  if (T < 2) throw ConfigError("experiment: T must be >= 2");
  if (steps < 1 || steps > T) throw ConfigError("experiment: sample_steps must lie in [1, T]");
  if (n_samples < 2) throw ConfigError("experiment: n_samples must be >= 2");
  if (n_train < 2 || n_reference < 2) throw ConfigError("experiment: n_train and n_reference must be >= 2");
  if (n_projections < 1) throw ConfigError("experiment: n_projections must be >= 1");
  if (!(coverage_radius > 0.0)) throw ConfigError("experiment: coverage_radius must be > 0");
  for (const auto& cell : cells) cell_train_config(*this, cell).validate();
}

std::vector<ExperimentCell> default_grid() {
  const std::vector<FamilyKind> families = {
      FamilyKind::gaussian(),
      FamilyKind::laplace(),
      FamilyKind::student_t(3.0),
      FamilyKind::generalized_gaussian(1.5),
      FamilyKind::generalized_gaussian(2.5),
      FamilyKind::uniform(),
  };
  std::vector<ExperimentCell> cells;
  for (ScheduleKind sched : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    for (const auto& fam : families) cells.push_back({fam, sched});
  }
  return cells;
}

const std::set<std::string>& experiment_config_keys() {
  static const std::set<std::string> keys = {
      "families",   "schedules", "T",         "sample_steps", "dataset",         "n_train",
      "n_reference", "n_samples", "iterations", "batch_size",  "learning_rate",   "embed_dim",
      "hidden",     "mode",      "n_projections", "coverage_radius", "data_seed", "train_seed",
      "sample_seed", "metric_seed", "out_dir",
  };
  return keys;
}

ExperimentSpec make_experiment_spec(const KeyValueConfig& cfg, ExperimentSpec base) {
  if (cfg.contains("families") || cfg.contains("schedules")) {
    std::vector<FamilyKind> families;
    std::vector<ScheduleKind> schedules;
    if (auto v = cfg.get("families")) {
      for (const auto& name : split_list(*v)) families.push_back(parse_family(name));
    } else {
      for (const auto& c : base.cells) {
        if (std::find(families.begin(), families.end(), c.family) == families.end()) families.push_back(c.family);
      }
    }
    if (auto v = cfg.get("schedules")) {
      for (const auto& name : split_list(*v)) schedules.push_back(parse_schedule_kind(name));
    } else {
      for (const auto& c : base.cells) {
        if (std::find(schedules.begin(), schedules.end(), c.schedule) == schedules.end()) {
          schedules.push_back(c.schedule);
        }
      }
    }
    base.cells.clear();
    for (ScheduleKind s : schedules) {
      for (const auto& f : families) base.cells.push_back({f, s});
    }
  }
  base.T = cfg.get_int("T", base.T);
  base.steps = cfg.get_int("sample_steps", base.steps);
  base.dataset = cfg.get_string("dataset", base.dataset);
  base.n_train = cfg.get_u64("n_train", base.n_train);
  base.n_reference = cfg.get_u64("n_reference", base.n_reference);
  base.n_samples = cfg.get_int("n_samples", base.n_samples);
  base.iterations = cfg.get_int("iterations", base.iterations);
  base.batch_size = cfg.get_int("batch_size", base.batch_size);
  base.learning_rate = cfg.get_double("learning_rate", base.learning_rate);
  base.arch.embed_dim = cfg.get_int("embed_dim", base.arch.embed_dim);
  if (auto v = cfg.get("hidden")) base.arch.hidden = parse_int_list(*v);
  if (auto v = cfg.get("mode")) base.mode = parse_sample_mode(*v);
  base.n_projections = cfg.get_int("n_projections", base.n_projections);
  base.coverage_radius = cfg.get_double("coverage_radius", base.coverage_radius);
  base.data_seed = cfg.get_u64("data_seed", base.data_seed);
  base.train_seed = cfg.get_u64("train_seed", base.train_seed);
  base.sample_seed = cfg.get_u64("sample_seed", base.sample_seed);
  base.metric_seed = cfg.get_u64("metric_seed", base.metric_seed);
  if (auto v = cfg.get("out_dir")) base.output_dir = *v;
  return base;
}

std::string manifest_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["dataset"] = spec.dataset;
  j["T"] = spec.T;
  j["sample_steps"] = spec.steps;
  j["n_train"] = spec.n_train;
  j["n_reference"] = spec.n_reference;
  j["n_samples"] = spec.n_samples;
  j["iterations"] = spec.iterations;
  j["batch_size"] = spec.batch_size;
  j["learning_rate"] = spec.learning_rate;
  j["embed_dim"] = spec.arch.embed_dim;
  j["hidden"] = spec.arch.hidden;
  j["mode"] = to_string(spec.mode);
  j["n_projections"] = spec.n_projections;
  j["coverage_radius"] = spec.coverage_radius;
  j["seeds"] = {{"data", spec.data_seed},
                {"train", spec.train_seed},
                {"sample", spec.sample_seed},
                {"metric", spec.metric_seed}};
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : spec.cells) {
    cells.push_back({{"family", c.family.name()}, {"schedule", to_string(c.schedule)}, {"dir", cell_dir_name(c)}});
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

std::string results_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "family,schedule,sliced_wasserstein,energy_distance,mode_coverage,status\n";
  for (const auto& r : result.cells) {
    out << r.cell.family.name() << ',' << to_string(r.cell.schedule) << ',';
    if (r.report) {
      out << format_double(r.report->sliced_wasserstein) << ',' << format_double(r.report->energy_distance) << ','
          << (r.report->mode_coverage ? format_double(*r.report->mode_coverage) : "") << ",ok\n";
    } else {
      std::string msg = r.error;
      for (char& c : msg) {
        if (c == ',' || c == '\n') c = ';';
      }
      out << ",,,error: " << msg << '\n';
    }
  }
  return out.str();
}

bool ExperimentResult::all_succeeded() const {
  for (const auto& c : cells) {
    if (!c.report) return false;
  }
  return true;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::function<void(const std::string&)>& progress) {
  spec.validate();
  std::filesystem::create_directories(spec.output_dir);
  write_text(spec.output_dir / "manifest.json", manifest_json(spec));

  // Training and held-out points are drawn together so they share one normalization.
  const Dataset full = make_dataset(spec.dataset, spec.n_train + spec.n_reference, spec.data_seed);
  const Points train_points = full.points.topRows(static_cast<Eigen::Index>(spec.n_train));
  const Points reference = full.points.bottomRows(static_cast<Eigen::Index>(spec.n_reference));
  write_points_csv(spec.output_dir / "reference.csv", reference, {"held-out reference points"});

  ExperimentResult result;
  for (const auto& cell : spec.cells) {
    CellResult cr{cell, std::nullopt, {}, 0};
    const std::string label = cell.family.name() + " / " + to_string(cell.schedule);
    try {
      const auto dir = spec.output_dir / cell_dir_name(cell);
      std::filesystem::create_directories(dir);
      if (progress) progress("training " + label);
      const TrainResult trained = train(cell_train_config(spec, cell), train_points);
      save_checkpoint(dir / "checkpoint.gddm", trained.checkpoint);
      write_loss_log_csv(dir / "loss_log.csv", trained.log);

      // Sample from the stored checkpoint so results match the file on disk.
      const Checkpoint ckpt = load_checkpoint(dir / "checkpoint.gddm");
      const Schedule sched = Schedule::build(ckpt.schedule, ckpt.T);
      const NoiseFamily family(ckpt.family);
      const NetMomentSource source(ckpt.net, sched);
      if (progress) progress("sampling " + label);
      const SampleBatch batch = sample(spec.n_samples, sched, family, source, spec.mode, spec.steps, spec.sample_seed);
      write_points_csv(dir / "samples.csv", batch.points, batch.metadata.comment_lines());

      const MetricReport report = evaluate(batch.points, reference, full.centers, spec.coverage_radius,
                                           spec.n_projections, spec.metric_seed);
      write_text(dir / "metrics.json", report.to_json());
      cr.report = report;
      if (progress) progress("done " + label + ": sliced_wasserstein=" + format_double(report.sliced_wasserstein));
    } catch (const Error& e) {
      cr.error = e.what();
      cr.exit_code = e.exit_code();
      if (progress) progress("failed " + label + ": " + e.what());
    } catch (const std::exception& e) {
      cr.error = e.what();
      cr.exit_code = 1;
      if (progress) progress("failed " + label + ": " + e.what());
    }
    result.cells.push_back(std::move(cr));
  }
  write_text(spec.output_dir / "results.csv", results_csv(result));
  return result;
}

}  // namespace gddim
