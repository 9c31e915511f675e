#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gddim/config.hpp"
#include "gddim/metrics.hpp"
#include "gddim/noise_family.hpp"
#include "gddim/sampler.hpp"
#include "gddim/schedule.hpp"

namespace gddim {

struct ExperimentCell {
  FamilyKind family;
  ScheduleKind schedule = ScheduleKind::Linear;
};

/// A family x schedule grid trained, sampled and evaluated under one shared
/// setup. All randomness comes from the explicit seeds.
struct ExperimentSpec {
  std::vector<ExperimentCell> cells;
  int T = 1000;
  int steps = 100;
  std::string dataset = "ring8";
  std::size_t n_train = 20000;
  std::size_t n_reference = 10000;
  int n_samples = 10000;
  int iterations = 20000;
  int batch_size = 256;
  double learning_rate = 1e-3;
  Architecture arch;
  SampleMode mode = SampleMode::MeanAndVariance;
  int n_projections = kDefaultProjections;
  double coverage_radius = 0.2;
  std::uint64_t data_seed = 0;
  std::uint64_t train_seed = 1;
  std::uint64_t sample_seed = 2;
  std::uint64_t metric_seed = 3;
  std::filesystem::path output_dir = "experiment_out";

  void validate() const;
};

/// gaussian, laplace, student_t:3, gg:1.5, gg:2.5, uniform crossed with linear, cosine.
std::vector<ExperimentCell> default_grid();

/// Config keys: families (comma list), schedules (comma list), T,
/// sample_steps, dataset, n_train, n_reference, n_samples, iterations,
/// batch_size, learning_rate, embed_dim, hidden, mode, n_projections,
/// coverage_radius, data_seed, train_seed, sample_seed, metric_seed, out_dir.
ExperimentSpec make_experiment_spec(const KeyValueConfig& cfg, ExperimentSpec base = {});
const std::set<std::string>& experiment_config_keys();

struct CellResult {
  ExperimentCell cell;
  std::optional<MetricReport> report;
  std::string error;  // empty on success
  int exit_code = 0;  // error class of a failed cell
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  bool all_succeeded() const;
};

/// Runs every cell (train -> sample -> evaluate against held-out data) and
/// writes into spec.output_dir:
///   results.csv     family,schedule,sliced_wasserstein,energy_distance,mode_coverage,status
///   manifest.json   every setting and seed
///   <cell>/         checkpoint.gddm, loss_log.csv, samples.csv, metrics.json
/// A failing cell is recorded with status "error: ..." and the run continues.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::function<void(const std::string&)>& progress = {});

std::string manifest_json(const ExperimentSpec& spec);
std::string results_csv(const ExperimentResult& result);

}  // namespace gddim
