#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gddim/approximator.hpp"
#include "gddim/io.hpp"
#include "gddim/noise_family.hpp"
#include "gddim/rng.hpp"
#include "gddim/schedule.hpp"
#include "gddim/types.hpp"

namespace gddim {

struct TrainConfig {
  FamilyKind family = FamilyKind::gaussian();
  ScheduleKind schedule = ScheduleKind::Linear;
  int T = 1000;
  int batch_size = 256;
  int iterations = 20000;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::string dataset = "ring8";
  std::size_t n_data = 20000;
  bool stop_gradient = true;
  int log_every = 100;
  Architecture arch;

  /// Throws ConfigError for batch_size < 2, non-positive learning rate, etc.
  void validate() const;
};

/// x_t = f(t) x0 + g(t) z with a fresh standardized z per dimension.
/// x_t and z must have the same length as x0.
void forward_corrupt(std::span<const double> x0, int t, const Schedule& sched, const NoiseFamily& family,
                     Rng& rng, std::span<double> x_t, std::span<double> z);

/// One Monte-Carlo training batch: per-row time index, corrupted point and noise.
struct CorruptedBatch {
  std::vector<int> t;
  Points x_t;
  Points z;
};

/// t is drawn uniformly from {1..T} independently for every row.
CorruptedBatch corrupt_batch(const Points& x0, const Schedule& sched, const NoiseFamily& family, Rng& rng);

struct MomLoss {
  double loss_mu = 0.0;
  double loss_var = 0.0;
  double total() const { return loss_mu + loss_var; }
};

/// The two moment-matching objectives given predictions, each a mean over
/// batch rows and dimensions:
///   loss_mu  = mean (z - mu)^2
///   loss_var = mean ((z - sg[mu])^2 - var)^2
/// If d_mean/d_var are non-null they receive d(loss_mu + loss_var)/d(mu, var)
/// in the approximator's d x B layout. With stop_gradient the loss_var term
/// contributes nothing to d_mean.
MomLoss mom_loss_from_predictions(const Points& z, const Points& mean, const Points& variance, bool stop_gradient,
                                  Eigen::MatrixXd* d_mean = nullptr, Eigen::MatrixXd* d_var = nullptr);

/// Draws a corrupted batch from x0, evaluates the net, maps its heads to
/// moment estimates through HeadScaling at each row's t, and returns both
/// losses. If grad is non-empty it receives the parameter gradient of
/// loss_mu + loss_var.
MomLoss mom_loss(const Approximator& net, const Points& x0, const Schedule& sched, const NoiseFamily& family,
                 Rng& rng, bool stop_gradient, std::span<double> grad = {});

/// Same, reusing `workspace` for activations across calls.
MomLoss mom_loss(const Approximator& net, const Points& x0, const Schedule& sched, const NoiseFamily& family,
                 Rng& rng, bool stop_gradient, std::span<double> grad, Approximator::Tape& workspace);

/// Loss-log entry: losses averaged over the iterations since the previous entry.
struct LossLogRow {
  int iteration = 0;
  double loss_mu = 0.0;
  double loss_var = 0.0;
};

struct TrainState {
  Approximator net;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  int iteration = 0;
  double ema_loss_mu = 0.0;
  double ema_loss_var = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<LossLogRow> log;
};

/// Adam (beta1 0.9, beta2 0.999, eps 1e-8) on loss_mu + loss_var over
/// minibatches drawn with replacement from data. Deterministic given cfg.seed.
/// Throws NumericalError with the iteration and loss components on a
/// non-finite loss.
TrainResult train(const TrainConfig& cfg, const Points& data,
                  const std::function<void(const LossLogRow&)>& on_log = {});

/// Generates cfg.dataset with cfg.n_data points (seeded from cfg.seed) and trains on it.
TrainResult train(const TrainConfig& cfg, const std::function<void(const LossLogRow&)>& on_log = {});

void write_loss_log_csv(const std::filesystem::path& path, const std::vector<LossLogRow>& log);

}  // namespace gddim
