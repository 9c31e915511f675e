#include "gddim/trainer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gddim/dataset.hpp"
#include "gddim/error.hpp"

namespace gddim {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kEmaDecay = 0.99;

// Independent streams carved out of the training seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kDataStream = 2;

}  // namespace

void TrainConfig::validate() const {
  NoiseFamily check(family);
  if (T < 2) throw ConfigError("T must be >= 2");
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
  if (n_data < 2) throw ConfigError("n_data must be >= 2");
}

void forward_corrupt(std::span<const double> x0, int t, const Schedule& sched, const NoiseFamily& family,
                     Rng& rng, std::span<double> x_t, std::span<double> z) {
  if (x_t.size() != x0.size() || z.size() != x0.size()) {
    throw DomainError("forward_corrupt: output spans must match the input dimension");
  }
  const double f = sched.f(t);
  const double g = sched.g(t);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    z[i] = family.sample(rng);
    x_t[i] = f * x0[i] + g * z[i];
  }
}

CorruptedBatch corrupt_batch(const Points& x0, const Schedule& sched, const NoiseFamily& family, Rng& rng) {
  CorruptedBatch batch;
  const auto n = x0.rows();
  const auto d = x0.cols();
  batch.t.resize(static_cast<std::size_t>(n));
  batch.x_t.resize(n, d);
  batch.z.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int t = static_cast<int>(rng.uniform_int(1, sched.T()));
    batch.t[static_cast<std::size_t>(i)] = t;
    forward_corrupt(std::span<const double>(x0.row(i).data(), static_cast<std::size_t>(d)), t, sched, family, rng,
                    std::span<double>(batch.x_t.row(i).data(), static_cast<std::size_t>(d)),
                    std::span<double>(batch.z.row(i).data(), static_cast<std::size_t>(d)));
  }
  return batch;
}

MomLoss mom_loss_from_predictions(const Points& z, const Points& mean, const Points& variance, bool stop_gradient,
                                  Eigen::MatrixXd* d_mean, Eigen::MatrixXd* d_var) {
  const auto n = z.rows();
  const auto d = z.cols();
  if (n == 0 || mean.rows() != n || mean.cols() != d || variance.rows() != n || variance.cols() != d) {
    throw DomainError("mom_loss: predictions must match the noise batch shape");
  }
  const double scale = 1.0 / static_cast<double>(n * d);
  if (d_mean) d_mean->resize(d, n);
  if (d_var) d_var->resize(d, n);
  MomLoss loss;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double err = z(i, j) - mean(i, j);
      const double resid = err * err - variance(i, j);
      loss.loss_mu += err * err;
      loss.loss_var += resid * resid;
      if (d_mean) {
        double g = -2.0 * err;
        if (!stop_gradient) g += 2.0 * resid * (-2.0 * err);
        (*d_mean)(j, i) = g * scale;
      }
      if (d_var) (*d_var)(j, i) = -2.0 * resid * scale;
    }
  }
  loss.loss_mu *= scale;
  loss.loss_var *= scale;
  return loss;
}

MomLoss mom_loss(const Approximator& net, const Points& x0, const Schedule& sched, const NoiseFamily& family,
                 Rng& rng, bool stop_gradient, std::span<double> grad) {
  Approximator::Tape tape;
  return mom_loss(net, x0, sched, family, rng, stop_gradient, grad, tape);
}

MomLoss mom_loss(const Approximator& net, const Points& x0, const Schedule& sched, const NoiseFamily& family,
                 Rng& rng, bool stop_gradient, std::span<double> grad, Approximator::Tape& tape) {
  if (x0.rows() == 0) throw DomainError("mom_loss: empty batch");
  const CorruptedBatch batch = corrupt_batch(x0, sched, family, rng);
  net.forward(batch.x_t, batch.t, sched.T(), tape);

  const auto n = batch.x_t.rows();
  const auto d = batch.x_t.cols();
  std::vector<HeadScaling> scaling(static_cast<std::size_t>(n));
  Points mean(n, d);
  Points variance(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int t = batch.t[static_cast<std::size_t>(i)];
    const HeadScaling hs{sched.f(t), sched.g(t)};
    scaling[static_cast<std::size_t>(i)] = hs;
    for (Eigen::Index j = 0; j < d; ++j) {
      mean(i, j) = hs.mean(batch.x_t(i, j), tape.mean(j, i));
      variance(i, j) = hs.variance(tape.variance(j, i));
    }
  }
  if (grad.empty()) return mom_loss_from_predictions(batch.z, mean, variance, stop_gradient);

  Eigen::MatrixXd d_mean;
  Eigen::MatrixXd d_var;
  const MomLoss loss = mom_loss_from_predictions(batch.z, mean, variance, stop_gradient, &d_mean, &d_var);
  for (Eigen::Index i = 0; i < n; ++i) {
    const HeadScaling& hs = scaling[static_cast<std::size_t>(i)];
    d_mean.col(i) *= hs.f;
    d_var.col(i) *= hs.f * hs.f;
  }
  net.backward(tape, d_mean, d_var, grad);
  return loss;
}

TrainResult train(const TrainConfig& cfg, const Points& data, const std::function<void(const LossLogRow&)>& on_log) {
  cfg.validate();
  if (data.rows() < 1) throw ConfigError("train: dataset is empty");
  Architecture arch = cfg.arch;
  arch.data_dim = static_cast<int>(data.cols());

  const Schedule sched = Schedule::build(cfg.schedule, cfg.T);
  const NoiseFamily family(cfg.family);
  TrainState state{Approximator::initialized(arch, mix_seed(cfg.seed, kInitStream)), {}, {}, 0, 0.0, 0.0};
  const std::size_t n_params = state.net.parameter_count();
  state.adam_m.assign(n_params, 0.0);
  state.adam_v.assign(n_params, 0.0);

  Rng rng = Rng::stream(cfg.seed, kBatchStream);
  std::vector<double> grad(n_params);
  Approximator::Tape workspace;
  Points x0(cfg.batch_size, data.cols());
  TrainResult result;
  double window_mu = 0.0;
  double window_var = 0.0;
  int window = 0;

  for (int it = 1; it <= cfg.iterations; ++it) {
    for (Eigen::Index i = 0; i < x0.rows(); ++i) {
      x0.row(i) = data.row(static_cast<Eigen::Index>(rng.uniform_int(0, data.rows() - 1)));
    }
    const MomLoss loss = mom_loss(state.net, x0, sched, family, rng, cfg.stop_gradient, grad, workspace);
    if (!std::isfinite(loss.loss_mu) || !std::isfinite(loss.loss_var)) {
      std::ostringstream msg;
      msg << "non-finite loss at iteration " << it << ": loss_mu=" << loss.loss_mu << " loss_var=" << loss.loss_var;
      throw NumericalError(msg.str());
    }

    state.iteration = it;
    const double c1 = 1.0 - std::pow(kAdamBeta1, it);
    const double c2 = 1.0 - std::pow(kAdamBeta2, it);
    auto params = state.net.parameters();
    for (std::size_t k = 0; k < n_params; ++k) {
      state.adam_m[k] = kAdamBeta1 * state.adam_m[k] + (1.0 - kAdamBeta1) * grad[k];
      state.adam_v[k] = kAdamBeta2 * state.adam_v[k] + (1.0 - kAdamBeta2) * grad[k] * grad[k];
      const double m_hat = state.adam_m[k] / c1;
      const double v_hat = state.adam_v[k] / c2;
      params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + kAdamEps);
    }

    state.ema_loss_mu = it == 1 ? loss.loss_mu : kEmaDecay * state.ema_loss_mu + (1 - kEmaDecay) * loss.loss_mu;
    state.ema_loss_var = it == 1 ? loss.loss_var : kEmaDecay * state.ema_loss_var + (1 - kEmaDecay) * loss.loss_var;
    window_mu += loss.loss_mu;
    window_var += loss.loss_var;
    ++window;
    if (it % cfg.log_every == 0 || it == cfg.iterations) {
      const LossLogRow row{it, window_mu / window, window_var / window};
      result.log.push_back(row);
      if (on_log) on_log(row);
      window_mu = window_var = 0.0;
      window = 0;
    }
  }

  result.checkpoint = Checkpoint{cfg.family, cfg.schedule, cfg.T, std::move(state.net)};
  return result;
}

TrainResult train(const TrainConfig& cfg, const std::function<void(const LossLogRow&)>& on_log) {
  cfg.validate();
  const Dataset ds = make_dataset(cfg.dataset, cfg.n_data, mix_seed(cfg.seed, kDataStream));
  return train(cfg, ds.points, on_log);
}

void write_loss_log_csv(const std::filesystem::path& path, const std::vector<LossLogRow>& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out << "iteration,loss_mu,loss_var\n";
  for (const auto& row : log) {
    out << row.iteration << ',' << format_double(row.loss_mu) << ',' << format_double(row.loss_var) << '\n';
  }
}

}  // namespace gddim
