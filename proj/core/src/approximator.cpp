#include "gddim/approximator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gddim/error.hpp"
#include "gddim/rng.hpp"

namespace gddim {
namespace {

using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }


}  // namespace

std::size_t Architecture::parameter_count() const {
  std::size_t count = 0;
  int in = input_dim();
  for (int width : hidden) {
    count += static_cast<std::size_t>(width) * static_cast<std::size_t>(in + 1);
    in = width;
  }
  count += 2 * static_cast<std::size_t>(data_dim) * static_cast<std::size_t>(in + 1);
  return count;
}

void time_embedding(int t, int T, std::span<double> out) {
  const double tau = static_cast<double>(t) / static_cast<double>(T);
  const std::size_t half = out.size() / 2;
  for (std::size_t k = 0; k < half; ++k) {
    const double w = std::numbers::pi * std::ldexp(1.0, static_cast<int>(k));
    out[k] = std::sin(w * tau);
    out[half + k] = std::cos(w * tau);
  }
}

std::vector<double> time_embedding(int t, int T, int dim) {
  std::vector<double> out(static_cast<std::size_t>(dim));
  time_embedding(t, T, out);
  return out;
}

Approximator::Approximator(Architecture arch) : arch_(std::move(arch)) {
  if (arch_.data_dim < 1) throw ConfigError("architecture: data dimension must be >= 1");
  if (arch_.embed_dim < 0 || arch_.embed_dim % 2 != 0) {
    throw ConfigError("architecture: time-embedding dimension must be even and non-negative");
  }
  if (arch_.hidden.empty()) throw ConfigError("architecture: at least one hidden layer is required");
  for (int w : arch_.hidden) {
    if (w < 1) throw ConfigError("architecture: hidden widths must be >= 1");
  }
  params_.assign(arch_.parameter_count(), 0.0);
  build_layout();
}

void Approximator::build_layout() {
  layers_.clear();
  std::size_t offset = 0;
  int in = arch_.input_dim();
  auto add = [&](int out) {
    layers_.push_back({offset, in, out});
    offset += static_cast<std::size_t>(out) * static_cast<std::size_t>(in + 1);
  };
  for (int width : arch_.hidden) {
    add(width);
    in = width;
  }
  add(arch_.data_dim);
  add(arch_.data_dim);
}

Approximator Approximator::initialized(Architecture arch, std::uint64_t seed) {
  Approximator net(std::move(arch));
  Rng rng(seed);
  for (const auto& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    const std::size_t n = static_cast<std::size_t>(layer.out) * static_cast<std::size_t>(layer.in + 1);
    for (std::size_t i = 0; i < n; ++i) {
      net.params_[layer.offset + i] = bound * (2.0 * rng.uniform() - 1.0);
    }
  }
  return net;
}

Eigen::MatrixXd Approximator::make_input(const Points& x, std::span<const int> t, int T) const {
  if (x.cols() != arch_.data_dim) {
    throw DomainError("approximator: expected points of dimension " + std::to_string(arch_.data_dim) +
                      ", got " + std::to_string(x.cols()));
  }
  if (!x.allFinite()) throw DomainError("approximator: non-finite input");
  const auto batch = x.rows();
  Eigen::MatrixXd input(arch_.input_dim(), batch);
  input.topRows(arch_.data_dim) = x.transpose();
  std::vector<double> emb(static_cast<std::size_t>(arch_.embed_dim));
  for (Eigen::Index j = 0; j < batch; ++j) {
    const int tj = t[t.size() == 1 ? 0 : static_cast<std::size_t>(j)];
    if (tj < 1 || tj > T) {
      throw DomainError("approximator: time index " + std::to_string(tj) + " outside [1, " +
                        std::to_string(T) + "]");
    }
    time_embedding(tj, T, emb);
    for (int k = 0; k < arch_.embed_dim; ++k) input(arch_.data_dim + k, j) = emb[static_cast<std::size_t>(k)];
  }
  return input;
}

void Approximator::run(const Eigen::MatrixXd& input, Tape& tape) const {
  const std::size_t depth = arch_.hidden.size();
  tape.pre.resize(depth);
  tape.gate.resize(depth);
  tape.post.resize(depth + 1);
  tape.post[0] = input;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = layers_[l];
    ConstRowMajorMap w(params_.data() + layer.offset, layer.out, layer.in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + layer.offset + w.size(), layer.out);
    tape.pre[l].noalias() = w * tape.post[l];
    tape.pre[l].colwise() += b;
    // SiLU: z * sigmoid(z). exp(-z) may overflow to inf, giving gate 0.
    tape.gate[l] = (1.0 + (-tape.pre[l].array()).exp()).inverse().matrix();
    tape.post[l + 1] = tape.pre[l].cwiseProduct(tape.gate[l]);
  }
  const Eigen::MatrixXd& h = tape.post[depth];
  {
    const auto& layer = layers_[depth];
    ConstRowMajorMap w(params_.data() + layer.offset, layer.out, layer.in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + layer.offset + w.size(), layer.out);
    tape.mean.noalias() = w * h;
    tape.mean.colwise() += b;
  }
  {
    const auto& layer = layers_[depth + 1];
    ConstRowMajorMap w(params_.data() + layer.offset, layer.out, layer.in);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + layer.offset + w.size(), layer.out);
    tape.var_pre.noalias() = w * h;
    tape.var_pre.colwise() += b;
    tape.variance = tape.var_pre.unaryExpr([](double a) { return softplus(a) + kVarianceFloor; });
  }
}

HeadOutput Approximator::forward(std::span<const double> x, int t, int T) const {
  Points batch(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) batch(0, static_cast<Eigen::Index>(i)) = x[i];
  Points mean;
  Points variance;
  forward(batch, t, T, mean, variance);
  HeadOutput out;
  out.mean.assign(mean.data(), mean.data() + mean.size());
  out.variance.assign(variance.data(), variance.data() + variance.size());
  return out;
}

void Approximator::forward(const Points& x, int t, int T, Points& mean, Points& variance) const {
  Tape tape;
  forward(x, t, T, mean, variance, tape);
}

void Approximator::forward(const Points& x, int t, int T, Points& mean, Points& variance, Tape& workspace) const {
  const int ts[1] = {t};
  run(make_input(x, ts, T), workspace);
  mean = workspace.mean.transpose();
  variance = workspace.variance.transpose();
}

void Approximator::forward(const Points& x, std::span<const int> t, int T, Tape& tape) const {
  if (t.size() != static_cast<std::size_t>(x.rows())) {
    throw DomainError("approximator: one time index per row is required");
  }
  run(make_input(x, t, T), tape);
}

void Approximator::backward(const Tape& tape, const Eigen::MatrixXd& d_mean,
                            const Eigen::MatrixXd& d_variance, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw DomainError("backward: gradient buffer has the wrong size");
  const std::size_t depth = arch_.hidden.size();
  const Eigen::MatrixXd& h = tape.post[depth];

  auto write_layer = [&](const LayerView& layer, const Eigen::MatrixXd& delta, const Eigen::MatrixXd& input) {
    RowMajorMap gw(grad.data() + layer.offset, layer.out, layer.in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + layer.offset + gw.size(), layer.out);
    gw.noalias() = delta * input.transpose();
    gb = delta.rowwise().sum();
  };

  const Eigen::MatrixXd d_var_pre =
      d_variance.cwiseProduct(tape.var_pre.unaryExpr([](double a) { return sigmoid(a); }));
  const auto& mean_layer = layers_[depth];
  const auto& var_layer = layers_[depth + 1];
  write_layer(mean_layer, d_mean, h);
  write_layer(var_layer, d_var_pre, h);

  ConstRowMajorMap wm(params_.data() + mean_layer.offset, mean_layer.out, mean_layer.in);
  ConstRowMajorMap wv(params_.data() + var_layer.offset, var_layer.out, var_layer.in);
  Eigen::MatrixXd dh = wm.transpose() * d_mean;
  dh.noalias() += wv.transpose() * d_var_pre;

  for (std::size_t l = depth; l-- > 0;) {
    const auto& layer = layers_[l];
    const auto& s = tape.gate[l].array();
    const Eigen::MatrixXd delta = (dh.array() * s * (1.0 + tape.pre[l].array() * (1.0 - s))).matrix();
    write_layer(layer, delta, tape.post[l]);
    if (l > 0) {
      ConstRowMajorMap w(params_.data() + layer.offset, layer.out, layer.in);
      dh.noalias() = w.transpose() * delta;
    }
  }
}

}  // namespace gddim
