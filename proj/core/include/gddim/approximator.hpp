#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gddim/types.hpp"

namespace gddim {

/// Shape of the network: data dimension d, time-embedding width, and the
/// trunk's hidden widths. The two heads each map the last hidden layer to d.
struct Architecture {
  int data_dim = 2;
  int embed_dim = 16;
  std::vector<int> hidden = {128, 128, 128};

  int input_dim() const { return data_dim + embed_dim; }
  std::size_t parameter_count() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Sinusoidal features of t/T: sin and cos of pi * 2^k * t/T for k = 0 .. dim/2 - 1.
/// dim must be even.
void time_embedding(int t, int T, std::span<double> out);
std::vector<double> time_embedding(int t, int T, int dim);

/// Floor added to the variance head after the softplus.
inline constexpr double kVarianceFloor = 1e-6;

struct HeadOutput {
  std::vector<double> mean;
  std::vector<double> variance;
};

/// Reads the raw heads as a velocity-style parametrization of the noise
/// moments at forward coefficients (f, g) = (f(t), g(t)):
///   E[z | x_t]   ~ g x_t + f mean_head
///   Var[z | x_t] ~ f^2 variance_head
/// An error e in the mean head moves the implied x_0 estimate by g e, so
/// reverse jumps out of near-pure-noise states (f -> 0) stay well scaled.
struct HeadScaling {
  double f = 1.0;
  double g = 0.0;

  double mean(double x_t, double head_mean) const { return g * x_t + f * head_mean; }
  double variance(double head_variance) const { return f * f * head_variance; }
};

/// MLP with SiLU trunk and two linear heads: a mean head (unconstrained) and a
/// variance head passed through softplus + kVarianceFloor.
///
/// Flat parameter layout, in layer order (trunk layers, mean head, variance
/// head); each layer stores its weight matrix row-major (out x in) followed by
/// its bias (out).
class Approximator {
 public:
  /// Activations kept by forward() for a later backward() call. Column j of
  /// every matrix belongs to example j.
  struct Tape {
    std::vector<Eigen::MatrixXd> pre;   // trunk pre-activations
    std::vector<Eigen::MatrixXd> gate;  // sigmoid of pre
    std::vector<Eigen::MatrixXd> post;  // post[0] is the network input
    Eigen::MatrixXd var_pre;            // variance-head pre-activation
    Eigen::MatrixXd mean;               // d x B
    Eigen::MatrixXd variance;           // d x B
  };

  /// All parameters zero.
  explicit Approximator(Architecture arch);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static Approximator initialized(Architecture arch, std::uint64_t seed);

  const Architecture& architecture() const noexcept { return arch_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  /// Single point. Throws DomainError on non-finite input or bad t.
  HeadOutput forward(std::span<const double> x, int t, int T) const;

  /// Batch with a common time index; mean and variance are resized to x's shape.
  void forward(const Points& x, int t, int T, Points& mean, Points& variance) const;

  /// Same, reusing `workspace` for activations across calls.
  void forward(const Points& x, int t, int T, Points& mean, Points& variance, Tape& workspace) const;

  /// Batch with per-row time indices, recording activations for backward().
  void forward(const Points& x, std::span<const int> t, int T, Tape& tape) const;

  /// Gradient of a scalar loss with respect to every parameter, given the
  /// loss gradients with respect to the head outputs (d x B, same layout as
  /// the tape). Overwrites grad, which must have parameter_count() entries.
  void backward(const Tape& tape, const Eigen::MatrixXd& d_mean, const Eigen::MatrixXd& d_variance,
                std::span<double> grad) const;

 private:
  struct LayerView {
    std::size_t offset;  // weights start
    int in;
    int out;
  };

  void build_layout();
  Eigen::MatrixXd make_input(const Points& x, std::span<const int> t, int T) const;
  void run(const Eigen::MatrixXd& input, Tape& tape) const;

  Architecture arch_;
  std::vector<double> params_;
  std::vector<LayerView> layers_;  // trunk..., mean head, variance head
};

}  // namespace gddim
