#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gddim/approximator.hpp"
#include "gddim/noise_family.hpp"
#include "gddim/oracle.hpp"
#include "gddim/rng.hpp"
#include "gddim/schedule.hpp"
#include "gddim/types.hpp"

namespace gddim {

enum class SampleMode { MeanAndVariance, MeanOnly };

std::string to_string(SampleMode mode);
/// "mean" | "mean_var".
SampleMode parse_sample_mode(std::string_view text);

/// Supplies estimates of E[z | x_t] and Var[z | x_t] for a batch of points.
class MomentSource {
 public:
  virtual ~MomentSource() = default;
  virtual int dim() const = 0;
  /// mean and variance are resized to x's shape.
  virtual void moments(const Points& x, int t, Points& mean, Points& variance) const = 0;
  virtual std::string describe() const = 0;
};

/// Moments from a trained approximator (heads mapped through HeadScaling),
/// evaluated in fixed-size row chunks. Keeps an activation workspace between
/// calls, so one instance must not be shared between threads.
class NetMomentSource final : public MomentSource {
 public:
  static constexpr Eigen::Index kChunkRows = 512;

  NetMomentSource(const Approximator& net, const Schedule& sched) : net_(net), sched_(sched) {}
  int dim() const override { return net_.architecture().data_dim; }
  void moments(const Points& x, int t, Points& mean, Points& variance) const override;
  std::string describe() const override;

 private:
  const Approximator& net_;
  const Schedule& sched_;
  mutable Approximator::Tape workspace_;
};

/// Exact posterior moments under a finite-atom data distribution.
class OracleMomentSource final : public MomentSource {
 public:
  OracleMomentSource(const AtomicDistribution& dist, const Schedule& sched, const NoiseFamily& family)
      : dist_(dist), sched_(sched), family_(family) {}
  int dim() const override { return dist_.dim(); }
  void moments(const Points& x, int t, Points& mean, Points& variance) const override;
  std::string describe() const override;

 private:
  const AtomicDistribution& dist_;
  const Schedule& sched_;
  const NoiseFamily& family_;
};

/// One reverse jump for a single point given its noise moments (m, v):
///   (mu, sigma) = moments_to_locscale(m, v)
///   x_s = f_bar x_t + g_bar (mu + sigma eps),  eps ~ canonical F(0, 1) per dimension
/// MeanOnly drops the sigma eps term and draws nothing.
/// Throws NumericalError on non-finite moments.
std::vector<double> reverse_step(std::span<const double> x_t, int t, int s, const Schedule& sched,
                                 const NoiseFamily& family, std::span<const double> mean,
                                 std::span<const double> variance, SampleMode mode, Rng& rng);

/// Batched reverse jump, moments taken from source; row i uses chain_rngs[i].
void reverse_step(Points& x, int t, int s, const Schedule& sched, const NoiseFamily& family,
                  const MomentSource& source, SampleMode mode, std::span<Rng> chain_rngs);

struct SampleMetadata {
  FamilyKind family;
  ScheduleKind schedule = ScheduleKind::Linear;
  int T = 0;
  std::vector<int> steps;
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::MeanAndVariance;
  std::string source;

  /// Lines for the '#' comment header of a sample CSV.
  std::vector<std::string> comment_lines() const;
};

struct SampleBatch {
  Points points;
  SampleMetadata metadata;
};

/// Draws x_T i.i.d. from the standardized family and applies reverse_step
/// along subsample_steps(T, n_steps). Chain i draws from Rng::stream(seed, i).
SampleBatch sample(int n, const Schedule& sched, const NoiseFamily& family, const MomentSource& source,
                   SampleMode mode, int n_steps, std::uint64_t seed);

}  // namespace gddim
