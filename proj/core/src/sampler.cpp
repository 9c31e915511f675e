#include "gddim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gddim/error.hpp"

namespace gddim {
namespace {

std::string join_steps(const std::vector<int>& steps) {
  std::ostringstream out;
  for (std::size_t i = 0; i < steps.size(); ++i) out << (i ? " " : "") << steps[i];
  return out.str();
}

void check_moments(double m, double v, int t, int s) {
  if (!std::isfinite(m) || !std::isfinite(v) || v < 0.0) {
    std::ostringstream msg;
    msg << "non-finite noise moments in reverse step " << t << " -> " << s << ": mean=" << m << " variance=" << v;
    throw NumericalError(msg.str());
  }
}

}  // namespace

std::string to_string(SampleMode mode) { return mode == SampleMode::MeanOnly ? "mean" : "mean_var"; }

SampleMode parse_sample_mode(std::string_view text) {
  if (text == "mean") return SampleMode::MeanOnly;
  if (text == "mean_var") return SampleMode::MeanAndVariance;
  throw ConfigError("unknown sampling mode '" + std::string(text) + "' (expected mean | mean_var)");
}

void NetMomentSource::moments(const Points& x, int t, Points& mean, Points& variance) const {
  mean.resize(x.rows(), x.cols());
  variance.resize(x.rows(), x.cols());
  Points chunk_mean;
  Points chunk_var;
  for (Eigen::Index start = 0; start < x.rows(); start += kChunkRows) {
    const Eigen::Index rows = std::min(kChunkRows, x.rows() - start);
    const Points chunk = x.middleRows(start, rows);
    net_.forward(chunk, t, sched_.T(), chunk_mean, chunk_var, workspace_);
    mean.middleRows(start, rows) = chunk_mean;
    variance.middleRows(start, rows) = chunk_var;
  }
  const HeadScaling hs{sched_.f(t), sched_.g(t)};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      mean(i, j) = hs.mean(x(i, j), mean(i, j));
      variance(i, j) = hs.variance(variance(i, j));
    }
  }
}

std::string NetMomentSource::describe() const {
  std::ostringstream out;
  out << "net(params=" << net_.parameter_count() << ")";
  return out.str();
}

void OracleMomentSource::moments(const Points& x, int t, Points& mean, Points& variance) const {
  mean.resize(x.rows(), x.cols());
  variance.resize(x.rows(), x.cols());
  const auto d = static_cast<std::size_t>(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const PosteriorMoments m = oracle_moments(dist_, std::span<const double>(x.row(i).data(), d), t, sched_, family_);
    for (std::size_t j = 0; j < d; ++j) {
      mean(i, static_cast<Eigen::Index>(j)) = m.mean[j];
      variance(i, static_cast<Eigen::Index>(j)) = m.variance[j];
    }
  }
}

std::string OracleMomentSource::describe() const {
  std::ostringstream out;
  out << "oracle(atoms=" << dist_.size() << ")";
  return out.str();
}

std::vector<double> reverse_step(std::span<const double> x_t, int t, int s, const Schedule& sched,
                                 const NoiseFamily& family, std::span<const double> mean,
                                 std::span<const double> variance, SampleMode mode, Rng& rng) {
  if (mean.size() != x_t.size() || (mode == SampleMode::MeanAndVariance && variance.size() != x_t.size())) {
    throw DomainError("reverse_step: moment dimensions do not match the point");
  }
  const StepCoeffs c = sched.coeffs(t, s);
  std::vector<double> x_s(x_t.size());
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    double z_hat = mean[i];
    if (mode == SampleMode::MeanAndVariance) {
      check_moments(mean[i], variance[i], t, s);
      z_hat = family.sample(rng, family.moments_to_locscale(mean[i], variance[i]));
    } else {
      check_moments(mean[i], 0.0, t, s);
    }
    x_s[i] = c.f_bar * x_t[i] + c.g_bar * z_hat;
  }
  return x_s;
}

void reverse_step(Points& x, int t, int s, const Schedule& sched, const NoiseFamily& family,
                  const MomentSource& source, SampleMode mode, std::span<Rng> chain_rngs) {
  if (chain_rngs.size() != static_cast<std::size_t>(x.rows())) {
    throw DomainError("reverse_step: one random stream per chain is required");
  }
  Points mean;
  Points variance;
  source.moments(x, t, mean, variance);
  const StepCoeffs c = sched.coeffs(t, s);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Rng& rng = chain_rngs[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double z_hat = mean(i, j);
      if (mode == SampleMode::MeanAndVariance) {
        check_moments(mean(i, j), variance(i, j), t, s);
        z_hat = family.sample(rng, family.moments_to_locscale(mean(i, j), variance(i, j)));
      } else {
        check_moments(mean(i, j), 0.0, t, s);
      }
      x(i, j) = c.f_bar * x(i, j) + c.g_bar * z_hat;
    }
  }
}

std::vector<std::string> SampleMetadata::comment_lines() const {
  return {
      "family=" + family.name(),
      "schedule=" + to_string(schedule),
      "T=" + std::to_string(T),
      "steps=" + join_steps(steps),
      "seed=" + std::to_string(seed),
      "mode=" + to_string(mode),
      "source=" + source,
  };
}

SampleBatch sample(int n, const Schedule& sched, const NoiseFamily& family, const MomentSource& source,
                   SampleMode mode, int n_steps, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample: n must be >= 1");
  const std::vector<int> steps = subsample_steps(sched.T(), n_steps);
  const int d = source.dim();

  std::vector<Rng> rngs;
  rngs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rngs.push_back(Rng::stream(seed, static_cast<std::uint64_t>(i)));

  SampleBatch batch;
  batch.points.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) batch.points(i, j) = family.sample(rngs[static_cast<std::size_t>(i)]);
  }
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    reverse_step(batch.points, steps[k], steps[k + 1], sched, family, source, mode, rngs);
  }
  if (!batch.points.allFinite()) throw NumericalError("sample: non-finite output points");
  batch.metadata = {family.kind(), sched.kind(), sched.T(), steps, seed, mode, source.describe()};
  return batch;
}

}  // namespace gddim
