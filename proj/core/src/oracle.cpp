#include "gddim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gddim/error.hpp"
#include "gddim/io.hpp"

namespace gddim {

AtomicDistribution::AtomicDistribution(Points atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.rows() == 0 || atoms_.cols() == 0) throw DomainError("atomic distribution needs at least one atom");
  if (weights_.size() != static_cast<std::size_t>(atoms_.rows())) {
    throw DomainError("atomic distribution: one weight per atom is required");
  }
  if (!atoms_.allFinite()) throw DomainError("atomic distribution: atoms must be finite");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("atomic distribution: weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("atomic distribution: weights sum to " + format_double(total) + ", expected 1");
  }
  for (double& w : weights_) w /= total;
}

AtomicDistribution::AtomicDistribution(Points atoms)
    : AtomicDistribution(atoms, std::vector<double>(static_cast<std::size_t>(atoms.rows()),
                                                    atoms.rows() > 0 ? 1.0 / static_cast<double>(atoms.rows()) : 0.0)) {
}

AtomicDistribution read_atoms_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  const auto it = std::find(table.columns.begin(), table.columns.end(), "weight");
  if (it == table.columns.end()) return AtomicDistribution(std::move(table.values));
  const auto wcol = static_cast<Eigen::Index>(it - table.columns.begin());
  const auto n = table.values.rows();
  const auto d = table.values.cols() - 1;
  if (d < 1) throw FormatError(path.string() + ": atoms CSV has no coordinate columns");
  Points atoms(n, d);
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
      if (j == wcol) {
        weights[static_cast<std::size_t>(i)] = table.values(i, j);
      } else {
        atoms(i, k++) = table.values(i, j);
      }
    }
  }
  return AtomicDistribution(std::move(atoms), std::move(weights));
}

AtomPosterior posterior_over_atoms(const AtomicDistribution& dist, std::span<const double> x_t, int t,
                                   const Schedule& sched, const NoiseFamily& family) {
  if (x_t.size() != static_cast<std::size_t>(dist.dim())) {
    throw DomainError("posterior_over_atoms: point dimension does not match the atoms");
  }
  const double f = sched.f(t);
  const double g = sched.g(t);
  if (g == 0.0) throw NumericalError("posterior_over_atoms: g(t) = 0 at t = " + std::to_string(t));

  const Points& atoms = dist.atoms();
  const std::size_t n = dist.size();
  AtomPosterior post;
  post.weights.resize(n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    const double w = dist.weights()[a];
    double logp = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x_t.size() && std::isfinite(logp); ++i) {
      const double z = (x_t[i] - f * atoms(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i))) / g;
      logp += family.log_pdf(z);
    }
    post.weights[a] = logp;
    max_log = std::max(max_log, logp);
  }
  if (!std::isfinite(max_log)) {
    post.fallback = true;
    std::fill(post.weights.begin(), post.weights.end(), 1.0 / static_cast<double>(n));
    return post;
  }
  double total = 0.0;
  for (double& w : post.weights) {
    w = std::exp(w - max_log);
    total += w;
  }
  for (double& w : post.weights) w /= total;
  return post;
}

PosteriorMoments oracle_moments(const AtomicDistribution& dist, std::span<const double> x_t, int t,
                                const Schedule& sched, const NoiseFamily& family) {
  const AtomPosterior post = posterior_over_atoms(dist, x_t, t, sched, family);
  const double f = sched.f(t);
  const double g = sched.g(t);
  const std::size_t d = x_t.size();
  PosteriorMoments m;
  m.fallback = post.fallback;
  m.mean.assign(d, 0.0);
  m.variance.assign(d, 0.0);
  const Points& atoms = dist.atoms();
  for (std::size_t i = 0; i < d; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    double mean = 0.0;
    for (std::size_t a = 0; a < dist.size(); ++a) {
      mean += post.weights[a] * (x_t[i] - f * atoms(static_cast<Eigen::Index>(a), col)) / g;
    }
    double var = 0.0;
    for (std::size_t a = 0; a < dist.size(); ++a) {
      const double dev = (x_t[i] - f * atoms(static_cast<Eigen::Index>(a), col)) / g - mean;
      var += post.weights[a] * dev * dev;
    }
    m.mean[i] = mean;
    m.variance[i] = var;
  }
  return m;
}

}  // namespace gddim
