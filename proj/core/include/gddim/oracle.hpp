#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gddim/noise_family.hpp"
#include "gddim/schedule.hpp"
#include "gddim/types.hpp"

namespace gddim {

/// Finite weighted set of data atoms standing in for the data distribution.
class AtomicDistribution {
 public:
  /// Throws DomainError if there are no atoms, weights are negative or
  /// non-finite, or they do not sum to 1 within 1e-9 (weights are then
  /// renormalized exactly).
  AtomicDistribution(Points atoms, std::vector<double> weights);

  /// Equal weights.
  explicit AtomicDistribution(Points atoms);

  const Points& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  int dim() const noexcept { return static_cast<int>(atoms_.cols()); }
  std::size_t size() const noexcept { return weights_.size(); }

 private:
  Points atoms_;
  std::vector<double> weights_;
};

/// Reads atoms from CSV. A column named "weight" (if present) supplies the
/// weights; all other columns are coordinates.
AtomicDistribution read_atoms_csv(const std::filesystem::path& path);

struct AtomPosterior {
  std::vector<double> weights;
  /// True when every atom had zero likelihood (uniform-support miss); the
  /// weights are then the uniform fallback 1/|atoms|.
  bool fallback = false;
};

struct PosteriorMoments {
  std::vector<double> mean;      // E[z | x_t]
  std::vector<double> variance;  // Var[z | x_t], per dimension
  bool fallback = false;
};

/// Posterior probability of each atom given x_t under the forward process
/// x_t = f(t) a + g(t) z. Throws NumericalError if g(t) = 0.
AtomPosterior posterior_over_atoms(const AtomicDistribution& dist, std::span<const double> x_t, int t,
                                   const Schedule& sched, const NoiseFamily& family);

/// Exact mixture moments of z given x_t.
PosteriorMoments oracle_moments(const AtomicDistribution& dist, std::span<const double> x_t, int t,
                                const Schedule& sched, const NoiseFamily& family);

}  // namespace gddim
