#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gddim/types.hpp"

namespace gddim {

inline constexpr int kDefaultProjections = 128;

/// Sliced 2-Wasserstein distance:
///   sqrt( mean over directions u of mean_i (sort(A u)_i - sort(B u)_i)^2 )
/// with n_projections random unit directions drawn from seed. When the sets
/// differ in size the larger one is subsampled (without replacement, seeded)
/// to the smaller size. Throws DomainError if either set has fewer than two
/// points or the dimensions differ.
double sliced_wasserstein(const Points& a, const Points& b, int n_projections, std::uint64_t seed);

/// V-statistic energy distance 2 E|a-b| - E|a-a'| - E|b-b'| over all pairs.
double energy_distance(const Points& a, const Points& b);

/// Fraction of centers with at least one generated point within radius.
double mode_coverage(const Points& generated, const Points& centers, double radius);

/// Rows of `points` picked without replacement; deterministic given seed.
Points subsample_rows(const Points& points, Eigen::Index count, std::uint64_t seed);

struct MetricReport {
  double sliced_wasserstein = 0.0;
  double energy_distance = 0.0;
  /// Absent when no mode centers were supplied.
  std::optional<double> mode_coverage;
  std::size_t n_generated = 0;
  std::size_t n_reference = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

/// Equalizes sample sizes by subsampling the larger set, then computes every
/// metric. mode_coverage is computed only if centers is non-empty.
MetricReport evaluate(const Points& generated, const Points& reference, const Points& centers, double radius,
                      int n_projections, std::uint64_t seed);

}  // namespace gddim
