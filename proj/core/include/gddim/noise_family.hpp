#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gddim/rng.hpp"

namespace gddim {

/// Which location-scale family the noise is drawn from. `param` is the
/// degrees of freedom for StudentT and the shape for GeneralizedGaussian;
/// it is ignored otherwise.
struct FamilyKind {
  enum class Tag { Gaussian, Laplace, StudentT, GeneralizedGaussian, Uniform };

  Tag tag = Tag::Gaussian;
  double param = 0.0;

  static FamilyKind gaussian() { return {Tag::Gaussian, 0.0}; }
  static FamilyKind laplace() { return {Tag::Laplace, 0.0}; }
  static FamilyKind student_t(double df) { return {Tag::StudentT, df}; }
  static FamilyKind generalized_gaussian(double beta) { return {Tag::GeneralizedGaussian, beta}; }
  static FamilyKind uniform() { return {Tag::Uniform, 0.0}; }

  /// CLI spelling: gaussian | laplace | student_t:<df> | gg:<beta> | uniform.
  std::string name() const;

  friend bool operator==(const FamilyKind&, const FamilyKind&) = default;
};

/// Parses the CLI spelling. Throws DomainError on unknown names or invalid parameters.
FamilyKind parse_family(std::string_view text);

struct LocScale {
  double loc = 0.0;
  double scale = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// A location-scale family rescaled so that its zero-location, unit-scale
/// canonical member, multiplied by std_constant(), has mean 0 and variance 1.
///
/// Canonical parametrizations (loc = 0, scale = 1):
///   Gaussian             N(0, 1)
///   Laplace              density exp(-|x|) / 2
///   StudentT(df)         standard Student-t with df degrees of freedom
///   GeneralizedGaussian  density beta / (2 Γ(1/beta)) exp(-|x|^beta)
///   Uniform              U(-1, 1)
class NoiseFamily {
 public:
  /// Throws DomainError for df <= 2 or beta <= 0.
  explicit NoiseFamily(FamilyKind kind);

  const FamilyKind& kind() const noexcept { return kind_; }

  /// c such that c * canonical(0, 1) has unit variance.
  double std_constant() const noexcept { return std_constant_; }

  /// Variance of the canonical member with scale 1.
  double unit_variance() const noexcept { return unit_variance_; }

  /// One standardized draw (mean 0, variance 1).
  double sample(Rng& rng) const { return std_constant_ * sample_canonical(rng); }
  void sample(Rng& rng, std::span<double> out) const;

  /// One draw from the canonical member with scale 1.
  double sample_canonical(Rng& rng) const;

  /// Draw from the canonical family member with the given location and scale.
  double sample(Rng& rng, const LocScale& p) const { return p.loc + p.scale * sample_canonical(rng); }

  /// Log density of the standardized member; -inf outside the support.
  double log_pdf(double z) const;

  /// Canonical (loc, scale) of the member with the given mean and variance.
  /// Throws DomainError for negative or non-finite variance.
  LocScale moments_to_locscale(double mean, double variance) const;

  Moments locscale_to_moments(const LocScale& p) const;

 private:
  double canonical_log_pdf(double x) const;

  FamilyKind kind_;
  double unit_variance_ = 1.0;
  double std_constant_ = 1.0;
  double log_std_constant_ = 0.0;
  double log_norm_ = 0.0;  // log normalizer of the canonical density
};

/// n standardized draws.
std::vector<double> sample_standard(const FamilyKind& kind, Rng& rng, std::size_t n);

double log_pdf(const FamilyKind& kind, double z);

LocScale moments_to_locscale(const FamilyKind& kind, double mean, double variance);

Moments locscale_to_moments(const FamilyKind& kind, const LocScale& p);

/// Gamma(shape, 1) variate by Marsaglia-Tsang squeeze/rejection; shapes
/// below 1 use the U^(1/shape) boost.
double sample_gamma(Rng& rng, double shape);

}  // namespace gddim
