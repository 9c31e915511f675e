#include "gddim/noise_family.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "gddim/error.hpp"
#include "gddim/special.hpp"

namespace gddim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_positive(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw DomainError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::string format_param(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string FamilyKind::name() const {
  switch (tag) {
    case Tag::Gaussian:
      return "gaussian";
    case Tag::Laplace:
      return "laplace";
    case Tag::StudentT:
      return "student_t:" + format_param(param);
    case Tag::GeneralizedGaussian:
      return "gg:" + format_param(param);
    case Tag::Uniform:
      return "uniform";
  }
  return "unknown";
}

FamilyKind parse_family(std::string_view text) {
  FamilyKind kind;
  if (text == "gaussian") {
    kind = FamilyKind::gaussian();
  } else if (text == "laplace") {
    kind = FamilyKind::laplace();
  } else if (text == "uniform") {
    kind = FamilyKind::uniform();
  } else if (text.starts_with("student_t:")) {
    kind = FamilyKind::student_t(parse_positive(text.substr(10), "degrees of freedom"));
  } else if (text.starts_with("gg:")) {
    kind = FamilyKind::generalized_gaussian(parse_positive(text.substr(3), "shape"));
  } else {
    throw DomainError("unknown noise family '" + std::string(text) +
                      "' (expected gaussian | laplace | student_t:<df> | gg:<beta> | uniform)");
  }
  NoiseFamily validate(kind);
  return kind;
}

NoiseFamily::NoiseFamily(FamilyKind kind) : kind_(kind) {
  using Tag = FamilyKind::Tag;
  switch (kind_.tag) {
    case Tag::Gaussian:
      unit_variance_ = 1.0;
      log_norm_ = -0.5 * std::log(2.0 * std::numbers::pi);
      break;
    case Tag::Laplace:
      unit_variance_ = 2.0;
      log_norm_ = -std::log(2.0);
      break;
    case Tag::StudentT: {
      const double df = kind_.param;
      if (!(df > 2.0) || !std::isfinite(df)) {
        throw DomainError("student_t requires df > 2 for finite variance, got " + format_param(df));
      }
      unit_variance_ = df / (df - 2.0);
      log_norm_ = log_gamma(0.5 * (df + 1.0)) - log_gamma(0.5 * df) -
                  0.5 * std::log(df * std::numbers::pi);
      break;
    }
    case Tag::GeneralizedGaussian: {
      const double beta = kind_.param;
      if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("generalized gaussian requires beta > 0, got " + format_param(beta));
      }
      unit_variance_ = std::exp(log_gamma(3.0 / beta) - log_gamma(1.0 / beta));
      log_norm_ = std::log(beta) - std::log(2.0) - log_gamma(1.0 / beta);
      break;
    }
    case Tag::Uniform:
      unit_variance_ = 1.0 / 3.0;
      log_norm_ = -std::log(2.0);
      break;
  }
  std_constant_ = 1.0 / std::sqrt(unit_variance_);
  log_std_constant_ = std::log(std_constant_);
}

double NoiseFamily::sample_canonical(Rng& rng) const {
  using Tag = FamilyKind::Tag;
  switch (kind_.tag) {
    case Tag::Gaussian:
      return rng.normal();
    case Tag::Laplace: {
      const double e = -std::log(rng.uniform_open());
      return rng.uniform() < 0.5 ? -e : e;
    }
    case Tag::StudentT: {
      const double df = kind_.param;
      const double chi2 = 2.0 * sample_gamma(rng, 0.5 * df);
      return rng.normal() / std::sqrt(chi2 / df);
    }
    case Tag::GeneralizedGaussian: {
      const double beta = kind_.param;
      const double magnitude = std::pow(sample_gamma(rng, 1.0 / beta), 1.0 / beta);
      return rng.uniform() < 0.5 ? -magnitude : magnitude;
    }
    case Tag::Uniform:
      return 2.0 * rng.uniform() - 1.0;
  }
  return 0.0;
}

void NoiseFamily::sample(Rng& rng, std::span<double> out) const {
  for (double& v : out) v = sample(rng);
}

double NoiseFamily::canonical_log_pdf(double x) const {
  using Tag = FamilyKind::Tag;
  switch (kind_.tag) {
    case Tag::Gaussian:
      return log_norm_ - 0.5 * x * x;
    case Tag::Laplace:
      return log_norm_ - std::abs(x);
    case Tag::StudentT: {
      const double df = kind_.param;
      return log_norm_ - 0.5 * (df + 1.0) * std::log1p(x * x / df);
    }
    case Tag::GeneralizedGaussian:
      return log_norm_ - std::pow(std::abs(x), kind_.param);
    case Tag::Uniform:
      return std::abs(x) <= 1.0 ? log_norm_ : -kInf;
  }
  return -kInf;
}

double NoiseFamily::log_pdf(double z) const {
  if (kind_.tag == FamilyKind::Tag::Uniform) {
    // Test the support in standardized units so that ±√3 is inside exactly.
    return std::abs(z) <= std::sqrt(3.0) ? log_norm_ - log_std_constant_ : -kInf;
  }
  return canonical_log_pdf(z / std_constant_) - log_std_constant_;
}

LocScale NoiseFamily::moments_to_locscale(double mean, double variance) const {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw DomainError("moments_to_locscale: variance must be finite and non-negative");
  }
  return {mean, std::sqrt(variance / unit_variance_)};
}

Moments NoiseFamily::locscale_to_moments(const LocScale& p) const {
  return {p.loc, p.scale * p.scale * unit_variance_};
}

std::vector<double> sample_standard(const FamilyKind& kind, Rng& rng, std::size_t n) {
  const NoiseFamily family(kind);
  std::vector<double> out(n);
  family.sample(rng, out);
  return out;
}

double log_pdf(const FamilyKind& kind, double z) { return NoiseFamily(kind).log_pdf(z); }

LocScale moments_to_locscale(const FamilyKind& kind, double mean, double variance) {
  return NoiseFamily(kind).moments_to_locscale(mean, variance);
}

Moments locscale_to_moments(const FamilyKind& kind, const LocScale& p) {
  return NoiseFamily(kind).locscale_to_moments(p);
}

double sample_gamma(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw DomainError("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    // Γ(a) = Γ(a + 1) · U^(1/a)
    const double u = rng.uniform_open();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace gddim
