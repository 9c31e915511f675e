#include "gddim/dataset.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gddim/error.hpp"
#include "gddim/io.hpp"
#include "gddim/rng.hpp"

namespace gddim {
namespace {

constexpr int kRingModes = 8;
constexpr double kRingRadius = 2.0;
constexpr double kRingSigma = 0.1;

Points ring_centers() {
  Points c(kRingModes, 2);
  for (int k = 0; k < kRingModes; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / kRingModes;
    c(k, 0) = kRingRadius * std::cos(angle);
    c(k, 1) = kRingRadius * std::sin(angle);
  }
  return c;
}

Dataset ring8(std::size_t n, Rng& rng) {
  Dataset ds;
  ds.centers = ring_centers();
  ds.points.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i % kRingModes);
    const auto r = static_cast<Eigen::Index>(i);
    ds.points(r, 0) = ds.centers(k, 0) + kRingSigma * rng.normal();
    ds.points(r, 1) = ds.centers(k, 1) + kRingSigma * rng.normal();
  }
  return ds;
}

Points two_moons(std::size_t n, Rng& rng) {
  Points p(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double angle = std::numbers::pi * rng.uniform();
    if (i % 2 == 0) {
      p(r, 0) = std::cos(angle);
      p(r, 1) = std::sin(angle);
    } else {
      p(r, 0) = 1.0 - std::cos(angle);
      p(r, 1) = 0.5 - std::sin(angle);
    }
    p(r, 0) += 0.05 * rng.normal();
    p(r, 1) += 0.05 * rng.normal();
  }
  return p;
}

Points checkerboard(std::size_t n, Rng& rng) {
  Points p(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double x1 = 4.0 * rng.uniform() - 2.0;
    const double x2 = rng.uniform() - 2.0 * static_cast<double>(rng.uniform_int(0, 1));
    const auto parity = static_cast<double>((static_cast<long long>(std::floor(x1)) % 2 + 2) % 2);
    p(r, 0) = 2.0 * x1;
    p(r, 1) = 2.0 * (x2 + parity);
  }
  return p;
}

}  // namespace

void normalize_columns(Points& points, Eigen::RowVectorXd* mean_out, Eigen::RowVectorXd* std_out) {
  if (points.rows() < 2) throw DomainError("normalize: at least two points are required");
  const Eigen::RowVectorXd mean = points.colwise().mean();
  points.rowwise() -= mean;
  Eigen::RowVectorXd stddev = (points.array().square().colwise().sum() / static_cast<double>(points.rows())).sqrt();
  for (Eigen::Index j = 0; j < stddev.size(); ++j) {
    if (!(stddev(j) > 0.0)) throw DomainError("normalize: column " + std::to_string(j) + " is constant");
  }
  points.array().rowwise() /= stddev.array();
  if (mean_out) *mean_out = mean;
  if (std_out) *std_out = stddev;
}

Dataset make_dataset(std::string_view name, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("dataset size must be >= 2");
  Rng rng(seed);
  Dataset ds;
  if (name == "ring8") {
    ds = ring8(n, rng);
  } else if (name == "two_moons") {
    ds.points = two_moons(n, rng);
  } else if (name == "checkerboard") {
    ds.points = checkerboard(n, rng);
  } else if (name.starts_with("from_csv:")) {
    Points all = read_points_csv(std::string(name.substr(9)));
    const auto rows = std::min<Eigen::Index>(all.rows(), static_cast<Eigen::Index>(n));
    ds.points = all.topRows(rows);
  } else {
    throw ConfigError("unknown dataset '" + std::string(name) +
                      "' (expected ring8 | two_moons | checkerboard | from_csv:<path>)");
  }
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd stddev;
  normalize_columns(ds.points, &mean, &stddev);
  if (ds.centers.size() > 0) {
    ds.centers.rowwise() -= mean;
    ds.centers.array().rowwise() /= stddev.array();
  }
  return ds;
}

}  // namespace gddim
