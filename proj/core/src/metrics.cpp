#include "gddim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "gddim/error.hpp"
#include "gddim/rng.hpp"

namespace gddim {
namespace {

constexpr std::uint64_t kSubsampleStream = 0;
constexpr std::uint64_t kDirectionStream = 1;

void check_pair(const Points& a, const Points& b, const char* what) {
  if (a.rows() < 2 || b.rows() < 2) {
    throw DomainError(std::string(what) + ": both point sets need at least two points");
  }
  if (a.cols() != b.cols()) throw DomainError(std::string(what) + ": point sets have different dimensions");
}

double mean_pair_distance(const Points& a, const Points& b) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < b.rows(); ++j) row += (a.row(i) - b.row(j)).norm();
    total += row;
  }
  return total / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

}  // namespace

Points subsample_rows(const Points& points, Eigen::Index count, std::uint64_t seed) {
  if (count >= points.rows()) return points;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(points.rows()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i, points.rows() - 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  Points out(count, points.cols());
  for (Eigen::Index i = 0; i < count; ++i) out.row(i) = points.row(idx[static_cast<std::size_t>(i)]);
  return out;
}

double sliced_wasserstein(const Points& a_in, const Points& b_in, int n_projections, std::uint64_t seed) {
  check_pair(a_in, b_in, "sliced_wasserstein");
  if (n_projections < 1) throw DomainError("sliced_wasserstein: n_projections must be >= 1");
  const Eigen::Index n = std::min(a_in.rows(), b_in.rows());
  const std::uint64_t sub_seed = mix_seed(seed, kSubsampleStream);
  const Points a = a_in.rows() > n ? subsample_rows(a_in, n, sub_seed) : a_in;
  const Points b = b_in.rows() > n ? subsample_rows(b_in, n, sub_seed) : b_in;

  Rng rng(mix_seed(seed, kDirectionStream));
  const auto d = a.cols();
  Eigen::VectorXd dir(d);
  std::vector<double> pa(static_cast<std::size_t>(n));
  std::vector<double> pb(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int p = 0; p < n_projections; ++p) {
    do {
      for (Eigen::Index k = 0; k < d; ++k) dir(k) = rng.normal();
    } while (dir.norm() == 0.0);
    dir.normalize();
    for (Eigen::Index i = 0; i < n; ++i) {
      pa[static_cast<std::size_t>(i)] = a.row(i).dot(dir);
      pb[static_cast<std::size_t>(i)] = b.row(i).dot(dir);
    }
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    double sq = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const double diff = pa[i] - pb[i];
      sq += diff * diff;
    }
    total += sq / static_cast<double>(n);
  }
  return std::sqrt(total / n_projections);
}

double energy_distance(const Points& a, const Points& b) {
  check_pair(a, b, "energy_distance");
  const double value = 2.0 * mean_pair_distance(a, b) - mean_pair_distance(a, a) - mean_pair_distance(b, b);
  return std::max(value, 0.0);
}

double mode_coverage(const Points& generated, const Points& centers, double radius) {
  if (centers.rows() == 0) throw DomainError("mode_coverage: at least one center is required");
  if (!(radius > 0.0)) throw DomainError("mode_coverage: radius must be positive");
  if (generated.rows() > 0 && generated.cols() != centers.cols()) {
    throw DomainError("mode_coverage: dimension mismatch");
  }
  const double r2 = radius * radius;
  Eigen::Index covered = 0;
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    for (Eigen::Index i = 0; i < generated.rows(); ++i) {
      if ((generated.row(i) - centers.row(c)).squaredNorm() <= r2) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(centers.rows());
}

MetricReport evaluate(const Points& generated, const Points& reference, const Points& centers, double radius,
                      int n_projections, std::uint64_t seed) {
  check_pair(generated, reference, "evaluate");
  const Eigen::Index n = std::min(generated.rows(), reference.rows());
  const std::uint64_t sub_seed = mix_seed(seed, kSubsampleStream);
  const Points gen = subsample_rows(generated, n, sub_seed);
  const Points ref = subsample_rows(reference, n, sub_seed);
  MetricReport report;
  report.sliced_wasserstein = sliced_wasserstein(gen, ref, n_projections, seed);
  report.energy_distance = energy_distance(gen, ref);
  if (centers.rows() > 0) report.mode_coverage = mode_coverage(generated, centers, radius);
  report.n_generated = static_cast<std::size_t>(generated.rows());
  report.n_reference = static_cast<std::size_t>(reference.rows());
  report.seed = seed;
  return report;
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["sliced_wasserstein"] = sliced_wasserstein;
  j["energy_distance"] = energy_distance;
  j["mode_coverage"] = mode_coverage ? nlohmann::ordered_json(*mode_coverage) : nlohmann::ordered_json(nullptr);
  j["n_generated"] = n_generated;
  j["n_reference"] = n_reference;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

}  // namespace gddim
