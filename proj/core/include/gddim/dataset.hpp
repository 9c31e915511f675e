#pragma once

#include <cstdint>
#include <string_view>

#include "gddim/types.hpp"

namespace gddim {

/// Training/reference points plus, for mixture datasets, the mode centers in
/// the same normalized coordinates (empty otherwise).
struct Dataset {
  Points points;
  Points centers;
};

/// name: ring8 | two_moons | checkerboard | from_csv:<path>.
/// Points are shifted and scaled to zero mean and unit variance per dimension.
/// ring8 is a mixture of 8 Gaussians (radius 2, component sigma 0.1) with
/// components assigned round-robin, so each holds n/8 points up to rounding.
/// from_csv takes the first n rows (all rows if the file holds fewer).
Dataset make_dataset(std::string_view name, std::size_t n, std::uint64_t seed);

/// Shifts and scales columns in place to zero mean, unit population variance.
/// Returns the applied (mean, std) per column via the out parameters if given.
void normalize_columns(Points& points, Eigen::RowVectorXd* mean = nullptr, Eigen::RowVectorXd* stddev = nullptr);

}  // namespace gddim
