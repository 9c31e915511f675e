#pragma once

#include <Eigen/Core>

namespace gddim {

/// n x d point matrix, one point per row.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace gddim
