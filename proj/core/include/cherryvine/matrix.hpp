#pragma once

#include <Eigen/Core>

namespace cherryvine {

/// Observations in rows, variables in columns. Row-major so that a row is a
/// contiguous point.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace cherryvine
