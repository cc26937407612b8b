#pragma once

#include <Eigen/Dense>

namespace dykls {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Absolute feasibility tolerance for membership tests.
inline constexpr double kFeasTol = 1e-10;

}  // namespace dykls
