#pragma once

#include <Eigen/Dense>

namespace ergo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace ergo
