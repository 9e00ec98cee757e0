#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace sfnoise {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace sfnoise
