#pragma once

#include <Eigen/Dense>

namespace evrobust {

// Grayscale plane, row-major so (y, x) indexing matches file order.
using ImagePlane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace evrobust
