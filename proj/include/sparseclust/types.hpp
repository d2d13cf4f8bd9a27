#pragma once

#include <Eigen/Core>
#include <vector>

namespace sparseclust {

using Index = Eigen::Index;

template <class Scalar, int Rows = Eigen::Dynamic, int Cols = Eigen::Dynamic>
using Mat = Eigen::Matrix<Scalar, Rows, Cols, Eigen::ColMajor>;

template <class Scalar, int Rows = Eigen::Dynamic>
using Vec = Eigen::Matrix<Scalar, Rows, 1>;

/// Dense p x p matrix that callers keep exactly symmetric.
using SymmetricMatrix = Eigen::MatrixXd;

using IndexSet = std::vector<Index>;

} // namespace sparseclust
