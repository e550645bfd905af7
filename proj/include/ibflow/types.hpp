#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ibflow {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

inline constexpr int kNoNeighbour = -1;

} // namespace ibflow
