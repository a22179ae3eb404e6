#pragma once

#include <Eigen/Core>

namespace msint {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Max-row-sum operator norm. Submultiplicative, so ||xy|| <= ||x|| ||y||.
double op_norm(const Matrix& m);

/// Largest absolute entry.
double max_abs(const Matrix& m);

inline Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

/// Matrix exponential.
Matrix expm(const Matrix& m);

}  // namespace msint
