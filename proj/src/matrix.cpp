#include "msint/matrix.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace msint {

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

Matrix expm(const Matrix& m) {
  // Eigen's implementation is Pade(13) with scaling and squaring.
  return m.exp();
}

}  // namespace msint
