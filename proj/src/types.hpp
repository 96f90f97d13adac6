#ifndef AGMM_TYPES_HPP
#define AGMM_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace agmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  InvalidData,
  Io,
  Numerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Ordered points with one symmetric positive-definite covariance per point.
struct PointCloud {
  int dim = 2;
  Matrix points;                    // count x dim
  std::vector<Matrix> covariances;  // each dim x dim

  Eigen::Index size() const { return points.rows(); }
};

// Rotation is an angle (dim 2) or an axis-angle vector (dim 3);
// translation has dim entries.
struct RigidTransform {
  int dim = 2;
  Vector rotation;
  Vector translation;

  static RigidTransform identity(int dim) {
    RigidTransform t;
    t.dim = dim;
    t.rotation = Vector::Zero(dim == 2 ? 1 : 3);
    t.translation = Vector::Zero(dim);
    return t;
  }
};

inline void requireDim(int dim) {
  if (dim != 2 && dim != 3)
    throw Error(ErrorCode::InvalidArgument,
                "dimension must be 2 or 3, got " + std::to_string(dim));
}

inline void requireSameDim(int a, int b) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch,
                "dimension mismatch: " + std::to_string(a) + " vs " +
                    std::to_string(b));
}

// Symmetric to 1e-12 with strictly positive eigenvalues.
void validateCovariance(const Matrix& cov, int dim,
                        const std::string& context);
void validateCloud(const PointCloud& cloud, const std::string& context);

}  // namespace agmm

#endif
