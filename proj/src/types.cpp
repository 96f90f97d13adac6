#include "types.hpp"

namespace agmm {

void validateCovariance(const Matrix& cov, int dim,
                        const std::string& context) {
  if (cov.rows() != dim || cov.cols() != dim)
    throw Error(ErrorCode::DimensionMismatch,
                context + ": covariance is " + std::to_string(cov.rows()) +
                    "x" + std::to_string(cov.cols()) + ", expected " +
                    std::to_string(dim) + "x" + std::to_string(dim));
  if (!cov.allFinite())
    throw Error(ErrorCode::InvalidData, context + ": covariance not finite");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::InvalidData, context + ": covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorCode::InvalidData,
                context + ": covariance not positive definite");
}

void validateCloud(const PointCloud& cloud, const std::string& context) {
  requireDim(cloud.dim);
  if (cloud.points.cols() != cloud.dim)
    throw Error(ErrorCode::DimensionMismatch,
                context + ": point width does not match cloud dimension");
  if (!cloud.points.allFinite())
    throw Error(ErrorCode::InvalidData, context + ": points not finite");
  if (static_cast<Eigen::Index>(cloud.covariances.size()) != cloud.size())
    throw Error(ErrorCode::InvalidData,
                context + ": " + std::to_string(cloud.covariances.size()) +
                    " covariances for " + std::to_string(cloud.size()) +
                    " points");
  for (size_t i = 0; i < cloud.covariances.size(); ++i)
    validateCovariance(cloud.covariances[i], cloud.dim,
                       context + ": point " + std::to_string(i));
}

}  // namespace agmm
