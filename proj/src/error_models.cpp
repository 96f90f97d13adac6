#include "error_models.hpp"

#include <cmath>
#include <numbers>

namespace agmm {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

double uncertainty(const KinectModel& model, double alpha, double depth) {
  if (!(alpha >= 0.0) || alpha >= kHalfPi)
    throw Error(ErrorCode::InvalidArgument,
                "uncertainty: alpha must lie in [0, pi/2)");
  if (!(depth >= 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "uncertainty: depth must be nonnegative");
  return std::exp(model.w1 * (1.0 - std::cos(alpha)) + model.w2 * depth);
}

std::pair<double, double> fitWeights(double targetU, double alphaRef,
                                     double depthRef) {
  if (!(targetU > 1.0))
    throw Error(ErrorCode::InvalidArgument, "fitWeights: target must be > 1");
  if (!(alphaRef > 0.0) || alphaRef >= kHalfPi)
    throw Error(ErrorCode::InvalidArgument,
                "fitWeights: alpha_ref must lie in (0, pi/2)");
  if (!(depthRef > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "fitWeights: depth_ref must be > 0");
  const double logU = std::log(targetU);
  return {logU / (1.0 - std::cos(alphaRef)), logU / depthRef};
}

Matrix covarianceFromUncertainty(const KinectModel& model, int dim,
                                 double alpha, double depth) {
  requireDim(dim);
  if (!(model.baseScale > 0.0))
    throw Error(ErrorCode::InvalidArgument, "base scale must be > 0");
  return model.baseScale * uncertainty(model, alpha, depth) *
         Matrix::Identity(dim, dim);
}

std::vector<Matrix> isotropicCovariances(Eigen::Index count, int dim,
                                         double variance) {
  requireDim(dim);
  if (!(variance > 0.0))
    throw Error(ErrorCode::InvalidArgument, "variance must be > 0");
  return std::vector<Matrix>(static_cast<size_t>(count),
                             variance * Matrix::Identity(dim, dim));
}

}  // namespace agmm
