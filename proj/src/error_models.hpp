#ifndef AGMM_ERROR_MODELS_HPP
#define AGMM_ERROR_MODELS_HPP

#include "types.hpp"

namespace agmm {

// Kinect-style uncertainty U(alpha, d) = exp(w1*(1 - cos alpha) + w2*d).
// The default weights are the published constants; fitWeights() solves for
// them from an uncertainty target at the two anchor points (pi/3, 0) and
// (0, depth_ref). Note the published constants correspond to a target of
// about 2.3, not the stated 2.2; both are reproducible here.
struct KinectModel {
  double w1 = 1.6658;
  double w2 = 0.2776;       // 1/meter
  double baseScale = 1e-4;  // covariance magnitude multiplier
};

// alpha in [0, pi/2), depth >= 0 meters. Strictly increasing in both.
double uncertainty(const KinectModel& model, double alpha, double depth);

// Closed-form weights with U(alpha_ref, 0) = U(0, depth_ref) = target_u.
std::pair<double, double> fitWeights(double targetU, double alphaRef,
                                     double depthRef);

// baseScale * U(alpha, depth) * I
Matrix covarianceFromUncertainty(const KinectModel& model, int dim,
                                 double alpha, double depth);

// One variance * I matrix per point.
std::vector<Matrix> isotropicCovariances(Eigen::Index count, int dim,
                                         double variance);

}  // namespace agmm

#endif
