#ifndef AGMM_GMM_HPP
#define AGMM_GMM_HPP

#include "types.hpp"

namespace agmm {

// Soft-correspondence weights between every (moving m, fixed n) pair,
// evaluated at the parameters of the previous iteration.
struct PairCoefficients {
  Matrix values;  // M x N, nonnegative
  double sigmaUsed = 0.0;
};

// Precomputed inverses and log-determinants. Moving entries refer to the
// sigma-inflated covariance R*S0*R^T + sigma^2*I at the current rotation.
struct EffectiveCovariances {
  std::vector<Matrix> fixedInv;
  std::vector<Matrix> movingInv;
  std::vector<double> fixedLogdet;
  std::vector<double> movingLogdet;
};

EffectiveCovariances effectiveCovariances(const PointCloud& fixed,
                                          const PointCloud& movingTransformed,
                                          double sigma);

// (2pi)^(-D/2) * exp(-logdet/2) * exp(-1/2 (tau-mu)^T covInv (tau-mu))
double gaussianDensity(const Vector& tau, const Vector& mu,
                       const Matrix& covInv, double logdet);

// (2pi)^(-D) * exp(-(ldx+ldy)/2) *
//     [exp(-1/2 d^T SxInv d) + exp(-1/2 d^T SyInv d)], d = y - x.
// Exponentials with argument below -700 flush to zero.
double pairCoefficient(const Vector& x, const Matrix& sxInv, double logdetX,
                       const Vector& y, const Matrix& syInv, double logdetY);

// All M x N coefficients with sigma-inflated moving covariances. A finite
// cutoff zeroes pairs whose distance exceeds
// cutoff * sqrt(max covariance spectral radius); cutoff = inf is the dense
// reference.
PairCoefficients computePairCoefficients(const PointCloud& fixed,
                                         const PointCloud& movingTransformed,
                                         double sigma, double cutoff);

// Same, reusing covariances already inverted for this iteration.
PairCoefficients computePairCoefficients(const PointCloud& fixed,
                                         const PointCloud& movingTransformed,
                                         const EffectiveCovariances& eff,
                                         double sigma, double cutoff);

// sum_{m,n} C(m,n) * d^T (SxInv_n + SyInv_m) d with d = R*y0_m + t - x_n.
// The inverse sums stay frozen at the rotation `eff` was built with.
double objective(const RigidTransform& params, const PairCoefficients& coeffs,
                 const PointCloud& fixed, const PointCloud& movingOriginal,
                 const EffectiveCovariances& eff);

// Analytic gradient with respect to packParams(params):
// [angle, tx, ty] for 2D, [wx, wy, wz, tx, ty, tz] for 3D.
Vector objectiveGradient(const RigidTransform& params,
                         const PairCoefficients& coeffs,
                         const PointCloud& fixed,
                         const PointCloud& movingOriginal,
                         const EffectiveCovariances& eff);

}  // namespace agmm

#endif
