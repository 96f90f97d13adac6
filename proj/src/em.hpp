#ifndef AGMM_EM_HPP
#define AGMM_EM_HPP

#include <functional>

#include "gmm.hpp"
#include "preprocess.hpp"
#include "types.hpp"

namespace agmm {

struct RegistrationConfig {
  int maxIters = 100;
  int innerMaxIters = 50;
  double energyRelTol = 1e-6;
  double paramAbsTol = 1e-8;
  double sigmaFloor = 0.0;
  double cutoff = 6.0;
};

enum class Termination { EnergyConverged, ParamsConverged, MaxIters };

struct RegistrationReport {
  RigidTransform transform;          // in the frame register() ran in
  RigidTransform transformOriginal;  // mapped back to input coordinates
  std::vector<double> energyTrace;       // objective after each M-step
  std::vector<double> energyStartTrace;  // objective before it, same coeffs
  std::vector<double> sigmaTrace;
  int iterations = 0;
  Termination termination = Termination::MaxIters;
};

// One EM registration run on the clouds as given (no normalization).
// Per iteration: transform the moving cloud, recompute sigma as the mean
// nearest-neighbor distance (clamped to sigmaFloor), build the pair
// coefficients with sigma-inflated covariances, then minimize the frozen
// quadratic over the transform parameters.
RegistrationReport registerClouds(const PointCloud& fixed,
                                  const PointCloud& moving,
                                  const RigidTransform& init,
                                  const RegistrationConfig& cfg);

// normalizePair -> registerClouds -> denormalizeTransform. init is
// interpreted in the normalized frame.
RegistrationReport registerWithNormalization(const PointCloud& fixed,
                                             const PointCloud& moving,
                                             const RigidTransform& init,
                                             const RegistrationConfig& cfg);

struct MinimizeResult {
  Vector params;
  double startValue = 0.0;
  double finalValue = 0.0;
};

// BFGS with an Armijo backtracking line search (c = 1e-4, halving).
// Guarantees f(result) <= f(start); stops on gradient norm < 1e-10 or
// after innerMaxIters steps. A NaN trial value shrinks the step; if no
// step improves, returns the starting point.
MinimizeResult minimizeStep(const std::function<double(const Vector&)>& value,
                            const std::function<Vector(const Vector&)>& gradient,
                            const Vector& start, int innerMaxIters);

const char* terminationName(Termination t);

}  // namespace agmm

#endif
