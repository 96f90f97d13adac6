#ifndef AGMM_BENCH_HPP
#define AGMM_BENCH_HPP

#include <cstdint>

#include "em.hpp"
#include "types.hpp"

namespace agmm {

// One synthetic trial: occlusion, split sampling, per-point anisotropic
// noise, outliers and a ground-truth rigid motion, all driven by `seed`.
struct PerturbationSpec {
  double occlusionRate = 0.0;    // [0, 1) contiguous region per cloud
  double sampleRateFixed = 1.0;  // (0, 1]
  double sampleRateMoving = 1.0;
  double noiseStdMax = 0.0;      // per-axis std bound, in cloud radii
  double outlierRate = 0.0;      // fraction of cloud size added
  double outlierCovFactor = 1e3; // outlier covariance = factor * radius^2 * I
  double initRotationDeg = 0.0;
  uint64_t seed = 0;
};

struct PerturbedPair {
  PointCloud fixed;
  PointCloud moving;
  RigidTransform gt;  // applied to the clean moving cloud; registration
                      // should recover its inverse
};

enum class Method { AdaptiveGmm, Icp };

enum class SweepVariable { Rotation, Noise, Outliers, Occlusion };

struct TrialResult {
  Method method = Method::AdaptiveGmm;
  double gridValue = 0.0;
  int trial = 0;
  double rotationError = 0.0;
  double translationError = 0.0;  // normalized units
  double wallTime = 0.0;          // seconds
  uint64_t seed = 0;
};

struct SummaryRow {
  Method method = Method::AdaptiveGmm;
  double gridValue = 0.0;
  double meanRotationError = 0.0;
  double stdRotationError = 0.0;  // population std
  int count = 0;
};

PerturbedPair perturb(const PointCloud& model, const PerturbationSpec& spec);

// Closed-form least-squares rigid fit for paired points (rows of source map
// to rows of target), SVD with reflection guard. Throws Numerical when the
// cross-covariance is rank deficient.
RigidTransform kabschFit(const Matrix& source, const Matrix& target);

// Point-to-point ICP: nearest-neighbor correspondences alternated with the
// Kabsch fit. Terminates on a correspondence fixpoint, relative MSE change
// below tol, or maxIters.
RegistrationReport icpRegister(const PointCloud& fixed,
                               const PointCloud& moving,
                               const RigidTransform& init, int maxIters,
                               double tol);

RegistrationReport icpRegisterWithNormalization(const PointCloud& fixed,
                                                const PointCloud& moving,
                                                const RigidTransform& init,
                                                int maxIters, double tol);

// Grid sweep with the paper's protocol: the controlled variable takes each
// grid value while the others are drawn uniformly from the 2D/3D benchmark
// ranges; every method runs on the same perturbed pair from an identity
// init. Trials execute in parallel; every random draw derives from
// hash(seed, grid index, trial index) so schedules cannot change results.
std::vector<TrialResult> runSweep(const std::vector<PointCloud>& dataset,
                                  SweepVariable variable,
                                  const std::vector<double>& grid,
                                  int trialsPerValue,
                                  const PerturbationSpec& base,
                                  const RegistrationConfig& regCfg,
                                  const std::vector<Method>& methods,
                                  uint64_t seed);

// Mean and population std of rotation error per (grid value, method),
// ordered by grid value then method name.
std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results);

const char* methodName(Method m);
const char* sweepVariableName(SweepVariable v);

}  // namespace agmm

#endif
