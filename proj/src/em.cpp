#include "em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geometry.hpp"

namespace agmm {

namespace {

void validateConfig(const RegistrationConfig& cfg) {
  if (cfg.maxIters < 1 || cfg.innerMaxIters < 1)
    throw Error(ErrorCode::InvalidArgument, "iteration limits must be >= 1");
  if (!(cfg.energyRelTol > 0.0) || !(cfg.paramAbsTol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tolerances must be > 0");
  if (!(cfg.sigmaFloor >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "sigma floor must be >= 0");
  if (std::isnan(cfg.cutoff) || cfg.cutoff <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "cutoff must be > 0 or inf");
}

}  // namespace

MinimizeResult minimizeStep(
    const std::function<double(const Vector&)>& value,
    const std::function<Vector(const Vector&)>& gradient, const Vector& start,
    int innerMaxIters) {
  constexpr double kArmijoC = 1e-4;
  constexpr double kGradTol = 1e-10;
  constexpr int kMaxHalvings = 60;

  MinimizeResult result;
  result.params = start;
  result.startValue = value(start);
  result.finalValue = result.startValue;
  if (!std::isfinite(result.startValue)) return result;

  Vector x = start;
  double fx = result.startValue;
  Vector g = gradient(x);
  const Eigen::Index n = x.size();
  Matrix h = Matrix::Identity(n, n);  // inverse Hessian approximation

  for (int iter = 0; iter < innerMaxIters; ++iter) {
    if (g.norm() < kGradTol) break;

    Vector p = -(h * g);
    double slope = g.dot(p);
    bool steepest = false;
    if (!(slope < 0.0)) {
      h.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
      steepest = true;
    }

    double alpha = 1.0;
    double fNew = fx;
    bool accepted = false;
    for (int k = 0; k < kMaxHalvings; ++k) {
      fNew = value(x + alpha * p);
      if (std::isfinite(fNew) && fNew <= fx + kArmijoC * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (steepest) break;  // not improvable along the gradient either
      h.setIdentity();
      continue;
    }

    const Vector xNew = x + alpha * p;
    const Vector gNew = gradient(xNew);
    const Vector s = xNew - x;
    const Vector y = gNew - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix left = Matrix::Identity(n, n) - rho * s * y.transpose();
      h = left * h * left.transpose() + rho * s * s.transpose();
    } else {
      h.setIdentity();
    }
    x = xNew;
    fx = fNew;
    g = gNew;
  }

  result.params = x;
  result.finalValue = fx;
  return result;
}

RegistrationReport registerClouds(const PointCloud& fixed,
                                  const PointCloud& moving,
                                  const RigidTransform& init,
                                  const RegistrationConfig& cfg) {
  validateConfig(cfg);
  requireSameDim(fixed.dim, moving.dim);
  requireSameDim(init.dim, fixed.dim);
  if (fixed.size() == 0 || moving.size() == 0)
    throw Error(ErrorCode::InvalidData, "registerClouds: empty cloud");
  validateCloud(fixed, "registerClouds: fixed");
  validateCloud(moving, "registerClouds: moving");

  RegistrationReport report;
  report.transform = init;
  Vector params = packParams(init);

  double prevEnergy = std::numeric_limits<double>::quiet_NaN();
  for (int iter = 1; iter <= cfg.maxIters; ++iter) {
    const RigidTransform current = unpackParams(params, fixed.dim);
    const PointCloud movingT = applyTransform(current, moving);

    const double sigma =
        std::max(meanMinDistance(movingT, fixed), cfg.sigmaFloor);
    const EffectiveCovariances eff =
        effectiveCovariances(fixed, movingT, sigma);
    const PairCoefficients coeffs =
        computePairCoefficients(fixed, movingT, eff, sigma, cfg.cutoff);

    const auto value = [&](const Vector& v) {
      return objective(unpackParams(v, fixed.dim), coeffs, fixed, moving, eff);
    };
    const auto gradient = [&](const Vector& v) {
      return objectiveGradient(unpackParams(v, fixed.dim), coeffs, fixed,
                               moving, eff);
    };

    const MinimizeResult step =
        minimizeStep(value, gradient, params, cfg.innerMaxIters);

    report.sigmaTrace.push_back(sigma);
    report.energyStartTrace.push_back(step.startValue);
    report.energyTrace.push_back(step.finalValue);
    report.iterations = iter;

    const double paramStep = (step.params - params).norm();
    params = step.params;

    const double energyRef = std::abs(prevEnergy);
    if (iter >= 2 && std::abs(step.finalValue - prevEnergy) <
                         cfg.energyRelTol * std::max(energyRef, 1e-300)) {
      report.termination = Termination::EnergyConverged;
      break;
    }
    if (paramStep < cfg.paramAbsTol) {
      report.termination = Termination::ParamsConverged;
      break;
    }
    report.termination = Termination::MaxIters;
    prevEnergy = step.finalValue;
  }

  report.transform = unpackParams(params, fixed.dim);
  report.transformOriginal = report.transform;
  return report;
}

RegistrationReport registerWithNormalization(const PointCloud& fixed,
                                             const PointCloud& moving,
                                             const RigidTransform& init,
                                             const RegistrationConfig& cfg) {
  const NormalizedPair pair = normalizePair(fixed, moving);
  RegistrationReport report =
      registerClouds(pair.fixed, pair.moving, init, cfg);
  report.transformOriginal =
      denormalizeTransform(report.transform, pair.record);
  return report;
}

const char* terminationName(Termination t) {
  switch (t) {
    case Termination::EnergyConverged:
      return "energy_converged";
    case Termination::ParamsConverged:
      return "params_converged";
    case Termination::MaxIters:
      return "max_iters";
  }
  return "unknown";
}

}  // namespace agmm
