#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

#include "geometry.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace agmm {

namespace {

double cloudRadius(const PointCloud& cloud) {
  const Eigen::RowVectorXd centroid = cloud.points.colwise().mean();
  return (cloud.points.rowwise() - centroid).rowwise().norm().maxCoeff();
}

void eraseIndices(PointCloud& cloud, const std::vector<bool>& remove) {
  const Eigen::Index n = cloud.size();
  Eigen::Index kept = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!remove[static_cast<size_t>(i)]) ++kept;
  Matrix points(kept, cloud.dim);
  std::vector<Matrix> covs;
  covs.reserve(static_cast<size_t>(kept));
  Eigen::Index w = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (remove[static_cast<size_t>(i)]) continue;
    points.row(w++) = cloud.points.row(i);
    covs.push_back(cloud.covariances[static_cast<size_t>(i)]);
  }
  cloud.points = std::move(points);
  cloud.covariances = std::move(covs);
}

// 2D contours lose an index-contiguous run (models are boundary-ordered);
// 3D clouds lose the k nearest neighbors of a random center.
void applyOcclusion(PointCloud& cloud, double rate, Rng& rng) {
  const Eigen::Index n = cloud.size();
  const auto k = static_cast<Eigen::Index>(
      std::llround(rate * static_cast<double>(n)));
  if (k <= 0) return;
  if (k >= n)
    throw Error(ErrorCode::InvalidArgument,
                "occlusion would remove the whole cloud");
  std::vector<bool> remove(static_cast<size_t>(n), false);
  if (cloud.dim == 2) {
    const auto start =
        static_cast<Eigen::Index>(rng.uniformIndex(static_cast<uint64_t>(n)));
    for (Eigen::Index i = 0; i < k; ++i)
      remove[static_cast<size_t>((start + i) % n)] = true;
  } else {
    const auto center =
        static_cast<Eigen::Index>(rng.uniformIndex(static_cast<uint64_t>(n)));
    std::vector<std::pair<double, Eigen::Index>> byDist;
    byDist.reserve(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      byDist.emplace_back(
          (cloud.points.row(i) - cloud.points.row(center)).squaredNorm(), i);
    std::sort(byDist.begin(), byDist.end());
    for (Eigen::Index i = 0; i < k; ++i)
      remove[static_cast<size_t>(byDist[static_cast<size_t>(i)].second)] =
          true;
  }
  eraseIndices(cloud, remove);
}

void applySampling(PointCloud& cloud, double rate, Rng& rng) {
  const Eigen::Index n = cloud.size();
  const auto keep = static_cast<Eigen::Index>(
      std::llround(rate * static_cast<double>(n)));
  if (keep >= n) return;
  // partial Fisher-Yates, then restore the original ordering
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (Eigen::Index i = 0; i < keep; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.uniformIndex(
                           static_cast<uint64_t>(n - i)));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(keep));
  std::sort(idx.begin(), idx.end());
  std::vector<bool> remove(static_cast<size_t>(n), true);
  for (Eigen::Index i : idx) remove[static_cast<size_t>(i)] = false;
  eraseIndices(cloud, remove);
}

// Zero-mean anisotropic noise; the drawn per-axis variances are added to
// the point's covariance diagonal so the registration can consume them.
void applyNoise(PointCloud& cloud, double stdMax, double radius, Rng& rng) {
  if (stdMax <= 0.0) return;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < cloud.dim; ++a) {
      const double std = rng.uniform(0.0, stdMax * radius);
      cloud.points(i, a) += std * rng.normal();
      cloud.covariances[static_cast<size_t>(i)](a, a) += std * std;
    }
  }
}

void applyOutliers(PointCloud& cloud, double rate, double covFactor,
                   double radius, Rng& rng) {
  const auto k = static_cast<Eigen::Index>(
      std::llround(rate * static_cast<double>(cloud.size())));
  if (k <= 0) return;
  Eigen::RowVectorXd lo = cloud.points.colwise().minCoeff();
  Eigen::RowVectorXd hi = cloud.points.colwise().maxCoeff();
  const Eigen::RowVectorXd pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const Eigen::Index n = cloud.size();
  Matrix points(n + k, cloud.dim);
  points.topRows(n) = cloud.points;
  const Matrix outlierCov =
      covFactor * radius * radius * Matrix::Identity(cloud.dim, cloud.dim);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (int a = 0; a < cloud.dim; ++a)
      points(n + i, a) = rng.uniform(lo(a), hi(a));
    cloud.covariances.push_back(outlierCov);
  }
  cloud.points = std::move(points);
}

PointCloud perturbOneCloud(const PointCloud& model,
                           const PerturbationSpec& spec, double sampleRate,
                           double radius, Rng& rng) {
  PointCloud cloud = model;
  applyOcclusion(cloud, spec.occlusionRate, rng);
  if (cloud.size() < cloud.dim + 1)
    throw Error(ErrorCode::InvalidData,
                "occlusion left fewer than dim+1 points");
  applySampling(cloud, sampleRate, rng);
  if (cloud.size() < cloud.dim + 1)
    throw Error(ErrorCode::InvalidData,
                "sampling left fewer than dim+1 points");
  applyNoise(cloud, spec.noiseStdMax, radius, rng);
  applyOutliers(cloud, spec.outlierRate, spec.outlierCovFactor, radius, rng);
  return cloud;
}

RigidTransform drawGroundTruth(int dim, const PerturbationSpec& spec,
                               double radius, Rng& rng) {
  // A zero requested rotation means the no-op ground truth.
  if (spec.initRotationDeg == 0.0) return RigidTransform::identity(dim);

  const double angle = spec.initRotationDeg * std::numbers::pi / 180.0;
  RigidTransform gt = RigidTransform::identity(dim);
  if (dim == 2) {
    gt.rotation(0) = angle;
  } else {
    // per-axis angle is the requested value or zero, chosen at random
    Matrix rot = Matrix::Identity(3, 3);
    for (int axis = 0; axis < 3; ++axis) {
      const double a = rng.uniform() < 0.5 ? 0.0 : angle;
      RigidTransform single = RigidTransform::identity(3);
      single.rotation(axis) = a;
      rot = rotationMatrix(single) * rot;
    }
    gt.rotation = rotationParamsFromMatrix(rot, 3);
  }

  Vector dir(dim);
  do {
    for (int a = 0; a < dim; ++a) dir(a) = rng.uniform(-1.0, 1.0);
  } while (dir.norm() < 1e-9);
  dir.normalize();
  gt.translation = dir * rng.uniform(0.0, 0.1 * radius);
  return gt;
}

struct NuisanceRanges {
  double rotationDeg;
  double noiseStdMax;
  double outlierRate;
  double occlusionRate;
};

// Benchmark ranges for the uncontrolled factors (2D and 3D differ only in
// the noise bound).
NuisanceRanges nuisanceRanges(int dim) {
  return {15.0, dim == 2 ? 0.05 : 0.01, 0.5, 0.05};
}

}  // namespace

PerturbedPair perturb(const PointCloud& model, const PerturbationSpec& spec) {
  validateCloud(model, "perturb: model");
  if (model.size() == 0)
    throw Error(ErrorCode::InvalidData, "perturb: empty model");
  if (spec.occlusionRate < 0.0 || spec.occlusionRate >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "occlusion rate must be in [0,1)");
  if (spec.sampleRateFixed <= 0.0 || spec.sampleRateFixed > 1.0 ||
      spec.sampleRateMoving <= 0.0 || spec.sampleRateMoving > 1.0)
    throw Error(ErrorCode::InvalidArgument, "sample rates must be in (0,1]");
  if (spec.noiseStdMax < 0.0 || spec.outlierRate < 0.0 ||
      spec.outlierCovFactor <= 0.0)
    throw Error(ErrorCode::InvalidArgument,
                "noise, outlier rate and outlier factor must be nonnegative");

  const double radius = cloudRadius(model);
  Rng rngFixed(hashCombine(spec.seed, 1));
  Rng rngMoving(hashCombine(spec.seed, 2));
  Rng rngGt(hashCombine(spec.seed, 3));

  PerturbedPair out;
  out.fixed =
      perturbOneCloud(model, spec, spec.sampleRateFixed, radius, rngFixed);
  PointCloud movingClean =
      perturbOneCloud(model, spec, spec.sampleRateMoving, radius, rngMoving);
  out.gt = drawGroundTruth(model.dim, spec, radius, rngGt);
  out.moving = applyTransform(out.gt, movingClean);
  return out;
}

RigidTransform kabschFit(const Matrix& source, const Matrix& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "kabschFit: paired matrices must have equal shapes");
  const auto dim = static_cast<int>(source.cols());
  requireDim(dim);
  if (source.rows() < 1)
    throw Error(ErrorCode::InvalidData, "kabschFit: no correspondences");

  const Eigen::RowVectorXd muS = source.colwise().mean();
  const Eigen::RowVectorXd muT = target.colwise().mean();
  const Matrix cross = (source.rowwise() - muS).transpose() *
                       (target.rowwise() - muT);

  Eigen::JacobiSVD<Matrix> svd(cross,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  if (sv(dim - 1) <= 1e-12 * std::max(1.0, sv(0)))
    throw Error(ErrorCode::Numerical,
                "kabschFit: rank-deficient cross-covariance");

  Matrix d = Matrix::Identity(dim, dim);
  d(dim - 1, dim - 1) =
      (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0
                                                                      : 1.0;
  const Matrix rot = svd.matrixV() * d * svd.matrixU().transpose();

  RigidTransform t = RigidTransform::identity(dim);
  t.rotation = rotationParamsFromMatrix(rot, dim);
  t.translation = muT.transpose() - rot * muS.transpose();
  return t;
}

RegistrationReport icpRegister(const PointCloud& fixed,
                               const PointCloud& moving,
                               const RigidTransform& init, int maxIters,
                               double tol) {
  requireSameDim(fixed.dim, moving.dim);
  requireSameDim(init.dim, fixed.dim);
  if (fixed.size() == 0 || moving.size() == 0)
    throw Error(ErrorCode::InvalidData, "icpRegister: empty cloud");
  if (maxIters < 1)
    throw Error(ErrorCode::InvalidArgument, "icpRegister: maxIters must be >= 1");

  RegistrationReport report;
  RigidTransform current = init;
  std::vector<Eigen::Index> prevCorr;
  double prevMse = std::numeric_limits<double>::quiet_NaN();

  for (int iter = 1; iter <= maxIters; ++iter) {
    const PointCloud movingT = applyTransform(current, moving);

    std::vector<Eigen::Index> corr(static_cast<size_t>(moving.size()));
    std::vector<double> sq(static_cast<size_t>(moving.size()));
    parallelFor(static_cast<size_t>(moving.size()), [&](size_t lo, size_t hi) {
      for (size_t m = lo; m < hi; ++m) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index bestIdx = 0;
        const auto row = movingT.points.row(static_cast<Eigen::Index>(m));
        for (Eigen::Index n = 0; n < fixed.size(); ++n) {
          const double d2 = (row - fixed.points.row(n)).squaredNorm();
          if (d2 < best) {
            best = d2;
            bestIdx = n;
          }
        }
        corr[m] = bestIdx;
        sq[m] = best;
      }
    });

    report.energyStartTrace.push_back(
        std::accumulate(sq.begin(), sq.end(), 0.0) /
        static_cast<double>(moving.size()));
    report.iterations = iter;

    if (corr == prevCorr) {
      report.energyTrace.push_back(report.energyStartTrace.back());
      report.termination = Termination::ParamsConverged;
      break;
    }
    prevCorr = corr;

    Matrix targets(moving.size(), fixed.dim);
    for (Eigen::Index m = 0; m < moving.size(); ++m)
      targets.row(m) = fixed.points.row(corr[static_cast<size_t>(m)]);
    current = kabschFit(moving.points, targets);

    const Matrix rot = rotationMatrix(current);
    Matrix aligned = moving.points * rot.transpose();
    aligned.rowwise() += current.translation.transpose();
    const double mse = (aligned - targets).rowwise().squaredNorm().mean();
    report.energyTrace.push_back(mse);

    if (iter >= 2 && std::abs(mse - prevMse) <
                         tol * std::max(std::abs(prevMse), 1e-300)) {
      report.termination = Termination::EnergyConverged;
      break;
    }
    report.termination = Termination::MaxIters;
    prevMse = mse;
  }

  report.transform = current;
  report.transformOriginal = current;
  return report;
}

RegistrationReport icpRegisterWithNormalization(const PointCloud& fixed,
                                                const PointCloud& moving,
                                                const RigidTransform& init,
                                                int maxIters, double tol) {
  const NormalizedPair pair = normalizePair(fixed, moving);
  RegistrationReport report =
      icpRegister(pair.fixed, pair.moving, init, maxIters, tol);
  report.transformOriginal =
      denormalizeTransform(report.transform, pair.record);
  return report;
}

std::vector<TrialResult> runSweep(const std::vector<PointCloud>& dataset,
                                  SweepVariable variable,
                                  const std::vector<double>& grid,
                                  int trialsPerValue,
                                  const PerturbationSpec& base,
                                  const RegistrationConfig& regCfg,
                                  const std::vector<Method>& methods,
                                  uint64_t seed) {
  if (dataset.empty())
    throw Error(ErrorCode::InvalidData, "runSweep: empty dataset");
  if (grid.empty())
    throw Error(ErrorCode::InvalidArgument, "runSweep: empty grid");
  if (trialsPerValue < 1)
    throw Error(ErrorCode::InvalidArgument, "runSweep: trials must be >= 1");
  if (methods.empty())
    throw Error(ErrorCode::InvalidArgument, "runSweep: no methods");
  const int dim = dataset.front().dim;
  for (const auto& model : dataset) requireSameDim(dim, model.dim);

  const size_t jobs = grid.size() * static_cast<size_t>(trialsPerValue);
  std::vector<TrialResult> results(jobs * methods.size());

  parallelFor(jobs, [&](size_t lo, size_t hi) {
    for (size_t job = lo; job < hi; ++job) {
      const size_t gi = job / static_cast<size_t>(trialsPerValue);
      const int trial = static_cast<int>(job % static_cast<size_t>(trialsPerValue));
      const uint64_t trialSeed =
          hashCombine(hashCombine(seed, gi), static_cast<uint64_t>(trial));
      Rng rng(trialSeed);

      // Draw every factor in a fixed order, then pin the controlled one.
      const NuisanceRanges ranges = nuisanceRanges(dim);
      PerturbationSpec spec = base;
      spec.initRotationDeg = rng.uniform(-ranges.rotationDeg, ranges.rotationDeg);
      spec.noiseStdMax = rng.uniform(0.0, ranges.noiseStdMax);
      spec.outlierRate = rng.uniform(0.0, ranges.outlierRate);
      spec.occlusionRate = rng.uniform(0.0, ranges.occlusionRate);
      switch (variable) {
        case SweepVariable::Rotation:
          spec.initRotationDeg = grid[gi];
          break;
        case SweepVariable::Noise:
          spec.noiseStdMax = grid[gi];
          break;
        case SweepVariable::Outliers:
          spec.outlierRate = grid[gi];
          break;
        case SweepVariable::Occlusion:
          spec.occlusionRate = grid[gi];
          break;
      }
      spec.seed = hashCombine(trialSeed, 0x7472696174ULL);  // "trial"

      const PointCloud& model =
          dataset[rng.uniformIndex(static_cast<uint64_t>(dataset.size()))];
      const PerturbedPair pair = perturb(model, spec);

      // Expected solution in the normalized frame, for the translation
      // metric.
      const NormalizedPair norm = normalizePair(pair.fixed, pair.moving);
      const RigidTransform expected = inverse(pair.gt);
      const Matrix expectedRot = rotationMatrix(expected);
      const Vector expectedTransNorm =
          (expectedRot * norm.record.meanMoving + expected.translation -
           norm.record.meanFixed) /
          norm.record.scale;

      for (size_t mi = 0; mi < methods.size(); ++mi) {
        TrialResult& res = results[job * methods.size() + mi];
        res.method = methods[mi];
        res.gridValue = grid[gi];
        res.trial = trial;
        res.seed = trialSeed;

        const auto start = std::chrono::steady_clock::now();
        try {
          const RigidTransform init = RigidTransform::identity(dim);
          const RegistrationReport report =
              methods[mi] == Method::AdaptiveGmm
                  ? registerWithNormalization(pair.fixed, pair.moving, init,
                                              regCfg)
                  : icpRegisterWithNormalization(pair.fixed, pair.moving, init,
                                                 100, 1e-9);
          res.rotationError = rotationError(
              expectedRot, rotationMatrix(report.transformOriginal));
          res.translationError =
              (report.transform.translation - expectedTransNorm).norm();
        } catch (const Error&) {
          // a diverged baseline is data, not a sweep failure
          res.rotationError = std::numeric_limits<double>::quiet_NaN();
          res.translationError = std::numeric_limits<double>::quiet_NaN();
        }
        res.wallTime = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      }
    }
  });
  return results;
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results) {
  if (results.empty())
    throw Error(ErrorCode::InvalidData, "summarize: no results");
  std::map<std::pair<double, std::string>, std::vector<const TrialResult*>>
      groups;
  for (const auto& r : results)
    groups[{r.gridValue, methodName(r.method)}].push_back(&r);

  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.method = members.front()->method;
    row.gridValue = key.first;
    row.count = static_cast<int>(members.size());
    double sum = 0.0;
    int finite = 0;
    for (const auto* r : members)
      if (std::isfinite(r->rotationError)) {
        sum += r->rotationError;
        ++finite;
      }
    if (finite > 0) {
      row.meanRotationError = sum / finite;
      double var = 0.0;
      for (const auto* r : members)
        if (std::isfinite(r->rotationError)) {
          const double d = r->rotationError - row.meanRotationError;
          var += d * d;
        }
      row.stdRotationError = std::sqrt(var / finite);
    } else {
      row.meanRotationError = std::numeric_limits<double>::quiet_NaN();
      row.stdRotationError = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

const char* methodName(Method m) {
  return m == Method::AdaptiveGmm ? "agmm" : "icp";
}

const char* sweepVariableName(SweepVariable v) {
  switch (v) {
    case SweepVariable::Rotation:
      return "rotation";
    case SweepVariable::Noise:
      return "noise";
    case SweepVariable::Outliers:
      return "outliers";
    case SweepVariable::Occlusion:
      return "occlusion";
  }
  return "unknown";
}

}  // namespace agmm
