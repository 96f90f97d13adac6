#include "preprocess.hpp"

#include <cmath>
#include <limits>

#include "geometry.hpp"
#include "parallel.hpp"

namespace agmm {

NormalizedPair normalizePair(const PointCloud& fixed,
                             const PointCloud& moving) {
  requireSameDim(fixed.dim, moving.dim);
  if (fixed.size() == 0 || moving.size() == 0)
    throw Error(ErrorCode::InvalidData, "normalizePair: empty cloud");

  NormalizedPair out;
  out.record.meanFixed = fixed.points.colwise().mean().transpose();
  out.record.meanMoving = moving.points.colwise().mean().transpose();

  Matrix centeredFixed =
      fixed.points.rowwise() - out.record.meanFixed.transpose();
  const double rms = std::sqrt(centeredFixed.squaredNorm() /
                               static_cast<double>(fixed.size()));
  if (rms <= 0.0)
    throw Error(ErrorCode::Numerical,
                "normalizePair: fixed cloud has zero RMS radius");
  out.record.scale = rms;

  const double inv = 1.0 / rms;
  const double inv2 = inv * inv;
  out.fixed.dim = fixed.dim;
  out.fixed.points = centeredFixed * inv;
  out.fixed.covariances.reserve(fixed.covariances.size());
  for (const auto& cov : fixed.covariances)
    out.fixed.covariances.push_back(cov * inv2);

  out.moving.dim = moving.dim;
  out.moving.points =
      (moving.points.rowwise() - out.record.meanMoving.transpose()) * inv;
  out.moving.covariances.reserve(moving.covariances.size());
  for (const auto& cov : moving.covariances)
    out.moving.covariances.push_back(cov * inv2);
  return out;
}

RigidTransform denormalizeTransform(const RigidTransform& tNorm,
                                    const NormalizationRecord& rec) {
  // p -> s*(R*((p - mu_m)/s) + t) + mu_f = R*p + (mu_f + s*t - R*mu_m)
  RigidTransform out;
  out.dim = tNorm.dim;
  out.rotation = tNorm.rotation;
  out.translation = rec.meanFixed + rec.scale * tNorm.translation -
                    rotationMatrix(tNorm) * rec.meanMoving;
  return out;
}

double meanMinDistance(const PointCloud& moving, const PointCloud& fixed) {
  requireSameDim(moving.dim, fixed.dim);
  const Eigen::Index m = moving.size();
  const Eigen::Index n = fixed.size();
  if (m == 0 || n == 0)
    throw Error(ErrorCode::InvalidData, "meanMinDistance: empty cloud");

  std::vector<double> minDist(static_cast<size_t>(m));
  parallelFor(static_cast<size_t>(m), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const auto y = moving.points.row(static_cast<Eigen::Index>(i));
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d2 = (y - fixed.points.row(j)).squaredNorm();
        if (d2 < best) best = d2;
      }
      minDist[i] = std::sqrt(best);
    }
  });

  double sum = 0.0;
  for (double d : minDist) sum += d;
  return sum / static_cast<double>(m);
}

}  // namespace agmm
