#ifndef AGMM_PREPROCESS_HPP
#define AGMM_PREPROCESS_HPP

#include "types.hpp"

namespace agmm {

struct NormalizationRecord {
  Vector meanFixed;
  Vector meanMoving;
  double scale = 1.0;
};

struct NormalizedPair {
  PointCloud fixed;
  PointCloud moving;
  NormalizationRecord record;
};

// Centers each cloud on its own mean and divides both by the same scale,
// the RMS radius of the fixed cloud. Covariances are divided by scale^2.
NormalizedPair normalizePair(const PointCloud& fixed, const PointCloud& moving);

// Maps a transform estimated between the normalized clouds back to the
// original coordinates.
RigidTransform denormalizeTransform(const RigidTransform& tNorm,
                                    const NormalizationRecord& rec);

// (1/M) * sum_m min_n ||y_m - x_n||. Exhaustive O(MN) scan.
double meanMinDistance(const PointCloud& moving, const PointCloud& fixed);

}  // namespace agmm

#endif
