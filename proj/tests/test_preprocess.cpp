#include <cmath>

#include "doctest.h"
#include "error_models.hpp"
#include "geometry.hpp"
#include "preprocess.hpp"
#include "rng.hpp"

using namespace agmm;

namespace {

PointCloud cloudFrom(const Matrix& points, double variance = 1e-4) {
  PointCloud c;
  c.dim = static_cast<int>(points.cols());
  c.points = points;
  c.covariances = isotropicCovariances(points.rows(), c.dim, variance);
  return c;
}

PointCloud randomCloud(int n, int dim, Rng& rng, double variance = 1e-4) {
  Matrix pts(n, dim);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < dim; ++a) pts(i, a) = rng.uniform(-2.0, 3.0);
  return cloudFrom(pts, variance);
}

}  // namespace

TEST_CASE("normalize pair hand example") {
  Matrix fixedPts(2, 2);
  fixedPts << -1.0, 0.0, 1.0, 0.0;
  Matrix movingPts(1, 2);
  movingPts << 5.0, 5.0;

  const NormalizedPair pair =
      normalizePair(cloudFrom(fixedPts), cloudFrom(movingPts));
  CHECK(pair.record.scale == doctest::Approx(1.0));  // RMS radius of fixed
  CHECK(pair.fixed.points.colwise().mean().norm() < 1e-12);
  CHECK(pair.moving.points.row(0).norm() < 1e-12);
  CHECK(pair.record.meanMoving(0) == doctest::Approx(5.0));
  CHECK(pair.record.meanMoving(1) == doctest::Approx(5.0));
}

TEST_CASE("normalize pair is idempotent on a normalized pair") {
  Rng rng(5);
  PointCloud fixed = randomCloud(40, 2, rng);
  PointCloud moving = randomCloud(30, 2, rng);
  const NormalizedPair once = normalizePair(fixed, moving);
  const NormalizedPair twice = normalizePair(once.fixed, once.moving);
  CHECK(twice.record.scale == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(twice.record.meanFixed.norm() < 1e-12);
  CHECK(twice.record.meanMoving.norm() < 1e-12);
  CHECK((twice.fixed.points - once.fixed.points).norm() < 1e-12);
}

TEST_CASE("covariances are rescaled by the squared scale") {
  Matrix fixedPts(2, 2);
  fixedPts << -2.0, 0.0, 2.0, 0.0;  // RMS radius 2
  PointCloud fixed = cloudFrom(fixedPts, 4.0);
  PointCloud moving = cloudFrom(fixedPts, 4.0);
  const NormalizedPair pair = normalizePair(fixed, moving);
  CHECK(pair.record.scale == doctest::Approx(2.0));
  CHECK(pair.fixed.covariances[0](0, 0) == doctest::Approx(1.0));
  CHECK(pair.moving.covariances[1](1, 1) == doctest::Approx(1.0));
}

TEST_CASE("normalize pair centroids vanish on random clouds") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    PointCloud fixed = randomCloud(5 + static_cast<int>(rng.uniformIndex(40)),
                                   dim, rng);
    PointCloud moving = randomCloud(5 + static_cast<int>(rng.uniformIndex(40)),
                                    dim, rng);
    const NormalizedPair pair = normalizePair(fixed, moving);
    CHECK(pair.fixed.points.colwise().mean().norm() < 1e-12);
    CHECK(pair.moving.points.colwise().mean().norm() < 1e-12);
  }
}

TEST_CASE("normalize pair error cases") {
  PointCloud empty;
  empty.dim = 2;
  empty.points.resize(0, 2);
  Matrix one(1, 2);
  one << 1.0, 1.0;
  CHECK_THROWS_AS(normalizePair(empty, cloudFrom(one)), Error);
  CHECK_THROWS_AS(normalizePair(cloudFrom(one), empty), Error);

  // all fixed points coincident -> zero RMS radius
  Matrix coincident(3, 2);
  coincident << 2.0, 2.0, 2.0, 2.0, 2.0, 2.0;
  CHECK_THROWS_AS(normalizePair(cloudFrom(coincident), cloudFrom(one)), Error);
}

TEST_CASE("denormalize transform") {
  NormalizationRecord rec;
  rec.meanFixed = Vector::Zero(2);
  rec.meanMoving = Vector::Zero(2);
  rec.scale = 1.0;

  SUBCASE("identity record keeps the transform") {
    RigidTransform t = RigidTransform::identity(2);
    t.rotation(0) = 0.3;
    t.translation << 0.5, -0.25;
    const RigidTransform out = denormalizeTransform(t, rec);
    CHECK((packParams(out) - packParams(t)).norm() < 1e-15);
  }

  SUBCASE("equal means cancel for the identity estimate") {
    rec.meanFixed = Vector::Constant(2, 3.0);
    rec.meanMoving = Vector::Constant(2, 3.0);
    rec.scale = 7.5;
    const RigidTransform out =
        denormalizeTransform(RigidTransform::identity(2), rec);
    CHECK(out.translation.norm() < 1e-12);
  }

  SUBCASE("mean offset becomes a pure translation") {
    rec.meanFixed = Vector::Zero(2);
    rec.meanFixed(0) = 1.0;
    const RigidTransform out =
        denormalizeTransform(RigidTransform::identity(2), rec);
    CHECK(out.translation(0) == doctest::Approx(1.0));
    CHECK(out.translation(1) == doctest::Approx(0.0));
  }
}

TEST_CASE("denormalized transform reproduces the normalized-space action") {
  Rng rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    PointCloud fixed = randomCloud(20, dim, rng);
    PointCloud moving = randomCloud(15, dim, rng);
    const NormalizedPair pair = normalizePair(fixed, moving);

    RigidTransform tNorm = RigidTransform::identity(dim);
    for (Eigen::Index i = 0; i < tNorm.rotation.size(); ++i)
      tNorm.rotation(i) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < dim; ++i) tNorm.translation(i) = rng.uniform(-1.0, 1.0);

    const RigidTransform tOrig = denormalizeTransform(tNorm, pair.record);
    const Matrix rNorm = rotationMatrix(tNorm);

    for (Eigen::Index p = 0; p < moving.size(); ++p) {
      const Vector original = moving.points.row(p).transpose();
      const Vector viaNormalized =
          pair.record.scale *
              (rNorm * ((original - pair.record.meanMoving) /
                        pair.record.scale) +
               tNorm.translation) +
          pair.record.meanFixed;
      const Vector direct =
          rotationMatrix(tOrig) * original + tOrig.translation;
      CHECK((viaNormalized - direct).norm() < 1e-9);
    }
  }
}

TEST_CASE("mean min distance") {
  SUBCASE("zero for identical clouds") {
    Matrix pts(3, 2);
    pts << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    CHECK(meanMinDistance(cloudFrom(pts), cloudFrom(pts)) == 0.0);
  }

  SUBCASE("single nearest neighbor") {
    Matrix fixedPts(2, 2);
    fixedPts << 0.0, 0.0, 1.0, 0.0;
    Matrix movingPts(1, 2);
    movingPts << 0.0, 0.5;
    CHECK(meanMinDistance(cloudFrom(movingPts), cloudFrom(fixedPts)) ==
          doctest::Approx(0.5));
  }

  SUBCASE("mean over moving points") {
    Matrix fixedPts(1, 2);
    fixedPts << 0.0, 0.0;
    Matrix movingPts(2, 2);
    movingPts << 1.0, 0.0, 0.0, 2.0;
    CHECK(meanMinDistance(cloudFrom(movingPts), cloudFrom(fixedPts)) ==
          doctest::Approx(1.5));
  }

  SUBCASE("zero iff every moving point coincides with a fixed point") {
    Matrix fixedPts(3, 2);
    fixedPts << 0.0, 0.0, 1.0, 0.0, 2.0, 2.0;
    Matrix movingPts(2, 2);
    movingPts << 2.0, 2.0, 0.0, 0.0;
    CHECK(meanMinDistance(cloudFrom(movingPts), cloudFrom(fixedPts)) == 0.0);
    movingPts(1, 0) = 1e-8;
    CHECK(meanMinDistance(cloudFrom(movingPts), cloudFrom(fixedPts)) > 0.0);
  }

  SUBCASE("empty cloud is an error") {
    PointCloud empty;
    empty.dim = 2;
    empty.points.resize(0, 2);
    Matrix pts(1, 2);
    pts << 0.0, 0.0;
    CHECK_THROWS_AS(meanMinDistance(empty, cloudFrom(pts)), Error);
    CHECK_THROWS_AS(meanMinDistance(cloudFrom(pts), empty), Error);
  }
}
