#include <cmath>
#include <numeric>

#include "doctest.h"
#include "error_models.hpp"
#include "geometry.hpp"
#include "gmm.hpp"
#include "rng.hpp"

using namespace agmm;

namespace {

PointCloud randomCloud(int n, int dim, Rng& rng, double variance = 1e-2) {
  PointCloud c;
  c.dim = dim;
  c.points.resize(n, dim);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < dim; ++a) c.points(i, a) = rng.uniform(-1.0, 1.0);
  c.covariances.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Matrix a(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int col = 0; col < dim; ++col) a(r, col) = rng.uniform(-0.3, 0.3);
    c.covariances.push_back(a * a.transpose() +
                            variance * Matrix::Identity(dim, dim));
  }
  return c;
}

// random points with tight isotropic covariances, the registration regime
PointCloud tightCloud(int n, int dim, Rng& rng, double variance = 1e-4) {
  PointCloud c;
  c.dim = dim;
  c.points.resize(n, dim);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < dim; ++a) c.points(i, a) = rng.uniform(-1.0, 1.0);
  c.covariances = isotropicCovariances(n, dim, variance);
  return c;
}

RigidTransform randomParams(int dim, Rng& rng, double rotScale,
                            double transScale) {
  RigidTransform t = RigidTransform::identity(dim);
  for (Eigen::Index i = 0; i < t.rotation.size(); ++i)
    t.rotation(i) = rng.uniform(-rotScale, rotScale);
  for (int i = 0; i < dim; ++i)
    t.translation(i) = rng.uniform(-transScale, transScale);
  return t;
}

// One naive scalar evaluation per pair, the reference the fast path must
// match exactly.
Matrix naiveCoefficients(const PointCloud& fixed, const PointCloud& moving,
                         double sigma) {
  const EffectiveCovariances eff =
      effectiveCovariances(fixed, moving, sigma);
  Matrix out(moving.size(), fixed.size());
  for (Eigen::Index m = 0; m < moving.size(); ++m)
    for (Eigen::Index n = 0; n < fixed.size(); ++n)
      out(m, n) = pairCoefficient(
          fixed.points.row(n).transpose(),
          eff.fixedInv[static_cast<size_t>(n)],
          eff.fixedLogdet[static_cast<size_t>(n)],
          moving.points.row(m).transpose(),
          eff.movingInv[static_cast<size_t>(m)],
          eff.movingLogdet[static_cast<size_t>(m)]);
  return out;
}

}  // namespace

TEST_CASE("gaussian density frozen values") {
  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix i3 = Matrix::Identity(3, 3);
  Vector zero2 = Vector::Zero(2);
  Vector zero3 = Vector::Zero(3);

  CHECK(gaussianDensity(zero2, zero2, i2, 0.0) ==
        doctest::Approx(0.15915494309189535).epsilon(1e-12));

  Vector x(2);
  x << 1.0, 0.0;
  CHECK(gaussianDensity(x, zero2, i2, 0.0) ==
        doctest::Approx(0.09653235263005391).epsilon(1e-12));

  CHECK(gaussianDensity(zero3, zero3, i3, 0.0) ==
        doctest::Approx(0.06349363593424097).epsilon(1e-12));
}

TEST_CASE("gaussian density integrates to one") {
  // midpoint quadrature over [-8, 8]^2 against an anisotropic covariance
  Matrix cov(2, 2);
  cov << 0.8, 0.3, 0.3, 1.5;
  const Matrix covInv = cov.inverse();
  const double logdet = std::log(cov.determinant());
  Vector mu(2);
  mu << 0.2, -0.4;

  const int steps = 400;
  const double lo = -8.0, hi = 8.0;
  const double dx = (hi - lo) / steps;
  double sum = 0.0;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      Vector tau(2);
      tau << lo + (i + 0.5) * dx, lo + (j + 0.5) * dx;
      sum += gaussianDensity(tau, mu, covInv, logdet);
    }
  CHECK(sum * dx * dx == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("pair coefficient frozen values") {
  const Matrix i2 = Matrix::Identity(2, 2);
  Vector zero = Vector::Zero(2);

  SUBCASE("coincident points with unit covariances") {
    CHECK(pairCoefficient(zero, i2, 0.0, zero, i2, 0.0) ==
          doctest::Approx(0.05066059182116889).epsilon(1e-12));
  }

  SUBCASE("huge separation flushes to zero without NaN") {
    Vector far(2);
    far << 100.0, 0.0;
    const double c = pairCoefficient(zero, i2, 0.0, far, i2, 0.0);
    CHECK(c == 0.0);
    CHECK(std::isfinite(c));
  }

  SUBCASE("mixed covariances, value frozen from a scalar script") {
    Vector y(2);
    y << 1.0, 0.0;
    const Matrix syInv = (4.0 * i2).inverse();
    const double logdetY = std::log((4.0 * i2).determinant());
    CHECK(pairCoefficient(zero, i2, 0.0, y, syInv, logdetY) ==
          doctest::Approx(0.009429377193001255).epsilon(1e-12));
  }

  SUBCASE("symmetric under exchanging the two points") {
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
      const PointCloud cloud = randomCloud(2, 2, rng);
      const Matrix aInv = cloud.covariances[0].inverse();
      const Matrix bInv = cloud.covariances[1].inverse();
      const double lda = std::log(cloud.covariances[0].determinant());
      const double ldb = std::log(cloud.covariances[1].determinant());
      const Vector a = cloud.points.row(0).transpose();
      const Vector b = cloud.points.row(1).transpose();
      CHECK(pairCoefficient(a, aInv, lda, b, bInv, ldb) ==
            doctest::Approx(pairCoefficient(b, bInv, ldb, a, aInv, lda))
                .epsilon(1e-14));
    }
  }

  SUBCASE("broader covariances never increase the exponential factor") {
    Vector d(2);
    d << 0.7, -0.4;
    Vector zero2 = Vector::Zero(2);
    for (double c = 1.5; c < 20.0; c *= 1.7) {
      // strip the normalizer by passing logdet 0, leaving the exponentials
      const double narrow =
          pairCoefficient(zero2, i2, 0.0, d, i2, 0.0);
      const double broad = pairCoefficient(zero2, (c * i2).inverse(), 0.0, d,
                                           (c * i2).inverse(), 0.0);
      CHECK(broad >= narrow);
    }
  }
}

TEST_CASE("monotone decay of coefficients with distance") {
  const Matrix i2 = Matrix::Identity(2, 2);
  Vector zero = Vector::Zero(2);
  double prev = std::numeric_limits<double>::infinity();
  for (double dist = 0.0; dist < 5.0; dist += 0.25) {
    Vector y(2);
    y << dist, 0.0;
    const double c = pairCoefficient(zero, i2, 0.0, y, i2, 0.0);
    CHECK(c <= prev);
    prev = c;
  }
}

TEST_CASE("effective covariances invert their sources") {
  Rng rng(37);
  const PointCloud fixed = randomCloud(6, 3, rng);
  const PointCloud moving = randomCloud(5, 3, rng);
  const double sigma = 0.37;
  const EffectiveCovariances eff = effectiveCovariances(fixed, moving, sigma);

  for (size_t n = 0; n < eff.fixedInv.size(); ++n) {
    const Matrix product = eff.fixedInv[n] * fixed.covariances[n];
    CHECK((product - Matrix::Identity(3, 3)).norm() < 1e-9);
  }
  for (size_t m = 0; m < eff.movingInv.size(); ++m) {
    const Matrix inflated =
        moving.covariances[m] + sigma * sigma * Matrix::Identity(3, 3);
    CHECK((eff.movingInv[m] * inflated - Matrix::Identity(3, 3)).norm() <
          1e-9);
    CHECK(eff.movingLogdet[m] ==
          doctest::Approx(std::log(inflated.determinant())).epsilon(1e-12));
  }
}

TEST_CASE("pair coefficient matrix") {
  SUBCASE("single coincident pair with unit covariance and sigma 0") {
    PointCloud fixed;
    fixed.dim = 2;
    fixed.points = Matrix::Zero(1, 2);
    fixed.covariances = isotropicCovariances(1, 2, 1.0);
    const PairCoefficients coeffs =
        computePairCoefficients(fixed, fixed, 0.0,
                                std::numeric_limits<double>::infinity());
    CHECK(coeffs.values.rows() == 1);
    CHECK(coeffs.values(0, 0) ==
          doctest::Approx(0.05066059182116889).epsilon(1e-12));
    CHECK(coeffs.sigmaUsed == 0.0);
  }

  SUBCASE("dense path equals the naive double loop bit for bit") {
    Rng rng(41);
    for (int dim : {2, 3}) {
      const PointCloud fixed = randomCloud(17, dim, rng);
      const PointCloud moving = randomCloud(13, dim, rng);
      const double sigma = 0.21;
      const PairCoefficients fast = computePairCoefficients(
          fixed, moving, sigma, std::numeric_limits<double>::infinity());
      const Matrix naive = naiveCoefficients(fixed, moving, sigma);
      CHECK(fast.values.rows() == 13);
      CHECK(fast.values.cols() == 17);
      for (Eigen::Index m = 0; m < 13; ++m)
        for (Eigen::Index n = 0; n < 17; ++n)
          CHECK(fast.values(m, n) == naive(m, n));  // exact
    }
  }

  SUBCASE("all entries finite and nonnegative") {
    Rng rng(43);
    const PointCloud fixed = randomCloud(20, 2, rng);
    const PointCloud moving = randomCloud(20, 2, rng);
    const PairCoefficients coeffs =
        computePairCoefficients(fixed, moving, 0.1, 6.0);
    CHECK(coeffs.values.allFinite());
    CHECK(coeffs.values.minCoeff() >= 0.0);
  }

  SUBCASE("finite cutoff only zeroes entries") {
    Rng rng(47);
    const PointCloud fixed = randomCloud(30, 2, rng, 1e-4);
    const PointCloud moving = randomCloud(30, 2, rng, 1e-4);
    const PairCoefficients dense = computePairCoefficients(
        fixed, moving, 0.0, std::numeric_limits<double>::infinity());
    const PairCoefficients screened =
        computePairCoefficients(fixed, moving, 0.0, 6.0);
    int zeroed = 0;
    for (Eigen::Index m = 0; m < 30; ++m)
      for (Eigen::Index n = 0; n < 30; ++n) {
        if (screened.values(m, n) == 0.0 && dense.values(m, n) != 0.0)
          ++zeroed;
        else
          CHECK(screened.values(m, n) == dense.values(m, n));
      }
    CHECK(zeroed > 0);  // tight covariances leave far pairs screened
  }

  SUBCASE("dimension mismatch is an error") {
    Rng rng(53);
    const PointCloud fixed = randomCloud(4, 2, rng);
    const PointCloud moving = randomCloud(4, 3, rng);
    CHECK_THROWS_AS(computePairCoefficients(fixed, moving, 0.1, 6.0), Error);
  }
}

TEST_CASE("cutoff keeps the objective within 1e-9 relative") {
  Rng rng(59);
  const PointCloud fixed = randomCloud(100, 2, rng, 1e-4);
  const PointCloud moving = randomCloud(100, 2, rng, 1e-4);
  const double sigma = 0.05;
  const EffectiveCovariances eff = effectiveCovariances(fixed, moving, sigma);
  const PairCoefficients dense = computePairCoefficients(
      fixed, moving, eff, sigma, std::numeric_limits<double>::infinity());
  const PairCoefficients screened =
      computePairCoefficients(fixed, moving, eff, sigma, 6.0);

  const RigidTransform params = RigidTransform::identity(2);
  const double full = objective(params, dense, fixed, moving, eff);
  const double approx = objective(params, screened, fixed, moving, eff);
  CHECK(std::abs(full - approx) < 1e-9 * std::abs(full));
}

TEST_CASE("objective closed-form single-pair values") {
  PointCloud fixed;
  fixed.dim = 2;
  fixed.points = Matrix::Zero(1, 2);
  fixed.covariances = isotropicCovariances(1, 2, 1.0);

  PointCloud moving = fixed;

  SUBCASE("C=1, A=I, offset (1,0) gives 1") {
    // unit A needs each inverse to contribute one half
    fixed.covariances[0] = 2.0 * Matrix::Identity(2, 2);
    moving.covariances[0] = 2.0 * Matrix::Identity(2, 2);
    moving.points(0, 0) = 1.0;
    const EffectiveCovariances eff =
        effectiveCovariances(fixed, moving, 0.0);
    PairCoefficients coeffs;
    coeffs.values = Matrix::Ones(1, 1);
    const double v = objective(RigidTransform::identity(2), coeffs, fixed,
                               moving, eff);
    CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("C=2, A=diag(2,1), d=(1,1) gives 6") {
    // fixed inverse diag(1, .5), moving inverse diag(1, .5)
    Matrix cov(2, 2);
    cov << 1.0, 0.0, 0.0, 2.0;
    fixed.covariances[0] = cov;
    moving.covariances[0] = cov;
    moving.points(0, 0) = 1.0;
    moving.points(0, 1) = 1.0;
    const EffectiveCovariances eff =
        effectiveCovariances(fixed, moving, 0.0);
    PairCoefficients coeffs;
    coeffs.values = 2.0 * Matrix::Ones(1, 1);
    const double v = objective(RigidTransform::identity(2), coeffs, fixed,
                               moving, eff);
    CHECK(v == doctest::Approx(6.0).epsilon(1e-14));
  }

  SUBCASE("zero whenever every weighted pair coincides") {
    Rng rng(61);
    const PointCloud cloud = randomCloud(8, 2, rng);
    const EffectiveCovariances eff = effectiveCovariances(cloud, cloud, 0.0);
    PairCoefficients diag;
    diag.values = Matrix::Identity(8, 8);  // weights only on matched pairs
    CHECK(objective(RigidTransform::identity(2), diag, cloud, cloud, eff) ==
          0.0);
  }
}

TEST_CASE("objective is invariant under consistent relabeling") {
  Rng rng(67);
  const PointCloud fixed = randomCloud(9, 2, rng);
  const PointCloud moving = randomCloud(7, 2, rng);
  const double sigma = 0.2;
  const EffectiveCovariances eff = effectiveCovariances(fixed, moving, sigma);
  const PairCoefficients coeffs = computePairCoefficients(
      fixed, moving, eff, sigma, std::numeric_limits<double>::infinity());
  const RigidTransform params = randomParams(2, rng, 0.5, 0.5);
  const double base = objective(params, coeffs, fixed, moving, eff);

  // reverse both clouds together with the coefficient matrix
  PointCloud fixedR = fixed;
  PointCloud movingR = moving;
  fixedR.points = fixed.points.colwise().reverse().eval();
  movingR.points = moving.points.colwise().reverse().eval();
  std::reverse(fixedR.covariances.begin(), fixedR.covariances.end());
  std::reverse(movingR.covariances.begin(), movingR.covariances.end());
  const EffectiveCovariances effR =
      effectiveCovariances(fixedR, movingR, sigma);
  PairCoefficients coeffsR;
  coeffsR.values = coeffs.values.reverse().eval();
  coeffsR.sigmaUsed = sigma;
  const double permuted = objective(params, coeffsR, fixedR, movingR, effR);
  CHECK(permuted == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("gradient single-pair translation") {
  PointCloud fixed;
  fixed.dim = 2;
  fixed.points = Matrix::Zero(1, 2);
  fixed.covariances = {2.0 * Matrix::Identity(2, 2)};
  PointCloud moving = fixed;
  moving.points(0, 0) = 1.0;  // d = (1, 0), A = I
  const EffectiveCovariances eff = effectiveCovariances(fixed, moving, 0.0);
  PairCoefficients coeffs;
  coeffs.values = Matrix::Ones(1, 1);
  const Vector g = objectiveGradient(RigidTransform::identity(2), coeffs,
                                     fixed, moving, eff);
  CHECK(g(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(g(2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gradient vanishes at a perfect alignment") {
  Rng rng(71);
  const PointCloud cloud = randomCloud(12, 2, rng);
  const double sigma = 0.0;
  const EffectiveCovariances eff = effectiveCovariances(cloud, cloud, sigma);
  const PairCoefficients coeffs = computePairCoefficients(
      cloud, cloud, eff, sigma, std::numeric_limits<double>::infinity());
  const Vector g = objectiveGradient(RigidTransform::identity(2), coeffs,
                                     cloud, cloud, eff);
  CHECK(g.norm() < 1e-10);
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    const PointCloud fixed = randomCloud(10, dim, rng);
    const PointCloud moving = randomCloud(8, dim, rng);
    const double sigma = rng.uniform(0.0, 0.4);
    const EffectiveCovariances eff =
        effectiveCovariances(fixed, moving, sigma);
    const PairCoefficients coeffs = computePairCoefficients(
        fixed, moving, eff, sigma, std::numeric_limits<double>::infinity());
    const RigidTransform params = randomParams(dim, rng, 1.0, 0.7);

    const Vector analytic =
        objectiveGradient(params, coeffs, fixed, moving, eff);
    const Vector packed = packParams(params);
    Vector numeric(packed.size());
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < packed.size(); ++i) {
      Vector hi = packed, lo = packed;
      hi(i) += h;
      lo(i) -= h;
      numeric(i) = (objective(unpackParams(hi, dim), coeffs, fixed, moving,
                              eff) -
                    objective(unpackParams(lo, dim), coeffs, fixed, moving,
                              eff)) /
                   (2.0 * h);
    }
    CHECK((analytic - numeric).norm() <=
          1e-5 * std::max(1.0, numeric.norm()));
  }
}
