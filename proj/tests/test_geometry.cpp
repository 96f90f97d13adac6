#include <cmath>
#include <numbers>

#include "doctest.h"
#include "error_models.hpp"
#include "geometry.hpp"
#include "rng.hpp"

using namespace agmm;

namespace {

constexpr double kPi = std::numbers::pi;

RigidTransform make2d(double angle, double tx, double ty) {
  RigidTransform t = RigidTransform::identity(2);
  t.rotation(0) = angle;
  t.translation << tx, ty;
  return t;
}

RigidTransform make3d(const Eigen::Vector3d& axisAngle,
                      const Eigen::Vector3d& trans) {
  RigidTransform t = RigidTransform::identity(3);
  t.rotation = axisAngle;
  t.translation = trans;
  return t;
}

RigidTransform randomTransform(int dim, Rng& rng) {
  RigidTransform t = RigidTransform::identity(dim);
  for (Eigen::Index i = 0; i < t.rotation.size(); ++i)
    t.rotation(i) = rng.uniform(-2.0, 2.0);
  for (int i = 0; i < dim; ++i) t.translation(i) = rng.uniform(-3.0, 3.0);
  return t;
}

PointCloud smallCloud2d() {
  PointCloud c;
  c.dim = 2;
  c.points.resize(3, 2);
  c.points << 1.0, 0.0, 0.0, 2.0, -1.0, -1.0;
  c.covariances = isotropicCovariances(3, 2, 1.0);
  return c;
}

}  // namespace

TEST_CASE("rotation matrix basics") {
  CHECK(rotationMatrix(make2d(0.0, 0.0, 0.0)).isIdentity(1e-15));

  const Matrix quarter = rotationMatrix(make2d(kPi / 2.0, 0.0, 0.0));
  Matrix expected(2, 2);
  expected << 0.0, -1.0, 1.0, 0.0;
  CHECK((quarter - expected).norm() < 1e-15);

  const Matrix rz =
      rotationMatrix(make3d({0.0, 0.0, kPi / 2.0}, Eigen::Vector3d::Zero()));
  Matrix expectedZ(3, 3);
  expectedZ << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  CHECK((rz - expectedZ).norm() < 1e-12);
}

TEST_CASE("rotation matrix is orthonormal for random parameters") {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const int dim = i % 2 == 0 ? 2 : 3;
    const Matrix r = rotationMatrix(randomTransform(dim, rng));
    CHECK((r.transpose() * r - Matrix::Identity(dim, dim)).norm() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rodrigues small-angle branch stays smooth") {
  for (double eps : {0.0, 1e-10, 1e-8, 1e-7, 2e-7}) {
    const Matrix r =
        rotationMatrix(make3d({eps, 0.0, 0.0}, Eigen::Vector3d::Zero()));
    CHECK((r.transpose() * r - Matrix::Identity(3, 3)).norm() < 1e-14);
    CHECK(std::abs(r(1, 2) + std::sin(eps)) < 1e-14);
  }
}

TEST_CASE("apply transform maps points and covariances") {
  PointCloud c;
  c.dim = 2;
  c.points.resize(1, 2);
  c.points << 1.0, 0.0;
  Matrix cov(2, 2);
  cov << 2.0, 0.0, 0.0, 5.0;
  c.covariances = {cov};

  SUBCASE("identity leaves the cloud unchanged") {
    const PointCloud out = applyTransform(RigidTransform::identity(2), c);
    CHECK((out.points - c.points).norm() < 1e-15);
    CHECK((out.covariances[0] - cov).norm() < 1e-15);
  }

  SUBCASE("quarter turn swaps the covariance axes") {
    const PointCloud out = applyTransform(make2d(kPi / 2.0, 0.0, 0.0), c);
    CHECK(out.points(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.points(0, 1) == doctest::Approx(1.0));
    CHECK(out.covariances[0](0, 0) == doctest::Approx(5.0));
    CHECK(out.covariances[0](1, 1) == doctest::Approx(2.0));
  }

  SUBCASE("rotation plus translation") {
    const PointCloud out = applyTransform(make2d(kPi / 2.0, 1.0, 1.0), c);
    CHECK(out.points(0, 0) == doctest::Approx(1.0));
    CHECK(out.points(0, 1) == doctest::Approx(2.0));
  }

  SUBCASE("dimension mismatch is an error") {
    CHECK_THROWS_AS(applyTransform(RigidTransform::identity(3), c), Error);
  }
}

TEST_CASE("covariance determinants survive any transform") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    PointCloud c;
    c.dim = dim;
    c.points = Matrix::Random(4, dim);
    for (int i = 0; i < 4; ++i) {
      Matrix a = Matrix::Random(dim, dim);
      c.covariances.push_back(a * a.transpose() +
                              0.1 * Matrix::Identity(dim, dim));
    }
    const PointCloud out = applyTransform(randomTransform(dim, rng), c);
    for (int i = 0; i < 4; ++i) {
      const double before = c.covariances[i].determinant();
      const double after = out.covariances[i].determinant();
      CHECK(std::abs(after - before) < 1e-10 * std::abs(before));
    }
  }
}

TEST_CASE("compose and inverse") {
  const RigidTransform t = make2d(kPi / 2.0, 1.0, 0.0);

  SUBCASE("identity is neutral") {
    const RigidTransform out = compose(RigidTransform::identity(2), t);
    CHECK((packParams(out) - packParams(t)).norm() < 1e-15);
  }

  SUBCASE("two eighth turns make a quarter turn") {
    const RigidTransform eighth = make2d(kPi / 4.0, 0.0, 0.0);
    CHECK(compose(eighth, eighth).rotation(0) ==
          doctest::Approx(kPi / 2.0).epsilon(1e-14));
  }

  SUBCASE("inverse matches the hand computation") {
    const RigidTransform inv = inverse(t);
    CHECK(inv.rotation(0) == doctest::Approx(-kPi / 2.0));
    CHECK(inv.translation(0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(inv.translation(1) == doctest::Approx(1.0));
  }

  SUBCASE("compose with inverse is the identity") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
      const int dim = i % 2 == 0 ? 2 : 3;
      const RigidTransform r = randomTransform(dim, rng);
      const RigidTransform round = compose(r, inverse(r));
      CHECK((rotationMatrix(round) - Matrix::Identity(dim, dim)).norm() <
            1e-10);
      CHECK(round.translation.norm() < 1e-10);
    }
  }

  SUBCASE("compose agrees with sequential application") {
    Rng rng(11);
    const PointCloud c = smallCloud2d();
    for (int i = 0; i < 20; ++i) {
      const RigidTransform a = randomTransform(2, rng);
      const RigidTransform b = randomTransform(2, rng);
      const PointCloud viaCompose = applyTransform(compose(a, b), c);
      const PointCloud sequential = applyTransform(a, applyTransform(b, c));
      CHECK((viaCompose.points - sequential.points).norm() < 1e-10);
    }
  }
}

TEST_CASE("axis-angle extraction round-trips") {
  Rng rng(19);
  for (int i = 0; i < 200; ++i) {
    RigidTransform t = RigidTransform::identity(3);
    Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
    axis.normalize();
    double theta = rng.uniform(0.0, kPi);
    if (i % 10 == 0) theta = kPi - 1e-9;  // exercise the near-pi branch
    if (i % 10 == 1) theta = 1e-9;
    t.rotation = theta * axis;
    const Matrix r = rotationMatrix(t);
    RigidTransform back = RigidTransform::identity(3);
    back.rotation = rotationParamsFromMatrix(r, 3);
    CHECK((rotationMatrix(back) - r).norm() < 1e-8);
  }
}

TEST_CASE("rotation error") {
  const Matrix i2 = Matrix::Identity(2, 2);

  SUBCASE("zero for equal matrices") {
    const Matrix r = rotationMatrix(make2d(0.7, 0.0, 0.0));
    CHECK(rotationError(r, r) == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("half turn gives 2*sqrt(2)") {
    const Matrix r = rotationMatrix(make2d(kPi, 0.0, 0.0));
    CHECK(rotationError(r, i2) == doctest::Approx(2.8284271247461903));
  }

  SUBCASE("3D quarter turn gives 2") {
    const Matrix r = rotationMatrix(
        make3d({0.0, 0.0, kPi / 2.0}, Eigen::Vector3d::Zero()));
    CHECK(rotationError(r, Matrix::Identity(3, 3)) == doctest::Approx(2.0));
  }

  SUBCASE("closed form 2*sqrt(2)*|sin(theta/2)| in 2D") {
    for (double theta = -kPi; theta <= kPi; theta += kPi / 17.0) {
      const Matrix r = rotationMatrix(make2d(theta, 0.0, 0.0));
      const double expected =
          2.0 * std::sqrt(2.0) * std::abs(std::sin(theta / 2.0));
      CHECK(std::abs(rotationError(r, i2) - expected) < 1e-10);
    }
  }

  SUBCASE("symmetric in its arguments") {
    Rng rng(23);
    for (int i = 0; i < 50; ++i) {
      const Matrix a = rotationMatrix(randomTransform(3, rng));
      const Matrix b = rotationMatrix(randomTransform(3, rng));
      CHECK(rotationError(a, b) ==
            doctest::Approx(rotationError(b, a)).epsilon(1e-12));
    }
  }

  SUBCASE("rejects non-orthonormal input") {
    Matrix bad = i2;
    bad(0, 0) = 1.1;
    CHECK_THROWS_AS(rotationError(bad, i2), Error);
    Matrix reflection = i2;
    reflection(1, 1) = -1.0;  // orthonormal but det -1
    CHECK_THROWS_AS(rotationError(reflection, i2), Error);
  }
}
