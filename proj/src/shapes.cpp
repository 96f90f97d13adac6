#include "shapes.hpp"

#include <cmath>
#include <numbers>

#include "error_models.hpp"
#include "rng.hpp"

namespace agmm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform arc-length resampling of a closed polyline.
Matrix resampleClosedPolyline(const Matrix& vertices, int points) {
  const Eigen::Index v = vertices.rows();
  std::vector<double> cumulative(static_cast<size_t>(v) + 1, 0.0);
  for (Eigen::Index i = 0; i < v; ++i) {
    const Eigen::Index j = (i + 1) % v;
    cumulative[static_cast<size_t>(i) + 1] =
        cumulative[static_cast<size_t>(i)] +
        (vertices.row(j) - vertices.row(i)).norm();
  }
  const double total = cumulative.back();

  Matrix out(points, 2);
  size_t seg = 0;
  for (int k = 0; k < points; ++k) {
    const double target = total * static_cast<double>(k) / points;
    while (seg + 1 < cumulative.size() - 1 && cumulative[seg + 1] <= target)
      ++seg;
    const double span = cumulative[seg + 1] - cumulative[seg];
    const double frac = span > 0.0 ? (target - cumulative[seg]) / span : 0.0;
    const Eigen::Index a = static_cast<Eigen::Index>(seg);
    const Eigen::Index b = (a + 1) % v;
    out.row(k) = (1.0 - frac) * vertices.row(a) + frac * vertices.row(b);
  }
  return out;
}

}  // namespace

PointCloud ellipseContour(int points, double defaultVariance) {
  if (points < 3)
    throw Error(ErrorCode::InvalidArgument, "contour needs at least 3 points");
  PointCloud cloud;
  cloud.dim = 2;
  cloud.points.resize(points, 2);
  for (int i = 0; i < points; ++i) {
    const double t = kTwoPi * i / points;
    cloud.points(i, 0) = std::cos(t);
    // egg-shaped taper so the contour has no 180-degree symmetry
    cloud.points(i, 1) = 0.6 * std::sin(t) * (1.0 + 0.25 * std::cos(t));
  }
  cloud.covariances = isotropicCovariances(points, 2, defaultVariance);
  return cloud;
}

PointCloud boxWithBump(int points, double defaultVariance) {
  if (points < 3)
    throw Error(ErrorCode::InvalidArgument, "contour needs at least 3 points");
  // Unit square with a semicircular bump on part of the top edge.
  std::vector<Eigen::Vector2d> verts;
  verts.emplace_back(-1.0, -1.0);
  verts.emplace_back(1.0, -1.0);
  verts.emplace_back(1.0, 1.0);
  const double bumpRadius = 0.35;
  const double bumpCenter = 0.2;
  verts.emplace_back(bumpCenter + bumpRadius, 1.0);
  for (int i = 1; i < 16; ++i) {
    const double a = std::numbers::pi * i / 16.0;
    verts.emplace_back(bumpCenter + bumpRadius * std::cos(a),
                       1.0 + bumpRadius * std::sin(a));
  }
  verts.emplace_back(bumpCenter - bumpRadius, 1.0);
  verts.emplace_back(-1.0, 1.0);

  Matrix m(static_cast<Eigen::Index>(verts.size()), 2);
  for (size_t i = 0; i < verts.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();

  PointCloud cloud;
  cloud.dim = 2;
  cloud.points = resampleClosedPolyline(m, points);
  cloud.covariances = isotropicCovariances(points, 2, defaultVariance);
  return cloud;
}

PointCloud blobSurface(int points, uint64_t seed, double defaultVariance) {
  if (points < 4)
    throw Error(ErrorCode::InvalidArgument, "surface needs at least 4 points");
  Rng rng(hashCombine(seed, 0x626c6f62ULL));  // "blob"
  const double phase1 = rng.uniform(0.0, kTwoPi);
  const double phase2 = rng.uniform(0.0, kTwoPi);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));

  PointCloud cloud;
  cloud.dim = 3;
  cloud.points.resize(points, 3);
  for (int i = 0; i < points; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / points;
    const double theta = std::acos(z);
    const double phi = golden * i;
    const double r = 1.0 + 0.18 * std::sin(3.0 * theta + phase1) *
                               std::cos(2.0 * phi + phase2);
    cloud.points(i, 0) = r * std::sin(theta) * std::cos(phi);
    cloud.points(i, 1) = r * std::sin(theta) * std::sin(phi);
    cloud.points(i, 2) = r * z;
  }
  cloud.covariances = isotropicCovariances(points, 3, defaultVariance);
  return cloud;
}

PointCloud makeModel(const std::string& name, int points, uint64_t seed,
                     double defaultVariance) {
  if (name == "ellipse") return ellipseContour(points, defaultVariance);
  if (name == "boxbump") return boxWithBump(points, defaultVariance);
  if (name == "blob") return blobSurface(points, seed, defaultVariance);
  throw Error(ErrorCode::InvalidArgument, "unknown model name: " + name);
}

}  // namespace agmm
