#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace agmm {

namespace {

constexpr double kSmallAngle = 1e-7;

Matrix crossMatrix(const Eigen::Vector3d& w) {
  Matrix s(3, 3);
  s << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return s;
}

void checkOrthonormal(const Matrix& rot, const char* name) {
  const Eigen::Index d = rot.rows();
  if (rot.cols() != d || (d != 2 && d != 3))
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + ": rotation matrix must be 2x2 or 3x3");
  const double residual =
      (rot.transpose() * rot - Matrix::Identity(d, d)).norm();
  if (!(residual <= 1e-6) || !(std::abs(rot.determinant() - 1.0) <= 1e-6))
    throw Error(ErrorCode::Numerical,
                std::string(name) + ": matrix is not a proper rotation "
                                    "(orthonormality residual " +
                    std::to_string(residual) + ")");
}

}  // namespace

Matrix rotationMatrix(const RigidTransform& t) {
  requireDim(t.dim);
  if (t.dim == 2) {
    const double c = std::cos(t.rotation(0));
    const double s = std::sin(t.rotation(0));
    Matrix r(2, 2);
    r << c, -s, s, c;
    return r;
  }
  const Eigen::Vector3d w = t.rotation.head<3>();
  const double theta2 = w.squaredNorm();
  const Matrix k = crossMatrix(w);
  double a, b;  // R = I + a*K + b*K^2
  if (theta2 < kSmallAngle * kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Matrix::Identity(3, 3) + a * k + b * k * k;
}

std::vector<Matrix> rotationMatrixJacobians(const RigidTransform& t) {
  requireDim(t.dim);
  if (t.dim == 2) {
    const double c = std::cos(t.rotation(0));
    const double s = std::sin(t.rotation(0));
    Matrix j(2, 2);
    j << -s, -c, c, -s;
    return {j};
  }
  // Gallego & Yezzi: dR/dw_i = (w_i[w]x + [w x (I-R)e_i]x) R / ||w||^2,
  // with the limit [e_i]x at w = 0.
  const Eigen::Vector3d w = t.rotation.head<3>();
  const double theta2 = w.squaredNorm();
  std::vector<Matrix> jac;
  jac.reserve(3);
  if (theta2 < kSmallAngle * kSmallAngle) {
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(i) = 1.0;
      jac.push_back(crossMatrix(e));
    }
    return jac;
  }
  const Matrix r = rotationMatrix(t);
  const Matrix k = crossMatrix(w);
  const Matrix imr = Matrix::Identity(3, 3) - r;
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(i) = 1.0;
    const Eigen::Vector3d v = w.cross(Eigen::Vector3d(imr * e));
    jac.push_back((w(i) * k + crossMatrix(v)) * r / theta2);
  }
  return jac;
}

Vector rotationParamsFromMatrix(const Matrix& rot, int dim) {
  requireDim(dim);
  checkOrthonormal(rot, "rotationParamsFromMatrix");
  if (dim == 2) {
    Vector v(1);
    v(0) = std::atan2(rot(1, 0), rot(0, 0));
    return v;
  }
  const double cosTheta =
      std::clamp((rot.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double theta = std::acos(cosTheta);
  Eigen::Vector3d axisRaw(rot(2, 1) - rot(1, 2), rot(0, 2) - rot(2, 0),
                          rot(1, 0) - rot(0, 1));
  Vector v(3);
  if (theta < 1e-7) {
    v = 0.5 * axisRaw;  // sin(theta) ~ theta
    return v;
  }
  if (std::numbers::pi - theta < 1e-5) {
    // Near pi the skew part vanishes; recover the axis from (R + I)/2,
    // which equals axis*axis^T at theta = pi.
    const Matrix b = 0.5 * (rot + Matrix::Identity(3, 3));
    int k = 0;
    b.diagonal().maxCoeff(&k);
    Eigen::Vector3d axis = Eigen::Vector3d::Zero();
    axis(k) = std::sqrt(std::max(0.0, b(k, k)));
    for (int i = 0; i < 3; ++i)
      if (i != k) axis(i) = b(k, i) / axis(k);
    if (axisRaw(k) < 0.0) axis = -axis;  // keep continuity with the skew part
    axis.normalize();
    v = theta * axis;
    return v;
  }
  v = (theta / (2.0 * std::sin(theta))) * axisRaw;
  return v;
}

PointCloud applyTransform(const RigidTransform& t, const PointCloud& cloud) {
  requireSameDim(t.dim, cloud.dim);
  const Matrix r = rotationMatrix(t);
  PointCloud out;
  out.dim = cloud.dim;
  out.points = cloud.points * r.transpose();
  out.points.rowwise() += t.translation.transpose();
  out.covariances.reserve(cloud.covariances.size());
  for (const auto& cov : cloud.covariances)
    out.covariances.push_back(r * cov * r.transpose());
  return out;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  requireSameDim(a.dim, b.dim);
  RigidTransform out;
  out.dim = a.dim;
  if (a.dim == 2) {
    out.rotation = a.rotation + b.rotation;
  } else {
    out.rotation =
        rotationParamsFromMatrix(rotationMatrix(a) * rotationMatrix(b), 3);
  }
  out.translation = rotationMatrix(a) * b.translation + a.translation;
  return out;
}

RigidTransform inverse(const RigidTransform& t) {
  RigidTransform out;
  out.dim = t.dim;
  out.rotation = -t.rotation;
  out.translation = -(rotationMatrix(out) * t.translation);
  return out;
}

double rotationError(const Matrix& rotGt, const Matrix& rotEst) {
  checkOrthonormal(rotGt, "rotationError: ground truth");
  checkOrthonormal(rotEst, "rotationError: estimate");
  requireSameDim(static_cast<int>(rotGt.rows()),
                 static_cast<int>(rotEst.rows()));
  const Eigen::Index d = rotGt.rows();
  return (Matrix::Identity(d, d) - rotGt * rotEst.transpose()).norm();
}

Vector packParams(const RigidTransform& t) {
  const int nr = t.dim == 2 ? 1 : 3;
  Vector v(nr + t.dim);
  v.head(nr) = t.rotation;
  v.tail(t.dim) = t.translation;
  return v;
}

RigidTransform unpackParams(const Vector& v, int dim) {
  requireDim(dim);
  const int nr = dim == 2 ? 1 : 3;
  if (v.size() != nr + dim)
    throw Error(ErrorCode::InvalidArgument, "parameter vector has wrong size");
  RigidTransform t;
  t.dim = dim;
  t.rotation = v.head(nr);
  t.translation = v.tail(dim);
  return t;
}

}  // namespace agmm
