#include "gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "geometry.hpp"
#include "parallel.hpp"

namespace agmm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kExpFlush = -700.0;

// Pairs this far out contribute nothing to the objective; flushing avoids
// log-sum-exp machinery the energy does not need.
inline double flushedExp(double arg) {
  return arg < kExpFlush ? 0.0 : std::exp(arg);
}

template <int D>
using VecD = Eigen::Matrix<double, D, 1>;
template <int D>
using MatD = Eigen::Matrix<double, D, D>;

// Shared by the scalar entry point and the E-step loop so the dense matrix
// equals a naive double loop bit for bit.
template <int D>
inline double pairCoefficientImpl(const VecD<D>& d, const MatD<D>& sxInv,
                                  double logdetX, const MatD<D>& syInv,
                                  double logdetY) {
  const double qx = d.dot(sxInv * d);
  const double qy = d.dot(syInv * d);
  constexpr double norm =
      D == 2 ? 1.0 / (kTwoPi * kTwoPi) : 1.0 / (kTwoPi * kTwoPi * kTwoPi);
  return norm * std::exp(-0.5 * (logdetX + logdetY)) *
         (flushedExp(-0.5 * qx) + flushedExp(-0.5 * qy));
}

double spectralRadius(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  return eig.eigenvalues().maxCoeff();
}

template <int D>
void coefficientLoop(const PointCloud& fixed, const PointCloud& moving,
                     const EffectiveCovariances& eff, double maxDist2,
                     Matrix& values) {
  const Eigen::Index n = fixed.size();
  parallelFor(static_cast<size_t>(moving.size()), [&](size_t lo, size_t hi) {
    VecD<D> y, d;
    MatD<D> syInv, sxInv;
    for (size_t mi = lo; mi < hi; ++mi) {
      const auto m = static_cast<Eigen::Index>(mi);
      y = moving.points.row(m).transpose();
      syInv = eff.movingInv[mi];
      const double ldy = eff.movingLogdet[mi];
      for (Eigen::Index j = 0; j < n; ++j) {
        d = y - fixed.points.row(j).transpose();
        if (d.squaredNorm() > maxDist2) {
          values(m, j) = 0.0;
          continue;
        }
        sxInv = eff.fixedInv[static_cast<size_t>(j)];
        values(m, j) = pairCoefficientImpl<D>(
            d, sxInv, eff.fixedLogdet[static_cast<size_t>(j)], syInv, ldy);
      }
    }
  });
}

template <int D>
void objectiveRows(const RigidTransform& params, const PairCoefficients& coeffs,
                   const PointCloud& fixed, const PointCloud& moving0,
                   const EffectiveCovariances& eff,
                   std::vector<double>& rowSums) {
  const MatD<D> rot = rotationMatrix(params);
  const VecD<D> trans = params.translation;
  const Eigen::Index n = fixed.size();
  parallelFor(static_cast<size_t>(moving0.size()), [&](size_t lo, size_t hi) {
    VecD<D> p, d;
    MatD<D> a, syInv;
    for (size_t mi = lo; mi < hi; ++mi) {
      const auto m = static_cast<Eigen::Index>(mi);
      p = rot * moving0.points.row(m).transpose() + trans;
      syInv = eff.movingInv[mi];
      double sum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double c = coeffs.values(m, j);
        if (c == 0.0) continue;
        d = p - fixed.points.row(j).transpose();
        a = eff.fixedInv[static_cast<size_t>(j)] + syInv;
        sum += c * d.dot(a * d);
      }
      rowSums[mi] = sum;
    }
  });
}

template <int D>
void gradientRows(const RigidTransform& params, const PairCoefficients& coeffs,
                  const PointCloud& fixed, const PointCloud& moving0,
                  const EffectiveCovariances& eff, std::vector<Vector>& rows) {
  const MatD<D> rot = rotationMatrix(params);
  const VecD<D> trans = params.translation;
  const auto jacs = rotationMatrixJacobians(params);
  const int nRot = D == 2 ? 1 : 3;
  MatD<D> jfix[3];
  for (int k = 0; k < nRot; ++k) jfix[k] = jacs[static_cast<size_t>(k)];
  const Eigen::Index n = fixed.size();
  parallelFor(static_cast<size_t>(moving0.size()), [&](size_t lo, size_t hi) {
    VecD<D> y0, p, d, v, gTrans;
    MatD<D> a, syInv;
    VecD<D> jy[3];
    for (size_t mi = lo; mi < hi; ++mi) {
      const auto m = static_cast<Eigen::Index>(mi);
      y0 = moving0.points.row(m).transpose();
      p = rot * y0 + trans;
      syInv = eff.movingInv[mi];
      for (int k = 0; k < nRot; ++k) jy[k] = jfix[k] * y0;
      gTrans.setZero();
      double gRot[3] = {0.0, 0.0, 0.0};
      for (Eigen::Index j = 0; j < n; ++j) {
        const double c = coeffs.values(m, j);
        if (c == 0.0) continue;
        d = p - fixed.points.row(j).transpose();
        a = eff.fixedInv[static_cast<size_t>(j)] + syInv;
        v = (2.0 * c) * (a * d);
        gTrans += v;
        for (int k = 0; k < nRot; ++k) gRot[k] += v.dot(jy[k]);
      }
      Vector row(nRot + D);
      for (int k = 0; k < nRot; ++k) row(k) = gRot[k];
      row.tail(D) = gTrans;
      rows[mi] = std::move(row);
    }
  });
}

}  // namespace

EffectiveCovariances effectiveCovariances(const PointCloud& fixed,
                                          const PointCloud& movingTransformed,
                                          double sigma) {
  requireSameDim(fixed.dim, movingTransformed.dim);
  const int dim = fixed.dim;
  const Matrix inflation = sigma * sigma * Matrix::Identity(dim, dim);

  EffectiveCovariances eff;
  eff.fixedInv.reserve(fixed.covariances.size());
  eff.fixedLogdet.reserve(fixed.covariances.size());
  for (const auto& cov : fixed.covariances) {
    eff.fixedInv.push_back(cov.inverse());
    eff.fixedLogdet.push_back(std::log(cov.determinant()));
  }
  eff.movingInv.reserve(movingTransformed.covariances.size());
  eff.movingLogdet.reserve(movingTransformed.covariances.size());
  for (const auto& cov : movingTransformed.covariances) {
    const Matrix inflated = cov + inflation;
    eff.movingInv.push_back(inflated.inverse());
    eff.movingLogdet.push_back(std::log(inflated.determinant()));
  }
  return eff;
}

double gaussianDensity(const Vector& tau, const Vector& mu,
                       const Matrix& covInv, double logdet) {
  const Vector d = tau - mu;
  const double quad = d.dot(covInv * d);
  const double dDim = static_cast<double>(tau.size());
  return std::pow(kTwoPi, -dDim / 2.0) * std::exp(-0.5 * logdet) *
         flushedExp(-0.5 * quad);
}

double pairCoefficient(const Vector& x, const Matrix& sxInv, double logdetX,
                       const Vector& y, const Matrix& syInv, double logdetY) {
  requireDim(static_cast<int>(x.size()));
  requireSameDim(static_cast<int>(x.size()), static_cast<int>(y.size()));
  if (x.size() == 2) {
    const VecD<2> d = VecD<2>(y) - VecD<2>(x);
    return pairCoefficientImpl<2>(d, MatD<2>(sxInv), logdetX, MatD<2>(syInv),
                                  logdetY);
  }
  const VecD<3> d = VecD<3>(y) - VecD<3>(x);
  return pairCoefficientImpl<3>(d, MatD<3>(sxInv), logdetX, MatD<3>(syInv),
                                logdetY);
}

PairCoefficients computePairCoefficients(const PointCloud& fixed,
                                         const PointCloud& movingTransformed,
                                         const EffectiveCovariances& eff,
                                         double sigma, double cutoff) {
  requireSameDim(fixed.dim, movingTransformed.dim);
  if (sigma < 0.0)
    throw Error(ErrorCode::InvalidArgument, "sigma must be nonnegative");

  double maxDist2 = std::numeric_limits<double>::infinity();
  if (std::isfinite(cutoff)) {
    double radius = 0.0;
    for (const auto& cov : fixed.covariances)
      radius = std::max(radius, spectralRadius(cov));
    for (size_t i = 0; i < eff.movingInv.size(); ++i) {
      // largest eigenvalue of the inflated covariance = 1 / smallest
      // eigenvalue of its inverse
      Eigen::SelfAdjointEigenSolver<Matrix> eig(eff.movingInv[i]);
      radius = std::max(radius, 1.0 / eig.eigenvalues().minCoeff());
    }
    maxDist2 = cutoff * cutoff * radius;
  }

  PairCoefficients coeffs;
  coeffs.sigmaUsed = sigma;
  coeffs.values.resize(movingTransformed.size(), fixed.size());
  if (fixed.dim == 2)
    coefficientLoop<2>(fixed, movingTransformed, eff, maxDist2, coeffs.values);
  else
    coefficientLoop<3>(fixed, movingTransformed, eff, maxDist2, coeffs.values);
  return coeffs;
}

PairCoefficients computePairCoefficients(const PointCloud& fixed,
                                         const PointCloud& movingTransformed,
                                         double sigma, double cutoff) {
  const EffectiveCovariances eff =
      effectiveCovariances(fixed, movingTransformed, sigma);
  return computePairCoefficients(fixed, movingTransformed, eff, sigma, cutoff);
}

double objective(const RigidTransform& params, const PairCoefficients& coeffs,
                 const PointCloud& fixed, const PointCloud& movingOriginal,
                 const EffectiveCovariances& eff) {
  requireSameDim(fixed.dim, movingOriginal.dim);
  if (coeffs.values.rows() != movingOriginal.size() ||
      coeffs.values.cols() != fixed.size())
    throw Error(ErrorCode::DimensionMismatch,
                "coefficient matrix does not match cloud sizes");

  std::vector<double> rowSums(static_cast<size_t>(movingOriginal.size()), 0.0);
  if (fixed.dim == 2)
    objectiveRows<2>(params, coeffs, fixed, movingOriginal, eff, rowSums);
  else
    objectiveRows<3>(params, coeffs, fixed, movingOriginal, eff, rowSums);

  double total = 0.0;
  for (double s : rowSums) total += s;
  return total;
}

Vector objectiveGradient(const RigidTransform& params,
                         const PairCoefficients& coeffs,
                         const PointCloud& fixed,
                         const PointCloud& movingOriginal,
                         const EffectiveCovariances& eff) {
  requireSameDim(fixed.dim, movingOriginal.dim);
  const int nParams = fixed.dim == 2 ? 3 : 6;
  std::vector<Vector> rows(static_cast<size_t>(movingOriginal.size()));
  if (fixed.dim == 2)
    gradientRows<2>(params, coeffs, fixed, movingOriginal, eff, rows);
  else
    gradientRows<3>(params, coeffs, fixed, movingOriginal, eff, rows);

  Vector grad = Vector::Zero(nParams);
  for (const auto& row : rows) grad += row;
  return grad;
}

}  // namespace agmm
