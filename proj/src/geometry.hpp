#ifndef AGMM_GEOMETRY_HPP
#define AGMM_GEOMETRY_HPP

#include "types.hpp"

namespace agmm {

// Materializes the rotation matrix. 2D: plane rotation by the stored angle.
// 3D: Rodrigues' formula on the axis-angle vector, with a second-order
// Taylor branch below ||w|| = 1e-7.
Matrix rotationMatrix(const RigidTransform& t);

// Partial derivatives of the rotation matrix with respect to each rotation
// parameter (1 matrix for 2D, 3 for 3D).
std::vector<Matrix> rotationMatrixJacobians(const RigidTransform& t);

// Axis-angle (or plane angle) from an orthonormal matrix.
Vector rotationParamsFromMatrix(const Matrix& rot, int dim);

// y = R*y0 + t per point, S = R*S0*R^T per covariance.
PointCloud applyTransform(const RigidTransform& t, const PointCloud& cloud);

// apply(compose(a, b), c) == apply(a, apply(b, c))
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

RigidTransform inverse(const RigidTransform& t);

// ||I - R_gt * R_est^T||_F. Inputs must be orthonormal with det 1
// (residual <= 1e-6), otherwise throws Numerical.
double rotationError(const Matrix& rotGt, const Matrix& rotEst);

// Flat parameter vector [rotation..., translation...] used by the M-step
// optimizer: 3 entries for 2D, 6 for 3D.
Vector packParams(const RigidTransform& t);
RigidTransform unpackParams(const Vector& v, int dim);

}  // namespace agmm

#endif
