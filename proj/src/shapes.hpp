#ifndef AGMM_SHAPES_HPP
#define AGMM_SHAPES_HPP

#include <cstdint>
#include <string>

#include "types.hpp"

namespace agmm {

// Tiny license-free benchmark models. 2D shapes are boundary-ordered
// contours (occlusion removes index-contiguous runs from them); blob is a
// closed 3D surface sampled on a Fibonacci sphere.
PointCloud ellipseContour(int points, double defaultVariance);
PointCloud boxWithBump(int points, double defaultVariance);
PointCloud blobSurface(int points, uint64_t seed, double defaultVariance);

// name in {"ellipse", "boxbump", "blob"}; seed only affects "blob".
PointCloud makeModel(const std::string& name, int points, uint64_t seed,
                     double defaultVariance);

}  // namespace agmm

#endif
