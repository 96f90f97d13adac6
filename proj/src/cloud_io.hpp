#ifndef AGMM_CLOUD_IO_HPP
#define AGMM_CLOUD_IO_HPP

#include <string>

#include "types.hpp"

namespace agmm {

// CSV with header "x,y[,z]" optionally followed by the covariance upper
// triangle ("c11,c12,c22" in 2D, "c11,c12,c13,c22,c23,c33" in 3D). Lines
// starting with '#' are comments. Rows without covariance columns get
// defaultVariance * I. Parse and SPD failures report the line number.
PointCloud readCloudCsv(const std::string& path, double defaultVariance);

// Writes points with their covariance upper triangle at full precision so
// a read round-trips exactly.
void writeCloudCsv(const PointCloud& cloud, const std::string& path);

}  // namespace agmm

#endif
