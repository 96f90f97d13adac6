#include "cloud_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace agmm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

[[noreturn]] void fail(const std::string& path, size_t lineNo,
                       const std::string& what) {
  throw Error(ErrorCode::InvalidData,
              path + ":" + std::to_string(lineNo) + ": " + what);
}

double parseNumber(const std::string& token, const std::string& path,
                   size_t lineNo) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    fail(path, lineNo, "cannot parse number '" + token + "'");
  return value;
}

const std::vector<std::string> kHeader2 = {"x", "y"};
const std::vector<std::string> kHeader3 = {"x", "y", "z"};
const std::vector<std::string> kHeader2Cov = {"x", "y", "c11", "c12", "c22"};
const std::vector<std::string> kHeader3Cov = {"x",   "y",   "z",   "c11", "c12",
                                              "c13", "c22", "c23", "c33"};

Matrix covFromUpper(const std::vector<double>& v, int dim) {
  Matrix cov(dim, dim);
  if (dim == 2) {
    cov << v[0], v[1], v[1], v[2];
  } else {
    cov << v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], v[5];
  }
  return cov;
}

}  // namespace

PointCloud readCloudCsv(const std::string& path, double defaultVariance) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);

  std::string line;
  size_t lineNo = 0;
  int dim = 0;
  bool hasCov = false;
  bool headerSeen = false;
  std::vector<Vector> points;
  std::vector<Matrix> covs;

  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = splitCsv(t);

    if (!headerSeen) {
      if (fields == kHeader2) {
        dim = 2;
      } else if (fields == kHeader3) {
        dim = 3;
      } else if (fields == kHeader2Cov) {
        dim = 2;
        hasCov = true;
      } else if (fields == kHeader3Cov) {
        dim = 3;
        hasCov = true;
      } else {
        fail(path, lineNo,
             "expected header x,y[,z] with optional covariance columns");
      }
      headerSeen = true;
      if (!hasCov && !(defaultVariance > 0.0))
        throw Error(ErrorCode::InvalidArgument,
                    path + ": default variance must be > 0 when the file has "
                           "no covariance columns");
      continue;
    }

    const size_t expected =
        static_cast<size_t>(dim) + (hasCov ? (dim == 2 ? 3 : 6) : 0);
    if (fields.size() != expected)
      fail(path, lineNo,
           "expected " + std::to_string(expected) + " columns, got " +
               std::to_string(fields.size()));

    Vector p(dim);
    for (int a = 0; a < dim; ++a)
      p(a) = parseNumber(fields[static_cast<size_t>(a)], path, lineNo);
    points.push_back(p);

    if (hasCov) {
      std::vector<double> upper;
      for (size_t f = static_cast<size_t>(dim); f < expected; ++f)
        upper.push_back(parseNumber(fields[f], path, lineNo));
      const Matrix cov = covFromUpper(upper, dim);
      try {
        validateCovariance(cov, dim, "covariance");
      } catch (const Error& e) {
        fail(path, lineNo, e.what());
      }
      covs.push_back(cov);
    } else {
      covs.push_back(defaultVariance * Matrix::Identity(dim, dim));
    }
  }
  if (!headerSeen) throw Error(ErrorCode::InvalidData, path + ": empty file");
  if (points.empty())
    throw Error(ErrorCode::InvalidData, path + ": no data rows");

  PointCloud cloud;
  cloud.dim = dim;
  cloud.points.resize(static_cast<Eigen::Index>(points.size()), dim);
  for (size_t i = 0; i < points.size(); ++i)
    cloud.points.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  cloud.covariances = std::move(covs);
  return cloud;
}

void writeCloudCsv(const PointCloud& cloud, const std::string& path) {
  validateCloud(cloud, "writeCloudCsv");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);

  out << (cloud.dim == 2 ? "x,y,c11,c12,c22"
                         : "x,y,z,c11,c12,c13,c22,c23,c33")
      << "\n";
  char buf[32];
  const auto emit = [&](double v, bool leadingComma) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    if (leadingComma) out << ',';
    out << buf;
  };
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < cloud.dim; ++a) emit(cloud.points(i, a), a > 0);
    const Matrix& cov = cloud.covariances[static_cast<size_t>(i)];
    for (int r = 0; r < cloud.dim; ++r)
      for (int c = r; c < cloud.dim; ++c) emit(cov(r, c), true);
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path);
}

}  // namespace agmm
