// Command-line front end for the agmm shared library. Talks to the engine
// exclusively through the C API in agmm/agmm.h.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agmm/agmm.h"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exitCodeFor(agmm_status status) {
  switch (status) {
    case AGMM_OK:
      return 0;
    case AGMM_ERROR_INVALID_ARGUMENT:
      return kExitUsage;
    case AGMM_ERROR_DIMENSION_MISMATCH:
    case AGMM_ERROR_INVALID_DATA:
    case AGMM_ERROR_IO:
      return kExitData;
    default:
      return kExitNumerical;
  }
}

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void check(agmm_status status, const std::string& context) {
  if (status != AGMM_OK)
    throw CliError(exitCodeFor(status),
                   context + ": " + agmm_last_error());
}

struct CloudDeleter {
  void operator()(agmm_cloud* c) const { agmm_cloud_destroy(c); }
};
using CloudPtr = std::unique_ptr<agmm_cloud, CloudDeleter>;

struct ReportDeleter {
  void operator()(agmm_report* r) const { agmm_report_destroy(r); }
};
using ReportPtr = std::unique_ptr<agmm_report, ReportDeleter>;

CloudPtr loadCloud(const std::string& path, double defaultVariance) {
  agmm_cloud* raw = nullptr;
  check(agmm_cloud_load_csv(path.c_str(), defaultVariance, &raw),
        "reading " + path);
  return CloudPtr(raw);
}

double parseCutoff(const std::string& text) {
  if (text == "inf" || text == "INF" || text == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw CliError(kExitUsage, "invalid --cutoff value '" + text + "'");
  }
}

std::string formatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json transformToJson(const agmm_transform& t) {
  const int dim = t.dim;
  std::vector<double> rotation(static_cast<size_t>(dim * dim));
  check(agmm_transform_rotation_matrix(&t, rotation.data()),
        "materializing rotation");
  std::vector<double> translation(t.translation, t.translation + dim);
  return json{{"dim", dim},
              {"rotation", rotation},
              {"translation", translation}};
}

void writeJsonFile(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CliError(kExitData, "cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw CliError(kExitData, "failed writing " + path);
}

struct TransformFile {
  int dim = 0;
  std::vector<double> rotation;     // row-major dim*dim
  std::vector<double> translation;  // dim
};

TransformFile readTransformJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitData, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CliError(kExitData, path + ": " + e.what());
  }
  TransformFile t;
  try {
    t.dim = j.at("dim").get<int>();
    t.rotation = j.at("rotation").get<std::vector<double>>();
    t.translation = j.at("translation").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw CliError(kExitData, path + ": " + e.what());
  }
  if (t.dim != 2 && t.dim != 3)
    throw CliError(kExitData, path + ": dim must be 2 or 3");
  if (t.rotation.size() != static_cast<size_t>(t.dim * t.dim) ||
      t.translation.size() != static_cast<size_t>(t.dim))
    throw CliError(kExitData, path + ": rotation/translation size mismatch");
  return t;
}

// ---- register ------------------------------------------------------------

struct RegisterArgs {
  std::string fixedPath, movingPath, outTransform, outReport;
  int dim = 2;
  int maxIters = 100;
  double tol = 1e-6;
  double sigmaFloor = 0.0;
  std::string cutoff = "6";
  double defaultVariance = 1e-4;
};

int runRegister(const RegisterArgs& args) {
  CloudPtr fixed = loadCloud(args.fixedPath, args.defaultVariance);
  CloudPtr moving = loadCloud(args.movingPath, args.defaultVariance);
  if (agmm_cloud_dim(fixed.get()) != args.dim ||
      agmm_cloud_dim(moving.get()) != args.dim)
    throw CliError(kExitData,
                   "cloud dimensions do not match --dim " +
                       std::to_string(args.dim) + " (fixed is " +
                       std::to_string(agmm_cloud_dim(fixed.get())) +
                       "D, moving is " +
                       std::to_string(agmm_cloud_dim(moving.get())) + "D)");

  agmm_register_config cfg;
  agmm_register_config_init(&cfg);
  cfg.max_iters = args.maxIters;
  cfg.energy_rel_tol = args.tol;
  cfg.sigma_floor = args.sigmaFloor;
  cfg.cutoff = parseCutoff(args.cutoff);

  agmm_report* raw = nullptr;
  check(agmm_register(fixed.get(), moving.get(), nullptr, &cfg, &raw),
        "registration");
  ReportPtr report(raw);

  const agmm_transform estimate = agmm_report_transform(report.get());
  writeJsonFile(transformToJson(estimate), args.outTransform);

  const size_t n = agmm_report_trace_length(report.get());
  std::vector<double> energy(n), energyStart(n), sigma(n);
  check(agmm_report_energy_trace(report.get(), energy.data(), n), "report");
  check(agmm_report_energy_start_trace(report.get(), energyStart.data(), n),
        "report");
  check(agmm_report_sigma_trace(report.get(), sigma.data(), n), "report");

  std::ofstream out(args.outReport);
  if (!out) throw CliError(kExitData, "cannot write " + args.outReport);
  out << "iteration,sigma,energy_start,energy\n";
  for (size_t i = 0; i < n; ++i)
    out << (i + 1) << ',' << formatNumber(sigma[i]) << ','
        << formatNumber(energyStart[i]) << ',' << formatNumber(energy[i])
        << "\n";

  const char* term = "max_iters";
  switch (agmm_report_termination(report.get())) {
    case AGMM_TERM_ENERGY_CONVERGED:
      term = "energy_converged";
      break;
    case AGMM_TERM_PARAMS_CONVERGED:
      term = "params_converged";
      break;
    default:
      break;
  }
  std::cout << "registered in " << agmm_report_iterations(report.get())
            << " iterations (" << term << ")\n";
  return 0;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string modelPath, outPrefix;
  agmm_perturbation_spec spec{};
  double defaultVariance = 1e-4;
};

int runSynth(const SynthArgs& args) {
  CloudPtr model = loadCloud(args.modelPath, args.defaultVariance);
  agmm_cloud* fixedRaw = nullptr;
  agmm_cloud* movingRaw = nullptr;
  agmm_transform gt{};
  check(agmm_perturb(model.get(), &args.spec, &fixedRaw, &movingRaw, &gt),
        "perturbation");
  CloudPtr fixed(fixedRaw), moving(movingRaw);

  const std::string fixedPath = args.outPrefix + "_fixed.csv";
  const std::string movingPath = args.outPrefix + "_moving.csv";
  check(agmm_cloud_save_csv(fixed.get(), fixedPath.c_str()),
        "writing " + fixedPath);
  check(agmm_cloud_save_csv(moving.get(), movingPath.c_str()),
        "writing " + movingPath);
  writeJsonFile(transformToJson(gt), args.outPrefix + "_gt.json");
  std::cout << "wrote " << fixedPath << " (" << agmm_cloud_size(fixed.get())
            << " points), " << movingPath << " ("
            << agmm_cloud_size(moving.get()) << " points)\n";
  return 0;
}

// ---- sweep ---------------------------------------------------------------

struct SweepArgs {
  std::string datasetDir, variable, grid, methods = "agmm,icp";
  std::string outCsv, outSvg;
  int trials = 6;
  uint64_t seed = 0;
  double sampleFixed = 0.9;
  double sampleMoving = 0.85;
  double defaultVariance = 1e-4;
  bool timing = false;
};

std::vector<double> parseGrid(const std::string& text) {
  const auto fail = [&] {
    throw CliError(kExitUsage, "invalid --grid '" + text + "', want a:b:step");
  };
  std::vector<double> parts;
  size_t pos = 0;
  while (true) {
    const size_t next = text.find(':', pos);
    const std::string tok = text.substr(pos, next - pos);
    try {
      size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) fail();
    } catch (const CliError&) {
      throw;
    } catch (const std::exception&) {
      fail();
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) fail();
  const double a = parts[0], b = parts[1], step = parts[2];
  if (step <= 0.0 || b < a) fail();
  std::vector<double> grid;
  for (double v = a; v <= b + 1e-9 * std::max(1.0, std::abs(b)); v += step)
    grid.push_back(v);
  return grid;
}

std::string defaultGridFor(const std::string& variable) {
  if (variable == "rotation") return "-60:60:8";
  if (variable == "noise") return "0.01:0.60:0.06";
  if (variable == "outliers") return "0.1:2.0:0.2";
  return "0:0.3:0.03";  // occlusion
}

const char* methodLabel(int32_t method) {
  return method == AGMM_METHOD_ADAPTIVE_GMM ? "agmm" : "icp";
}

void writeSweepCsv(const std::string& path, const std::string& variable,
                   const std::vector<agmm_trial_result>& results,
                   bool timing) {
  std::ofstream out(path);
  if (!out) throw CliError(kExitData, "cannot write " + path);
  out << "method,variable,value,trial,rotation_error,translation_error,"
         "wall_time,seed\n";
  char wall[32];
  for (const auto& r : results) {
    std::snprintf(wall, sizeof(wall), "%.6f", timing ? r.wall_time : 0.0);
    out << methodLabel(r.method) << ',' << variable << ','
        << formatNumber(r.grid_value) << ',' << r.trial << ','
        << formatNumber(r.rotation_error) << ','
        << formatNumber(r.translation_error) << ',' << wall << ',' << r.seed
        << "\n";
  }
  if (!out) throw CliError(kExitData, "failed writing " + path);
}

void writeSweepSvg(const std::string& path, const std::string& variable,
                   const std::vector<agmm_summary_row>& rows) {
  constexpr double w = 760, h = 480, ml = 70, mr = 30, mt = 30, mb = 55;
  double xMin = rows.front().grid_value, xMax = xMin, yMax = 0.0;
  for (const auto& r : rows) {
    xMin = std::min(xMin, r.grid_value);
    xMax = std::max(xMax, r.grid_value);
    if (std::isfinite(r.mean_rotation_error))
      yMax = std::max(yMax, r.mean_rotation_error + r.std_rotation_error);
  }
  if (xMax <= xMin) {
    xMin -= 1.0;
    xMax += 1.0;
  }
  if (yMax <= 0.0) yMax = 1.0;
  yMax *= 1.05;

  const auto mapX = [&](double v) {
    return ml + (v - xMin) / (xMax - xMin) * (w - ml - mr);
  };
  const auto mapY = [&](double v) {
    return h - mb - v / yMax * (h - mt - mb);
  };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::map<int32_t, std::vector<const agmm_summary_row*>> byMethod;
  for (const auto& r : rows) byMethod[r.method].push_back(&r);
  const std::map<int32_t, std::string> colors = {
      {AGMM_METHOD_ADAPTIVE_GMM, "#1f77b4"}, {AGMM_METHOD_ICP, "#d62728"}};

  std::ofstream out(path);
  if (!out) throw CliError(kExitData, "cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
      << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(h - mb) << "\" x2=\""
      << num(w - mr) << "\" y2=\"" << num(h - mb)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(mt) << "\" x2=\""
      << num(ml) << "\" y2=\"" << num(h - mb) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xMin + (xMax - xMin) * i / 5.0;
    const double yv = yMax * i / 5.0;
    out << "<text x=\"" << num(mapX(xv)) << "\" y=\"" << num(h - mb + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << formatNumber(xv)
        << "</text>\n";
    out << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(mapY(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << formatNumber(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << num((ml + w - mr) / 2) << "\" y=\"" << num(h - 12)
      << "\" font-size=\"13\" text-anchor=\"middle\">" << variable
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << num((mt + h - mb) / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "16 "
      << num((mt + h - mb) / 2) << ")\">rotation error</text>\n";

  double legendY = mt + 8;
  for (const auto& [method, points] : byMethod) {
    const std::string& color = colors.at(method);
    std::string poly;
    for (const auto* r : points) {
      if (!std::isfinite(r->mean_rotation_error)) continue;
      poly += num(mapX(r->grid_value)) + "," + num(mapY(r->mean_rotation_error)) + " ";
      const double lo = std::max(0.0, r->mean_rotation_error - r->std_rotation_error);
      const double hi = r->mean_rotation_error + r->std_rotation_error;
      out << "<line x1=\"" << num(mapX(r->grid_value)) << "\" y1=\""
          << num(mapY(lo)) << "\" x2=\"" << num(mapX(r->grid_value))
          << "\" y2=\"" << num(mapY(hi)) << "\" stroke=\"" << color
          << "\" stroke-width=\"1\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"" << poly << "\"/>\n";
    out << "<text x=\"" << num(w - mr - 80) << "\" y=\"" << num(legendY)
        << "\" font-size=\"12\" fill=\"" << color << "\">"
        << methodLabel(method) << "</text>\n";
    legendY += 16;
  }
  out << "</svg>\n";
  if (!out) throw CliError(kExitData, "failed writing " + path);
}

int runSweep(const SweepArgs& args) {
  int variable;
  if (args.variable == "rotation")
    variable = AGMM_SWEEP_ROTATION;
  else if (args.variable == "noise")
    variable = AGMM_SWEEP_NOISE;
  else if (args.variable == "outliers")
    variable = AGMM_SWEEP_OUTLIERS;
  else if (args.variable == "occlusion")
    variable = AGMM_SWEEP_OCCLUSION;
  else
    throw CliError(kExitUsage, "unknown --variable '" + args.variable + "'");

  uint32_t mask = 0;
  {
    std::stringstream ss(args.methods);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "agmm")
        mask |= AGMM_METHOD_ADAPTIVE_GMM;
      else if (tok == "icp")
        mask |= AGMM_METHOD_ICP;
      else
        throw CliError(kExitUsage, "unknown method '" + tok + "'");
    }
  }
  if (mask == 0) throw CliError(kExitUsage, "no methods selected");

  std::vector<std::string> files;
  {
    std::error_code ec;
    std::filesystem::directory_iterator it(args.datasetDir, ec);
    if (ec)
      throw CliError(kExitData,
                     "cannot read dataset dir " + args.datasetDir);
    for (const auto& entry : it)
      if (entry.is_regular_file() && entry.path().extension() == ".csv")
        files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw CliError(kExitData, "no .csv models in " + args.datasetDir);

  std::vector<CloudPtr> models;
  std::vector<const agmm_cloud*> handles;
  for (const auto& f : files) {
    models.push_back(loadCloud(f, args.defaultVariance));
    handles.push_back(models.back().get());
  }
  const int dim = agmm_cloud_dim(handles.front());
  for (size_t i = 1; i < handles.size(); ++i)
    if (agmm_cloud_dim(handles[i]) != dim)
      throw CliError(kExitData, "dataset mixes 2D and 3D models");

  const std::vector<double> grid =
      parseGrid(args.grid.empty() ? defaultGridFor(args.variable) : args.grid);

  agmm_perturbation_spec base;
  agmm_perturbation_spec_init(&base);
  base.sample_rate_fixed = args.sampleFixed;
  base.sample_rate_moving = args.sampleMoving;

  agmm_trial_result* resultsRaw = nullptr;
  size_t nResults = 0;
  check(agmm_sweep_run(handles.data(), handles.size(), variable, grid.data(),
                       grid.size(), args.trials, &base, nullptr, mask,
                       args.seed, &resultsRaw, &nResults),
        "sweep");
  std::vector<agmm_trial_result> results(resultsRaw, resultsRaw + nResults);
  agmm_trial_results_free(resultsRaw);

  writeSweepCsv(args.outCsv, args.variable, results, args.timing);

  if (!args.outSvg.empty()) {
    agmm_summary_row* rowsRaw = nullptr;
    size_t nRows = 0;
    check(agmm_summarize(results.data(), results.size(), &rowsRaw, &nRows),
          "summary");
    std::vector<agmm_summary_row> rows(rowsRaw, rowsRaw + nRows);
    agmm_summary_rows_free(rowsRaw);
    writeSweepSvg(args.outSvg, args.variable, rows);
  }
  std::cout << "wrote " << nResults << " trial results to " << args.outCsv
            << "\n";
  return 0;
}

// ---- eval ----------------------------------------------------------------

int runEval(const std::string& gtPath, const std::string& estPath) {
  const TransformFile gt = readTransformJson(gtPath);
  const TransformFile est = readTransformJson(estPath);
  if (gt.dim != est.dim)
    throw CliError(kExitData, "transforms have different dimensions");

  double rotErr = 0.0;
  check(agmm_rotation_error(gt.dim, gt.rotation.data(), est.rotation.data(),
                            &rotErr),
        "rotation error");
  double transErr = 0.0;
  for (int i = 0; i < gt.dim; ++i) {
    const double d = gt.translation[static_cast<size_t>(i)] -
                     est.translation[static_cast<size_t>(i)];
    transErr += d * d;
  }
  transErr = std::sqrt(transErr);

  char buf[64];
  std::snprintf(buf, sizeof(buf), "rotation_error %.6f\n", rotErr);
  std::cout << buf;
  std::snprintf(buf, sizeof(buf), "translation_error %.6f\n", transErr);
  std::cout << buf;
  return 0;
}

// ---- gen-models ----------------------------------------------------------

void writePointsOnlyCsv(const agmm_cloud* cloud, const std::string& path) {
  const int dim = agmm_cloud_dim(cloud);
  const size_t n = agmm_cloud_size(cloud);
  std::vector<double> pts(n * static_cast<size_t>(dim));
  check(agmm_cloud_get_points(cloud, pts.data()), "reading points");
  std::ofstream out(path);
  if (!out) throw CliError(kExitData, "cannot write " + path);
  out << (dim == 2 ? "x,y" : "x,y,z") << "\n";
  char buf[32];
  for (size_t i = 0; i < n; ++i) {
    for (int a = 0; a < dim; ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    pts[i * static_cast<size_t>(dim) + static_cast<size_t>(a)]);
      if (a > 0) out << ',';
      out << buf;
    }
    out << "\n";
  }
}

int runGenModels(const std::string& outDir, int points2d, int points3d) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(outDir) / "2d");
  fs::create_directories(fs::path(outDir) / "3d");
  const auto gen = [&](const char* name, int points, uint64_t seed,
                       const std::string& rel) {
    agmm_cloud* raw = nullptr;
    check(agmm_make_model(name, points, seed, 1e-4, &raw),
          std::string("generating ") + name);
    CloudPtr cloud(raw);
    const std::string path = (fs::path(outDir) / rel).string();
    writePointsOnlyCsv(cloud.get(), path);
    std::cout << "wrote " << path << "\n";
  };
  gen("ellipse", points2d, 0, "2d/ellipse.csv");
  gen("boxbump", points2d, 0, "2d/boxbump.csv");
  gen("blob", points3d, 1, "3d/blob1.csv");
  gen("blob", points3d, 2, "3d/blob2.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid point-cloud registration with per-point covariances"};
  app.require_subcommand(1);

  RegisterArgs regArgs;
  auto* reg = app.add_subcommand(
      "register", "Align a moving cloud to a fixed cloud");
  reg->add_option("--fixed", regArgs.fixedPath, "Fixed cloud CSV")->required();
  reg->add_option("--moving", regArgs.movingPath, "Moving cloud CSV")
      ->required();
  reg->add_option("--dim", regArgs.dim, "Cloud dimension")
      ->required()
      ->check(CLI::IsMember({2, 3}));
  reg->add_option("--max-iters", regArgs.maxIters, "EM iteration cap");
  reg->add_option("--tol", regArgs.tol, "Relative energy tolerance");
  reg->add_option("--sigma-floor", regArgs.sigmaFloor,
                  "Lower clamp on the annealing sigma");
  reg->add_option("--cutoff", regArgs.cutoff,
                  "Pair screening radius in standard deviations, or 'inf'");
  reg->add_option("--default-variance", regArgs.defaultVariance,
                  "Isotropic variance for clouds without covariance columns");
  reg->add_option("--out-transform", regArgs.outTransform,
                  "Output transform JSON")
      ->required();
  reg->add_option("--out-report", regArgs.outReport, "Output report CSV")
      ->required();

  SynthArgs synthArgs;
  agmm_perturbation_spec_init(&synthArgs.spec);
  auto* synth =
      app.add_subcommand("synth", "Make a perturbed pair from a model");
  synth->add_option("--model", synthArgs.modelPath, "Model cloud CSV")
      ->required();
  synth->add_option("--occlusion", synthArgs.spec.occlusion_rate,
                    "Fraction removed as one contiguous region");
  synth->add_option("--sample-fixed", synthArgs.spec.sample_rate_fixed,
                    "Fixed cloud sampling rate");
  synth->add_option("--sample-moving", synthArgs.spec.sample_rate_moving,
                    "Moving cloud sampling rate");
  synth->add_option("--noise-std", synthArgs.spec.noise_std_max,
                    "Per-axis noise std bound, in cloud radii");
  synth->add_option("--outliers", synthArgs.spec.outlier_rate,
                    "Outliers added as a fraction of cloud size");
  synth->add_option("--outlier-cov-factor", synthArgs.spec.outlier_cov_factor,
                    "Outlier covariance factor");
  synth->add_option("--rotation-deg", synthArgs.spec.init_rotation_deg,
                    "Ground-truth rotation in degrees");
  synth->add_option("--seed", synthArgs.spec.seed, "Random seed");
  synth->add_option("--default-variance", synthArgs.defaultVariance,
                    "Isotropic variance for models without covariances");
  synth->add_option("--out-prefix", synthArgs.outPrefix, "Output path prefix")
      ->required();

  SweepArgs sweepArgs;
  auto* sweep = app.add_subcommand(
      "sweep", "Run a robustness sweep over a dataset directory");
  sweep->add_option("--dataset", sweepArgs.datasetDir, "Directory of model CSVs")
      ->required();
  sweep->add_option("--variable", sweepArgs.variable,
                    "rotation|noise|outliers|occlusion")
      ->required();
  sweep->add_option("--grid", sweepArgs.grid, "a:b:step (default per variable)");
  sweep->add_option("--trials", sweepArgs.trials, "Trials per grid value");
  sweep->add_option("--seed", sweepArgs.seed, "Top-level seed");
  sweep->add_option("--methods", sweepArgs.methods, "Comma list: agmm,icp");
  sweep->add_option("--sample-fixed", sweepArgs.sampleFixed,
                    "Fixed cloud sampling rate");
  sweep->add_option("--sample-moving", sweepArgs.sampleMoving,
                    "Moving cloud sampling rate");
  sweep->add_option("--default-variance", sweepArgs.defaultVariance,
                    "Isotropic variance for models without covariances");
  sweep->add_flag("--timing", sweepArgs.timing,
                  "Record measured wall times in the CSV (off keeps reruns "
                  "byte-identical)");
  sweep->add_option("--out-csv", sweepArgs.outCsv, "Results CSV")->required();
  sweep->add_option("--out-svg", sweepArgs.outSvg, "Mean/std line chart");

  std::string gtPath, estPath;
  auto* eval = app.add_subcommand("eval", "Compare two transform JSON files");
  eval->add_option("--gt", gtPath, "Ground-truth transform JSON")->required();
  eval->add_option("--est", estPath, "Estimated transform JSON")->required();

  std::string genOutDir = "data";
  int genPoints2d = 100;
  int genPoints3d = 250;
  auto* gen = app.add_subcommand("gen-models",
                                 "Write the built-in benchmark models");
  gen->add_option("--out-dir", genOutDir, "Output directory");
  gen->add_option("--points-2d", genPoints2d, "Points per 2D contour");
  gen->add_option("--points-3d", genPoints3d, "Points per 3D surface");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (reg->parsed()) return runRegister(regArgs);
    if (synth->parsed()) return runSynth(synthArgs);
    if (sweep->parsed()) return runSweep(sweepArgs);
    if (eval->parsed()) return runEval(gtPath, estPath);
    if (gen->parsed()) return runGenModels(genOutDir, genPoints2d, genPoints3d);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
