#include "agmm/agmm.h"

#include <cstring>
#include <new>
#include <string>

#include "bench.hpp"
#include "cloud_io.hpp"
#include "em.hpp"
#include "error_models.hpp"
#include "geometry.hpp"
#include "gmm.hpp"
#include "preprocess.hpp"
#include "shapes.hpp"
#include "types.hpp"

struct agmm_cloud {
  agmm::PointCloud cloud;
};

struct agmm_report {
  agmm::RegistrationReport report;
};

namespace {

thread_local std::string tlsError;

agmm_status statusFromCode(agmm::ErrorCode code) {
  switch (code) {
    case agmm::ErrorCode::InvalidArgument:
      return AGMM_ERROR_INVALID_ARGUMENT;
    case agmm::ErrorCode::DimensionMismatch:
      return AGMM_ERROR_DIMENSION_MISMATCH;
    case agmm::ErrorCode::InvalidData:
      return AGMM_ERROR_INVALID_DATA;
    case agmm::ErrorCode::Io:
      return AGMM_ERROR_IO;
    case agmm::ErrorCode::Numerical:
      return AGMM_ERROR_NUMERICAL;
  }
  return AGMM_ERROR_INTERNAL;
}

template <typename Fn>
agmm_status guarded(Fn&& fn) {
  try {
    fn();
    return AGMM_OK;
  } catch (const agmm::Error& e) {
    tlsError = e.what();
    return statusFromCode(e.code());
  } catch (const std::bad_alloc&) {
    tlsError = "out of memory";
    return AGMM_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    tlsError = e.what();
    return AGMM_ERROR_INTERNAL;
  }
}

agmm_status requireArg(bool ok, const char* what) {
  if (ok) return AGMM_OK;
  tlsError = std::string("null or invalid argument: ") + what;
  return AGMM_ERROR_INVALID_ARGUMENT;
}

agmm::RigidTransform fromC(const agmm_transform& t) {
  agmm::requireDim(t.dim);
  agmm::RigidTransform out = agmm::RigidTransform::identity(t.dim);
  if (t.dim == 2) {
    out.rotation(0) = t.rotation[0];
  } else {
    for (int i = 0; i < 3; ++i) out.rotation(i) = t.rotation[i];
  }
  for (int i = 0; i < t.dim; ++i) out.translation(i) = t.translation[i];
  return out;
}

agmm_transform toC(const agmm::RigidTransform& t) {
  agmm_transform out{};
  out.dim = t.dim;
  for (Eigen::Index i = 0; i < t.rotation.size(); ++i)
    out.rotation[i] = t.rotation(i);
  for (int i = 0; i < t.dim; ++i) out.translation[i] = t.translation(i);
  return out;
}

agmm::RegistrationConfig fromC(const agmm_register_config& cfg) {
  agmm::RegistrationConfig out;
  out.maxIters = cfg.max_iters;
  out.innerMaxIters = cfg.inner_max_iters;
  out.energyRelTol = cfg.energy_rel_tol;
  out.paramAbsTol = cfg.param_abs_tol;
  out.sigmaFloor = cfg.sigma_floor;
  out.cutoff = cfg.cutoff;
  return out;
}

agmm::PerturbationSpec fromC(const agmm_perturbation_spec& spec) {
  agmm::PerturbationSpec out;
  out.occlusionRate = spec.occlusion_rate;
  out.sampleRateFixed = spec.sample_rate_fixed;
  out.sampleRateMoving = spec.sample_rate_moving;
  out.noiseStdMax = spec.noise_std_max;
  out.outlierRate = spec.outlier_rate;
  out.outlierCovFactor = spec.outlier_cov_factor;
  out.initRotationDeg = spec.init_rotation_deg;
  out.seed = spec.seed;
  return out;
}

agmm_status copyTrace(const std::vector<double>& trace, double* out,
                      size_t cap) {
  if (!out) return requireArg(false, "out");
  if (cap < trace.size()) {
    tlsError = "trace buffer too small";
    return AGMM_ERROR_INVALID_ARGUMENT;
  }
  std::memcpy(out, trace.data(), trace.size() * sizeof(double));
  return AGMM_OK;
}

}  // namespace

extern "C" {

const char* agmm_version(void) { return "0.1.0"; }

const char* agmm_last_error(void) { return tlsError.c_str(); }

agmm_status agmm_cloud_create(int32_t dim, size_t count, const double* points,
                              const double* covariances,
                              double default_variance, agmm_cloud** out) {
  if (auto s = requireArg(points && out && count > 0, "points/out/count"))
    return s;
  return guarded([&] {
    agmm::requireDim(dim);
    agmm::PointCloud cloud;
    cloud.dim = dim;
    cloud.points.resize(static_cast<Eigen::Index>(count), dim);
    for (size_t i = 0; i < count; ++i)
      for (int a = 0; a < dim; ++a)
        cloud.points(static_cast<Eigen::Index>(i), a) =
            points[i * static_cast<size_t>(dim) + static_cast<size_t>(a)];
    if (covariances) {
      const size_t dd = static_cast<size_t>(dim) * static_cast<size_t>(dim);
      cloud.covariances.reserve(count);
      for (size_t i = 0; i < count; ++i) {
        agmm::Matrix cov(dim, dim);
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c)
            cov(r, c) = covariances[i * dd + static_cast<size_t>(r * dim + c)];
        cloud.covariances.push_back(cov);
      }
    } else {
      cloud.covariances = agmm::isotropicCovariances(
          static_cast<Eigen::Index>(count), dim, default_variance);
    }
    agmm::validateCloud(cloud, "agmm_cloud_create");
    *out = new agmm_cloud{std::move(cloud)};
  });
}

agmm_status agmm_cloud_load_csv(const char* path, double default_variance,
                                agmm_cloud** out) {
  if (auto s = requireArg(path && out, "path/out")) return s;
  return guarded(
      [&] { *out = new agmm_cloud{agmm::readCloudCsv(path, default_variance)}; });
}

agmm_status agmm_cloud_save_csv(const agmm_cloud* cloud, const char* path) {
  if (auto s = requireArg(cloud && path, "cloud/path")) return s;
  return guarded([&] { agmm::writeCloudCsv(cloud->cloud, path); });
}

int32_t agmm_cloud_dim(const agmm_cloud* cloud) {
  return cloud ? cloud->cloud.dim : 0;
}

size_t agmm_cloud_size(const agmm_cloud* cloud) {
  return cloud ? static_cast<size_t>(cloud->cloud.size()) : 0;
}

agmm_status agmm_cloud_get_points(const agmm_cloud* cloud, double* out) {
  if (auto s = requireArg(cloud && out, "cloud/out")) return s;
  const auto& c = cloud->cloud;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    for (int a = 0; a < c.dim; ++a)
      out[static_cast<size_t>(i) * static_cast<size_t>(c.dim) +
          static_cast<size_t>(a)] = c.points(i, a);
  return AGMM_OK;
}

agmm_status agmm_cloud_get_covariances(const agmm_cloud* cloud, double* out) {
  if (auto s = requireArg(cloud && out, "cloud/out")) return s;
  const auto& c = cloud->cloud;
  const size_t dd = static_cast<size_t>(c.dim) * static_cast<size_t>(c.dim);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const agmm::Matrix& cov = c.covariances[static_cast<size_t>(i)];
    for (int r = 0; r < c.dim; ++r)
      for (int col = 0; col < c.dim; ++col)
        out[static_cast<size_t>(i) * dd +
            static_cast<size_t>(r * c.dim + col)] = cov(r, col);
  }
  return AGMM_OK;
}

void agmm_cloud_destroy(agmm_cloud* cloud) { delete cloud; }

agmm_status agmm_make_model(const char* name, int32_t points, uint64_t seed,
                            double default_variance, agmm_cloud** out) {
  if (auto s = requireArg(name && out, "name/out")) return s;
  return guarded([&] {
    *out = new agmm_cloud{
        agmm::makeModel(name, points, seed, default_variance)};
  });
}

agmm_transform agmm_transform_identity(int32_t dim) {
  agmm_transform t{};
  t.dim = dim;
  return t;
}

agmm_status agmm_transform_rotation_matrix(const agmm_transform* t,
                                           double* out) {
  if (auto s = requireArg(t && out, "t/out")) return s;
  return guarded([&] {
    const agmm::Matrix r = agmm::rotationMatrix(fromC(*t));
    for (int i = 0; i < t->dim; ++i)
      for (int j = 0; j < t->dim; ++j)
        out[static_cast<size_t>(i * t->dim + j)] = r(i, j);
  });
}

agmm_status agmm_transform_compose(const agmm_transform* a,
                                   const agmm_transform* b,
                                   agmm_transform* out) {
  if (auto s = requireArg(a && b && out, "a/b/out")) return s;
  return guarded([&] { *out = toC(agmm::compose(fromC(*a), fromC(*b))); });
}

agmm_status agmm_transform_invert(const agmm_transform* t,
                                  agmm_transform* out) {
  if (auto s = requireArg(t && out, "t/out")) return s;
  return guarded([&] { *out = toC(agmm::inverse(fromC(*t))); });
}

agmm_status agmm_transform_apply(const agmm_transform* t,
                                 const agmm_cloud* cloud, agmm_cloud** out) {
  if (auto s = requireArg(t && cloud && out, "t/cloud/out")) return s;
  return guarded([&] {
    *out = new agmm_cloud{agmm::applyTransform(fromC(*t), cloud->cloud)};
  });
}

agmm_status agmm_rotation_error(int32_t dim, const double* r_gt,
                                const double* r_est, double* out) {
  if (auto s = requireArg(r_gt && r_est && out, "r_gt/r_est/out")) return s;
  return guarded([&] {
    agmm::requireDim(dim);
    agmm::Matrix gt(dim, dim), est(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        gt(i, j) = r_gt[static_cast<size_t>(i * dim + j)];
        est(i, j) = r_est[static_cast<size_t>(i * dim + j)];
      }
    *out = agmm::rotationError(gt, est);
  });
}

agmm_status agmm_mean_min_distance(const agmm_cloud* moving,
                                   const agmm_cloud* fixed, double* out) {
  if (auto s = requireArg(moving && fixed && out, "moving/fixed/out"))
    return s;
  return guarded(
      [&] { *out = agmm::meanMinDistance(moving->cloud, fixed->cloud); });
}

void agmm_register_config_init(agmm_register_config* cfg) {
  if (!cfg) return;
  const agmm::RegistrationConfig defaults;
  cfg->max_iters = defaults.maxIters;
  cfg->inner_max_iters = defaults.innerMaxIters;
  cfg->energy_rel_tol = defaults.energyRelTol;
  cfg->param_abs_tol = defaults.paramAbsTol;
  cfg->sigma_floor = defaults.sigmaFloor;
  cfg->cutoff = defaults.cutoff;
}

agmm_status agmm_register(const agmm_cloud* fixed, const agmm_cloud* moving,
                          const agmm_transform* init,
                          const agmm_register_config* cfg, agmm_report** out) {
  if (auto s = requireArg(fixed && moving && out, "fixed/moving/out"))
    return s;
  return guarded([&] {
    agmm_register_config defaults;
    agmm_register_config_init(&defaults);
    const agmm::RegistrationConfig regCfg = fromC(cfg ? *cfg : defaults);
    const agmm::RigidTransform initT =
        init ? fromC(*init) : agmm::RigidTransform::identity(fixed->cloud.dim);
    *out = new agmm_report{agmm::registerWithNormalization(
        fixed->cloud, moving->cloud, initT, regCfg)};
  });
}

agmm_status agmm_icp_register(const agmm_cloud* fixed,
                              const agmm_cloud* moving,
                              const agmm_transform* init, int32_t max_iters,
                              double tol, agmm_report** out) {
  if (auto s = requireArg(fixed && moving && out, "fixed/moving/out"))
    return s;
  return guarded([&] {
    const agmm::RigidTransform initT =
        init ? fromC(*init) : agmm::RigidTransform::identity(fixed->cloud.dim);
    *out = new agmm_report{agmm::icpRegisterWithNormalization(
        fixed->cloud, moving->cloud, initT, max_iters, tol)};
  });
}

int32_t agmm_report_iterations(const agmm_report* report) {
  return report ? report->report.iterations : 0;
}

int32_t agmm_report_termination(const agmm_report* report) {
  if (!report) return AGMM_TERM_MAX_ITERS;
  switch (report->report.termination) {
    case agmm::Termination::EnergyConverged:
      return AGMM_TERM_ENERGY_CONVERGED;
    case agmm::Termination::ParamsConverged:
      return AGMM_TERM_PARAMS_CONVERGED;
    case agmm::Termination::MaxIters:
      return AGMM_TERM_MAX_ITERS;
  }
  return AGMM_TERM_MAX_ITERS;
}

agmm_transform agmm_report_transform(const agmm_report* report) {
  return report ? toC(report->report.transformOriginal)
                : agmm_transform_identity(2);
}

agmm_transform agmm_report_transform_normalized(const agmm_report* report) {
  return report ? toC(report->report.transform) : agmm_transform_identity(2);
}

size_t agmm_report_trace_length(const agmm_report* report) {
  return report ? report->report.energyTrace.size() : 0;
}

agmm_status agmm_report_energy_trace(const agmm_report* report, double* out,
                                     size_t cap) {
  if (auto s = requireArg(report != nullptr, "report")) return s;
  return copyTrace(report->report.energyTrace, out, cap);
}

agmm_status agmm_report_energy_start_trace(const agmm_report* report,
                                           double* out, size_t cap) {
  if (auto s = requireArg(report != nullptr, "report")) return s;
  return copyTrace(report->report.energyStartTrace, out, cap);
}

agmm_status agmm_report_sigma_trace(const agmm_report* report, double* out,
                                    size_t cap) {
  if (auto s = requireArg(report != nullptr, "report")) return s;
  return copyTrace(report->report.sigmaTrace, out, cap);
}

void agmm_report_destroy(agmm_report* report) { delete report; }

void agmm_kinect_model_init(agmm_kinect_model* model) {
  if (!model) return;
  const agmm::KinectModel defaults;
  model->w1 = defaults.w1;
  model->w2 = defaults.w2;
  model->base_scale = defaults.baseScale;
}

agmm_status agmm_kinect_uncertainty(const agmm_kinect_model* model,
                                    double alpha, double depth, double* out) {
  if (auto s = requireArg(model && out, "model/out")) return s;
  return guarded([&] {
    *out = agmm::uncertainty({model->w1, model->w2, model->base_scale}, alpha,
                             depth);
  });
}

agmm_status agmm_kinect_fit_weights(double target_u, double alpha_ref,
                                    double depth_ref, double* w1, double* w2) {
  if (auto s = requireArg(w1 && w2, "w1/w2")) return s;
  return guarded([&] {
    const auto [a, b] = agmm::fitWeights(target_u, alpha_ref, depth_ref);
    *w1 = a;
    *w2 = b;
  });
}

agmm_status agmm_kinect_covariance(const agmm_kinect_model* model, int32_t dim,
                                   double alpha, double depth, double* out) {
  if (auto s = requireArg(model && out, "model/out")) return s;
  return guarded([&] {
    const agmm::Matrix cov = agmm::covarianceFromUncertainty(
        {model->w1, model->w2, model->base_scale}, dim, alpha, depth);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        out[static_cast<size_t>(r * dim + c)] = cov(r, c);
  });
}

void agmm_perturbation_spec_init(agmm_perturbation_spec* spec) {
  if (!spec) return;
  const agmm::PerturbationSpec defaults;
  spec->occlusion_rate = defaults.occlusionRate;
  spec->sample_rate_fixed = defaults.sampleRateFixed;
  spec->sample_rate_moving = defaults.sampleRateMoving;
  spec->noise_std_max = defaults.noiseStdMax;
  spec->outlier_rate = defaults.outlierRate;
  spec->outlier_cov_factor = defaults.outlierCovFactor;
  spec->init_rotation_deg = defaults.initRotationDeg;
  spec->seed = defaults.seed;
}

agmm_status agmm_perturb(const agmm_cloud* model,
                         const agmm_perturbation_spec* spec,
                         agmm_cloud** fixed_out, agmm_cloud** moving_out,
                         agmm_transform* gt_out) {
  if (auto s = requireArg(model && spec && fixed_out && moving_out && gt_out,
                          "model/spec/outputs"))
    return s;
  return guarded([&] {
    agmm::PerturbedPair pair = agmm::perturb(model->cloud, fromC(*spec));
    *fixed_out = new agmm_cloud{std::move(pair.fixed)};
    *moving_out = new agmm_cloud{std::move(pair.moving)};
    *gt_out = toC(pair.gt);
  });
}

agmm_status agmm_sweep_run(const agmm_cloud* const* models, size_t n_models,
                           int32_t variable, const double* grid,
                           size_t grid_len, int32_t trials_per_value,
                           const agmm_perturbation_spec* base,
                           const agmm_register_config* reg_cfg,
                           uint32_t methods_mask, uint64_t seed,
                           agmm_trial_result** out, size_t* out_len) {
  if (auto s = requireArg(models && grid && base && out && out_len,
                          "models/grid/base/outputs"))
    return s;
  if (variable < AGMM_SWEEP_ROTATION || variable > AGMM_SWEEP_OCCLUSION)
    return requireArg(false, "variable");
  return guarded([&] {
    std::vector<agmm::PointCloud> dataset;
    dataset.reserve(n_models);
    for (size_t i = 0; i < n_models; ++i) {
      if (!models[i])
        throw agmm::Error(agmm::ErrorCode::InvalidArgument,
                          "null model handle");
      dataset.push_back(models[i]->cloud);
    }
    std::vector<agmm::Method> methods;
    if (methods_mask & AGMM_METHOD_ADAPTIVE_GMM)
      methods.push_back(agmm::Method::AdaptiveGmm);
    if (methods_mask & AGMM_METHOD_ICP) methods.push_back(agmm::Method::Icp);

    agmm_register_config defaults;
    agmm_register_config_init(&defaults);
    const agmm::RegistrationConfig regCfg = fromC(reg_cfg ? *reg_cfg : defaults);

    const auto results = agmm::runSweep(
        dataset, static_cast<agmm::SweepVariable>(variable),
        std::vector<double>(grid, grid + grid_len), trials_per_value,
        fromC(*base), regCfg, methods, seed);

    auto* buf = new agmm_trial_result[results.size()];
    for (size_t i = 0; i < results.size(); ++i) {
      buf[i].method = results[i].method == agmm::Method::AdaptiveGmm
                          ? AGMM_METHOD_ADAPTIVE_GMM
                          : AGMM_METHOD_ICP;
      buf[i].grid_value = results[i].gridValue;
      buf[i].trial = results[i].trial;
      buf[i].rotation_error = results[i].rotationError;
      buf[i].translation_error = results[i].translationError;
      buf[i].wall_time = results[i].wallTime;
      buf[i].seed = results[i].seed;
    }
    *out = buf;
    *out_len = results.size();
  });
}

void agmm_trial_results_free(agmm_trial_result* results) { delete[] results; }

agmm_status agmm_summarize(const agmm_trial_result* results, size_t n_results,
                           agmm_summary_row** out, size_t* out_len) {
  if (auto s = requireArg(results && out && out_len, "results/outputs"))
    return s;
  return guarded([&] {
    std::vector<agmm::TrialResult> trials(n_results);
    for (size_t i = 0; i < n_results; ++i) {
      trials[i].method = results[i].method == AGMM_METHOD_ADAPTIVE_GMM
                             ? agmm::Method::AdaptiveGmm
                             : agmm::Method::Icp;
      trials[i].gridValue = results[i].grid_value;
      trials[i].trial = results[i].trial;
      trials[i].rotationError = results[i].rotation_error;
      trials[i].translationError = results[i].translation_error;
      trials[i].wallTime = results[i].wall_time;
      trials[i].seed = results[i].seed;
    }
    const auto rows = agmm::summarize(trials);
    auto* buf = new agmm_summary_row[rows.size()];
    for (size_t i = 0; i < rows.size(); ++i) {
      buf[i].method = rows[i].method == agmm::Method::AdaptiveGmm
                          ? AGMM_METHOD_ADAPTIVE_GMM
                          : AGMM_METHOD_ICP;
      buf[i].grid_value = rows[i].gridValue;
      buf[i].mean_rotation_error = rows[i].meanRotationError;
      buf[i].std_rotation_error = rows[i].stdRotationError;
      buf[i].count = rows[i].count;
    }
    *out = buf;
    *out_len = rows.size();
  });
}

void agmm_summary_rows_free(agmm_summary_row* rows) { delete[] rows; }

}  // extern "C"
