#ifndef AGMM_H
#define AGMM_H

/* C API for the agmm rigid point-cloud registration library.
 *
 * All heap-owning objects are opaque handles created and destroyed through
 * this interface. Functions return agmm_status; on failure a thread-local
 * message with details is available via agmm_last_error(). Arrays are
 * row-major double buffers owned by the caller unless stated otherwise.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AGMM_BUILD_SHARED)
#    define AGMM_API __declspec(dllexport)
#  else
#    define AGMM_API __declspec(dllimport)
#  endif
#else
#  define AGMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum agmm_status {
  AGMM_OK = 0,
  AGMM_ERROR_INVALID_ARGUMENT = 1, /* bad flag/parameter value        */
  AGMM_ERROR_DIMENSION_MISMATCH = 2,
  AGMM_ERROR_INVALID_DATA = 3,     /* malformed file, non-SPD covariance */
  AGMM_ERROR_IO = 4,
  AGMM_ERROR_NUMERICAL = 5,        /* degenerate geometry, NaN         */
  AGMM_ERROR_INTERNAL = 6
} agmm_status;

typedef enum agmm_termination {
  AGMM_TERM_ENERGY_CONVERGED = 0,
  AGMM_TERM_PARAMS_CONVERGED = 1,
  AGMM_TERM_MAX_ITERS = 2
} agmm_termination;

typedef enum agmm_method {
  AGMM_METHOD_ADAPTIVE_GMM = 1,
  AGMM_METHOD_ICP = 2
} agmm_method;

typedef enum agmm_sweep_variable {
  AGMM_SWEEP_ROTATION = 0,
  AGMM_SWEEP_NOISE = 1,
  AGMM_SWEEP_OUTLIERS = 2,
  AGMM_SWEEP_OCCLUSION = 3
} agmm_sweep_variable;

/* Opaque handles. */
typedef struct agmm_cloud agmm_cloud;
typedef struct agmm_report agmm_report;

/* Rigid motion. rotation holds the angle in radians for dim 2 (slot 0)
 * or an axis-angle vector for dim 3. Unused slots are zero. */
typedef struct agmm_transform {
  int32_t dim;
  double rotation[3];
  double translation[3];
} agmm_transform;

typedef struct agmm_register_config {
  int32_t max_iters;       /* outer EM iterations, default 100          */
  int32_t inner_max_iters; /* M-step optimizer iterations, default 50   */
  double energy_rel_tol;   /* default 1e-6                              */
  double param_abs_tol;    /* default 1e-8                              */
  double sigma_floor;      /* lower clamp on the annealing sigma, >= 0  */
  double cutoff;           /* pair screening radius in std devs; INFINITY
                              disables screening; default 6             */
} agmm_register_config;

typedef struct agmm_perturbation_spec {
  double occlusion_rate;      /* [0,1] contiguous region removed per cloud */
  double sample_rate_fixed;   /* (0,1] */
  double sample_rate_moving;  /* (0,1] */
  double noise_std_max;       /* per-axis noise std upper bound, x radius  */
  double outlier_rate;        /* >= 0, fraction of cloud size added        */
  double outlier_cov_factor;  /* outlier covariance = factor*radius^2*I    */
  double init_rotation_deg;   /* ground-truth rotation magnitude           */
  uint64_t seed;
} agmm_perturbation_spec;

typedef struct agmm_kinect_model {
  double w1;         /* default 1.6658          */
  double w2;         /* default 0.2776, 1/meter */
  double base_scale; /* default 1e-4            */
} agmm_kinect_model;

typedef struct agmm_trial_result {
  int32_t method;     /* agmm_method */
  double grid_value;  /* value of the controlled variable */
  int32_t trial;
  double rotation_error;
  double translation_error; /* normalized units */
  double wall_time;         /* seconds */
  uint64_t seed;            /* per-trial derived seed */
} agmm_trial_result;

typedef struct agmm_summary_row {
  int32_t method;
  double grid_value;
  double mean_rotation_error;
  double std_rotation_error; /* population std */
  int32_t count;
} agmm_summary_row;

AGMM_API const char* agmm_version(void);

/* Message describing the most recent failure on this thread. */
AGMM_API const char* agmm_last_error(void);

/* ---- clouds ------------------------------------------------------------ */

/* points: count*dim doubles. covariances: count*dim*dim doubles (row-major
 * per point) or NULL, in which case every point gets default_variance * I. */
AGMM_API agmm_status agmm_cloud_create(int32_t dim, size_t count,
                                       const double* points,
                                       const double* covariances,
                                       double default_variance,
                                       agmm_cloud** out);

/* CSV with header x,y[,z][,c11,...]; '#' starts a comment line. */
AGMM_API agmm_status agmm_cloud_load_csv(const char* path,
                                         double default_variance,
                                         agmm_cloud** out);
AGMM_API agmm_status agmm_cloud_save_csv(const agmm_cloud* cloud,
                                         const char* path);

AGMM_API int32_t agmm_cloud_dim(const agmm_cloud* cloud);
AGMM_API size_t agmm_cloud_size(const agmm_cloud* cloud);
AGMM_API agmm_status agmm_cloud_get_points(const agmm_cloud* cloud,
                                           double* out /* count*dim */);
AGMM_API agmm_status agmm_cloud_get_covariances(const agmm_cloud* cloud,
                                                double* out /* count*dim*dim */);
AGMM_API void agmm_cloud_destroy(agmm_cloud* cloud);

/* Built-in benchmark shapes: "ellipse", "boxbump" (2D contours) and
 * "blob" (3D surface). */
AGMM_API agmm_status agmm_make_model(const char* name, int32_t points,
                                     uint64_t seed, double default_variance,
                                     agmm_cloud** out);

/* ---- transforms -------------------------------------------------------- */

AGMM_API agmm_transform agmm_transform_identity(int32_t dim);
AGMM_API agmm_status agmm_transform_rotation_matrix(const agmm_transform* t,
                                                    double* out /* dim*dim */);
AGMM_API agmm_status agmm_transform_compose(const agmm_transform* a,
                                            const agmm_transform* b,
                                            agmm_transform* out);
AGMM_API agmm_status agmm_transform_invert(const agmm_transform* t,
                                           agmm_transform* out);
AGMM_API agmm_status agmm_transform_apply(const agmm_transform* t,
                                          const agmm_cloud* cloud,
                                          agmm_cloud** out);

/* ||I - R_gt * R_est^T||_F. Both matrices must be orthonormal with
 * determinant 1 (residual <= 1e-6), otherwise AGMM_ERROR_NUMERICAL. */
AGMM_API agmm_status agmm_rotation_error(int32_t dim, const double* r_gt,
                                         const double* r_est, double* out);

/* Mean over moving points of the distance to the nearest fixed point. */
AGMM_API agmm_status agmm_mean_min_distance(const agmm_cloud* moving,
                                            const agmm_cloud* fixed,
                                            double* out);

/* ---- registration ------------------------------------------------------ */

AGMM_API void agmm_register_config_init(agmm_register_config* cfg);

/* Full pipeline: normalize the pair, run the adaptive-GMM EM loop from
 * `init` (identity when NULL; interpreted in the normalized frame) and map
 * the result back to input coordinates. */
AGMM_API agmm_status agmm_register(const agmm_cloud* fixed,
                                   const agmm_cloud* moving,
                                   const agmm_transform* init,
                                   const agmm_register_config* cfg,
                                   agmm_report** out);

/* Point-to-point ICP baseline through the same normalization pipeline. */
AGMM_API agmm_status agmm_icp_register(const agmm_cloud* fixed,
                                       const agmm_cloud* moving,
                                       const agmm_transform* init,
                                       int32_t max_iters, double tol,
                                       agmm_report** out);

AGMM_API int32_t agmm_report_iterations(const agmm_report* report);
AGMM_API int32_t agmm_report_termination(const agmm_report* report);
/* Estimated motion in the original input coordinates. */
AGMM_API agmm_transform agmm_report_transform(const agmm_report* report);
/* Estimated motion in the normalized frame. */
AGMM_API agmm_transform agmm_report_transform_normalized(const agmm_report* report);
AGMM_API size_t agmm_report_trace_length(const agmm_report* report);
/* Each trace has trace_length entries; cap is the capacity of out. */
AGMM_API agmm_status agmm_report_energy_trace(const agmm_report* report,
                                              double* out, size_t cap);
AGMM_API agmm_status agmm_report_energy_start_trace(const agmm_report* report,
                                                    double* out, size_t cap);
AGMM_API agmm_status agmm_report_sigma_trace(const agmm_report* report,
                                             double* out, size_t cap);
AGMM_API void agmm_report_destroy(agmm_report* report);

/* ---- sensor error models ----------------------------------------------- */

AGMM_API void agmm_kinect_model_init(agmm_kinect_model* model);
AGMM_API agmm_status agmm_kinect_uncertainty(const agmm_kinect_model* model,
                                             double alpha, double depth,
                                             double* out);
AGMM_API agmm_status agmm_kinect_fit_weights(double target_u, double alpha_ref,
                                             double depth_ref, double* w1,
                                             double* w2);
AGMM_API agmm_status agmm_kinect_covariance(const agmm_kinect_model* model,
                                            int32_t dim, double alpha,
                                            double depth,
                                            double* out /* dim*dim */);

/* ---- synthetic benchmark ----------------------------------------------- */

AGMM_API void agmm_perturbation_spec_init(agmm_perturbation_spec* spec);

/* Applies occlusion, subsampling, noise, outliers and a ground-truth rigid
 * motion to `model`. The returned gt maps the clean moving cloud onto the
 * emitted one; registration is expected to recover its inverse. */
AGMM_API agmm_status agmm_perturb(const agmm_cloud* model,
                                  const agmm_perturbation_spec* spec,
                                  agmm_cloud** fixed_out,
                                  agmm_cloud** moving_out,
                                  agmm_transform* gt_out);

/* One trial per (grid value, trial index, method), reproducible from
 * `seed`. `methods_mask` is an OR of agmm_method values. Results are
 * heap-allocated; release with agmm_trial_results_free. */
AGMM_API agmm_status agmm_sweep_run(const agmm_cloud* const* models,
                                    size_t n_models, int32_t variable,
                                    const double* grid, size_t grid_len,
                                    int32_t trials_per_value,
                                    const agmm_perturbation_spec* base,
                                    const agmm_register_config* reg_cfg,
                                    uint32_t methods_mask, uint64_t seed,
                                    agmm_trial_result** out, size_t* out_len);
AGMM_API void agmm_trial_results_free(agmm_trial_result* results);

/* Mean/std of rotation_error grouped by (grid value, method), ordered by
 * grid value then method name. */
AGMM_API agmm_status agmm_summarize(const agmm_trial_result* results,
                                    size_t n_results, agmm_summary_row** out,
                                    size_t* out_len);
AGMM_API void agmm_summary_rows_free(agmm_summary_row* rows);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* AGMM_H */
