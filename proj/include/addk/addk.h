/*
 * addk.h - C interface to the directed-divergence localization library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an addk_status; on
 * failure addk_last_error() describes what went wrong on the calling thread.
 */
#ifndef ADDK_ADDK_H
#define ADDK_ADDK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ADDK_BUILDING_LIBRARY)
#    define ADDK_API __declspec(dllexport)
#  else
#    define ADDK_API __declspec(dllimport)
#  endif
#else
#  define ADDK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum addk_status {
  ADDK_OK = 0,
  ADDK_ERR_FORMAT = 1,
  ADDK_ERR_VALIDATION = 2,
  ADDK_ERR_UNSUPPORTED_DTYPE = 3,
  ADDK_ERR_DIMENSION = 4,
  ADDK_ERR_NONPOSITIVE_MAX = 5,
  ADDK_ERR_PARAMETER = 6,
  ADDK_ERR_IO = 7,
  ADDK_ERR_NOT_FOUND = 8,
  ADDK_ERR_INTERNAL = 9
} addk_status;

typedef struct addk_tensor addk_tensor;
typedef struct addk_kernel_result addk_kernel_result;
typedef struct addk_image addk_image;
typedef struct addk_manifest addk_manifest;

ADDK_API const char *addk_version(void);
ADDK_API const char *addk_status_name(addk_status status);
/* Message of the last failed call on this thread; "" if none. */
ADDK_API const char *addk_last_error(void);

/* ---- tensors ---------------------------------------------------------- */

ADDK_API addk_status addk_tensor_create(const size_t *shape, size_t rank,
                                        const float *data, addk_tensor **out);
ADDK_API addk_status addk_tensor_load(const char *path, addk_tensor **out);
ADDK_API addk_status addk_tensor_save(const addk_tensor *t, const char *path);
ADDK_API void addk_tensor_free(addk_tensor *t);

ADDK_API size_t addk_tensor_rank(const addk_tensor *t);
ADDK_API size_t addk_tensor_extent(const addk_tensor *t, size_t axis);
ADDK_API size_t addk_tensor_size(const addk_tensor *t);
/* Borrowed pointer, valid until the tensor is freed. */
ADDK_API const float *addk_tensor_data(const addk_tensor *t);
ADDK_API addk_status addk_tensor_max(const addk_tensor *t, float *out);

/* ---- class activation maps -------------------------------------------- */

/* features [C,H,W], weights [C] -> [H,W] */
ADDK_API addk_status addk_compute_cam(const addk_tensor *features,
                                      const addk_tensor *weights,
                                      addk_tensor **out);
ADDK_API addk_status addk_normalize_by_max(const addk_tensor *cam,
                                           addk_tensor **out);

/* ---- kernel ----------------------------------------------------------- */

ADDK_API addk_status addk_kernel(const addk_tensor *x, const addk_tensor *x_prime,
                                 double alpha, addk_kernel_result **out);
ADDK_API void addk_kernel_result_free(addk_kernel_result *r);
/* NULL when K is not representable in float32. Borrowed. */
ADDK_API const addk_tensor *addk_kernel_raw(const addk_kernel_result *r);
ADDK_API const addk_tensor *addk_kernel_log_values(const addk_kernel_result *r);
ADDK_API const addk_tensor *addk_kernel_normalized(const addk_kernel_result *r);
ADDK_API addk_status addk_kernel_concentration(const addk_kernel_result *r,
                                               double level, size_t *count);

/* ---- imaging ---------------------------------------------------------- */

ADDK_API addk_status addk_upsample_bilinear(const addk_tensor *map,
                                            size_t height, size_t width,
                                            addk_tensor **out);
ADDK_API addk_status addk_to_heatmap(const addk_tensor *map, addk_tensor **out);
ADDK_API addk_status addk_colorize(const addk_tensor *heatmap, addk_image **out);
ADDK_API addk_status addk_composite(const addk_image *base, const addk_image *heat,
                                    double opacity, addk_image **out);

ADDK_API addk_status addk_image_create(size_t width, size_t height,
                                       const uint8_t *rgb, addk_image **out);
ADDK_API addk_status addk_image_load(const char *path, addk_image **out);
ADDK_API addk_status addk_image_save_png(const addk_image *img, const char *path);
ADDK_API void addk_image_free(addk_image *img);
ADDK_API size_t addk_image_width(const addk_image *img);
ADDK_API size_t addk_image_height(const addk_image *img);
/* Row-major RGB triples, 3 * width * height bytes. Borrowed. */
ADDK_API const uint8_t *addk_image_pixels(const addk_image *img);

/* ---- pipeline --------------------------------------------------------- */

/* Give either `cam` or both `activations` and `weights`; unused paths NULL. */
typedef struct addk_expert {
  const char *activations;
  const char *weights;
  const char *cam;
  int class_index;
  const char *model_id;
} addk_expert;

typedef struct addk_pipeline_config {
  addk_expert interest; /* x: class of interest */
  addk_expert other;    /* x': competing class */
  const char *image;
  double alpha;
  double opacity;
  const char *output_dir;
  const char *stem; /* NULL: image stem */
  size_t display_height;
  size_t display_width;
} addk_pipeline_config;

/* alpha 5, opacity 0.5, 224x224, model ids "N1"/"N2", everything else NULL/0. */
ADDK_API void addk_pipeline_config_init(addk_pipeline_config *config);

ADDK_API addk_status addk_run_pipeline(const addk_pipeline_config *config,
                                       addk_manifest **out);
ADDK_API addk_status addk_alpha_sweep(const addk_pipeline_config *config,
                                      const double *alphas, size_t count,
                                      addk_manifest **out);
ADDK_API addk_status addk_cam_overlay(const addk_pipeline_config *config,
                                      addk_manifest **out);

ADDK_API void addk_manifest_free(addk_manifest *m);
/* key=value lines, one per entry. Borrowed. */
ADDK_API const char *addk_manifest_text(const addk_manifest *m);
ADDK_API const char *addk_manifest_path(const addk_manifest *m);
/* Value for key, or NULL. Borrowed. */
ADDK_API const char *addk_manifest_get(const addk_manifest *m, const char *key);

#ifdef __cplusplus
}
#endif

#endif /* ADDK_ADDK_H */
