#include "addk/addk.h"

#include "addk/cam.hpp"
#include "addk/imaging.hpp"
#include "addk/kernel.hpp"
#include "addk/npy.hpp"
#include "addk/pipeline.hpp"

#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

struct addk_tensor {
  addk::Tensor value;
};

struct addk_kernel_result {
  std::optional<addk_tensor> raw;
  addk_tensor log_values;
  addk_tensor normalized;
};

struct addk_image {
  addk::RgbImage value;
};

struct addk_manifest {
  addk::Manifest value;
  std::string text;
  std::string path;
};

namespace {

thread_local std::string g_last_error;

addk_status to_status(addk::ErrorKind kind) {
  using addk::ErrorKind;
  switch (kind) {
  case ErrorKind::Format: return ADDK_ERR_FORMAT;
  case ErrorKind::Validation: return ADDK_ERR_VALIDATION;
  case ErrorKind::UnsupportedDtype: return ADDK_ERR_UNSUPPORTED_DTYPE;
  case ErrorKind::Dimension: return ADDK_ERR_DIMENSION;
  case ErrorKind::NonPositiveMax: return ADDK_ERR_NONPOSITIVE_MAX;
  case ErrorKind::Parameter: return ADDK_ERR_PARAMETER;
  case ErrorKind::Io: return ADDK_ERR_IO;
  case ErrorKind::NotFound: return ADDK_ERR_NOT_FOUND;
  }
  return ADDK_ERR_INTERNAL;
}

// Exception firewall: nothing may unwind across the C boundary.
template <class Fn> addk_status guarded(Fn &&fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return ADDK_OK;
  } catch (const addk::Error &e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
  } catch (const std::exception &e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return ADDK_ERR_INTERNAL;
}

void require(bool ok, const char *what) {
  if (!ok) throw addk::Error(addk::ErrorKind::Parameter, what);
}

std::string str(const char *s) { return s ? s : ""; }

addk::ExpertExport to_expert(const addk_expert &e) {
  addk::ExpertExport out;
  out.activations = str(e.activations);
  out.weights = str(e.weights);
  out.cam = str(e.cam);
  out.class_index = e.class_index;
  out.model_id = str(e.model_id);
  return out;
}

addk::PipelineConfig to_config(const addk_pipeline_config *c) {
  require(c != nullptr, "config is NULL");
  addk::PipelineConfig out;
  out.interest = to_expert(c->interest);
  out.other = to_expert(c->other);
  out.image = str(c->image);
  out.alpha = c->alpha;
  out.opacity = c->opacity;
  out.output_dir = str(c->output_dir);
  out.stem = str(c->stem);
  out.display_height = c->display_height;
  out.display_width = c->display_width;
  return out;
}

addk_manifest *wrap(addk::Manifest m) {
  auto *out = new addk_manifest{std::move(m), {}, {}};
  out->text = out->value.text();
  out->path = out->value.path.string();
  return out;
}

} // namespace

extern "C" {

const char *addk_version(void) { return "1.0.0"; }

const char *addk_status_name(addk_status status) {
  switch (status) {
  case ADDK_OK: return "ok";
  case ADDK_ERR_FORMAT: return "format error";
  case ADDK_ERR_VALIDATION: return "validation error";
  case ADDK_ERR_UNSUPPORTED_DTYPE: return "unsupported dtype";
  case ADDK_ERR_DIMENSION: return "dimension error";
  case ADDK_ERR_NONPOSITIVE_MAX: return "non-positive maximum";
  case ADDK_ERR_PARAMETER: return "parameter error";
  case ADDK_ERR_IO: return "I/O error";
  case ADDK_ERR_NOT_FOUND: return "file not found";
  case ADDK_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char *addk_last_error(void) { return g_last_error.c_str(); }

addk_status addk_tensor_create(const size_t *shape, size_t rank,
                               const float *data, addk_tensor **out) {
  return guarded([&] {
    require(shape && data && out, "NULL argument");
    addk::Tensor::Shape s(shape, shape + rank);
    const auto n = addk::shape_volume(s);
    *out = new addk_tensor{addk::Tensor(std::move(s), std::vector<float>(data, data + n))};
  });
}

addk_status addk_tensor_load(const char *path, addk_tensor **out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    *out = new addk_tensor{addk::load_tensor(path)};
  });
}

addk_status addk_tensor_save(const addk_tensor *t, const char *path) {
  return guarded([&] {
    require(t && path, "NULL argument");
    addk::save_tensor(t->value, path);
  });
}

void addk_tensor_free(addk_tensor *t) { delete t; }

size_t addk_tensor_rank(const addk_tensor *t) { return t ? t->value.rank() : 0; }

size_t addk_tensor_extent(const addk_tensor *t, size_t axis) {
  return t && axis < t->value.rank() ? t->value.extent(axis) : 0;
}

size_t addk_tensor_size(const addk_tensor *t) { return t ? t->value.size() : 0; }

const float *addk_tensor_data(const addk_tensor *t) {
  return t ? t->value.data().data() : nullptr;
}

addk_status addk_tensor_max(const addk_tensor *t, float *out) {
  return guarded([&] {
    require(t && out, "NULL argument");
    *out = addk::max_value(t->value);
  });
}

addk_status addk_compute_cam(const addk_tensor *features,
                             const addk_tensor *weights, addk_tensor **out) {
  return guarded([&] {
    require(features && weights && out, "NULL argument");
    auto cam = addk::compute_cam(addk::FeatureStack(features->value),
                                 addk::ClassWeights(weights->value));
    *out = new addk_tensor{std::move(cam.map)};
  });
}

addk_status addk_normalize_by_max(const addk_tensor *cam, addk_tensor **out) {
  return guarded([&] {
    require(cam && out, "NULL argument");
    auto n = addk::normalize_by_max(addk::Cam::from_tensor(cam->value));
    *out = new addk_tensor{std::move(n.map)};
  });
}

addk_status addk_kernel(const addk_tensor *x, const addk_tensor *x_prime,
                        double alpha, addk_kernel_result **out) {
  return guarded([&] {
    require(x && x_prime && out, "NULL argument");
    auto r = addk::directed_kernel(x->value, x_prime->value, alpha);
    auto *res = new addk_kernel_result{std::nullopt, {std::move(r.log_values)},
                                       {std::move(r.normalized)}};
    if (r.raw) res->raw = addk_tensor{std::move(*r.raw)};
    *out = res;
  });
}

void addk_kernel_result_free(addk_kernel_result *r) { delete r; }

const addk_tensor *addk_kernel_raw(const addk_kernel_result *r) {
  return r && r->raw ? &*r->raw : nullptr;
}

const addk_tensor *addk_kernel_log_values(const addk_kernel_result *r) {
  return r ? &r->log_values : nullptr;
}

const addk_tensor *addk_kernel_normalized(const addk_kernel_result *r) {
  return r ? &r->normalized : nullptr;
}

addk_status addk_kernel_concentration(const addk_kernel_result *r, double level,
                                      size_t *count) {
  return guarded([&] {
    require(r && count, "NULL argument");
    // concentration() only reads the normalized map.
    addk::AddkResult view{std::nullopt, r->log_values.value,
                          r->normalized.value, 0.0};
    *count = addk::concentration(view, level);
  });
}

addk_status addk_upsample_bilinear(const addk_tensor *map, size_t height,
                                   size_t width, addk_tensor **out) {
  return guarded([&] {
    require(map && out, "NULL argument");
    *out = new addk_tensor{addk::upsample_bilinear(map->value, height, width)};
  });
}

addk_status addk_to_heatmap(const addk_tensor *map, addk_tensor **out) {
  return guarded([&] {
    require(map && out, "NULL argument");
    *out = new addk_tensor{addk::to_heatmap(map->value).map()};
  });
}

addk_status addk_colorize(const addk_tensor *heatmap, addk_image **out) {
  return guarded([&] {
    require(heatmap && out, "NULL argument");
    *out = new addk_image{addk::colorize(addk::Heatmap(heatmap->value))};
  });
}

addk_status addk_composite(const addk_image *base, const addk_image *heat,
                           double opacity, addk_image **out) {
  return guarded([&] {
    require(base && heat && out, "NULL argument");
    *out = new addk_image{addk::composite(base->value, heat->value, opacity)};
  });
}

addk_status addk_image_create(size_t width, size_t height, const uint8_t *rgb,
                              addk_image **out) {
  return guarded([&] {
    require(rgb && out, "NULL argument");
    *out = new addk_image{addk::RgbImage(
        width, height, std::vector<std::uint8_t>(rgb, rgb + 3 * width * height))};
  });
}

addk_status addk_image_load(const char *path, addk_image **out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    *out = new addk_image{addk::load_image(path)};
  });
}

addk_status addk_image_save_png(const addk_image *img, const char *path) {
  return guarded([&] {
    require(img && path, "NULL argument");
    addk::save_png(img->value, path);
  });
}

void addk_image_free(addk_image *img) { delete img; }

size_t addk_image_width(const addk_image *img) { return img ? img->value.width() : 0; }

size_t addk_image_height(const addk_image *img) {
  return img ? img->value.height() : 0;
}

const uint8_t *addk_image_pixels(const addk_image *img) {
  return img ? img->value.pixels().data() : nullptr;
}

void addk_pipeline_config_init(addk_pipeline_config *config) {
  if (!config) return;
  *config = addk_pipeline_config{};
  config->interest.model_id = "N1";
  config->other.model_id = "N2";
  config->alpha = addk::kDefaultAlpha;
  config->opacity = addk::kDefaultOpacity;
  config->display_height = addk::kDefaultDisplaySize;
  config->display_width = addk::kDefaultDisplaySize;
}

addk_status addk_run_pipeline(const addk_pipeline_config *config,
                              addk_manifest **out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    *out = wrap(addk::run_pipeline(to_config(config)));
  });
}

addk_status addk_alpha_sweep(const addk_pipeline_config *config,
                             const double *alphas, size_t count,
                             addk_manifest **out) {
  return guarded([&] {
    require(out && (alphas || count == 0), "NULL argument");
    *out = wrap(addk::alpha_sweep(to_config(config),
                                  std::span<const double>(alphas, count)));
  });
}

addk_status addk_cam_overlay(const addk_pipeline_config *config,
                             addk_manifest **out) {
  return guarded([&] {
    require(out != nullptr, "NULL argument");
    *out = wrap(addk::cam_overlay(to_config(config)));
  });
}

void addk_manifest_free(addk_manifest *m) { delete m; }

const char *addk_manifest_text(const addk_manifest *m) {
  return m ? m->text.c_str() : nullptr;
}

const char *addk_manifest_path(const addk_manifest *m) {
  return m ? m->path.c_str() : nullptr;
}

const char *addk_manifest_get(const addk_manifest *m, const char *key) {
  if (!m || !key) return nullptr;
  for (const auto &[k, v] : m->value.entries)
    if (k == key) return v.c_str();
  return nullptr;
}

} // extern "C"
