#include "addk/pipeline.hpp"

#include "addk/npy.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace addk {

namespace fs = std::filesystem;

void Manifest::add(std::string key, std::string value) {
  entries.emplace_back(std::move(key), std::move(value));
}

std::string Manifest::get(const std::string &key) const {
  for (const auto &[k, v] : entries)
    if (k == key) return v;
  return {};
}

std::string Manifest::text() const {
  std::string out;
  for (const auto &[k, v] : entries) out += k + "=" + v + "\n";
  return out;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

// Runs `fn`, re-raising any library error tagged with `stage`.
template <class Fn> auto staged(const std::string &stage, Fn &&fn) {
  try {
    return fn();
  } catch (const StageError &) {
    throw;
  } catch (const Error &e) {
    throw StageError(stage, e.kind(), e.what());
  } catch (const std::filesystem::filesystem_error &e) {
    throw StageError(stage, ErrorKind::Io, e.what());
  }
}

void validate_expert(const ExpertExport &e, const std::string &role) {
  const bool pair = !e.activations.empty() || !e.weights.empty();
  if (e.uses_cam_file() && pair)
    throw StageError("config", ErrorKind::Parameter,
                     role + " expert: give either a CAM file or an "
                            "activations/weights pair, not both");
  if (!e.uses_cam_file() && (e.activations.empty() || e.weights.empty()))
    throw StageError("config", ErrorKind::Parameter,
                     role + " expert: needs both activations and weights, or "
                            "a CAM file");
  if (e.class_index < 0)
    throw StageError("config", ErrorKind::Parameter,
                     role + " expert: class index must be non-negative");
}

void record_expert(Manifest &m, const std::string &prefix, const ExpertExport &e) {
  if (e.uses_cam_file()) {
    m.add(prefix + ".cam", e.cam.string());
  } else {
    m.add(prefix + ".activations", e.activations.string());
    m.add(prefix + ".weights", e.weights.string());
  }
  m.add(prefix + ".class_index", std::to_string(e.class_index));
  m.add(prefix + ".model_id", e.model_id);
}

std::string resolve_stem(const PipelineConfig &c) {
  if (!c.stem.empty()) return c.stem;
  if (!c.image.empty()) return c.image.stem().string();
  return "addk";
}

std::optional<RgbImage> load_base(const PipelineConfig &c) {
  if (c.image.empty()) return std::nullopt;
  return staged("load image", [&] { return load_image(c.image); });
}

RgbImage render_heatmap(const Tensor &map, std::size_t h, std::size_t w) {
  return colorize(to_heatmap(upsample_bilinear(map, h, w)));
}

void prepare_output_dir(const fs::path &dir) {
  staged("prepare output", [&] {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
      throw Error(ErrorKind::Io, "cannot create output directory " +
                                     dir.string() +
                                     (ec ? ": " + ec.message() : ""));
    return 0;
  });
}

void write_png(Manifest &m, const PipelineConfig &c, const std::string &key,
               const std::string &name, const RgbImage &img) {
  staged("write " + key, [&] {
    save_png(img, c.output_dir / name);
    return 0;
  });
  m.add("output." + key, name);
  m.outputs.push_back(c.output_dir / name);
}

void write_manifest(Manifest &m, const PipelineConfig &c, const std::string &stem) {
  m.path = c.output_dir / (stem + "_manifest.txt");
  staged("write manifest", [&] {
    std::ofstream out(m.path, std::ios::binary | std::ios::trunc);
    const auto text = m.text();
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write failed: " + m.path.string());
    return 0;
  });
}

// Guards the kernel's max-normalization with an operator-facing message.
void require_positive_peak(const Cam &cam, const std::string &role) {
  const double m = max_value(cam.map);
  if (!(m > 0.0))
    throw StageError("normalize " + role + " CAM", ErrorKind::NonPositiveMax,
                     "expert " + cam.model_id +
                         " produced no positive activation for its class "
                         "(CAM maximum = " +
                         format_number(m) + ")");
}

struct ExpertPair {
  Cam interest;
  Cam other;
};

ExpertPair load_pair(const PipelineConfig &c) {
  ExpertPair p{load_expert_cam(c.interest, "interest"),
               load_expert_cam(c.other, "other")};
  if (p.interest.map.shape() != p.other.map.shape())
    throw StageError("kernel", ErrorKind::Dimension,
                     "CAM shapes differ: " + shape_string(p.interest.map.shape()) +
                         " vs " + shape_string(p.other.map.shape()));
  require_positive_peak(p.interest, "interest");
  require_positive_peak(p.other, "other");
  return p;
}

std::string size_string(std::size_t w, std::size_t h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

} // namespace

void validate(const PipelineConfig &c) {
  validate_expert(c.interest, "interest");
  validate_expert(c.other, "other");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha))
    throw StageError("config", ErrorKind::Parameter,
                     "alpha must be positive, got " + format_number(c.alpha));
  if (!(c.opacity >= 0.0 && c.opacity <= 1.0))
    throw StageError("config", ErrorKind::Parameter,
                     "opacity must lie in [0, 1], got " + format_number(c.opacity));
  if (c.display_height == 0 || c.display_width == 0)
    throw StageError("config", ErrorKind::Parameter,
                     "display size must be positive");
  if (c.output_dir.empty())
    throw StageError("config", ErrorKind::Parameter, "no output directory given");
}

Cam load_expert_cam(const ExpertExport &e, const std::string &role) {
  if (e.uses_cam_file()) {
    return staged("load " + role + " CAM", [&] {
      return Cam::from_tensor(load_tensor(e.cam), e.class_index, e.model_id);
    });
  }
  auto features = staged("load " + role + " activations", [&] {
    return FeatureStack(load_tensor(e.activations));
  });
  auto weights = staged("load " + role + " weights", [&] {
    return ClassWeights(load_tensor(e.weights), e.class_index);
  });
  return staged("compute " + role + " CAM",
                [&] { return compute_cam(features, weights, e.model_id); });
}

Manifest run_pipeline(const PipelineConfig &c) {
  validate(c);
  if (c.image.empty())
    throw StageError("config", ErrorKind::Parameter,
                     "run needs a base image to overlay onto");

  const auto base = *load_base(c);
  const auto pair = load_pair(c);
  const auto result =
      staged("kernel", [&] { return directed_kernel(pair.interest, pair.other, c.alpha); });

  const std::size_t h = base.height(), w = base.width();
  const auto stem = resolve_stem(c);
  prepare_output_dir(c.output_dir);

  Manifest m;
  m.add("command", "run");
  record_expert(m, "interest", c.interest);
  record_expert(m, "other", c.other);
  m.add("image", c.image.string());
  m.add("image_size", size_string(w, h));
  m.add("cam_shape", shape_string(pair.interest.map.shape()));
  m.add("alpha", format_number(c.alpha));
  m.add("opacity", format_number(c.opacity));
  m.add("raw_representable", result.raw ? "true" : "false");

  const auto overlay = [&](const Tensor &map) {
    return composite(base, render_heatmap(map, h, w), c.opacity);
  };
  write_png(m, c, "cam1", stem + "_cam1.png",
            staged("render cam1", [&] { return overlay(pair.interest.map); }));
  write_png(m, c, "cam2", stem + "_cam2.png",
            staged("render cam2", [&] { return overlay(pair.other.map); }));
  write_png(m, c, "addk", stem + "_addk.png",
            staged("render addk", [&] { return overlay(result.normalized); }));
  write_png(m, c, "addk_raw", stem + "_addk_raw.png", staged("render addk_raw", [&] {
              return render_heatmap(result.normalized, h, w);
            }));
  write_manifest(m, c, stem);
  return m;
}

Manifest alpha_sweep(const PipelineConfig &c, std::span<const double> alphas) {
  validate(c);
  if (alphas.empty())
    throw StageError("config", ErrorKind::Parameter, "sweep needs at least one alpha");
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a))
      throw StageError("config", ErrorKind::Parameter,
                       "every alpha must be positive, got " + format_number(a));

  const auto base = load_base(c);
  const std::size_t h = base ? base->height() : c.display_height;
  const std::size_t w = base ? base->width() : c.display_width;
  const auto pair = load_pair(c);
  const auto stem = resolve_stem(c);
  prepare_output_dir(c.output_dir);

  Manifest m;
  m.add("command", "sweep");
  record_expert(m, "interest", c.interest);
  record_expert(m, "other", c.other);
  if (base) m.add("image", c.image.string());
  m.add("heatmap_size", size_string(w, h));
  m.add("cam_shape", shape_string(pair.interest.map.shape()));
  m.add("concentration_level", format_number(kSweepConcentrationLevel));

  std::vector<RgbImage> tiles;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto tag = std::to_string(i);
    const auto result =
        staged("kernel", [&] { return directed_kernel(pair.interest, pair.other, alphas[i]); });
    m.add("alpha." + tag, format_number(alphas[i]));
    m.add("concentration." + tag,
          std::to_string(concentration(result, kSweepConcentrationLevel)));
    tiles.push_back(staged("render sweep", [&] {
      return render_heatmap(result.normalized, h, w);
    }));
    write_png(m, c, "heatmap." + tag,
              stem + "_addk_alpha" + format_number(alphas[i]) + ".png", tiles.back());
  }
  write_png(m, c, "grid", stem + "_sweep_grid.png", hconcat(tiles));
  write_manifest(m, c, stem);
  return m;
}

Manifest cam_overlay(const PipelineConfig &c) {
  validate_expert(c.interest, "interest");
  if (!(c.opacity >= 0.0 && c.opacity <= 1.0))
    throw StageError("config", ErrorKind::Parameter,
                     "opacity must lie in [0, 1], got " + format_number(c.opacity));
  if (c.output_dir.empty())
    throw StageError("config", ErrorKind::Parameter, "no output directory given");
  if (c.image.empty())
    throw StageError("config", ErrorKind::Parameter,
                     "cam needs a base image to overlay onto");

  const auto base = *load_base(c);
  const auto cam = load_expert_cam(c.interest, "interest");
  const auto stem = resolve_stem(c);
  prepare_output_dir(c.output_dir);

  Manifest m;
  m.add("command", "cam");
  record_expert(m, "interest", c.interest);
  m.add("image", c.image.string());
  m.add("image_size", size_string(base.width(), base.height()));
  m.add("cam_shape", shape_string(cam.map.shape()));
  m.add("opacity", format_number(c.opacity));
  write_png(m, c, "cam", stem + "_cam.png", staged("render cam", [&] {
              return composite(
                  base, render_heatmap(cam.map, base.height(), base.width()),
                  c.opacity);
            }));
  write_manifest(m, c, stem);
  return m;
}

} // namespace addk
