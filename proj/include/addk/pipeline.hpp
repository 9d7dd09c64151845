#pragma once

#include "addk/cam.hpp"
#include "addk/error.hpp"
#include "addk/imaging.hpp"
#include "addk/kernel.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace addk {

/// One binary expert's contribution: either an activation/weight pair from
/// which the CAM is computed, or a precomputed [H, W] CAM file.
struct ExpertExport {
  std::filesystem::path activations;
  std::filesystem::path weights;
  std::filesystem::path cam;
  int class_index = 0;
  std::string model_id;

  bool uses_cam_file() const noexcept { return !cam.empty(); }
};

struct PipelineConfig {
  ExpertExport interest{{}, {}, {}, 0, "N1"}; // x, the class of interest
  ExpertExport other{{}, {}, {}, 0, "N2"}; // x'
  std::filesystem::path image;
  double alpha = kDefaultAlpha;
  double opacity = kDefaultOpacity;
  std::filesystem::path output_dir;
  /// Output file prefix; defaults to the image stem, or "addk" without one.
  std::string stem;
  /// Render size when no base image is given.
  std::size_t display_height = kDefaultDisplaySize;
  std::size_t display_width = kDefaultDisplaySize;
};

/// Level at which sweep manifests report concentration.
inline constexpr double kSweepConcentrationLevel = 0.5;

/// Ordered key=value record of a run. Output paths are stored relative to
/// the output directory so manifests from identical runs compare equal.
struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;
  std::filesystem::path path;
  std::vector<std::filesystem::path> outputs;

  void add(std::string key, std::string value);
  std::string get(const std::string &key) const;
  std::string text() const;
};

/// An error annotated with the pipeline stage that raised it.
class StageError : public Error {
public:
  StageError(std::string stage, ErrorKind kind, const std::string &what)
      : Error(kind, "[" + stage + "] " + what), stage_(std::move(stage)) {}

  const std::string &stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

void validate(const PipelineConfig &config);

/// Loads or computes one expert's CAM; `role` names it in error stages.
Cam load_expert_cam(const ExpertExport &expert, const std::string &role);

/// Both CAM overlays, the kernel overlay and the bare kernel heatmap, written
/// as <stem>_cam1.png, <stem>_cam2.png, <stem>_addk.png, <stem>_addk_raw.png
/// plus <stem>_manifest.txt.
Manifest run_pipeline(const PipelineConfig &config);

/// One kernel heatmap per alpha plus a left-to-right grid of them.
Manifest alpha_sweep(const PipelineConfig &config, std::span<const double> alphas);

/// Single-expert CAM overlay for the interest expert only.
Manifest cam_overlay(const PipelineConfig &config);

/// Shortest decimal text that round-trips the value.
std::string format_number(double v);

} // namespace addk
