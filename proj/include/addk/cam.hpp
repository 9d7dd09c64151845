#pragma once

#include "addk/tensor.hpp"

#include <string>

namespace addk {

/// A class activation map: H x W weighted sum of one model's feature maps.
struct Cam {
  Tensor map;
  int class_index = 0;
  std::string model_id;

  /// Wraps an existing [H, W] tensor, e.g. one loaded from a CAM file.
  static Cam from_tensor(Tensor map, int class_index = 0,
                         std::string model_id = {});
};

/// Sum over channels of weights[k] * features[k], accumulated in double.
/// The fully connected bias is not part of the map.
Cam compute_cam(const FeatureStack &features, const ClassWeights &weights,
                std::string model_id = {});

/// Maximum of a map that is about to be max-normalized. Throws
/// NonPositiveMaxError when it is <= 0.
double positive_max(const Tensor &map);

/// Divides every cell by the map maximum. Throws NonPositiveMaxError when the
/// maximum is <= 0.
Cam normalize_by_max(const Cam &cam);

} // namespace addk
