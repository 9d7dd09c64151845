#include "addk/cam.hpp"

#include "addk/error.hpp"

#include <vector>

namespace addk {

Cam Cam::from_tensor(Tensor map, int class_index, std::string model_id) {
  if (map.rank() != 2)
    throw Error(ErrorKind::Dimension,
                "CAM must be [H, W], got " + shape_string(map.shape()));
  return Cam{std::move(map), class_index, std::move(model_id)};
}

Cam compute_cam(const FeatureStack &features, const ClassWeights &weights,
                std::string model_id) {
  if (weights.channels() != features.channels())
    throw Error(ErrorKind::Dimension,
                "weights have " + std::to_string(weights.channels()) +
                    " channels but features have " +
                    std::to_string(features.channels()));

  const std::size_t plane = features.height() * features.width();
  const auto f = features.tensor().data();
  const auto w = weights.tensor().data();

  std::vector<double> acc(plane, 0.0);
  for (std::size_t k = 0; k < features.channels(); ++k) {
    const double wk = w[k];
    const float *fk = f.data() + k * plane;
    for (std::size_t p = 0; p < plane; ++p) acc[p] += wk * fk[p];
  }

  std::vector<float> out(plane);
  for (std::size_t p = 0; p < plane; ++p) out[p] = static_cast<float>(acc[p]);
  return Cam{Tensor({features.height(), features.width()}, std::move(out)),
             weights.class_index(), std::move(model_id)};
}

double positive_max(const Tensor &map) {
  const double m = max_value(map);
  if (!(m > 0.0)) throw NonPositiveMaxError(m);
  return m;
}

Cam normalize_by_max(const Cam &cam) {
  const double m = positive_max(cam.map);

  Cam out = cam;
  for (float &v : out.map.data()) v = static_cast<float>(v / m);
  return out;
}

} // namespace addk
