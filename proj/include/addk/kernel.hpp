#pragma once

#include "addk/cam.hpp"
#include "addk/tensor.hpp"

#include <cstddef>
#include <optional>

namespace addk {

/// Default amplification for natural imagery.
inline constexpr double kDefaultAlpha = 5.0;

/// Output of the amplified directed divergence kernel
///
///   K(x, x') = exp(alpha * (x / max(x) - x' / max(x')))
///
/// `log_values` holds the exponent alpha * (x/max(x) - x'/max(x')).
/// `normalized` is exp(log - max(log)), i.e. K / max(K), and is always
/// available. `raw` is K itself and is only present when every cell is a
/// finite, positive float32; large alpha or negative map values can push it
/// out of range.
struct AddkResult {
  std::optional<Tensor> raw;
  Tensor log_values;
  Tensor normalized;
  double alpha;
};

/// Directed: x is the class-of-interest map, x_prime the competing one.
/// Both maps must share a shape and have a positive maximum; alpha > 0.
AddkResult directed_kernel(const Tensor &x, const Tensor &x_prime, double alpha);

inline AddkResult directed_kernel(const Cam &x, const Cam &x_prime, double alpha) {
  return directed_kernel(x.map, x_prime.map, alpha);
}

/// Number of cells whose normalized value is >= level, level in (0, 1).
std::size_t concentration(const AddkResult &result, double level);

} // namespace addk
