#include "addk/kernel.hpp"

#include "addk/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace addk {

AddkResult directed_kernel(const Tensor &x, const Tensor &x_prime, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    std::ostringstream os;
    os << "alpha must be a finite positive number, got " << alpha;
    throw Error(ErrorKind::Parameter, os.str());
  }
  if (x.shape() != x_prime.shape())
    throw Error(ErrorKind::Dimension,
                "kernel operands differ in shape: " + shape_string(x.shape()) +
                    " vs " + shape_string(x_prime.shape()));

  const double mx = positive_max(x);
  const double mxp = positive_max(x_prime);

  const std::size_t n = x.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i)
    diff[i] = x[i] / mx - x_prime[i] / mxp;
  const double diff_max = *std::max_element(diff.begin(), diff.end());

  std::vector<float> log_values(n), normalized(n), raw(n);
  bool raw_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double exponent = alpha * diff[i];
    log_values[i] = static_cast<float>(exponent);
    // alpha * (d - d_max) rather than alpha*d - alpha*d_max keeps the
    // thresholded cell set monotone in alpha under rounding.
    normalized[i] = static_cast<float>(std::exp(alpha * (diff[i] - diff_max)));

    const double k = std::exp(exponent);
    const float kf = static_cast<float>(k);
    if (!std::isfinite(k) || !std::isfinite(kf) || !(kf > 0.0f))
      raw_ok = false;
    raw[i] = kf;
  }
  if (!std::all_of(log_values.begin(), log_values.end(),
                   [](float v) { return std::isfinite(v); })) {
    std::ostringstream os;
    os << "kernel exponent overflows float32 at alpha=" << alpha;
    throw Error(ErrorKind::Parameter, os.str());
  }

  AddkResult result{std::nullopt, Tensor(x.shape(), std::move(log_values)),
                    Tensor(x.shape(), std::move(normalized)), alpha};
  if (raw_ok) result.raw = Tensor(x.shape(), std::move(raw));
  return result;
}

std::size_t concentration(const AddkResult &result, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    std::ostringstream os;
    os << "concentration level must lie in (0, 1), got " << level;
    throw Error(ErrorKind::Parameter, os.str());
  }
  const auto d = result.normalized.data();
  return static_cast<std::size_t>(
      std::count_if(d.begin(), d.end(), [level](float v) { return v >= level; }));
}

} // namespace addk
