#pragma once

#include "addk/tensor.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace addk {

inline constexpr double kDefaultOpacity = 0.5;
inline constexpr std::size_t kDefaultDisplaySize = 224;

/// [H, W] map with every value in [0, 1].
class Heatmap {
public:
  /// Clamps values into [0, 1]; rejects anything that is not rank 2.
  explicit Heatmap(Tensor map);

  const Tensor &map() const noexcept { return map_; }
  std::size_t height() const noexcept { return map_.extent(0); }
  std::size_t width() const noexcept { return map_.extent(1); }

private:
  Tensor map_;
};

struct Rgb {
  std::uint8_t r, g, b;
  bool operator==(const Rgb &) const = default;
};

/// Row-major 8-bit RGB image.
class RgbImage {
public:
  RgbImage(std::size_t width, std::size_t height);
  RgbImage(std::size_t width, std::size_t height,
           std::vector<std::uint8_t> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  const std::vector<std::uint8_t> &pixels() const noexcept { return pixels_; }

  Rgb pixel(std::size_t x, std::size_t y) const;
  void set_pixel(std::size_t x, std::size_t y, Rgb c);

  bool operator==(const RgbImage &) const = default;

private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
};

/// Bilinear resize with half-pixel centers: output index i samples source
/// coordinate (i + 0.5) * in / out - 0.5, clamped to [0, in - 1].
Tensor upsample_bilinear(const Tensor &map, std::size_t target_h,
                         std::size_t target_w);

/// Min-max normalization to [0, 1]. A constant map becomes all zeros.
Heatmap to_heatmap(const Tensor &map);

/// The fixed 256-entry jet table, index 0 = dark blue, 255 = dark red.
const std::array<Rgb, 256> &jet_table() noexcept;

/// Table index for a value in [0, 1]: round(v * 255).
std::size_t jet_index(float v) noexcept;

RgbImage colorize(const Heatmap &h);

/// round(opacity * heat + (1 - opacity) * base) per channel.
RgbImage composite(const RgbImage &base, const RgbImage &heat, double opacity);

/// Places images left to right; all must share a height.
RgbImage hconcat(const std::vector<RgbImage> &images);

// PNG codec. Grayscale inputs are expanded to RGB by replication, alpha is
// dropped, 16-bit samples are reduced to 8 bits.
RgbImage decode_png(const std::vector<std::uint8_t> &bytes);
std::vector<std::uint8_t> encode_png(const RgbImage &image);
RgbImage load_image(const std::filesystem::path &path);
void save_png(const RgbImage &image, const std::filesystem::path &path);

} // namespace addk
