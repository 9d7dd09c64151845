#include "addk/imaging.hpp"

#include "addk/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace addk {

namespace {

// MATLAB-style jet sampled at i/255: each channel is
// clamp(1.5 - |4x - c|, 0, 1) with c = 3 (red), 2 (green), 1 (blue), scaled to
// 0..255 and rounded half up.
constexpr std::array<Rgb, 256> kJet = {{
    {  0,   0, 128}, {  0,   0, 132}, {  0,   0, 136}, {  0,   0, 140},
    {  0,   0, 144}, {  0,   0, 148}, {  0,   0, 152}, {  0,   0, 156},
    {  0,   0, 160}, {  0,   0, 164}, {  0,   0, 168}, {  0,   0, 172},
    {  0,   0, 176}, {  0,   0, 180}, {  0,   0, 184}, {  0,   0, 188},
    {  0,   0, 192}, {  0,   0, 196}, {  0,   0, 200}, {  0,   0, 204},
    {  0,   0, 208}, {  0,   0, 212}, {  0,   0, 216}, {  0,   0, 220},
    {  0,   0, 224}, {  0,   0, 228}, {  0,   0, 232}, {  0,   0, 236},
    {  0,   0, 240}, {  0,   0, 244}, {  0,   0, 248}, {  0,   0, 252},
    {  0,   1, 255}, {  0,   5, 255}, {  0,   9, 255}, {  0,  13, 255},
    {  0,  17, 255}, {  0,  21, 255}, {  0,  25, 255}, {  0,  29, 255},
    {  0,  33, 255}, {  0,  37, 255}, {  0,  41, 255}, {  0,  45, 255},
    {  0,  49, 255}, {  0,  53, 255}, {  0,  57, 255}, {  0,  61, 255},
    {  0,  65, 255}, {  0,  69, 255}, {  0,  73, 255}, {  0,  77, 255},
    {  0,  81, 255}, {  0,  85, 255}, {  0,  89, 255}, {  0,  93, 255},
    {  0,  97, 255}, {  0, 101, 255}, {  0, 105, 255}, {  0, 109, 255},
    {  0, 113, 255}, {  0, 117, 255}, {  0, 121, 255}, {  0, 125, 255},
    {  0, 129, 255}, {  0, 133, 255}, {  0, 137, 255}, {  0, 141, 255},
    {  0, 145, 255}, {  0, 149, 255}, {  0, 153, 255}, {  0, 157, 255},
    {  0, 161, 255}, {  0, 165, 255}, {  0, 169, 255}, {  0, 173, 255},
    {  0, 177, 255}, {  0, 181, 255}, {  0, 185, 255}, {  0, 189, 255},
    {  0, 193, 255}, {  0, 197, 255}, {  0, 201, 255}, {  0, 205, 255},
    {  0, 209, 255}, {  0, 213, 255}, {  0, 217, 255}, {  0, 221, 255},
    {  0, 225, 255}, {  0, 229, 255}, {  0, 233, 255}, {  0, 237, 255},
    {  0, 241, 255}, {  0, 245, 255}, {  0, 249, 255}, {  0, 253, 255},
    {  2, 255, 254}, {  6, 255, 250}, { 10, 255, 246}, { 14, 255, 242},
    { 18, 255, 238}, { 22, 255, 234}, { 26, 255, 230}, { 30, 255, 226},
    { 34, 255, 222}, { 38, 255, 218}, { 42, 255, 214}, { 46, 255, 210},
    { 50, 255, 206}, { 54, 255, 202}, { 58, 255, 198}, { 62, 255, 194},
    { 66, 255, 190}, { 70, 255, 186}, { 74, 255, 182}, { 78, 255, 178},
    { 82, 255, 174}, { 86, 255, 170}, { 90, 255, 166}, { 94, 255, 162},
    { 98, 255, 158}, {102, 255, 154}, {106, 255, 150}, {110, 255, 146},
    {114, 255, 142}, {118, 255, 138}, {122, 255, 134}, {126, 255, 130},
    {130, 255, 126}, {134, 255, 122}, {138, 255, 118}, {142, 255, 114},
    {146, 255, 110}, {150, 255, 106}, {154, 255, 102}, {158, 255,  98},
    {162, 255,  94}, {166, 255,  90}, {170, 255,  86}, {174, 255,  82},
    {178, 255,  78}, {182, 255,  74}, {186, 255,  70}, {190, 255,  66},
    {194, 255,  62}, {198, 255,  58}, {202, 255,  54}, {206, 255,  50},
    {210, 255,  46}, {214, 255,  42}, {218, 255,  38}, {222, 255,  34},
    {226, 255,  30}, {230, 255,  26}, {234, 255,  22}, {238, 255,  18},
    {242, 255,  14}, {246, 255,  10}, {250, 255,   6}, {254, 255,   2},
    {255, 253,   0}, {255, 249,   0}, {255, 245,   0}, {255, 241,   0},
    {255, 237,   0}, {255, 233,   0}, {255, 229,   0}, {255, 225,   0},
    {255, 221,   0}, {255, 217,   0}, {255, 213,   0}, {255, 209,   0},
    {255, 205,   0}, {255, 201,   0}, {255, 197,   0}, {255, 193,   0},
    {255, 189,   0}, {255, 185,   0}, {255, 181,   0}, {255, 177,   0},
    {255, 173,   0}, {255, 169,   0}, {255, 165,   0}, {255, 161,   0},
    {255, 157,   0}, {255, 153,   0}, {255, 149,   0}, {255, 145,   0},
    {255, 141,   0}, {255, 137,   0}, {255, 133,   0}, {255, 129,   0},
    {255, 125,   0}, {255, 121,   0}, {255, 117,   0}, {255, 113,   0},
    {255, 109,   0}, {255, 105,   0}, {255, 101,   0}, {255,  97,   0},
    {255,  93,   0}, {255,  89,   0}, {255,  85,   0}, {255,  81,   0},
    {255,  77,   0}, {255,  73,   0}, {255,  69,   0}, {255,  65,   0},
    {255,  61,   0}, {255,  57,   0}, {255,  53,   0}, {255,  49,   0},
    {255,  45,   0}, {255,  41,   0}, {255,  37,   0}, {255,  33,   0},
    {255,  29,   0}, {255,  25,   0}, {255,  21,   0}, {255,  17,   0},
    {255,  13,   0}, {255,   9,   0}, {255,   5,   0}, {255,   1,   0},
    {252,   0,   0}, {248,   0,   0}, {244,   0,   0}, {240,   0,   0},
    {236,   0,   0}, {232,   0,   0}, {228,   0,   0}, {224,   0,   0},
    {220,   0,   0}, {216,   0,   0}, {212,   0,   0}, {208,   0,   0},
    {204,   0,   0}, {200,   0,   0}, {196,   0,   0}, {192,   0,   0},
    {188,   0,   0}, {184,   0,   0}, {180,   0,   0}, {176,   0,   0},
    {172,   0,   0}, {168,   0,   0}, {164,   0,   0}, {160,   0,   0},
    {156,   0,   0}, {152,   0,   0}, {148,   0,   0}, {144,   0,   0},
    {140,   0,   0}, {136,   0,   0}, {132,   0,   0}, {128,   0,   0},
}};

struct Tap {
  std::size_t lo, hi;
  double frac;
};

std::vector<Tap> taps(std::size_t in, std::size_t out) {
  std::vector<Tap> t(out);
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const double last = static_cast<double>(in - 1);
  for (std::size_t i = 0; i < out; ++i) {
    const double src =
        std::clamp((static_cast<double>(i) + 0.5) * scale - 0.5, 0.0, last);
    const auto lo = static_cast<std::size_t>(std::floor(src));
    t[i] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
  }
  return t;
}

std::string dims(std::size_t w, std::size_t h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

} // namespace

Heatmap::Heatmap(Tensor map) : map_(std::move(map)) {
  if (map_.rank() != 2)
    throw Error(ErrorKind::Dimension,
                "heatmap must be [H, W], got " + shape_string(map_.shape()));
  for (float &v : map_.data()) v = std::clamp(v, 0.0f, 1.0f);
}

RgbImage::RgbImage(std::size_t width, std::size_t height)
    : RgbImage(width, height, std::vector<std::uint8_t>(3 * width * height)) {}

RgbImage::RgbImage(std::size_t width, std::size_t height,
                   std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width == 0 || height == 0)
    throw Error(ErrorKind::Validation,
                "image extents must be positive, got " + dims(width, height));
  if (pixels_.size() != 3 * width * height)
    throw Error(ErrorKind::Validation,
                "pixel buffer of " + std::to_string(pixels_.size()) +
                    " bytes does not match " + dims(width, height) + " RGB");
}

Rgb RgbImage::pixel(std::size_t x, std::size_t y) const {
  const auto *p = &pixels_[3 * (y * width_ + x)];
  return {p[0], p[1], p[2]};
}

void RgbImage::set_pixel(std::size_t x, std::size_t y, Rgb c) {
  auto *p = &pixels_[3 * (y * width_ + x)];
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
}

Tensor upsample_bilinear(const Tensor &map, std::size_t target_h,
                         std::size_t target_w) {
  if (map.rank() != 2)
    throw Error(ErrorKind::Dimension,
                "bilinear input must be [H, W], got " + shape_string(map.shape()));
  if (target_h == 0 || target_w == 0)
    throw Error(ErrorKind::Parameter, "target extents must be positive");

  const std::size_t w = map.extent(1);
  const auto rows = taps(map.extent(0), target_h);
  const auto cols = taps(w, target_w);
  const auto src = map.data();

  std::vector<float> out(target_h * target_w);
  for (std::size_t i = 0; i < target_h; ++i) {
    const float *r0 = src.data() + rows[i].lo * w;
    const float *r1 = src.data() + rows[i].hi * w;
    for (std::size_t j = 0; j < target_w; ++j) {
      const auto &c = cols[j];
      const double top = std::lerp(double{r0[c.lo]}, double{r0[c.hi]}, c.frac);
      const double bot = std::lerp(double{r1[c.lo]}, double{r1[c.hi]}, c.frac);
      out[i * target_w + j] = static_cast<float>(std::lerp(top, bot, rows[i].frac));
    }
  }
  return Tensor({target_h, target_w}, std::move(out));
}

Heatmap to_heatmap(const Tensor &map) {
  const double lo = min_value(map);
  const double hi = max_value(map);
  Tensor out(map.shape());
  if (hi > lo) {
    const double range = hi - lo;
    for (std::size_t i = 0; i < map.size(); ++i)
      out[i] = static_cast<float>((map[i] - lo) / range);
  }
  return Heatmap(std::move(out));
}

const std::array<Rgb, 256> &jet_table() noexcept { return kJet; }

std::size_t jet_index(float v) noexcept {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::size_t>(std::lround(static_cast<double>(c) * 255.0));
}

RgbImage colorize(const Heatmap &h) {
  RgbImage img(h.width(), h.height());
  for (std::size_t y = 0; y < h.height(); ++y)
    for (std::size_t x = 0; x < h.width(); ++x)
      img.set_pixel(x, y, kJet[jet_index(h.map().at(y, x))]);
  return img;
}

RgbImage composite(const RgbImage &base, const RgbImage &heat, double opacity) {
  if (base.width() != heat.width() || base.height() != heat.height())
    throw Error(ErrorKind::Dimension,
                "cannot blend " + dims(heat.width(), heat.height()) +
                    " heatmap over " + dims(base.width(), base.height()) +
                    " image");
  if (!(opacity >= 0.0 && opacity <= 1.0)) {
    std::ostringstream os;
    os << "opacity must lie in [0, 1], got " << opacity;
    throw Error(ErrorKind::Parameter, os.str());
  }
  const auto &b = base.pixels();
  const auto &h = heat.pixels();
  std::vector<std::uint8_t> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    out[i] = static_cast<std::uint8_t>(
        std::lround(opacity * h[i] + (1.0 - opacity) * b[i]));
  return RgbImage(base.width(), base.height(), std::move(out));
}

RgbImage hconcat(const std::vector<RgbImage> &images) {
  if (images.empty())
    throw Error(ErrorKind::Parameter, "nothing to concatenate");
  const std::size_t h = images.front().height();
  std::size_t w = 0;
  for (const auto &img : images) {
    if (img.height() != h)
      throw Error(ErrorKind::Dimension, "hconcat: heights differ");
    w += img.width();
  }
  RgbImage out(w, h);
  std::size_t x0 = 0;
  for (const auto &img : images) {
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < img.width(); ++x)
        out.set_pixel(x0 + x, y, img.pixel(x, y));
    x0 += img.width();
  }
  return out;
}

} // namespace addk
