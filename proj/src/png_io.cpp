#include "addk/error.hpp"
#include "addk/imaging.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace addk {

namespace {

// png_image must always be released, including on error paths.
struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage &) = delete;
  PngImage &operator=(const PngImage &) = delete;
};

} // namespace

RgbImage decode_png(const std::vector<std::uint8_t> &bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()))
    throw Error(ErrorKind::Format,
                std::string("cannot decode PNG: ") + png.image.message);

  png.image.format = PNG_FORMAT_RGB;
  const std::size_t w = png.image.width;
  const std::size_t h = png.image.height;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, pixels.data(), 0, nullptr))
    throw Error(ErrorKind::Format,
                std::string("cannot decode PNG: ") + png.image.message);
  return RgbImage(w, h, std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const RgbImage &image) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(image.width());
  png.image.height = static_cast<png_uint_32>(image.height());
  png.image.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  const auto *px = image.pixels().data();
  if (!png_image_write_get_memory_size(png.image, size, 0, px, 0, nullptr))
    throw Error(ErrorKind::Io, std::string("PNG encode failed: ") + png.image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, px, 0, nullptr))
    throw Error(ErrorKind::Io, std::string("PNG encode failed: ") + png.image.message);
  out.resize(size);
  return out;
}

RgbImage load_image(const std::filesystem::path &path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    throw Error(ErrorKind::NotFound, "file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_png(bytes);
  } catch (const Error &e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_png(const RgbImage &image, const std::filesystem::path &path) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

} // namespace addk
