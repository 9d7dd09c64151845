#include "addk/npy.hpp"

#include "addk/error.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

namespace addk::npy {

namespace {

constexpr std::uint8_t kMagic[] = {0x93, 'N', 'U', 'M', 'P', 'Y'};

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) |
           (v >> 24);
  return v;
}

struct Header {
  std::optional<std::string> descr;
  std::optional<bool> fortran_order;
  std::optional<Tensor::Shape> shape;
};

// Recursive-descent reader for the small Python literal subset NumPy emits.
class HeaderParser {
public:
  HeaderParser(std::string_view text, std::size_t base)
      : text_(text), base_(base) {}

  Header parse() {
    Header h;
    skip_ws();
    expect('{');
    for (;;) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      const auto key_at = pos_;
      auto key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        h.descr = parse_string();
      } else if (key == "fortran_order") {
        h.fortran_order = parse_bool();
      } else if (key == "shape") {
        h.shape = parse_shape();
      } else {
        fail("unexpected header key '" + key + "'", key_at);
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      expect('}');
      break;
    }
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after header dict");
    if (!h.descr || !h.fortran_order || !h.shape)
      fail("header dict is missing 'descr', 'fortran_order' or 'shape'", 0);
    return h;
  }

private:
  [[noreturn]] void fail(const std::string &what) const { fail(what, pos_); }
  [[noreturn]] void fail(const std::string &what, std::size_t at) const {
    throw FormatError("npy header: " + what, base_ + at);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') fail("expected string literal");
    ++pos_;
    const auto end = text_.find(quote, pos_);
    if (end == std::string_view::npos) fail("unterminated string literal");
    std::string out(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    fail("expected True or False");
  }

  Tensor::Shape parse_shape() {
    expect('(');
    Tensor::Shape shape;
    for (;;) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return shape;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        fail("expected non-negative integer extent");
      std::size_t v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        const std::size_t digit = static_cast<std::size_t>(peek() - '0');
        if (v > (SIZE_MAX - digit) / 10) fail("extent overflows");
        v = v * 10 + digit;
        ++pos_;
      }
      shape.push_back(v);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_ws();
      expect(')');
      return shape;
    }
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

} // namespace

std::string header_for(const Tensor::Shape &shape) {
  std::string dims;
  for (auto e : shape) dims += std::to_string(e) + ", ";
  if (shape.size() == 1) {
    dims.pop_back(); // "(3,)"
  } else if (!shape.empty()) {
    dims.resize(dims.size() - 2);
  }
  std::string h =
      "{'descr': '<f4', 'fortran_order': False, 'shape': (" + dims + "), }";
  const std::size_t unpadded = kPreambleSize + h.size() + 1;
  const std::size_t padded = (unpadded + kAlignment - 1) / kAlignment * kAlignment;
  h.append(padded - unpadded, ' ');
  h.push_back('\n');
  return h;
}

std::vector<std::uint8_t> encode(const Tensor &t) {
  const auto header = header_for(t.shape());
  if (header.size() > 0xffff)
    throw Error(ErrorKind::Validation, "npy header too long for v1.0");

  std::vector<std::uint8_t> out(kPreambleSize + header.size() + 4 * t.size());
  std::copy(std::begin(kMagic), std::end(kMagic), out.begin());
  out[6] = 1;
  out[7] = 0;
  out[8] = static_cast<std::uint8_t>(header.size() & 0xff);
  out[9] = static_cast<std::uint8_t>(header.size() >> 8);
  std::copy(header.begin(), header.end(), out.begin() + kPreambleSize);

  auto *p = out.data() + kPreambleSize + header.size();
  for (float v : t.data()) {
    const auto bits = to_le(std::bit_cast<std::uint32_t>(v));
    std::memcpy(p, &bits, 4);
    p += 4;
  }
  return out;
}

Tensor decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPreambleSize)
    throw FormatError("file shorter than the npy preamble", bytes.size());
  for (std::size_t i = 0; i < std::size(kMagic); ++i)
    if (bytes[i] != kMagic[i]) throw FormatError("bad npy magic", i);
  if (bytes[6] != 1 || bytes[7] != 0)
    throw FormatError("unsupported npy version " + std::to_string(bytes[6]) +
                          "." + std::to_string(bytes[7]) + " (need 1.0)",
                      6);

  const std::size_t header_len = bytes[8] | (std::size_t{bytes[9]} << 8);
  const std::size_t payload_at = kPreambleSize + header_len;
  if (bytes.size() < payload_at)
    throw FormatError("header length " + std::to_string(header_len) +
                          " runs past end of file",
                      8);
  if (header_len == 0 || bytes[payload_at - 1] != '\n')
    throw FormatError("header is not newline-terminated", payload_at - 1);

  std::string_view text(reinterpret_cast<const char *>(bytes.data()) +
                            kPreambleSize,
                        header_len);
  for (std::size_t i = 0; i < text.size(); ++i)
    if (static_cast<unsigned char>(text[i]) > 0x7f)
      throw FormatError("non-ASCII byte in header", kPreambleSize + i);

  const auto header = HeaderParser(text, kPreambleSize).parse();

  if (*header.descr != "<f4")
    throw Error(ErrorKind::UnsupportedDtype,
                "dtype '" + *header.descr +
                    "' is not supported; only little-endian float32 ('<f4')");
  if (*header.fortran_order)
    throw FormatError("fortran_order=True is not supported", kPreambleSize);

  const auto &shape = *header.shape;
  if (shape.empty() || shape.size() > 3)
    throw Error(ErrorKind::Validation, "npy rank must be 1..3, got " +
                                           std::to_string(shape.size()));
  for (auto e : shape)
    if (e == 0)
      throw Error(ErrorKind::Validation,
                  "npy extents must be >= 1, got " + shape_string(shape));

  std::size_t count = 1;
  for (auto e : shape) {
    if (count > SIZE_MAX / 4 / e)
      throw FormatError("declared shape overflows", kPreambleSize);
    count *= e;
  }
  const std::size_t payload = bytes.size() - payload_at;
  if (payload != count * 4)
    throw FormatError("payload has " + std::to_string(payload) +
                          " bytes but shape " + shape_string(shape) +
                          " needs " + std::to_string(count * 4),
                      payload_at);

  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, bytes.data() + payload_at + 4 * i, 4);
    data[i] = std::bit_cast<float>(to_le(bits));
  }
  // Tensor's constructor rejects NaN/Inf and names the flat index.
  return Tensor(shape, std::move(data));
}

} // namespace addk::npy

namespace addk {

Tensor load_tensor(const std::filesystem::path &path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    throw Error(ErrorKind::NotFound, "file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::Io, "read failed: " + path.string());
  try {
    return npy::decode(bytes);
  } catch (const Error &e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_tensor(const Tensor &t, const std::filesystem::path &path) {
  const auto bytes = npy::encode(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

} // namespace addk
