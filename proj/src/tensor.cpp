#include "addk/tensor.hpp"

#include "addk/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace addk {

const char *to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::Format: return "format error";
  case ErrorKind::Validation: return "validation error";
  case ErrorKind::UnsupportedDtype: return "unsupported dtype";
  case ErrorKind::Dimension: return "dimension error";
  case ErrorKind::NonPositiveMax: return "non-positive maximum";
  case ErrorKind::Parameter: return "parameter error";
  case ErrorKind::Io: return "I/O error";
  case ErrorKind::NotFound: return "file not found";
  }
  return "unknown error";
}

NonPositiveMaxError::NonPositiveMaxError(double maximum)
    : Error(ErrorKind::NonPositiveMax,
            [maximum] {
              std::ostringstream os;
              os << "map maximum is " << maximum
                 << "; max-normalization requires a positive maximum";
              return os.str();
            }()),
      maximum_(maximum) {}

std::string shape_string(const Tensor::Shape &shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t shape_volume(const Tensor::Shape &shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

namespace {

void check_shape(const Tensor::Shape &shape) {
  if (shape.empty() || shape.size() > 3)
    throw Error(ErrorKind::Validation,
                "tensor rank must be 1, 2 or 3, got " +
                    std::to_string(shape.size()));
  for (auto e : shape)
    if (e == 0)
      throw Error(ErrorKind::Validation,
                  "tensor extents must be >= 1, got " + shape_string(shape));
}

void check_same_shape(const Tensor &a, const Tensor &b, const char *op) {
  if (a.shape() != b.shape())
    throw Error(ErrorKind::Dimension, std::string(op) + ": shape mismatch " +
                                          shape_string(a.shape()) + " vs " +
                                          shape_string(b.shape()));
}

Tensor from_doubles(const Tensor::Shape &shape, const std::vector<double> &v) {
  std::vector<float> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(),
                 [](double x) { return static_cast<float>(x); });
  return Tensor(shape, std::move(out));
}

} // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_volume(shape_), 0.0f);
}

Tensor::Tensor(Shape shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_volume(shape_))
    throw Error(ErrorKind::Validation,
                "tensor of shape " + shape_string(shape_) + " needs " +
                    std::to_string(shape_volume(shape_)) + " values, got " +
                    std::to_string(data_.size()));
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw Error(ErrorKind::Validation,
                  "non-finite value at flat index " + std::to_string(i));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<float>> rows) {
  const std::size_t h = rows.size();
  const std::size_t w = h ? rows.begin()->size() : 0;
  std::vector<float> data;
  data.reserve(h * w);
  for (const auto &row : rows) {
    if (row.size() != w)
      throw Error(ErrorKind::Dimension, "ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({h, w}, std::move(data));
}

Tensor Tensor::filled(Shape shape, float value) {
  const auto n = shape_volume(shape);
  return Tensor(std::move(shape), std::vector<float>(n, value));
}

float Tensor::at(std::size_t row, std::size_t col) const {
  return data_[row * shape_[1] + col];
}

float &Tensor::at(std::size_t row, std::size_t col) {
  return data_[row * shape_[1] + col];
}

float Tensor::at(std::size_t c, std::size_t row, std::size_t col) const {
  return data_[(c * shape_[1] + row) * shape_[2] + col];
}

Tensor operator+(const Tensor &a, const Tensor &b) {
  check_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<double>(a[i]) + b[i];
  return from_doubles(a.shape(), out);
}

Tensor operator-(const Tensor &a, const Tensor &b) {
  check_same_shape(a, b, "subtract");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<double>(a[i]) - b[i];
  return from_doubles(a.shape(), out);
}

Tensor operator*(const Tensor &a, double scale) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * scale;
  return from_doubles(a.shape(), out);
}

Tensor operator*(double scale, const Tensor &a) { return a * scale; }

float max_value(const Tensor &t) {
  return *std::max_element(t.data().begin(), t.data().end());
}

float min_value(const Tensor &t) {
  return *std::min_element(t.data().begin(), t.data().end());
}

double sum(const Tensor &t) {
  double acc = 0.0;
  for (float v : t.data()) acc += v;
  return acc;
}

std::size_t argmax(const Tensor &t) {
  const auto d = t.data();
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) -
                                  d.begin());
}

FeatureStack::FeatureStack(Tensor tensor) : tensor_(std::move(tensor)) {
  if (tensor_.rank() != 3)
    throw Error(ErrorKind::Dimension,
                "feature stack must be [C, H, W], got " +
                    shape_string(tensor_.shape()));
}

ClassWeights::ClassWeights(Tensor tensor, int class_index)
    : tensor_(std::move(tensor)), class_index_(class_index) {
  if (tensor_.rank() != 1)
    throw Error(ErrorKind::Dimension, "class weights must be [C], got " +
                                          shape_string(tensor_.shape()));
  if (class_index < 0)
    throw Error(ErrorKind::Parameter, "class index must be non-negative, got " +
                                          std::to_string(class_index));
}

} // namespace addk
