#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace addk {

/// Dense row-major float32 tensor of rank 1..3.
///
/// Every constructed Tensor satisfies: rank in {1,2,3}, all extents >= 1,
/// data length == product of extents, every value finite. Reductions
/// accumulate in double.
class Tensor {
public:
  using Shape = std::vector<std::size_t>;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<float> data);

  /// Convenience for literals: rows of a rank-2 tensor.
  static Tensor matrix(std::initializer_list<std::initializer_list<float>> rows);
  static Tensor filled(Shape shape, float value);

  const Shape &shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  float operator[](std::size_t flat) const { return data_[flat]; }
  float &operator[](std::size_t flat) { return data_[flat]; }

  float at(std::size_t row, std::size_t col) const;
  float &at(std::size_t row, std::size_t col);
  float at(std::size_t c, std::size_t row, std::size_t col) const;

  bool operator==(const Tensor &other) const = default;

private:
  Shape shape_;
  std::vector<float> data_;
};

std::string shape_string(const Tensor::Shape &shape);
std::size_t shape_volume(const Tensor::Shape &shape);

// Elementwise arithmetic. Binary operations require identical shapes.
Tensor operator+(const Tensor &a, const Tensor &b);
Tensor operator-(const Tensor &a, const Tensor &b);
Tensor operator*(const Tensor &a, double scale);
Tensor operator*(double scale, const Tensor &a);

float max_value(const Tensor &t);
float min_value(const Tensor &t);
double sum(const Tensor &t);

/// Index of the first maximal element.
std::size_t argmax(const Tensor &t);

/// C x H x W activations of one model's last convolutional layer.
class FeatureStack {
public:
  explicit FeatureStack(Tensor tensor);

  const Tensor &tensor() const noexcept { return tensor_; }
  std::size_t channels() const noexcept { return tensor_.extent(0); }
  std::size_t height() const noexcept { return tensor_.extent(1); }
  std::size_t width() const noexcept { return tensor_.extent(2); }

private:
  Tensor tensor_;
};

/// Length-C classifier weight row for one output class.
class ClassWeights {
public:
  explicit ClassWeights(Tensor tensor, int class_index = 0);

  const Tensor &tensor() const noexcept { return tensor_; }
  std::size_t channels() const noexcept { return tensor_.extent(0); }
  int class_index() const noexcept { return class_index_; }

private:
  Tensor tensor_;
  int class_index_;
};

} // namespace addk
