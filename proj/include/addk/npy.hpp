#pragma once

#include "addk/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace addk::npy {

/// NPY v1.0 container restricted to little-endian float32, C order, rank 1..3.
///
/// Layout: "\x93NUMPY", version bytes {1,0}, u16 LE header length, an ASCII
/// dict literal "{'descr': '<f4', 'fortran_order': False, 'shape': (...), }"
/// space-padded so that the preamble plus header is a multiple of 64 bytes and
/// terminated by '\n', then the raw payload.
inline constexpr std::size_t kPreambleSize = 10;
inline constexpr std::size_t kAlignment = 64;

std::vector<std::uint8_t> encode(const Tensor &t);

/// Parses an in-memory NPY file. Throws FormatError (with byte offset),
/// Error(UnsupportedDtype) or Error(Validation).
Tensor decode(std::span<const std::uint8_t> bytes);

/// Header dict text for a shape, including padding and the trailing newline.
std::string header_for(const Tensor::Shape &shape);

} // namespace addk::npy

namespace addk {

Tensor load_tensor(const std::filesystem::path &path);
void save_tensor(const Tensor &t, const std::filesystem::path &path);

} // namespace addk
