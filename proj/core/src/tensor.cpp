// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/tensor.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>

#include "storyeval/error.hpp"
#include "storyeval/hash.hpp"
#include "storyeval/store.hpp"

namespace storyeval {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> data)
  : rows_(rows), cols_(cols), data_(std::move(data))
{
  if (data_.size() != rows * cols)
    throw Error(ErrorCode::InvalidArgument,
                "matrix data has " + std::to_string(data_.size()) + " values, expected " +
                  std::to_string(rows * cols));
}

std::vector<unsigned char> encode_f32(const Matrix& m)
{
  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  std::vector<unsigned char> out;
  out.reserve(m.data().size() * 4);
  for (float v : m.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    out.push_back(static_cast<unsigned char>(bits & 0xFF));
    out.push_back(static_cast<unsigned char>((bits >> 8) & 0xFF));
    out.push_back(static_cast<unsigned char>((bits >> 16) & 0xFF));
    out.push_back(static_cast<unsigned char>((bits >> 24) & 0xFF));
  }
  return out;
}

Matrix decode_f32(std::span<const unsigned char> bytes, std::size_t rows, std::size_t cols)
{
  const std::size_t expected = rows * cols * 4;
  if (bytes.size() != expected)
    throw Error(ErrorCode::Integrity, "tensor size mismatch: expected " + std::to_string(expected) +
                                        " bytes, found " + std::to_string(bytes.size()));
  std::vector<float> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned char* p = bytes.data() + 4 * i;
    const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                               (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
    data[i] = std::bit_cast<float>(bits);
  }
  return Matrix(rows, cols, std::move(data));
}

Matrix read_tensor(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                   const std::string& expected_sha256)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open tensor " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t expected = rows * cols * 4;
  if (bytes.size() != expected)
    throw Error(ErrorCode::Integrity, path.string() + ": expected " + std::to_string(expected) +
                                        " bytes for " + std::to_string(rows) + "x" + std::to_string(cols) +
                                        " f32, found " + std::to_string(bytes.size()));
  if (!expected_sha256.empty()) {
    const std::string actual = sha256_hex(std::span<const unsigned char>(bytes));
    if (actual != expected_sha256)
      throw Error(ErrorCode::Integrity, path.string() + ": checksum mismatch (manifest " +
                                          expected_sha256 + ", file " + actual + ")");
  }
  return decode_f32(bytes, rows, cols);
}

std::string write_tensor(const std::filesystem::path& path, const Matrix& m)
{
  const auto bytes = encode_f32(m);
  const std::string_view view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  write_file_atomic(path, view, false);
  return sha256_hex(std::span<const unsigned char>(bytes));
}

} // namespace storyeval
