// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace storyeval {

/// Dense row-major float matrix. This is the in-memory form of every .f32
/// tensor in a store.
class Matrix
{
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0f) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<float> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const float> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<float> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  float operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  float& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const float> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

/// Little-endian IEEE-754 binary32, row-major, no header.
std::vector<unsigned char> encode_f32(const Matrix& m);
Matrix decode_f32(std::span<const unsigned char> bytes, std::size_t rows, std::size_t cols);

/// Reads a raw tensor file. The file length must equal rows*cols*4, and
/// when `expected_sha256` is nonempty the content digest must match.
Matrix read_tensor(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                   const std::string& expected_sha256 = {});

/// Writes atomically (temp file + rename) and returns the SHA-256 hex digest.
std::string write_tensor(const std::filesystem::path& path, const Matrix& m);

} // namespace storyeval
