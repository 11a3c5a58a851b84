// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace storyeval {

enum class ErrorCode
{
  Parse,               // malformed JSON / JSONL / asset input
  Integrity,           // well-formed input that violates a data invariant
  InvalidArgument,     // caller passed something outside an operation's domain
  InsufficientContext, // too few sentences for a metric to be defined
  Io,                  // filesystem failures
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

class ParseError : public Error
{
public:
  ParseError(const std::string& message, std::size_t byte_offset)
    : Error(ErrorCode::Parse, message), byte_offset_(byte_offset) {}

  // Offset into the input at which parsing failed.
  std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
  std::size_t byte_offset_;
};

} // namespace storyeval
