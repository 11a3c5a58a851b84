// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/error.hpp"

namespace storyeval {

std::string_view to_string(ErrorCode code) noexcept
{
  switch (code) {
  case ErrorCode::Parse: return "parse error";
  case ErrorCode::Integrity: return "integrity error";
  case ErrorCode::InvalidArgument: return "invalid argument";
  case ErrorCode::InsufficientContext: return "insufficient context";
  case ErrorCode::Io: return "i/o error";
  }
  return "error";
}

} // namespace storyeval
